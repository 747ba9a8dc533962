#include <gtest/gtest.h>

#include <fstream>

#include "facade_forge/synthesis/backend.hpp"
#include "test_support.hpp"

using namespace facade_forge;
using facade_forge::testing::random_byte_image;
using facade_forge::testing::random_facade;
using facade_forge::testing::TempDir;
using facade_forge::testing::window_grid;

namespace {

fs::path write_script(const TempDir& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream(p) << "#!/bin/sh\n" << body;
    fs::permissions(p, fs::perms::owner_all, fs::perm_options::replace);
    return p;
}

// Copies --style to --out, so the style image must match the content size.
constexpr const char* copy_style = R"(
while [ $# -gt 0 ]; do
  case "$1" in
    --style) style="$2"; shift 2 ;;
    --out) out="$2"; shift 2 ;;
    *) shift 2 ;;
  esac
done
echo "copying $style"
cp "$style" "$out"
)";

SynthesisRequest make_request(int w, int h, std::uint64_t seed) {
    SynthesisRequest req;
    req.content_labels = random_facade(w, h, seed);
    req.style_labels = random_facade(w, h, seed + 1);
    req.style_image = random_byte_image(w, h, 3, seed + 2);
    req.seed = seed;
    return req;
}

}  // namespace

TEST(Synthesis, BackendNamesRoundTrip) {
    for (BackendKind k : {BackendKind::ExternalCommand, BackendKind::QuiltOnly, BackendKind::Passthrough})
        EXPECT_EQ(parse_backend(to_string(k)), k);
    EXPECT_THROW(parse_backend("gan"), Error);
}

TEST(Synthesis, PassthroughRendersLabels) {
    const auto req = make_request(20, 16, 3);
    const auto r = synthesize(req, BackendKind::Passthrough);
    EXPECT_EQ(r.image, render(req.content_labels));
}

TEST(Synthesis, ExternalCommandOutputIsReadBack) {
    TempDir dir("ext_ok");
    BackendOptions opt;
    opt.command = write_script(dir, "copy.sh", copy_style).string();
    opt.workspace_root = dir.path();
    const auto req = make_request(24, 18, 5);
    const auto r = synthesize(req, BackendKind::ExternalCommand, opt);
    EXPECT_EQ(r.image, req.style_image);
    EXPECT_NE(r.diagnostics.find("copying"), std::string::npos);
    EXPECT_FALSE(r.workspace.has_value());
    // The workspace is removed afterwards.
    for (const auto& e : fs::directory_iterator(dir.path())) EXPECT_FALSE(e.is_directory()) << e.path();
}

TEST(Synthesis, ExternalCommandKeepsWorkspaceOnRequest) {
    TempDir dir("ext_keep");
    BackendOptions opt;
    opt.command = write_script(dir, "copy.sh", copy_style).string();
    opt.workspace_root = dir.path();
    opt.keep_workspace = true;
    const auto r = synthesize(make_request(16, 16, 9), BackendKind::ExternalCommand, opt);
    ASSERT_TRUE(r.workspace.has_value());
    for (const char* f : {"content_labels.png", "style.png", "style_labels.png", "out.png", "backend.log"})
        EXPECT_TRUE(fs::exists(*r.workspace / f)) << f;
    EXPECT_EQ(load_label_map(*r.workspace / "content_labels.png"), make_request(16, 16, 9).content_labels);
}

TEST(Synthesis, ExternalCommandFailureCarriesDiagnostics) {
    TempDir dir("ext_fail");
    BackendOptions opt;
    opt.command = write_script(dir, "fail.sh", "echo 'model weights missing' >&2\nexit 7\n").string();
    opt.workspace_root = dir.path();
    try {
        synthesize(make_request(16, 16, 1), BackendKind::ExternalCommand, opt);
        FAIL() << "expected a backend failure";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BackendFailure);
        EXPECT_NE(std::string(e.what()).find("status 7"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("model weights missing"), std::string::npos) << e.what();
    }
}

TEST(Synthesis, ExternalCommandMissingOutput) {
    TempDir dir("ext_none");
    BackendOptions opt;
    opt.command = write_script(dir, "noop.sh", "exit 0\n").string();
    opt.workspace_root = dir.path();
    try {
        synthesize(make_request(16, 16, 1), BackendKind::ExternalCommand, opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BackendFailure);
    }
}

TEST(Synthesis, ExternalCommandWrongSize) {
    TempDir dir("ext_size");
    BackendOptions opt;
    opt.command = write_script(dir, "copy.sh", copy_style).string();
    opt.workspace_root = dir.path();
    auto req = make_request(16, 16, 2);
    req.style_image = random_byte_image(20, 12, 3, 4);
    req.style_labels = random_facade(20, 12, 4);
    try {
        synthesize(req, BackendKind::ExternalCommand, opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BackendFailure);
        EXPECT_NE(std::string(e.what()).find("20x12"), std::string::npos) << e.what();
    }
}

TEST(Synthesis, ExternalCommandNotFound) {
    BackendOptions opt;
    opt.command = "/nonexistent/facade-backend";
    EXPECT_THROW(synthesize(make_request(16, 16, 1), BackendKind::ExternalCommand, opt), Error);
    opt.command.clear();
    EXPECT_THROW(synthesize(make_request(16, 16, 1), BackendKind::ExternalCommand, opt), Error);
}

TEST(Synthesis, QuiltOnlyCopiesEachClassFromItsOwnClass) {
    SynthesisRequest req;
    req.content_labels = window_grid(60, 48, 12, 12, 5, 6, 3, 2);
    req.style_labels = window_grid(64, 64, 16, 16, 6, 7);
    req.style_image = random_byte_image(64, 64, 3, 11);
    req.seed = 17;
    BackendOptions opt;
    opt.quilt.patch_n = 8;
    opt.quilt.overlap = 2;
    const auto r = synthesize(req, BackendKind::QuiltOnly, opt);
    ASSERT_EQ(r.sources.size(), 2u);
    std::size_t audited = 0;
    for (const ClassSource& s : r.sources) {
        ASSERT_TRUE(s.exemplar && s.plan);
        const auto src = trace_sources(*s.plan);
        for (int y = 0; y < req.content_labels.height(); ++y)
            for (int x = 0; x < req.content_labels.width(); ++x) {
                if (req.content_labels(x, y) != s.id) continue;
                const Point local{x - s.target_box.x, y - s.target_box.y};
                const Point e = src[static_cast<std::size_t>(local.y) * s.plan->output_size.width + local.x];
                const Point q{s.exemplar->x + e.x, s.exemplar->y + e.y};
                ASSERT_EQ(req.style_labels(q.x, q.y), s.id);
                for (int c = 0; c < 3; ++c) ASSERT_EQ(r.image.at(x, y, c), req.style_image.at(q.x, q.y, c));
                ++audited;
            }
    }
    EXPECT_EQ(audited, req.content_labels.width() * std::size_t(req.content_labels.height()));
}

TEST(Synthesis, QuiltOnlyFallsBackToMeanColor) {
    SynthesisRequest req;
    req.content_labels = LabelMap(20, 20, facade_palette(), classes::wall);
    for (int y = 5; y < 10; ++y)
        for (int x = 5; x < 10; ++x) req.content_labels.set(x, y, classes::door);
    req.style_labels = LabelMap(30, 30, facade_palette(), classes::wall);
    req.style_image = random_byte_image(30, 30, 3, 8);
    const auto r = synthesize(req, BackendKind::QuiltOnly);
    EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "mean-color-fallback:door"), r.flags.end());
    EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "patch-size-reduced:wall:30"), r.flags.end());
    double mean = 0.0;
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 30; ++x) mean += req.style_image.at(x, y, 0);
    EXPECT_NEAR(r.image.at(7, 7, 0), mean / 900.0, 1e-12);
}

TEST(Synthesis, QuiltOnlyIsDeterministic) {
    SynthesisRequest req;
    req.content_labels = random_facade(40, 32, 21);
    req.style_labels = window_grid(64, 64, 32, 32, 14, 14);
    req.style_image = random_byte_image(64, 64, 3, 23);
    req.seed = 21;
    BackendOptions opt;
    opt.quilt.patch_n = 6;
    opt.quilt.overlap = 2;
    const auto a = synthesize(req, BackendKind::QuiltOnly, opt);
    const auto b = synthesize(req, BackendKind::QuiltOnly, opt);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.flags, b.flags);
    auto other = req;
    other.seed = 22;
    EXPECT_NE(synthesize(other, BackendKind::QuiltOnly, opt).image, a.image);
}

TEST(Synthesis, RequestValidation) {
    auto req = make_request(16, 16, 1);
    req.style_labels = random_facade(15, 16, 1);
    EXPECT_THROW(synthesize(req, BackendKind::QuiltOnly), Error);
}
