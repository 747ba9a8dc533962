#pragma once

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "facade_forge/core/filter.hpp"
#include "facade_forge/core/png_io.hpp"
#include "facade_forge/quilting/fallback.hpp"

extern char** environ;

namespace facade_forge {

struct SynthesisRequest {
    LabelMap content_labels;
    RasterImage style_image;
    LabelMap style_labels;
    std::uint64_t seed = 0;

    void validate() const {
        require_same_size(style_image.size(), style_labels.size(), "style image and style labels");
        if (content_labels.width() < 1 || content_labels.height() < 1)
            fail(ErrorKind::InvalidInput, "content labels are empty");
    }
};

enum class BackendKind { ExternalCommand, QuiltOnly, Passthrough };

inline std::string to_string(BackendKind k) {
    switch (k) {
        case BackendKind::ExternalCommand: return "external-command";
        case BackendKind::QuiltOnly: return "quilt-only";
        case BackendKind::Passthrough: return "passthrough";
    }
    return "unknown";
}

inline BackendKind parse_backend(const std::string& s) {
    if (s == "external-command" || s == "external") return BackendKind::ExternalCommand;
    if (s == "quilt-only" || s == "quilt") return BackendKind::QuiltOnly;
    if (s == "passthrough") return BackendKind::Passthrough;
    fail(ErrorKind::InvalidParameter, "unknown backend '" + s + "'");
}

struct BackendOptions {
    /// Executable for the external backend (looked up on PATH).
    std::string command;
    /// Extra arguments placed before the standard flags.
    std::vector<std::string> extra_args;
    bool keep_workspace = false;
    /// Parent directory for workspaces; empty means the system temp dir.
    fs::path workspace_root;
    QuiltParams quilt;
};

/// Where quilt-only took each class from.
struct ClassSource {
    ClassId id = 0;
    std::optional<Rect> exemplar;  // square in style coordinates; empty when mean color was used
    Rect target_box;
    std::optional<QuiltPlan> plan;
};

struct SynthesisResult {
    RasterImage image;
    BackendKind backend = BackendKind::Passthrough;
    std::vector<std::string> flags;
    std::vector<ClassSource> sources;
    std::optional<fs::path> workspace;
    std::string diagnostics;
};

namespace detail {

inline fs::path make_workspace(const fs::path& root) {
    const fs::path base = root.empty() ? fs::temp_directory_path() : root;
    fs::create_directories(base);
    std::string tmpl = (base / "facade-forge-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) fail(ErrorKind::Io, "cannot create workspace under " + base.string());
    return tmpl;
}

inline std::string read_tail(const fs::path& p, std::size_t max_bytes = 4096) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string s = ss.str();
    return s.size() > max_bytes ? s.substr(s.size() - max_bytes) : s;
}

/// Runs argv[0] (PATH lookup) with stdout and stderr sent to `log`. Returns the exit status.
inline int run_process(const std::vector<std::string>& argv, const fs::path& log) {
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 1, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_adddup2(&actions, 1, 2);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) fail(ErrorKind::BackendFailure, "cannot start '" + argv[0] + "': " + std::strerror(rc));
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0)
        if (errno != EINTR) fail(ErrorKind::BackendFailure, "waitpid failed");
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

inline std::uint64_t class_seed(std::uint64_t seed, ClassId id) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (id + 1ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

inline SynthesisResult synthesize_passthrough(const SynthesisRequest& req) {
    SynthesisResult r;
    r.backend = BackendKind::Passthrough;
    r.image = render(req.content_labels);
    return r;
}

/// Each content class is filled with texture quilted from the largest square
/// of that class in the style labels.
inline SynthesisResult synthesize_quilt_only(const SynthesisRequest& req, const QuiltParams& quilt_params) {
    req.validate();
    SynthesisResult r;
    r.backend = BackendKind::QuiltOnly;
    const RasterImage style = to_rgb(req.style_image);
    r.image = RasterImage(req.content_labels.width(), req.content_labels.height(), 3);
    for (const PaletteEntry& entry : req.content_labels.palette().entries()) {
        const ClassId id = entry.id;
        const BinaryMask target = mask_of_class(req.content_labels, id);
        if (target.none()) continue;
        ClassSource src;
        src.id = id;
        src.target_box = bounding_box(target);
        const auto square = largest_class_square(req.style_labels, id);
        if (!square) {
            double mean[3] = {0, 0, 0};
            for (int y = 0; y < style.height(); ++y)
                for (int x = 0; x < style.width(); ++x)
                    for (int c = 0; c < 3; ++c) mean[c] += style.at(x, y, c);
            for (double& m : mean) m /= static_cast<double>(style.width()) * style.height();
            for (int y = 0; y < target.height(); ++y)
                for (int x = 0; x < target.width(); ++x)
                    if (target(x, y))
                        for (int c = 0; c < 3; ++c) r.image.at(x, y, c) = mean[c];
            r.flags.push_back("mean-color-fallback:" + entry.name);
            r.sources.push_back(std::move(src));
            continue;
        }
        src.exemplar = square;
        QuiltParams qp = quilt_params;
        qp.patch_n = std::min(qp.patch_n, square->width);
        qp.overlap = std::min(qp.overlap, qp.patch_n - 1);
        qp.seed = detail::class_seed(req.seed, id);
        if (qp.patch_n < quilt_params.patch_n)
            r.flags.push_back("patch-size-reduced:" + entry.name + ":" + std::to_string(qp.patch_n));
        const RasterImage exemplar = crop(style, *square);
        QuiltResult q = quilt(exemplar, {src.target_box.width, src.target_box.height}, qp);
        for (int y = 0; y < target.height(); ++y)
            for (int x = 0; x < target.width(); ++x)
                if (target(x, y))
                    for (int c = 0; c < 3; ++c)
                        r.image.at(x, y, c) = q.image.at(x - src.target_box.x, y - src.target_box.y, c);
        src.plan = std::move(q.plan);
        r.sources.push_back(std::move(src));
    }
    return r;
}

/// Runs `<cmd> --content-labels <png> --style <png> --style-labels <png> --seed <u64> --out <png>`
/// in a fresh workspace and reads back the output PNG.
inline SynthesisResult synthesize_external(const SynthesisRequest& req, const BackendOptions& opt) {
    req.validate();
    if (opt.command.empty()) fail(ErrorKind::InvalidParameter, "external backend needs a command");
    SynthesisResult r;
    r.backend = BackendKind::ExternalCommand;
    const fs::path ws = detail::make_workspace(opt.workspace_root);
    struct Cleanup {
        fs::path dir;
        bool keep;
        ~Cleanup() {
            std::error_code ec;
            if (!keep) fs::remove_all(dir, ec);
        }
    } cleanup{ws, opt.keep_workspace};
    if (opt.keep_workspace) r.workspace = ws;

    const fs::path content = ws / "content_labels.png", style = ws / "style.png", style_labels = ws / "style_labels.png",
                   out = ws / "out.png", log = ws / "backend.log";
    save_label_map(content, req.content_labels);
    save_png(style, req.style_image);
    save_label_map(style_labels, req.style_labels);
    std::vector<std::string> argv{opt.command};
    argv.insert(argv.end(), opt.extra_args.begin(), opt.extra_args.end());
    for (auto [flag, value] : {std::pair<std::string, std::string>{"--content-labels", content.string()},
                               {"--style", style.string()},
                               {"--style-labels", style_labels.string()},
                               {"--seed", std::to_string(req.seed)},
                               {"--out", out.string()}}) {
        argv.push_back(flag);
        argv.push_back(value);
    }
    const int status = detail::run_process(argv, log);
    r.diagnostics = detail::read_tail(log);
    if (status != 0)
        fail(ErrorKind::BackendFailure,
             "backend exited with status " + std::to_string(status) + (r.diagnostics.empty() ? "" : ": " + r.diagnostics));
    std::error_code ec;
    if (!fs::exists(out, ec)) fail(ErrorKind::BackendFailure, "backend produced no output image");
    RasterImage img;
    try {
        img = load_png(out);
    } catch (const Error& e) {
        fail(ErrorKind::BackendFailure, std::string("backend output unreadable: ") + e.what());
    }
    if (img.width() != req.content_labels.width() || img.height() != req.content_labels.height())
        fail(ErrorKind::BackendFailure, "backend output is " + std::to_string(img.width()) + "x" +
                                            std::to_string(img.height()) + ", expected " +
                                            std::to_string(req.content_labels.width()) + "x" +
                                            std::to_string(req.content_labels.height()));
    r.image = to_rgb(img);
    return r;
}

inline SynthesisResult synthesize(const SynthesisRequest& req, BackendKind backend, const BackendOptions& opt = {}) {
    switch (backend) {
        case BackendKind::ExternalCommand: return synthesize_external(req, opt);
        case BackendKind::QuiltOnly: return synthesize_quilt_only(req, opt.quilt);
        case BackendKind::Passthrough: return synthesize_passthrough(req);
    }
    fail(ErrorKind::InvalidParameter, "unknown backend");
}

}  // namespace facade_forge
