#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "facade_forge/core/filter.hpp"
#include "facade_forge/core/palette.hpp"
#include "facade_forge/core/png_io.hpp"
#include "facade_forge/core/pyramid.hpp"
#include "test_support.hpp"

using namespace facade_forge;
using facade_forge::testing::random_byte_image;
using facade_forge::testing::random_image;
using facade_forge::testing::TempDir;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected facade_forge::Error";
    return ErrorKind::Io;
}

// Brute-force oracle: explicit mirror-padded copy, then a flipped-kernel sum.
RasterImage convolve_oracle(const RasterImage& img, const GaussianKernel& k) {
    const int r = k.radius, w = img.width(), h = img.height();
    auto mirror = [](int i, int n) {
        while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
        return i;
    };
    std::vector<double> padded((w + 2 * r) * (h + 2 * r));
    RasterImage out(w, h, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = -r; y < h + r; ++y)
            for (int x = -r; x < w + r; ++x)
                padded[(y + r) * (w + 2 * r) + (x + r)] = img.at(mirror(x, w), mirror(y, h), c);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int j = -r; j <= r; ++j)
                    for (int i = -r; i <= r; ++i)
                        acc += k.at(-i, -j) * padded[(y + j + r) * (w + 2 * r) + (x + i + r)];
                out.at(x, y, c) = acc;
            }
    }
    return out;
}

}  // namespace

TEST(Grayscale, WhiteIsOne) {
    RasterImage white(5, 4, 3, 1.0);
    const RasterImage g = to_grayscale(white);
    for (double v : g.samples()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Grayscale, PureRed) {
    RasterImage red(3, 3, 3, 0.0);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) red.at(x, y, 0) = 1.0;
    const RasterImage g = to_grayscale(red);
    for (double v : g.samples()) EXPECT_DOUBLE_EQ(v, 0.299);
}

TEST(Grayscale, MatchesPerPixelLoop) {
    const RasterImage img = random_image(8, 8, 3, 11);
    const RasterImage g = to_grayscale(img);
    ASSERT_EQ(g.channels(), 1);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const double expected = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
            EXPECT_EQ(g.at(x, y), expected);
        }
}

TEST(Grayscale, RejectsSingleChannel) {
    EXPECT_EQ(kind_of([] { to_grayscale(RasterImage(2, 2, 1)); }), ErrorKind::InvalidInput);
}

TEST(GaussianKernel, CenterDensityAtSigmaOne) {
    EXPECT_NEAR(gaussian_density(1.0, 0, 0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(gaussian_density(1.0, 0, 0), 0.15915, 1e-5);
    EXPECT_EQ(gaussian_kernel(1.0).radius, 3);
}

TEST(GaussianKernel, PointSymmetric) {
    for (double sigma : {0.5, 1.0, 1.7, 3.0}) {
        const GaussianKernel k = gaussian_kernel(sigma);
        for (int j = -k.radius; j <= k.radius; ++j)
            for (int i = -k.radius; i <= k.radius; ++i) EXPECT_EQ(k.at(i, j), k.at(-i, -j));
    }
}

TEST(GaussianKernel, NormalizedSum) {
    const GaussianKernel k = gaussian_kernel(2.0);
    double sum = 0.0;
    for (double w : k.weights) {
        EXPECT_GE(w, 0.0);
        sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(GaussianKernel, RejectsNonPositiveSigma) {
    EXPECT_EQ(kind_of([] { gaussian_kernel(0.0); }), ErrorKind::InvalidParameter);
    EXPECT_EQ(kind_of([] { gaussian_kernel(-1.0); }), ErrorKind::InvalidParameter);
}

TEST(Convolve, ConstantImageIsFixed) {
    RasterImage img(14, 12, 3, 0.37);
    const RasterImage out = convolve(img, gaussian_kernel(1.5));
    for (double v : out.samples()) EXPECT_NEAR(v, 0.37, 1e-12);
}

TEST(Convolve, ImpulseReproducesKernel) {
    RasterImage img(15, 15, 1, 0.0);
    img.at(7, 7) = 1.0;
    const GaussianKernel k = gaussian_kernel(1.0);
    const RasterImage out = convolve(img, k);
    for (int j = -k.radius; j <= k.radius; ++j)
        for (int i = -k.radius; i <= k.radius; ++i) EXPECT_NEAR(out.at(7 + i, 7 + j), k.at(i, j), 1e-15);
    EXPECT_EQ(out.at(0, 0), 0.0);
}

TEST(Convolve, MatchesBruteForceOracle) {
    const RasterImage img = random_image(16, 16, 3, 5);
    for (double sigma : {0.8, 1.0, 2.0}) {
        const GaussianKernel k = gaussian_kernel(sigma);
        const RasterImage fast = convolve(img, k);
        const RasterImage slow = convolve_oracle(img, k);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < fast.samples().size(); ++i)
            max_diff = std::max(max_diff, std::abs(fast.samples()[i] - slow.samples()[i]));
        EXPECT_LT(max_diff, 1e-6) << "sigma " << sigma;
    }
}

TEST(Convolve, Linear) {
    const RasterImage a = random_image(12, 12, 1, 1), b = random_image(12, 12, 1, 2);
    RasterImage combo(12, 12, 1);
    for (std::size_t i = 0; i < combo.samples().size(); ++i)
        combo.samples()[i] = 2.0 * a.samples()[i] - 0.5 * b.samples()[i];
    const auto k = gaussian_kernel(1.2);
    const RasterImage ca = convolve(a, k), cb = convolve(b, k), cc = convolve(combo, k);
    for (std::size_t i = 0; i < cc.samples().size(); ++i)
        EXPECT_NEAR(cc.samples()[i], 2.0 * ca.samples()[i] - 0.5 * cb.samples()[i], 1e-12);
}

TEST(Convolve, PreservesMeanWithConstantBorderBand) {
    const auto k = gaussian_kernel(1.5);
    RasterImage img = random_image(24, 20, 1, 9);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            // Mirrored reads reach `radius` samples in, so the band is radius + 1 wide.
            if (x <= k.radius || y <= k.radius || x >= img.width() - k.radius - 1 ||
                y >= img.height() - k.radius - 1)
                img.at(x, y) = 0.25;
    auto mean = [](const RasterImage& m) {
        double s = 0.0;
        for (double v : m.samples()) s += v;
        return s / static_cast<double>(m.samples().size());
    };
    EXPECT_NEAR(mean(convolve(img, k)), mean(img), 1e-6);
}

TEST(Convolve, RejectsKernelLargerThanImage) {
    EXPECT_EQ(kind_of([] { convolve(RasterImage(5, 5, 1), gaussian_kernel(1.0)); }),
              ErrorKind::InvalidParameter);
}

TEST(Palette, DefaultColorsAreDistinctAndNamed) {
    const Palette p = facade_palette();
    ASSERT_EQ(p.size(), 6u);
    EXPECT_EQ(p.at(classes::window).color, (Rgb8{0, 0, 255}));
    EXPECT_EQ(p.at(classes::wall).color, (Rgb8{255, 255, 0}));
    EXPECT_EQ(p.at(classes::door).color, (Rgb8{255, 128, 0}));
    EXPECT_EQ(p.at(classes::vegetation).color, (Rgb8{0, 255, 0}));
    EXPECT_EQ(p.at(classes::cornice).color, (Rgb8{255, 0, 0}));
    EXPECT_EQ(p.at(classes::background).color, (Rgb8{0, 0, 0}));
    EXPECT_EQ(p.id_of("vegetation"), classes::vegetation);
}

TEST(Palette, RejectsDuplicateColors) {
    EXPECT_EQ(kind_of([] { Palette({{0, "a", {1, 2, 3}}, {1, "b", {1, 2, 3}}}); }), ErrorKind::InvalidInput);
}

TEST(SnapToPalette, PaletteColorsAreFixedPoints) {
    const Palette p = facade_palette();
    LabelMap labels(6, 1, p, classes::wall);
    for (int x = 0; x < 6; ++x) labels.set(x, 0, static_cast<ClassId>(x));
    EXPECT_EQ(snap_to_palette(render(labels), p), labels);
}

TEST(SnapToPalette, TieGoesToLowestId) {
    const Palette p({{0, "black", {0, 0, 0}}, {2, "white", {255, 255, 255}}});
    RasterImage mid(1, 1, 3, 0.5);
    EXPECT_EQ(snap_to_palette(mid, p)(0, 0), 0);
}

TEST(SnapToPalette, IdempotentOnRandomImages) {
    const Palette p = facade_palette();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LabelMap once = snap_to_palette(random_image(9, 7, 3, seed), p);
        EXPECT_EQ(snap_to_palette(render(once), p), once);
        for (ClassId id : once.ids()) EXPECT_TRUE(p.contains(id));
    }
}

TEST(Pyramid, HalvingChain256) {
    RasterImage img(256, 256, 3);
    BinaryMask mask(256, 256);
    const ImagePyramid pyr = build_pyramid(img, mask, 32);
    ASSERT_EQ(pyr.size(), 4u);
    const int expected[] = {32, 64, 128, 256};
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(pyr.levels[i].image.width(), expected[i]);
        EXPECT_EQ(pyr.levels[i].mask.height(), expected[i]);
        EXPECT_TRUE(pyr.levels[i].mask.none());
    }
}

TEST(Pyramid, CeilHalvingOnOddSizes) {
    RasterImage img(133, 77, 1);
    const ImagePyramid pyr = build_pyramid(img, BinaryMask(133, 77), 16);
    // 133x77 -> 67x39 -> 34x20 ; 17x10 would drop below 16.
    ASSERT_EQ(pyr.size(), 3u);
    EXPECT_EQ(pyr.levels[0].image.size(), (Size{34, 20}));
    EXPECT_EQ(pyr.levels[1].image.size(), (Size{67, 39}));
    for (std::size_t i = 0; i + 1 < pyr.size(); ++i) {
        EXPECT_EQ(pyr.levels[i].image.width(), half_up(pyr.levels[i + 1].image.width()));
        EXPECT_EQ(pyr.levels[i].image.height(), half_up(pyr.levels[i + 1].image.height()));
    }
}

TEST(Pyramid, SingleVoidPixelFollowsAncestors) {
    BinaryMask mask(128, 128);
    mask.set(77, 41, true);
    const ImagePyramid pyr = build_pyramid(RasterImage(128, 128, 1), mask, 32);
    ASSERT_EQ(pyr.size(), 3u);
    int x = 77, y = 41;
    for (int i = static_cast<int>(pyr.size()) - 1; i >= 0; --i) {
        EXPECT_EQ(pyr.levels[i].mask.count(), 1u);
        EXPECT_TRUE(pyr.levels[i].mask(x, y));
        x /= 2;
        y /= 2;
    }
}

TEST(Pyramid, SmallInputGivesSingleLevel) {
    const ImagePyramid pyr = build_pyramid(RasterImage(20, 40, 1), BinaryMask(20, 40), 32);
    EXPECT_EQ(pyr.size(), 1u);
    EXPECT_EQ(kind_of([] { build_pyramid(RasterImage(20, 20, 1), BinaryMask(20, 20), 4); }),
              ErrorKind::InvalidParameter);
}

TEST(PngIo, RoundTripRgbAndGray) {
    TempDir dir("png");
    for (int channels : {1, 3}) {
        const RasterImage img = random_byte_image(13, 9, channels, 3 + channels);
        const auto path = dir / ("img" + std::to_string(channels) + ".png");
        save_png(path, img);
        EXPECT_EQ(load_png(path), img);
    }
}

TEST(PngIo, MissingFileIsNotFound) {
    EXPECT_EQ(kind_of([] { load_png("/nonexistent/definitely/missing.png"); }), ErrorKind::NotFound);
}

TEST(PngIo, GarbageIsMalformed) {
    TempDir dir("png");
    write_text_atomic(dir / "bad.png", "this is not a png");
    EXPECT_EQ(kind_of([&] { load_png(dir / "bad.png"); }), ErrorKind::MalformedFile);
}

TEST(PngIo, SixteenBitIsUnsupported) {
    TempDir dir("png");
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = 4;
    image.height = 4;
    image.format = PNG_FORMAT_LINEAR_Y;
    std::vector<png_uint_16> pixels(16, 30000);
    const auto path = dir / "deep.png";
    ASSERT_TRUE(png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr));
    EXPECT_EQ(kind_of([&] { load_png(path); }), ErrorKind::UnsupportedFormat);
}

TEST(PngIo, LabelMapRoundTripWithSidecar) {
    TempDir dir("png");
    const Palette p = facade_palette();
    LabelMap labels(7, 5, p, classes::wall);
    labels.set(1, 1, classes::window);
    labels.set(3, 4, classes::vegetation);
    labels.set(6, 0, classes::background);
    const auto path = dir / "labels.png";
    save_label_map(path, labels);
    EXPECT_TRUE(std::filesystem::exists(dir / "labels.palette.json"));
    EXPECT_EQ(load_label_map(path), labels);
    // Paletted PNGs decode to the canonical colors.
    EXPECT_EQ(load_png(path), render(labels));
}

TEST(PngIo, MaskRoundTrip) {
    TempDir dir("png");
    BinaryMask m(6, 4);
    m.set(2, 1, true);
    m.set(5, 3, true);
    save_mask_png(dir / "m.png", m);
    EXPECT_EQ(load_mask_png(dir / "m.png"), m);
}
