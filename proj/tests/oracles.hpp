#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "facade_forge/completion/patchmatch.hpp"
#include "facade_forge/quilting/quilt.hpp"

// Scalar reference implementations written independently of the library code.
namespace facade_forge::testing {

inline int mirror(int i, int n) {
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
}

// Independent appearance term: explicit Gaussian with sigma = W/4, per-channel sums.
inline double appearance_oracle(const RasterImage& img, Point p, Offset v, int W) {
    const int r = W / 2;
    const double s = W / 4.0;
    double norm = 0.0, acc = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double g = std::exp(-(dx * dx + dy * dy) / (2 * s * s));
            norm += g;
            for (int c = 0; c < img.channels(); ++c) {
                const double a = img.at(mirror(p.x + dx, img.width()), mirror(p.y + dy, img.height()), c);
                const double b =
                    img.at(mirror(p.x + v.x + dx, img.width()), mirror(p.y + v.y + dy, img.height()), c);
                acc += g * std::abs(a - b) / img.channels();
            }
        }
    return acc / norm;
}

inline double oracle_energy(const CostModel& model) {
    const BinaryMask& m = model.void_mask();
    double total = 0.0;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            if (!m(x, y)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (int v = 0; v < m.height(); ++v)
                for (int u = 0; u < m.width(); ++u)
                    if (!m(u, v)) best = std::min(best, model({x, y}, Offset{u - x, v - y}));
            total += best;
        }
    return total;
}

inline double hole_accuracy(const LabelMap& got, const LabelMap& truth, const BinaryMask& hole) {
    std::size_t ok = 0;
    for (int y = 0; y < hole.height(); ++y)
        for (int x = 0; x < hole.width(); ++x)
            if (hole(x, y) && got(x, y) == truth(x, y)) ++ok;
    return double(ok) / hole.count();
}

inline std::vector<std::complex<double>> naive_dft(const RasterImage& gray) {
    const int w = gray.width(), h = gray.height();
    std::vector<std::complex<double>> f(w * h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) {
            std::complex<double> acc = 0.0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double ang = -2.0 * std::numbers::pi * (double(u * x) / w + double(v * y) / h);
                    acc += gray.at(x, y) * std::complex<double>(std::cos(ang), std::sin(ang));
                }
            f[v * w + u] = acc / double(w * h);
        }
    return f;
}

// Reference Harris written from scratch: explicit Sobel correlation with
// mirrored borders, 5x5 Gaussian window (sigma 1) normalized by hand.
inline std::vector<double> harris_oracle(const RasterImage& gray, double k, double omega) {
    const int w = gray.width(), h = gray.height();
    auto px = [&](int x, int y) { return gray.at(mirror(x, w), mirror(y, h)); };
    std::vector<double> gx(w * h), gy(w * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            gx[y * w + x] = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                            (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            gy[y * w + x] = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                            (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
        }
    double norm = 0.0;
    for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) norm += std::exp(-(i * i + j * j) / 2.0);
    std::vector<double> out(w * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double a = 0, b = 0, c = 0;
            for (int j = -2; j <= 2; ++j)
                for (int i = -2; i <= 2; ++i) {
                    const double g = std::exp(-(i * i + j * j) / 2.0) / norm;
                    const int q = mirror(y + j, h) * w + mirror(x + i, w);
                    a += g * gx[q] * gx[q];
                    b += g * gy[q] * gy[q];
                    c += g * gx[q] * gy[q];
                }
            const double r = a * b - c * c - k * (a + b) * (a + b);
            out[y * w + x] = omega * std::max(0.0, r);
        }
    return out;
}

inline RasterImage white_square() {
    RasterImage img(20, 20, 1, 0.0);
    for (int y = 5; y < 15; ++y)
        for (int x = 5; x < 15; ++x) img.at(x, y) = 1.0;
    return img;
}

// Gaussian-window SSIM computed one window at a time straight from the definition.
inline double ssim_oracle(const RasterImage& a, const RasterImage& b) {
    const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
    double gsum = 0.0;
    for (int j = -5; j <= 5; ++j)
        for (int i = -5; i <= 5; ++i) gsum += std::exp(-(i * i + j * j) / (2 * 1.5 * 1.5));
    double total = 0.0;
    int n = 0;
    for (int c = 0; c < a.channels(); ++c)
        for (int y = 5; y + 5 < a.height(); ++y)
            for (int x = 5; x + 5 < a.width(); ++x) {
                double mu_a = 0, mu_b = 0;
                for (int j = -5; j <= 5; ++j)
                    for (int i = -5; i <= 5; ++i) {
                        const double g = std::exp(-(i * i + j * j) / (2 * 1.5 * 1.5)) / gsum;
                        mu_a += g * 255 * a.at(x + i, y + j, c);
                        mu_b += g * 255 * b.at(x + i, y + j, c);
                    }
                double va = 0, vb = 0, cov = 0;
                for (int j = -5; j <= 5; ++j)
                    for (int i = -5; i <= 5; ++i) {
                        const double g = std::exp(-(i * i + j * j) / (2 * 1.5 * 1.5)) / gsum;
                        const double da = 255 * a.at(x + i, y + j, c) - mu_a;
                        const double db = 255 * b.at(x + i, y + j, c) - mu_b;
                        va += g * da * da;
                        vb += g * db * db;
                        cov += g * da * db;
                    }
                total += (2 * mu_a * mu_b + c1) * (2 * cov + c2) / ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
                ++n;
            }
    return total / n;
}

inline double brute_min_path(const ErrorSurface& s) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> cut(s.length);
    std::function<void(int, double)> walk = [&](int i, double acc) {
        if (i == s.length) {
            best = std::min(best, acc);
            return;
        }
        for (int j = 0; j < s.width; ++j) {
            if (i > 0 && std::abs(j - cut[i - 1]) > 1) continue;
            cut[i] = j;
            walk(i + 1, acc + s.at(i, j));
        }
    };
    walk(0, 0.0);
    return best;
}

// Canvas as it stood right before placement k, rebuilt from the plan.
inline RasterImage canvas_before(const QuiltPlan& plan, const RasterImage& source, std::size_t k) {
    QuiltPlan partial = plan;
    partial.placements.resize(k);
    partial.output_size = plan.canvas_size;
    RasterImage canvas(plan.canvas_size.width, plan.canvas_size.height, source.channels());
    if (k == 0) return canvas;
    const auto src = trace_sources(partial);
    for (int y = 0; y < canvas.height(); ++y)
        for (int x = 0; x < canvas.width(); ++x) {
            const Point s = src[y * canvas.width() + x];
            if (s.x >= 0)
                for (int c = 0; c < canvas.channels(); ++c) canvas.at(x, y, c) = source.at(s.x, s.y, c);
        }
    return canvas;
}

}  // namespace facade_forge::testing
