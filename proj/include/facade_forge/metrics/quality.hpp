#pragma once

#include <limits>

#include "facade_forge/core/filter.hpp"

namespace facade_forge {

/// PSNR in dB on the 0-255 scale; +inf for identical inputs.
inline double psnr(const RasterImage& a, const RasterImage& b) {
    require_same_size(a.size(), b.size(), "psnr");
    if (a.channels() != b.channels()) fail(ErrorKind::InvalidInput, "channel count mismatch");
    auto x = a.samples();
    auto y = b.samples();
    double se = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = 255.0 * (x[i] - y[i]);
        se += d * d;
    }
    const double mse = se / static_cast<double>(x.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

/// Mean SSIM over all fully-contained Gaussian windows, averaged over channels.
inline double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& p = {}) {
    require_same_size(a.size(), b.size(), "ssim");
    if (a.channels() != b.channels()) fail(ErrorKind::InvalidInput, "channel count mismatch");
    if (p.window < 1 || p.window % 2 == 0) fail(ErrorKind::InvalidParameter, "ssim window must be odd");
    if (a.width() < p.window || a.height() < p.window)
        fail(ErrorKind::InvalidInput, "image smaller than the ssim window");
    const GaussianKernel g = gaussian_kernel(p.sigma, p.window / 2);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    const double s = p.dynamic_range;
    const int r = g.radius;
    double total = 0.0;
    std::size_t windows = 0;
    for (int c = 0; c < a.channels(); ++c)
        for (int y = r; y < a.height() - r; ++y)
            for (int x = r; x < a.width() - r; ++x) {
                double ma = 0, mb = 0, aa = 0, bb = 0, ab = 0;
                for (int j = -r; j <= r; ++j)
                    for (int i = -r; i <= r; ++i) {
                        const double w = g.at(i, j);
                        const double u = s * a.at(x + i, y + j, c), v = s * b.at(x + i, y + j, c);
                        ma += w * u;
                        mb += w * v;
                        aa += w * u * u;
                        bb += w * v * v;
                        ab += w * u * v;
                    }
                const double va = aa - ma * ma, vb = bb - mb * mb, cov = ab - ma * mb;
                total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                ++windows;
            }
    return total / static_cast<double>(windows);
}

}  // namespace facade_forge
