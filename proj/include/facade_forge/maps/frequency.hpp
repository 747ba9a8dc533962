#pragma once

#include "facade_forge/core/filter.hpp"

namespace facade_forge {

struct FrequencyPair {
    RasterImage low;
    RasterImage high;  // signed
};

/// Splits the grayscale image into a Gaussian low-pass part and the residual.
inline FrequencyPair frequency_maps(const RasterImage& img, double sigma = 3.0) {
    const RasterImage gray = luminance(img);
    FrequencyPair out{convolve(gray, gaussian_kernel(sigma)), RasterImage(gray.width(), gray.height(), 1)};
    auto g = gray.samples();
    auto lo = out.low.samples();
    auto hi = out.high.samples();
    for (std::size_t i = 0; i < g.size(); ++i) hi[i] = g[i] - lo[i];
    return out;
}

}  // namespace facade_forge
