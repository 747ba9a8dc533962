#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "facade_forge/core/raster.hpp"

namespace facade_forge {

/// ITU-R BT.601 luma.
inline RasterImage to_grayscale(const RasterImage& img) {
    if (img.channels() != 3) fail(ErrorKind::InvalidInput, "to_grayscale expects a 3-channel image");
    RasterImage out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
    return out;
}

/// Grayscale view of any raster: 1-channel inputs pass through unchanged.
inline RasterImage luminance(const RasterImage& img) {
    return img.channels() == 1 ? img : to_grayscale(img);
}

/// Replicates a single channel into RGB; RGB inputs pass through.
inline RasterImage to_rgb(const RasterImage& img) {
    if (img.channels() == 3) return img;
    RasterImage out(img.width(), img.height(), 3);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y);
    return out;
}

/// Value of the continuous 2-D Gaussian density at integer offset (i, j).
inline double gaussian_density(double sigma, int i, int j) {
    const double s2 = sigma * sigma;
    return std::exp(-0.5 * (i * i + j * j) / s2) / (2.0 * std::numbers::pi * s2);
}

struct GaussianKernel {
    double sigma = 0.0;
    int radius = 0;
    std::vector<double> weights;  // (2r+1)^2, row-major, normalized to sum 1

    int side() const { return 2 * radius + 1; }
    double at(int i, int j) const { return weights[(j + radius) * side() + (i + radius)]; }
};

/// Gaussian sampled on [-radius, radius]^2 and renormalized. The default radius
/// is ceil(3 sigma).
inline GaussianKernel gaussian_kernel(double sigma, std::optional<int> radius = std::nullopt) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        fail(ErrorKind::InvalidParameter, "gaussian sigma must be positive");
    GaussianKernel k;
    k.sigma = sigma;
    k.radius = radius ? *radius : static_cast<int>(std::ceil(3.0 * sigma));
    if (k.radius < 0) fail(ErrorKind::InvalidParameter, "gaussian radius must be non-negative");
    const int n = k.side();
    k.weights.resize(static_cast<std::size_t>(n) * n);
    double sum = 0.0;
    for (int j = -k.radius; j <= k.radius; ++j)
        for (int i = -k.radius; i <= k.radius; ++i) {
            const double w = gaussian_density(sigma, i, j);
            k.weights[(j + k.radius) * n + (i + k.radius)] = w;
            sum += w;
        }
    for (double& w : k.weights) w /= sum;
    return k;
}

/// Fixed 3x3 kernel, row-major, index (i+1) + 3*(j+1) for offset (i, j).
struct Kernel3x3 {
    std::array<double, 9> w{};

    static constexpr int radius = 1;
    double at(int i, int j) const { return w[(j + 1) * 3 + (i + 1)]; }
};

inline constexpr Kernel3x3 sobel_x{{-1, 0, 1, -2, 0, 2, -1, 0, 1}};
inline constexpr Kernel3x3 sobel_y{{-1, -2, -1, 0, 0, 0, 1, 2, 1}};

namespace detail {

template <class K>
int kernel_radius(const K& k) {
    return k.radius;
}

/// True 2-D convolution (kernel flipped) with mirrored borders. No size checks.
template <class K>
RasterImage convolve_reflect(const RasterImage& img, const K& kernel) {
    const int r = kernel_radius(kernel);
    const int w = img.width(), h = img.height(), ch = img.channels();
    RasterImage out(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int j = -r; j <= r; ++j) {
                    const int sy = reflect_index(y - j, h);
                    for (int i = -r; i <= r; ++i)
                        acc += kernel.at(i, j) * img.at(reflect_index(x - i, w), sy, c);
                }
                out.at(x, y, c) = acc;
            }
    return out;
}

}  // namespace detail

template <class K>
RasterImage convolve(const RasterImage& img, const K& kernel) {
    const int side = 2 * detail::kernel_radius(kernel) + 1;
    if (side > img.width() || side > img.height())
        fail(ErrorKind::InvalidParameter, "kernel (" + std::to_string(side) +
                                              " px) larger than image");
    return detail::convolve_reflect(img, kernel);
}

}  // namespace facade_forge
