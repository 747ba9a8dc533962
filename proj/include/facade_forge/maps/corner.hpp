#pragma once

#include "facade_forge/core/filter.hpp"

namespace facade_forge {

struct HarrisParams {
    double k = 0.05;
    double omega = 1e5;
    double window_sigma = 1.0;
    int window_radius = 2;
    /// 2 is the usual Harris response; 1 drops the square on the trace.
    int trace_power = 2;

    void validate() const {
        if (!(k > 0.0 && k < 0.25)) fail(ErrorKind::InvalidParameter, "harris k must lie in (0, 0.25)");
        if (!(omega > 0.0)) fail(ErrorKind::InvalidParameter, "harris omega must be positive");
        if (trace_power != 1 && trace_power != 2) fail(ErrorKind::InvalidParameter, "trace_power must be 1 or 2");
        if (window_radius < 0) fail(ErrorKind::InvalidParameter, "window radius must be non-negative");
    }
};

/// Raw Harris response R = det M - k tr(M)^p of the Gaussian-windowed structure tensor.
inline RasterImage harris_response(const RasterImage& img, const HarrisParams& params = {}) {
    params.validate();
    const RasterImage gray = luminance(img);
    if (gray.width() < 3 || gray.height() < 3) fail(ErrorKind::InvalidInput, "corner map needs at least 3x3 pixels");
    const RasterImage ix = convolve(gray, sobel_x);
    const RasterImage iy = convolve(gray, sobel_y);
    const int w = gray.width(), h = gray.height();
    RasterImage xx(w, h, 1), yy(w, h, 1), xy(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = ix.at(x, y), gy = iy.at(x, y);
            xx.at(x, y) = gx * gx;
            yy.at(x, y) = gy * gy;
            xy.at(x, y) = gx * gy;
        }
    const GaussianKernel win = gaussian_kernel(params.window_sigma, params.window_radius);
    // Window is applied even when it exceeds a tiny image; borders mirror.
    const RasterImage a = detail::convolve_reflect(xx, win);
    const RasterImage b = detail::convolve_reflect(yy, win);
    const RasterImage c = detail::convolve_reflect(xy, win);
    RasterImage r(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double det = a.at(x, y) * b.at(x, y) - c.at(x, y) * c.at(x, y);
            const double tr = a.at(x, y) + b.at(x, y);
            r.at(x, y) = det - params.k * (params.trace_power == 2 ? tr * tr : tr);
        }
    return r;
}

/// R* = omega * max(0, R).
inline RasterImage corner_map(const RasterImage& img, const HarrisParams& params = {}) {
    RasterImage r = harris_response(img, params);
    for (double& v : r.samples()) v = params.omega * std::max(0.0, v);
    return r;
}

}  // namespace facade_forge
