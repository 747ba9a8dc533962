#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>

#include "facade_forge/core/filter.hpp"

namespace facade_forge {

enum class SpectrumMode {
    /// log(1 + |F| + eps): translation invariant.
    Modulus,
    /// log(1 + |Re F| + |Im F| + eps), the formula as printed.
    AbsoluteParts,
};

inline constexpr double spectrum_epsilon = 1e-8;

namespace detail {

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

/// 2-D DFT of the grayscale image, scaled by 1/(HW). Row-major, DC at index 0.
inline std::vector<std::complex<double>> normalized_dft(const RasterImage& img) {
    const RasterImage gray = luminance(img);
    const int w = gray.width(), h = gray.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    auto deleter = [](fftw_complex* p) { fftw_free(p); };
    std::unique_ptr<fftw_complex[], decltype(deleter)> in(fftw_alloc_complex(n), deleter);
    std::unique_ptr<fftw_complex[], decltype(deleter)> out(fftw_alloc_complex(n), deleter);
    if (!in || !out) fail(ErrorKind::Io, "fftw allocation failed");
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_2d(h, w, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    auto g = gray.samples();
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = g[i];
        in[i][1] = 0.0;
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<std::complex<double>> f(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = {out[i][0] * scale, out[i][1] * scale};
    return f;
}

inline double spectrum_value(std::complex<double> z, SpectrumMode mode) {
    const double m = mode == SpectrumMode::Modulus ? std::abs(z) : std::abs(z.real()) + std::abs(z.imag());
    return std::log(1.0 + m + spectrum_epsilon);
}

/// Log-magnitude spectrum, same size as the input, DC at (0, 0).
inline RasterImage spectrum_map(const RasterImage& img, SpectrumMode mode = SpectrumMode::Modulus) {
    const auto f = normalized_dft(img);
    RasterImage out(img.width(), img.height(), 1);
    auto s = out.samples();
    for (std::size_t i = 0; i < f.size(); ++i) s[i] = spectrum_value(f[i], mode);
    return out;
}

/// Moves DC to the centre for display.
inline RasterImage center_spectrum(const RasterImage& spec) {
    const int w = spec.width(), h = spec.height();
    RasterImage out(w, h, spec.channels());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < spec.channels(); ++c) out.at((x + w / 2) % w, (y + h / 2) % h, c) = spec.at(x, y, c);
    return out;
}

}  // namespace facade_forge
