#pragma once

#include <span>

#include "facade_forge/maps/corner.hpp"
#include "facade_forge/maps/frequency.hpp"
#include "facade_forge/maps/spectrum.hpp"

namespace facade_forge {

/// Training-loss weights. Only the detail and regularity terms are computable
/// here; the rest are kept so a trainer can read them from one place.
struct LossWeights {
    double lambda_fm = 10.0;
    double lambda_p = 10.0;
    double lambda_d = 10.0;
    double lambda_r = 10.0;
    double lambda_extra = 5e-6;  // unused
};

inline double mean_abs_difference(const RasterImage& a, const RasterImage& b) {
    require_same_size(a.size(), b.size(), "mean_abs_difference");
    if (a.channels() != b.channels()) fail(ErrorKind::InvalidInput, "channel count mismatch");
    auto x = a.samples();
    auto y = b.samples();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
    return acc / static_cast<double>(x.size());
}

struct DetailOptions {
    double frequency_sigma = 3.0;
    SpectrumMode spectrum_mode = SpectrumMode::Modulus;
};

inline double detail_loss_pixel(const RasterImage& a, const RasterImage& b, const DetailOptions& opt = {}) {
    require_same_size(a.size(), b.size(), "detail_loss_pixel");
    const FrequencyPair fa = frequency_maps(a, opt.frequency_sigma);
    const FrequencyPair fb = frequency_maps(b, opt.frequency_sigma);
    return mean_abs_difference(fa.low, fb.low) + mean_abs_difference(fa.high, fb.high);
}

inline double detail_loss_spectral(const RasterImage& a, const RasterImage& b, const DetailOptions& opt = {}) {
    require_same_size(a.size(), b.size(), "detail_loss_spectral");
    return mean_abs_difference(spectrum_map(a, opt.spectrum_mode), spectrum_map(b, opt.spectrum_mode));
}

inline double detail_loss(const RasterImage& a, const RasterImage& b, const DetailOptions& opt = {}) {
    return detail_loss_pixel(a, b, opt) + detail_loss_spectral(a, b, opt);
}

inline double regularity_loss(const RasterImage& a, const RasterImage& b, const HarrisParams& harris = {}) {
    require_same_size(a.size(), b.size(), "regularity_loss");
    return mean_abs_difference(corner_map(a, harris), corner_map(b, harris));
}

/// mean(max(0, 1 - real)) + mean(max(0, 1 - fake)).
inline double hinge_terms(std::span<const double> real_scores, std::span<const double> fake_scores) {
    if (real_scores.empty() || fake_scores.empty()) fail(ErrorKind::InvalidInput, "empty score map");
    auto term = [](std::span<const double> s) {
        double acc = 0.0;
        for (double v : s) {
            if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "score map contains non-finite values");
            acc += std::max(0.0, 1.0 - v);
        }
        return acc / static_cast<double>(s.size());
    };
    return term(real_scores) + term(fake_scores);
}

}  // namespace facade_forge
