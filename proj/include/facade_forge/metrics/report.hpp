#pragma once

#include "json.hpp"
#include "facade_forge/metrics/losses.hpp"
#include "facade_forge/metrics/quality.hpp"

namespace facade_forge {

struct MetricReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double detail_loss = 0.0;
    double detail_pixel = 0.0;
    double detail_spectral = 0.0;
    double regularity_loss = 0.0;
};

inline MetricReport measure(const RasterImage& a, const RasterImage& b, const DetailOptions& detail = {},
                            const HarrisParams& harris = {}) {
    MetricReport r;
    r.psnr = psnr(a, b);
    r.ssim = ssim(a, b);
    r.detail_pixel = detail_loss_pixel(a, b, detail);
    r.detail_spectral = detail_loss_spectral(a, b, detail);
    r.detail_loss = r.detail_pixel + r.detail_spectral;
    r.regularity_loss = regularity_loss(a, b, harris);
    return r;
}

/// JSON has no infinity; identical images report psnr as the string "inf".
inline nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json j;
    j["psnr"] = std::isinf(r.psnr) ? nlohmann::json("inf") : nlohmann::json(r.psnr);
    j["ssim"] = r.ssim;
    j["detail_loss"] = r.detail_loss;
    j["detail_pixel"] = r.detail_pixel;
    j["detail_spectral"] = r.detail_spectral;
    j["regularity_loss"] = r.regularity_loss;
    return j;
}

}  // namespace facade_forge
