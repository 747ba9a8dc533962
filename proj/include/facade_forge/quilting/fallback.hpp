#pragma once

#include <optional>

#include "facade_forge/metrics/quality.hpp"
#include "facade_forge/quilting/quilt.hpp"

namespace facade_forge {

/// Largest axis-aligned square made only of `id` pixels; ties go to the first
/// in raster order of the bottom-right corner.
inline std::optional<Rect> largest_class_square(const LabelMap& labels, ClassId id) {
    const int w = labels.width(), h = labels.height();
    std::vector<int> side(static_cast<std::size_t>(w) * h, 0);
    int best = 0;
    Point corner{0, 0};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (labels(x, y) != id) continue;
            int s = 1;
            if (x > 0 && y > 0)
                s = 1 + std::min({side[(y - 1) * w + x], side[y * w + x - 1], side[(y - 1) * w + x - 1]});
            side[y * w + x] = s;
            if (s > best) {
                best = s;
                corner = {x, y};
            }
        }
    if (best == 0) return std::nullopt;
    return Rect{corner.x - best + 1, corner.y - best + 1, best, best};
}

/// 1 - SSIM between same-size top-left crops of the two regions of `img`.
/// The SSIM window shrinks to the largest odd size that fits.
inline double gate_dissimilarity(const RasterImage& img, Rect region, const RasterImage& exemplar) {
    const int w = std::min(region.width, exemplar.width());
    const int h = std::min(region.height, exemplar.height());
    if (w < 1 || h < 1) fail(ErrorKind::InvalidInput, "empty gate region");
    const RasterImage a = crop(img, {region.x, region.y, w, h});
    const RasterImage b = crop(exemplar, {0, 0, w, h});
    SsimParams p;
    const int fit = std::min(w, h);
    if (fit < p.window) p.window = fit % 2 ? fit : fit - 1;
    return 1.0 - ssim(a, b, p);
}

struct FallbackParams {
    /// Dissimilarity at or below which the synthesized image is kept.
    double threshold = 0.3;
    bool force_quilt = false;
    QuiltParams quilt;
};

struct FallbackResult {
    RasterImage image;
    bool quilted = false;
    bool wall_absent = false;
    /// Patch size actually used (smaller than requested when the exemplar is).
    int patch_n = 0;
    Rect wall_box;
    std::optional<QuiltPlan> plan;
};

/// Keeps `synth` when `quality` passes the gate; otherwise re-textures exactly
/// the wall pixels with quilting sampled from `source_region` of `synth`.
inline FallbackResult composite_fallback(const RasterImage& synth, const LabelMap& labels, ClassId wall_class,
                                         Rect source_region, double quality, const FallbackParams& params) {
    require_same_size(synth.size(), labels.size(), "composite_fallback");
    if (source_region.width < 1 || source_region.height < 1 || source_region.x < 0 || source_region.y < 0 ||
        source_region.x + source_region.width > synth.width() || source_region.y + source_region.height > synth.height())
        fail(ErrorKind::InvalidInput, "source region is empty or outside the image");
    FallbackResult out;
    out.image = synth;
    if (!params.force_quilt && quality <= params.threshold) return out;
    const BinaryMask wall = mask_of_class(labels, wall_class);
    if (wall.none()) {
        out.wall_absent = true;
        return out;
    }
    out.wall_box = bounding_box(wall);
    const RasterImage exemplar = crop(synth, source_region);
    QuiltParams qp = params.quilt;
    qp.patch_n = std::min({qp.patch_n, exemplar.width(), exemplar.height()});
    qp.overlap = std::min(qp.overlap, qp.patch_n - 1);
    out.patch_n = qp.patch_n;
    QuiltResult tex = quilt(exemplar, {out.wall_box.width, out.wall_box.height}, qp);
    for (int y = 0; y < synth.height(); ++y)
        for (int x = 0; x < synth.width(); ++x)
            if (wall(x, y))
                for (int c = 0; c < synth.channels(); ++c)
                    out.image.at(x, y, c) = tex.image.at(x - out.wall_box.x, y - out.wall_box.y, c);
    out.quilted = true;
    out.plan = std::move(tex.plan);
    return out;
}

}  // namespace facade_forge
