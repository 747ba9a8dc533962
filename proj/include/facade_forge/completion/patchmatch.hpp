#pragma once

#include <random>
#include <vector>

#include "facade_forge/completion/nnf.hpp"
#include "facade_forge/core/palette.hpp"
#include "facade_forge/core/pyramid.hpp"

namespace facade_forge {

struct LevelReport {
    int level = 0;  // 0 = coarsest
    int width = 0;
    int height = 0;
    std::size_t void_pixels = 0;
    int iterations = 0;
    /// Field energy before the first iteration, then after each iteration.
    std::vector<double> energies;
};

struct CompletionResult {
    RasterImage image;
    NearestNeighborField nnf;
    /// Finest-level working image the final field costs were evaluated on.
    RasterImage energy_image;
    std::vector<LevelReport> levels;
};

struct LabelCompletionResult {
    LabelMap labels;
    CompletionResult raster;
};

namespace detail {

/// Fills void pixels layer by layer from the known region, each with the mean
/// of its already-defined 8-neighbours.
inline void onion_fill(RasterImage& img, const BinaryMask& void_mask) {
    const int w = img.width(), h = img.height();
    std::vector<std::uint8_t> defined(static_cast<std::size_t>(w) * h);
    std::vector<Point> frontier;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) defined[static_cast<std::size_t>(y) * w + x] = !void_mask(x, y);
    auto is_defined = [&](int x, int y) { return defined[static_cast<std::size_t>(y) * w + x] != 0; };
    std::size_t remaining = void_mask.count();
    while (remaining > 0) {
        frontier.clear();
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (is_defined(x, y)) continue;
                bool touches = false;
                for (int dy = -1; dy <= 1 && !touches; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        if (img.contains(x + dx, y + dy) && is_defined(x + dx, y + dy)) {
                            touches = true;
                            break;
                        }
                if (touches) frontier.push_back({x, y});
            }
        if (frontier.empty()) break;
        for (Point p : frontier)
            for (int c = 0; c < img.channels(); ++c) {
                double sum = 0.0;
                int n = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        if (img.contains(p.x + dx, p.y + dy) && is_defined(p.x + dx, p.y + dy)) {
                            sum += img.at(p.x + dx, p.y + dy, c);
                            ++n;
                        }
                img.at(p.x, p.y, c) = sum / n;
            }
        for (Point p : frontier) defined[static_cast<std::size_t>(p.y) * w + p.x] = 1;
        remaining -= frontier.size();
    }
}

}  // namespace detail

/// Rebuilds every void pixel as the weighted vote of the source patches whose
/// target patches cover it. Votes whose source falls outside the image or into
/// the void are skipped; the pixel's own centre vote is always valid.
inline RasterImage vote(const RasterImage& img, const NearestNeighborField& nnf, const PatchWeights& weights) {
    const BinaryMask& m = nnf.void_mask();
    const int r = weights.radius(), ch = img.channels();
    const int w = img.width(), h = img.height();
    std::vector<double> acc(static_cast<std::size_t>(w) * h * ch, 0.0);
    std::vector<double> wsum(static_cast<std::size_t>(w) * h, 0.0);
    for (Point p : nnf.pixels()) {
        const Offset v = nnf.offset(p);
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                const Point q{p.x + dx, p.y + dy};
                if (!m.contains(q.x, q.y) || !m(q.x, q.y)) continue;
                const Point s = q + v;
                if (!m.contains(s.x, s.y) || m(s.x, s.y)) continue;
                const double wt = weights.at(dx, dy);
                const std::size_t qi = static_cast<std::size_t>(q.y) * w + q.x;
                wsum[qi] += wt;
                for (int c = 0; c < ch; ++c) acc[qi * ch + c] += wt * img.at(s.x, s.y, c);
            }
    }
    RasterImage out = img;
    for (Point q : nnf.pixels()) {
        const std::size_t qi = static_cast<std::size_t>(q.y) * w + q.x;
        for (int c = 0; c < ch; ++c) out.at(q.x, q.y, c) = acc[qi * ch + c] / wsum[qi];
    }
    return out;
}

/// Child pixels inherit twice their parent's offset; targets that leave the
/// image or land in the void are moved to the nearest known pixel.
inline std::vector<Offset> upsample_offsets(const NearestNeighborField& coarse, const BinaryMask& fine_void) {
    const auto owner = nearest_known(fine_void);
    const int w = fine_void.width(), h = fine_void.height();
    std::vector<Offset> out(static_cast<std::size_t>(w) * h, Offset{0, 0});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!fine_void(x, y)) continue;
            const Point parent{std::min(x / 2, coarse.width() - 1), std::min(y / 2, coarse.height() - 1)};
            Offset v{0, 0};
            if (coarse.void_mask()(parent.x, parent.y)) v = {2 * coarse.offset(parent).x, 2 * coarse.offset(parent).y};
            Point t{std::clamp(x + v.x, 0, w - 1), std::clamp(y + v.y, 0, h - 1)};
            if (fine_void(t.x, t.y)) t = owner[static_cast<std::size_t>(t.y) * w + t.x];
            out[static_cast<std::size_t>(y) * w + x] = t - Point{x, y};
        }
    return out;
}

/// Runs the scanline iterations on one level: each iteration visits every void
/// pixel in (alternating) scan order, first propagating from its neighbours,
/// then expanding randomly inside the direction buffer.
inline void optimize_level(NearestNeighborField& nnf, const CostModel& model, int iterations,
                           std::mt19937_64& rng, LevelReport& report) {
    report.energies.push_back(nnf.energy());
    const auto& pixels = nnf.pixels();
    const std::size_t n = pixels.size();
    for (int it = 0; it < iterations; ++it) {
        const bool forward = it % 2 == 0;
        for (std::size_t k = 0; k < n; ++k) {
            const Point p = forward ? pixels[k] : pixels[n - 1 - k];
            propagate_pixel(nnf, model, p);
            random_search(nnf, model, p, rng);
        }
        report.energies.push_back(nnf.energy());
        ++report.iterations;
    }
}

/// Fills the void of `img` coarse-to-fine. Known pixels are returned untouched.
inline CompletionResult complete(const RasterImage& img, const BinaryMask& void_mask, const CompletionParams& params) {
    params.validate();
    require_same_size(img.size(), void_mask.size(), "complete");
    CompletionResult result;
    if (void_mask.none()) {
        result.image = img;
        result.energy_image = img;
        result.nnf = NearestNeighborField(void_mask);
        return result;
    }
    if (void_mask.all()) fail(ErrorKind::DegenerateMask, "mask covers the whole image");
    if (img.width() < params.patch_size || img.height() < params.patch_size)
        fail(ErrorKind::InvalidParameter, "image is smaller than the patch size");

    std::mt19937_64 rng(params.seed);
    ImagePyramid pyramid = build_pyramid(img, void_mask, std::max(params.pyramid_min_dim, params.patch_size));
    // Coarse levels swallowed entirely by the void carry nothing to copy from.
    while (pyramid.size() > 1 && pyramid.coarsest().mask.all()) pyramid.levels.erase(pyramid.levels.begin());
    const PatchWeights weights = patch_weights(params.patch_size);

    NearestNeighborField previous;
    RasterImage previous_image;
    for (std::size_t li = 0; li < pyramid.size(); ++li) {
        const PyramidLevel& level = pyramid.levels[li];
        LevelReport report;
        report.level = static_cast<int>(li);
        report.width = level.image.width();
        report.height = level.image.height();
        report.void_pixels = level.mask.count();

        RasterImage working = level.image;
        NearestNeighborField nnf(level.mask);
        if (li == 0) {
            detail::onion_fill(working, level.mask);
        } else {
            // Seed the void with the parent's result, then re-vote with the
            // inherited offsets at this resolution.
            for (Point p : nnf.pixels())
                for (int c = 0; c < working.channels(); ++c)
                    working.at(p.x, p.y, c) = previous_image.at(std::min(p.x / 2, previous_image.width() - 1),
                                                                std::min(p.y / 2, previous_image.height() - 1), c);
            const auto offsets = upsample_offsets(previous, level.mask);
            for (Point p : nnf.pixels()) nnf.assign(p, offsets[static_cast<std::size_t>(p.y) * report.width + p.x], 0.0);
            working = vote(working, nnf, weights);
        }

        const CostModel model(working, level.mask, params);
        if (li == 0) {
            nnf = random_field(model, rng);
        } else {
            refresh_costs(nnf, model);
        }
        optimize_level(nnf, model, params.iterations_per_level, rng, report);
        result.levels.push_back(std::move(report));

        previous_image = vote(working, nnf, weights);
        if (li + 1 == pyramid.size()) result.energy_image = std::move(working);
        previous = std::move(nnf);
    }

    result.image = std::move(previous_image);
    result.nnf = std::move(previous);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (!void_mask(x, y))
                for (int c = 0; c < img.channels(); ++c) result.image.at(x, y, c) = img.at(x, y, c);
    return result;
}

/// Label maps are completed on their rendered colors and snapped back onto the palette.
inline LabelCompletionResult complete(const LabelMap& labels, const BinaryMask& void_mask, const CompletionParams& params) {
    require_same_size(labels.size(), void_mask.size(), "complete");
    LabelCompletionResult out;
    out.raster = complete(render(labels), void_mask, params);
    out.labels = snap_to_palette(out.raster.image, labels.palette());
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x)
            if (!void_mask(x, y)) out.labels.set(x, y, labels(x, y));
    return out;
}

}  // namespace facade_forge
