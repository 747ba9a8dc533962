#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "facade_forge/completion/distance.hpp"
#include "facade_forge/core/raster.hpp"

namespace facade_forge {

enum class DirectionVariant {
    /// min over theta of cos(theta_v - theta), exactly as the formula is printed.
    Literal,
    /// min over theta of 1 - |cos(theta_v - theta)|: zero for axis-aligned offsets.
    AxisPenalty,
};

struct CompletionParams {
    int patch_size = 7;
    double lambda_proximity = 5e-4;
    double lambda_direction = 0.5;
    std::vector<double> directions{std::numbers::pi / 2.0, std::numbers::pi};
    int iterations_per_level = 5;
    std::uint64_t seed = 0;
    DirectionVariant direction_variant = DirectionVariant::AxisPenalty;
    /// Half-width of the cross-shaped search buffer; <= 0 means 2 * patch_size.
    int buffer_halfwidth = 0;
    /// Smallest side allowed at the coarsest pyramid level.
    int pyramid_min_dim = 16;

    int effective_buffer_halfwidth() const { return buffer_halfwidth > 0 ? buffer_halfwidth : 2 * patch_size; }

    void validate() const {
        if (patch_size < 1 || patch_size % 2 == 0)
            fail(ErrorKind::InvalidParameter, "patch size must be odd and positive");
        if (lambda_proximity < 0.0 || lambda_direction < 0.0)
            fail(ErrorKind::InvalidParameter, "cost weights must be non-negative");
        if (iterations_per_level < 1) fail(ErrorKind::InvalidParameter, "need at least one iteration per level");
        if (directions.empty()) fail(ErrorKind::InvalidParameter, "direction set is empty");
        if (pyramid_min_dim < 8) fail(ErrorKind::InvalidParameter, "pyramid min_dim must be >= 8");
    }
};

/// Isotropic Gaussian over a W x W patch, normalized to sum 1 (sigma = W / 4).
struct PatchWeights {
    int size = 0;
    std::vector<double> w;

    int radius() const { return size / 2; }
    double at(int dx, int dy) const { return w[(dy + radius()) * size + (dx + radius())]; }
};

inline PatchWeights patch_weights(int patch_size) {
    PatchWeights pw;
    pw.size = patch_size;
    const int r = patch_size / 2;
    const double sigma = patch_size / 4.0;
    pw.w.resize(static_cast<std::size_t>(patch_size) * patch_size);
    double sum = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double v = std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
            pw.w[(dy + r) * patch_size + (dx + r)] = v;
            sum += v;
        }
    for (double& v : pw.w) v /= sum;
    return pw;
}

/// Gaussian-weighted mean absolute difference between the patch at p and the
/// patch at p + v. Coordinates outside the image are mirrored; channels are averaged.
inline double appearance_cost(const RasterImage& img, Point p, Offset v, const PatchWeights& weights) {
    const int r = weights.radius();
    const int w = img.width(), h = img.height(), ch = img.channels();
    const Point q = p + v;
    double acc = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
        const int ty = reflect_index(p.y + dy, h), sy = reflect_index(q.y + dy, h);
        for (int dx = -r; dx <= r; ++dx) {
            const int tx = reflect_index(p.x + dx, w), sx = reflect_index(q.x + dx, w);
            double diff = 0.0;
            for (int c = 0; c < ch; ++c) diff += std::abs(img.at(tx, ty, c) - img.at(sx, sy, c));
            acc += weights.at(dx, dy) * diff;
        }
    }
    return acc / ch;
}

/// Proximity term ||v||^2 / (sigma_d^2 + sigma_c^2).
inline double proximity_cost(Offset v, double boundary_distance, double sigma_c) {
    const double n2 = double(v.x) * v.x + double(v.y) * v.y;
    return n2 / (boundary_distance * boundary_distance + sigma_c * sigma_c);
}

inline double proximity_scale(int width, int height) { return std::max(width, height) / 8.0; }

inline double direction_cost(Offset v, const std::vector<double>& directions, DirectionVariant variant) {
    if (v.x == 0 && v.y == 0) return 0.0;
    const double theta_v = std::atan2(double(v.y), double(v.x));
    double best = std::numeric_limits<double>::infinity();
    for (double theta : directions) {
        const double c = std::cos(theta_v - theta);
        best = std::min(best, variant == DirectionVariant::Literal ? c : 1.0 - std::abs(c));
    }
    return best;
}

struct CostTerms {
    double appearance = 0.0;
    double proximity = 0.0;
    double direction = 0.0;
};

inline double total_cost(const CostTerms& t, double lambda_proximity, double lambda_direction) {
    return t.appearance + lambda_proximity * t.proximity + lambda_direction * t.direction;
}

/// Binds everything the similarity measure needs for one pyramid level.
class CostModel {
public:
    CostModel(const RasterImage& image, const BinaryMask& void_mask, const CompletionParams& params)
        : image_(&image), void_(&void_mask), params_(&params),
          distance_(distance_to_boundary(void_mask)),
          weights_(patch_weights(params.patch_size)),
          sigma_c_(proximity_scale(image.width(), image.height())) {
        require_same_size(image.size(), void_mask.size(), "cost model");
    }

    const RasterImage& image() const { return *image_; }
    const BinaryMask& void_mask() const { return *void_; }
    const CompletionParams& params() const { return *params_; }
    const DistanceField& distance() const { return distance_; }
    const PatchWeights& weights() const { return weights_; }
    double sigma_c() const { return sigma_c_; }

    /// p + v inside the image and in the known region.
    bool valid_target(Point p, Offset v) const {
        const Point q = p + v;
        return void_->contains(q.x, q.y) && !(*void_)(q.x, q.y);
    }

    CostTerms terms(Point p, Offset v) const {
        return {appearance_cost(*image_, p, v, weights_),
                proximity_cost(v, distance_(p), sigma_c_),
                direction_cost(v, params_->directions, params_->direction_variant)};
    }

    double operator()(Point p, Offset v) const {
        return total_cost(terms(p, v), params_->lambda_proximity, params_->lambda_direction);
    }

private:
    const RasterImage* image_;
    const BinaryMask* void_;
    const CompletionParams* params_;
    DistanceField distance_;
    PatchWeights weights_;
    double sigma_c_;
};

}  // namespace facade_forge
