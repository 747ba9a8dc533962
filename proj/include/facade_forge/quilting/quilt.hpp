#pragma once

#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"
#include "facade_forge/core/raster.hpp"

namespace facade_forge {

struct QuiltParams {
    int patch_n = 36;
    int overlap = 5;
    double tolerance = 0.1;
    std::uint64_t seed = 0;

    int step() const { return patch_n - overlap; }

    void validate() const {
        if (patch_n < 1) fail(ErrorKind::InvalidParameter, "patch size must be positive");
        if (overlap < 0 || overlap >= patch_n) fail(ErrorKind::InvalidParameter, "overlap must lie in [0, patch size)");
        if (!(tolerance > 0.0)) fail(ErrorKind::InvalidParameter, "tolerance must be positive");
    }
};

/// Every n x n window of a source at unit stride. Patch ids run in raster
/// order of their top-left corners.
class PatchSet {
public:
    PatchSet() = default;
    PatchSet(const RasterImage& source, int n) : source_(&source), n_(n) {
        if (n < 1) fail(ErrorKind::InvalidParameter, "patch size must be positive");
        if (source.width() < n || source.height() < n)
            fail(ErrorKind::InvalidParameter, "source (" + std::to_string(source.width()) + "x" +
                                                  std::to_string(source.height()) + ") smaller than patch size " +
                                                  std::to_string(n));
        cols_ = source.width() - n + 1;
        rows_ = source.height() - n + 1;
    }

    const RasterImage& source() const { return *source_; }
    int n() const { return n_; }
    std::size_t size() const { return static_cast<std::size_t>(cols_) * rows_; }
    Point origin(std::size_t id) const { return {int(id % cols_), int(id / cols_)}; }
    double at(std::size_t id, int x, int y, int c) const {
        const Point o = origin(id);
        return source_->at(o.x + x, o.y + y, c);
    }
    RasterImage patch(std::size_t id) const {
        const Point o = origin(id);
        return crop(*source_, {o.x, o.y, n_, n_});
    }

private:
    const RasterImage* source_ = nullptr;
    int n_ = 0;
    int cols_ = 0;
    int rows_ = 0;
};

inline PatchSet sample_patches(const RasterImage& source, int n) { return PatchSet(source, n); }

/// Cut position per step along an overlap strip. For a vertical strip cut[i]
/// is the first column of row i taken from the new patch; for a horizontal
/// strip it is the first row of column i.
struct SeamPath {
    std::vector<int> cut;
    double cost = 0.0;
};

/// Squared error surface between two equally shaped strips, channels summed.
/// Row-major, `length` rows of `width` samples.
struct ErrorSurface {
    int length = 0;
    int width = 0;
    std::vector<double> e;

    double at(int i, int j) const { return e[static_cast<std::size_t>(i) * width + j]; }
};

inline ErrorSurface error_surface(const RasterImage& ov1, const RasterImage& ov2) {
    require_same_size(ov1.size(), ov2.size(), "min_error_boundary");
    if (ov1.channels() != ov2.channels()) fail(ErrorKind::InvalidInput, "channel count mismatch");
    ErrorSurface s{ov1.height(), ov1.width(), std::vector<double>(ov1.samples().size() / ov1.channels(), 0.0)};
    for (int y = 0; y < ov1.height(); ++y)
        for (int x = 0; x < ov1.width(); ++x)
            for (int c = 0; c < ov1.channels(); ++c) {
                const double d = ov1.at(x, y, c) - ov2.at(x, y, c);
                s.e[static_cast<std::size_t>(y) * s.width + x] += d * d;
            }
    return s;
}

/// Minimum-cost 8-connected path from the first row to the last, one column
/// per row. Ties prefer the column nearer the strip centre.
inline SeamPath min_error_boundary(const ErrorSurface& s) {
    SeamPath path;
    if (s.length == 0 || s.width == 0) return path;
    const int L = s.length, W = s.width;
    const double centre = (W - 1) / 2.0;
    std::vector<double> acc(s.e);
    std::vector<int> from(static_cast<std::size_t>(L) * W, 0);
    for (int i = 1; i < L; ++i)
        for (int j = 0; j < W; ++j) {
            int best = -1;
            for (int d : {0, -1, 1}) {  // straight first, so equal costs keep the path straight
                const int k = j + d;
                if (k < 0 || k >= W) continue;
                if (best < 0 || acc[(i - 1) * W + k] < acc[(i - 1) * W + best]) best = k;
            }
            acc[i * W + j] += acc[(i - 1) * W + best];
            from[i * W + j] = best;
        }
    int end = 0;
    for (int j = 1; j < W; ++j) {
        const double a = acc[(L - 1) * W + j], b = acc[(L - 1) * W + end];
        if (a < b || (a == b && std::abs(j - centre) < std::abs(end - centre))) end = j;
    }
    path.cut.assign(L, 0);
    path.cost = acc[(L - 1) * W + end];
    for (int i = L - 1; i >= 0; --i) {
        path.cut[i] = end;
        if (i > 0) end = from[i * W + end];
    }
    return path;
}

inline SeamPath min_error_boundary(const RasterImage& ov1, const RasterImage& ov2) {
    return min_error_boundary(error_surface(ov1, ov2));
}

inline double path_cost(const ErrorSurface& s, const std::vector<int>& cut) {
    double c = 0.0;
    for (int i = 0; i < s.length; ++i) c += s.at(i, cut[i]);
    return c;
}

struct Placement {
    Point position;  // canvas coordinates of the patch's top-left corner
    std::size_t patch_id = 0;
    Point source_origin;
    /// Seam through the left overlap (one cut column per patch row).
    std::optional<SeamPath> left_seam;
    /// Seam through the top overlap (one cut row per patch column).
    std::optional<SeamPath> top_seam;
    /// Overlap SSD of the chosen patch against the canvas.
    double overlap_ssd = 0.0;
};

struct QuiltPlan {
    Size output_size;
    Size canvas_size;
    int patch_n = 0;
    int overlap = 0;
    std::vector<Placement> placements;
};

struct QuiltResult {
    RasterImage image;
    QuiltPlan plan;
};

namespace detail {

/// Whether the pixel at patch-local (x, y) is taken from this placement
/// rather than kept from earlier ones.
inline bool takes_new(const Placement& pl, int x, int y) {
    if (pl.left_seam && x < pl.left_seam->cut[y]) return false;
    if (pl.top_seam && y < pl.top_seam->cut[x]) return false;
    return true;
}

inline double overlap_ssd(const RasterImage& canvas, Point pos, const PatchSet& set, std::size_t id, int ov,
                          bool left, bool top, double bound) {
    const int n = set.n(), ch = canvas.channels();
    double ssd = 0.0;
    auto add = [&](int x, int y) {
        for (int c = 0; c < ch; ++c) {
            const double d = canvas.at(pos.x + x, pos.y + y, c) - set.at(id, x, y, c);
            ssd += d * d;
        }
    };
    if (left)
        for (int y = 0; y < n && ssd <= bound; ++y)
            for (int x = 0; x < ov; ++x) add(x, y);
    if (top)
        for (int y = 0; y < ov && ssd <= bound; ++y)
            for (int x = left ? ov : 0; x < n; ++x) add(x, y);
    return ssd;
}

}  // namespace detail

struct MatchResult {
    std::size_t patch_id = 0;
    double ssd = 0.0;
    double min_ssd = 0.0;
    std::size_t pool_size = 0;
};

/// Scores every patch on the overlap with what is already on the canvas at
/// `pos` and picks uniformly among those with SSD <= (1 + tolerance) * min.
inline MatchResult best_match(const RasterImage& canvas, Point pos, const PatchSet& set, int overlap, bool left,
                              bool top, double tolerance, std::mt19937_64& rng) {
    if (set.size() == 0) fail(ErrorKind::InvalidInput, "empty patch set");
    std::vector<double> ssd(set.size());
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t id = 0; id < set.size(); ++id) {
        // Early exit bound: anything above the current pool ceiling is out.
        ssd[id] = detail::overlap_ssd(canvas, pos, set, id, overlap, left, top, (1.0 + tolerance) * lo);
        lo = std::min(lo, ssd[id]);
    }
    const double ceiling = (1.0 + tolerance) * lo;
    std::vector<std::size_t> pool;
    for (std::size_t id = 0; id < set.size(); ++id)
        if (ssd[id] <= ceiling) pool.push_back(id);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const std::size_t id = pool[pick(rng)];
    return {id, ssd[id], lo, pool.size()};
}

/// Tiles `out_size` with patches of the source in raster order.
inline QuiltResult quilt(const RasterImage& source, Size out_size, const QuiltParams& params) {
    params.validate();
    if (out_size.width < 1 || out_size.height < 1) fail(ErrorKind::InvalidParameter, "output size must be positive");
    const PatchSet set = sample_patches(source, params.patch_n);
    const int n = params.patch_n, ov = params.overlap, step = params.step();
    auto count = [&](int extent) { return extent <= n ? 1 : 1 + (extent - n + step - 1) / step; };
    const int cols = count(out_size.width), rows = count(out_size.height);

    QuiltPlan plan;
    plan.output_size = out_size;
    plan.canvas_size = {n + (cols - 1) * step, n + (rows - 1) * step};
    plan.patch_n = n;
    plan.overlap = ov;
    RasterImage canvas(plan.canvas_size.width, plan.canvas_size.height, source.channels());
    std::mt19937_64 rng(params.seed);

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            Placement pl;
            pl.position = {c * step, r * step};
            const bool left = c > 0 && ov > 0, top = r > 0 && ov > 0;
            if (r == 0 && c == 0) {
                std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
                pl.patch_id = pick(rng);
            } else {
                const MatchResult m = best_match(canvas, pl.position, set, ov, left, top, params.tolerance, rng);
                pl.patch_id = m.patch_id;
                pl.overlap_ssd = m.ssd;
            }
            pl.source_origin = set.origin(pl.patch_id);
            if (left) {
                RasterImage a(ov, n, source.channels()), b(ov, n, source.channels());
                for (int y = 0; y < n; ++y)
                    for (int x = 0; x < ov; ++x)
                        for (int k = 0; k < source.channels(); ++k) {
                            a.at(x, y, k) = canvas.at(pl.position.x + x, pl.position.y + y, k);
                            b.at(x, y, k) = set.at(pl.patch_id, x, y, k);
                        }
                pl.left_seam = min_error_boundary(a, b);
            }
            if (top) {
                // Transposed so the strip runs along the patch width.
                RasterImage a(ov, n, source.channels()), b(ov, n, source.channels());
                for (int x = 0; x < n; ++x)
                    for (int y = 0; y < ov; ++y)
                        for (int k = 0; k < source.channels(); ++k) {
                            a.at(y, x, k) = canvas.at(pl.position.x + x, pl.position.y + y, k);
                            b.at(y, x, k) = set.at(pl.patch_id, x, y, k);
                        }
                pl.top_seam = min_error_boundary(a, b);
            }
            for (int y = 0; y < n; ++y)
                for (int x = 0; x < n; ++x)
                    if (detail::takes_new(pl, x, y))
                        for (int k = 0; k < source.channels(); ++k)
                            canvas.at(pl.position.x + x, pl.position.y + y, k) = set.at(pl.patch_id, x, y, k);
            plan.placements.push_back(std::move(pl));
        }
    return {crop(canvas, {0, 0, out_size.width, out_size.height}), std::move(plan)};
}

/// Source coordinate of every output pixel according to the plan (row-major).
inline std::vector<Point> trace_sources(const QuiltPlan& plan) {
    const int cw = plan.canvas_size.width;
    std::vector<Point> canvas(static_cast<std::size_t>(cw) * plan.canvas_size.height, Point{-1, -1});
    for (const Placement& pl : plan.placements)
        for (int y = 0; y < plan.patch_n; ++y)
            for (int x = 0; x < plan.patch_n; ++x)
                if (detail::takes_new(pl, x, y))
                    canvas[static_cast<std::size_t>(pl.position.y + y) * cw + pl.position.x + x] =
                        pl.source_origin + Point{x, y};
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(plan.output_size.width) * plan.output_size.height);
    for (int y = 0; y < plan.output_size.height; ++y)
        for (int x = 0; x < plan.output_size.width; ++x) out.push_back(canvas[static_cast<std::size_t>(y) * cw + x]);
    return out;
}

/// Rebuilds the quilted output from the plan and the source alone.
inline RasterImage replay(const QuiltPlan& plan, const RasterImage& source) {
    const auto src = trace_sources(plan);
    RasterImage out(plan.output_size.width, plan.output_size.height, source.channels());
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) {
            const Point s = src[static_cast<std::size_t>(y) * out.width() + x];
            if (!source.contains(s.x, s.y)) fail(ErrorKind::InvalidInput, "plan references pixels outside the source");
            for (int c = 0; c < out.channels(); ++c) out.at(x, y, c) = source.at(s.x, s.y, c);
        }
    return out;
}

inline nlohmann::json to_json(const QuiltPlan& plan) {
    nlohmann::json j;
    j["output_size"] = {plan.output_size.width, plan.output_size.height};
    j["canvas_size"] = {plan.canvas_size.width, plan.canvas_size.height};
    j["patch_n"] = plan.patch_n;
    j["overlap"] = plan.overlap;
    j["placements"] = nlohmann::json::array();
    for (const Placement& pl : plan.placements) {
        nlohmann::json p;
        p["position"] = {pl.position.x, pl.position.y};
        p["patch_id"] = pl.patch_id;
        p["source_origin"] = {pl.source_origin.x, pl.source_origin.y};
        p["overlap_ssd"] = pl.overlap_ssd;
        if (pl.left_seam) p["left_seam"] = {{"cut", pl.left_seam->cut}, {"cost", pl.left_seam->cost}};
        if (pl.top_seam) p["top_seam"] = {{"cut", pl.top_seam->cut}, {"cost", pl.top_seam->cost}};
        j["placements"].push_back(std::move(p));
    }
    return j;
}

}  // namespace facade_forge
