#pragma once

#include <random>
#include <vector>

#include "facade_forge/completion/cost.hpp"

namespace facade_forge {

/// Offsets and cached costs for every void pixel of one pyramid level. Entries
/// for known pixels are unused and stay zero.
class NearestNeighborField {
public:
    NearestNeighborField() = default;
    explicit NearestNeighborField(BinaryMask void_mask)
        : void_(std::move(void_mask)),
          offsets_(void_.area(), Offset{0, 0}),
          costs_(void_.area(), 0.0) {
        for (int y = 0; y < void_.height(); ++y)
            for (int x = 0; x < void_.width(); ++x)
                if (void_(x, y)) pixels_.push_back({x, y});
    }

    const BinaryMask& void_mask() const { return void_; }
    int width() const { return void_.width(); }
    int height() const { return void_.height(); }
    /// Void pixels in raster order.
    const std::vector<Point>& pixels() const { return pixels_; }

    Offset offset(Point p) const { return offsets_[index(p)]; }
    double cost(Point p) const { return costs_[index(p)]; }
    void assign(Point p, Offset v, double cost) {
        offsets_[index(p)] = v;
        costs_[index(p)] = cost;
    }

    double energy() const {
        double e = 0.0;
        for (Point p : pixels_) e += costs_[index(p)];
        return e;
    }

    friend bool operator==(const NearestNeighborField& a, const NearestNeighborField& b) {
        return a.void_ == b.void_ && a.offsets_ == b.offsets_ && a.costs_ == b.costs_;
    }

private:
    std::size_t index(Point p) const { return static_cast<std::size_t>(p.y) * void_.width() + p.x; }

    BinaryMask void_;
    std::vector<Point> pixels_;
    std::vector<Offset> offsets_;
    std::vector<double> costs_;
};

enum class ScanOrder { Forward, Reverse };

inline void refresh_costs(NearestNeighborField& nnf, const CostModel& model) {
    for (Point p : nnf.pixels()) nnf.assign(p, nnf.offset(p), model(p, nnf.offset(p)));
}

/// Uniform random known pixel per void pixel.
inline NearestNeighborField random_field(const CostModel& model, std::mt19937_64& rng) {
    NearestNeighborField nnf(model.void_mask());
    std::vector<Point> known;
    const auto& m = model.void_mask();
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (!m(x, y)) known.push_back({x, y});
    if (known.empty()) fail(ErrorKind::DegenerateMask, "mask has no known pixels");
    std::uniform_int_distribution<std::size_t> pick(0, known.size() - 1);
    for (Point p : nnf.pixels()) {
        const Offset v = known[pick(rng)] - p;
        nnf.assign(p, v, model(p, v));
    }
    return nnf;
}

/// Tries the offsets of the four neighbours of p; keeps one only on strict
/// improvement. Returns the number of adoptions.
inline int propagate_pixel(NearestNeighborField& nnf, const CostModel& model, Point p) {
    constexpr Point neighbours[] = {{-1, 0}, {0, -1}, {1, 0}, {0, 1}};
    const auto& m = nnf.void_mask();
    int adopted = 0;
    for (Point s : neighbours) {
        const Point q = p + s;
        if (!m.contains(q.x, q.y) || !m(q.x, q.y)) continue;
        const Offset v = nnf.offset(q);
        if (v == nnf.offset(p) || !model.valid_target(p, v)) continue;
        const double e = model(p, v);
        if (e < nnf.cost(p)) {
            nnf.assign(p, v, e);
            ++adopted;
        }
    }
    return adopted;
}

/// One scanline propagation pass over every void pixel.
inline std::size_t propagate(NearestNeighborField& nnf, const CostModel& model, ScanOrder order) {
    const auto& pixels = nnf.pixels();
    const std::size_t n = pixels.size();
    std::size_t adopted = 0;
    for (std::size_t k = 0; k < n; ++k)
        adopted += propagate_pixel(nnf, model, order == ScanOrder::Forward ? pixels[k] : pixels[n - 1 - k]);
    return adopted;
}

/// Search radii: max(w, h) halved (integer division) down to 1.
inline std::vector<int> search_radii(int width, int height) {
    std::vector<int> radii;
    for (int r = std::max(width, height); r >= 1; r /= 2) radii.push_back(r);
    return radii;
}

namespace detail {

struct Box {
    int x0, y0, x1, y1;  // inclusive
    long long area() const { return x1 < x0 || y1 < y0 ? 0 : (long long)(x1 - x0 + 1) * (y1 - y0 + 1); }
    bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

inline Box clip(Box b, int w, int h) {
    return {std::max(b.x0, 0), std::max(b.y0, 0), std::min(b.x1, w - 1), std::min(b.y1, h - 1)};
}

}  // namespace detail

/// Draws one known pixel uniformly from the cross-shaped region around p: the
/// (2r+1)-square window intersected with the horizontal and vertical strips of
/// half-width `buffer` through p. Returns false when no known pixel turned up.
inline bool sample_direction_buffer(const BinaryMask& void_mask, Point p, int r, int buffer,
                                    std::mt19937_64& rng, Point& out) {
    const int w = void_mask.width(), h = void_mask.height();
    const int b = std::min(buffer, r);
    const detail::Box horiz = detail::clip({p.x - r, p.y - b, p.x + r, p.y + b}, w, h);
    const detail::Box vert = detail::clip({p.x - b, p.y - r, p.x + b, p.y + r}, w, h);
    const long long ah = horiz.area(), av = vert.area();
    if (ah + av == 0) return false;
    std::uniform_int_distribution<long long> pick(0, ah + av - 1);
    constexpr int max_attempts = 24;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const long long k = pick(rng);
        Point q;
        if (k < ah) {
            const int bw = horiz.x1 - horiz.x0 + 1;
            q = {horiz.x0 + int(k % bw), horiz.y0 + int(k / bw)};
        } else {
            const long long kv = k - ah;
            const int bw = vert.x1 - vert.x0 + 1;
            q = {vert.x0 + int(kv % bw), vert.y0 + int(kv / bw)};
            if (horiz.contains(q)) continue;  // the overlap is sampled through `horiz` only
        }
        if (void_mask(q.x, q.y)) continue;
        out = q;
        return true;
    }
    return false;
}

/// Random expansion for a single void pixel: one candidate per radius in
/// search_radii(), accepted on strict improvement. Returns the number accepted.
inline int random_search(NearestNeighborField& nnf, const CostModel& model, Point p, std::mt19937_64& rng) {
    const int buffer = model.params().effective_buffer_halfwidth();
    int accepted = 0;
    for (int r : search_radii(nnf.width(), nnf.height())) {
        Point q;
        if (!sample_direction_buffer(nnf.void_mask(), p, r, buffer, rng, q)) continue;
        const Offset v = q - p;
        if (v == nnf.offset(p)) continue;
        const double e = model(p, v);
        if (e < nnf.cost(p)) {
            nnf.assign(p, v, e);
            ++accepted;
        }
    }
    return accepted;
}

inline int random_search_pass(NearestNeighborField& nnf, const CostModel& model, ScanOrder order,
                              std::mt19937_64& rng) {
    const auto& pixels = nnf.pixels();
    const std::size_t n = pixels.size();
    int accepted = 0;
    for (std::size_t k = 0; k < n; ++k)
        accepted += random_search(nnf, model, order == ScanOrder::Forward ? pixels[k] : pixels[n - 1 - k], rng);
    return accepted;
}

}  // namespace facade_forge
