#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "facade_forge/core/raster.hpp"

namespace facade_forge {

/// Euclidean distance from each void pixel to the nearest known pixel; 0 on known pixels.
class DistanceField {
public:
    DistanceField() = default;
    DistanceField(int width, int height, std::vector<double> values)
        : width_(width), height_(height), values_(std::move(values)) {}

    int width() const { return width_; }
    int height() const { return height_; }
    double operator()(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    double operator()(Point p) const { return (*this)(p.x, p.y); }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

namespace detail {

// 1-D squared distance transform of a sampled function (lower envelope of parabolas).
inline void squared_distance_1d(const double* f, double* d, int n, std::vector<int>& v,
                                std::vector<double>& z) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        auto meet = [&](int p) {
            return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
        };
        double s = meet(v[k]);
        while (s <= z[k]) s = meet(v[--k]);  // z[0] = -inf stops the scan
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) d[q] = inf;
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace detail

inline DistanceField distance_to_boundary(const BinaryMask& void_mask) {
    const std::size_t voids = void_mask.count();
    if (voids == void_mask.area())
        fail(ErrorKind::DegenerateMask, "mask has no known pixels");
    const int w = void_mask.width(), h = void_mask.height();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> grid(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) grid[static_cast<std::size_t>(y) * w + x] = void_mask(x, y) ? inf : 0.0;

    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> f(std::max(w, h)), d(std::max(w, h));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = grid[static_cast<std::size_t>(y) * w + x];
        detail::squared_distance_1d(f.data(), d.data(), h, v, z);
        for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        double* row = grid.data() + static_cast<std::size_t>(y) * w;
        std::copy(row, row + w, f.begin());
        detail::squared_distance_1d(f.data(), d.data(), w, v, z);
        for (int x = 0; x < w; ++x) row[x] = std::sqrt(d[x]);
    }
    return DistanceField(w, h, std::move(grid));
}

/// For each pixel, a nearby known pixel found by 4-connected breadth-first
/// growth from the known region. Known pixels map to themselves.
inline std::vector<Point> nearest_known(const BinaryMask& void_mask) {
    const int w = void_mask.width(), h = void_mask.height();
    std::vector<Point> owner(static_cast<std::size_t>(w) * h, Point{-1, -1});
    std::deque<Point> queue;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!void_mask(x, y)) {
                owner[static_cast<std::size_t>(y) * w + x] = {x, y};
                queue.push_back({x, y});
            }
    constexpr Point steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    while (!queue.empty()) {
        const Point p = queue.front();
        queue.pop_front();
        const Point src = owner[static_cast<std::size_t>(p.y) * w + p.x];
        for (Point s : steps) {
            const Point q = p + s;
            if (!void_mask.contains(q.x, q.y)) continue;
            Point& o = owner[static_cast<std::size_t>(q.y) * w + q.x];
            if (o.x >= 0) continue;
            o = src;
            queue.push_back(q);
        }
    }
    return owner;
}

}  // namespace facade_forge
