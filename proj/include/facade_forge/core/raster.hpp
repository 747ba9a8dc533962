#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facade_forge/core/error.hpp"

namespace facade_forge {

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
};

/// Displacement from a target pixel to its source pixel.
using Offset = Point;

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const Rect&, const Rect&) = default;
    bool empty() const { return width <= 0 || height <= 0; }
    bool contains(Point p) const {
        return p.x >= x && p.y >= y && p.x < x + width && p.y < y + height;
    }
};

struct Size {
    int width = 0;
    int height = 0;

    friend bool operator==(const Size&, const Size&) = default;
};

/// Row-major H x W x C grid of unit-range samples. 8-bit values only exist at
/// the file boundary; everything in memory is double.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, int channels, double fill = 0.0)
        : width_(width), height_(height), channels_(channels) {
        if (width < 0 || height < 0) fail(ErrorKind::InvalidParameter, "negative raster size");
        if (channels != 1 && channels != 3)
            fail(ErrorKind::InvalidParameter, "raster must have 1 or 3 channels");
        data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    Size size() const { return {width_, height_}; }
    bool empty() const { return data_.empty(); }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    std::span<double> samples() { return data_; }
    std::span<const double> samples() const { return data_; }

    std::array<double, 3> rgb(int x, int y) const {
        if (channels_ == 1) {
            const double v = at(x, y);
            return {v, v, v};
        }
        return {at(x, y, 0), at(x, y, 1), at(x, y, 2)};
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> data_;
};

/// Per-pixel boolean; true marks void / occluded / target pixels.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    Size size() const { return {width_, height_}; }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    bool operator()(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v) { bits_[index(x, y)] = v ? 1 : 0; }

    std::size_t count() const {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }
    std::size_t area() const { return bits_.size(); }
    bool none() const { return count() == 0; }
    bool all() const { return count() == area(); }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

using ClassId = std::uint8_t;

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct PaletteEntry {
    ClassId id = 0;
    std::string name;
    Rgb8 color;
};

/// Class id -> canonical color. Entries are kept sorted by id; ids may be sparse.
class Palette {
public:
    Palette() = default;
    explicit Palette(std::vector<PaletteEntry> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(),
                  [](const PaletteEntry& a, const PaletteEntry& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            for (std::size_t j = i + 1; j < entries_.size(); ++j) {
                if (entries_[i].id == entries_[j].id)
                    fail(ErrorKind::InvalidInput, "duplicate palette class id");
                if (entries_[i].color == entries_[j].color)
                    fail(ErrorKind::InvalidInput, "palette colors must be pairwise distinct");
            }
        }
    }

    const std::vector<PaletteEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    const PaletteEntry* find(ClassId id) const {
        for (const auto& e : entries_)
            if (e.id == id) return &e;
        return nullptr;
    }
    bool contains(ClassId id) const { return find(id) != nullptr; }

    std::optional<ClassId> id_of(std::string_view name) const {
        for (const auto& e : entries_)
            if (e.name == name) return e.id;
        return std::nullopt;
    }

    const PaletteEntry& at(ClassId id) const {
        if (const auto* e = find(id)) return *e;
        fail(ErrorKind::InvalidInput, "class id " + std::to_string(id) + " has no palette entry");
    }

    friend bool operator==(const Palette& a, const Palette& b) {
        if (a.entries_.size() != b.entries_.size()) return false;
        for (std::size_t i = 0; i < a.entries_.size(); ++i) {
            const auto& x = a.entries_[i];
            const auto& y = b.entries_[i];
            if (x.id != y.id || x.name != y.name || !(x.color == y.color)) return false;
        }
        return true;
    }

private:
    std::vector<PaletteEntry> entries_;
};

namespace classes {
inline constexpr ClassId window = 0;
inline constexpr ClassId wall = 1;
inline constexpr ClassId door = 2;
inline constexpr ClassId vegetation = 3;
inline constexpr ClassId cornice = 4;
inline constexpr ClassId background = 5;
}  // namespace classes

inline Palette facade_palette() {
    return Palette({
        {classes::window, "window", {0, 0, 255}},
        {classes::wall, "wall", {255, 255, 0}},
        {classes::door, "door", {255, 128, 0}},
        {classes::vegetation, "vegetation", {0, 255, 0}},
        {classes::cornice, "cornice", {255, 0, 0}},
        {classes::background, "background", {0, 0, 0}},
    });
}

/// Per-pixel semantic class ids plus the palette that gives them colors.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(int width, int height, Palette palette, ClassId fill)
        : width_(width), height_(height), palette_(std::move(palette)),
          ids_(static_cast<std::size_t>(width) * height, fill) {
        if (!palette_.contains(fill))
            fail(ErrorKind::InvalidInput, "fill class has no palette entry");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    Size size() const { return {width_, height_}; }
    const Palette& palette() const { return palette_; }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    ClassId operator()(int x, int y) const { return ids_[index(x, y)]; }
    void set(int x, int y, ClassId id) {
        if (!palette_.contains(id))
            fail(ErrorKind::InvalidInput, "class id " + std::to_string(id) + " has no palette entry");
        ids_[index(x, y)] = id;
    }

    std::span<const ClassId> ids() const { return ids_; }

    std::size_t count(ClassId id) const {
        return static_cast<std::size_t>(std::count(ids_.begin(), ids_.end(), id));
    }

    friend bool operator==(const LabelMap& a, const LabelMap& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.palette_ == b.palette_ &&
               a.ids_ == b.ids_;
    }

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    Palette palette_;
    std::vector<ClassId> ids_;
};

inline void require_same_size(Size a, Size b, const char* what) {
    if (!(a == b))
        fail(ErrorKind::InvalidInput,
             std::string(what) + ": dimension mismatch (" + std::to_string(a.width) + "x" +
                 std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                 std::to_string(b.height) + ")");
}

/// Mirror an out-of-range coordinate back into [0, n) without repeating the edge
/// sample (…2 1 | 0 1 2 … n-1 | n-2 …). Works for any distance outside the range.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

inline RasterImage crop(const RasterImage& img, Rect r) {
    if (r.x < 0 || r.y < 0 || r.width <= 0 || r.height <= 0 || r.x + r.width > img.width() ||
        r.y + r.height > img.height())
        fail(ErrorKind::InvalidParameter, "crop rectangle outside image");
    RasterImage out(r.width, r.height, img.channels());
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(r.x + x, r.y + y, c);
    return out;
}

inline BinaryMask mask_of_class(const LabelMap& labels, ClassId id) {
    BinaryMask m(labels.width(), labels.height());
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x) m.set(x, y, labels(x, y) == id);
    return m;
}

/// Tight bounding box of the true pixels; empty Rect when the mask is empty.
inline Rect bounding_box(const BinaryMask& m) {
    int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace facade_forge
