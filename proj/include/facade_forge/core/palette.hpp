#pragma once

#include <limits>

#include "facade_forge/core/raster.hpp"

namespace facade_forge {

/// Paint each class with its palette color.
inline RasterImage render(const LabelMap& labels) {
    RasterImage out(labels.width(), labels.height(), 3);
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x) {
            const Rgb8 c = labels.palette().at(labels(x, y)).color;
            out.at(x, y, 0) = c.r / 255.0;
            out.at(x, y, 1) = c.g / 255.0;
            out.at(x, y, 2) = c.b / 255.0;
        }
    return out;
}

/// Nearest palette class by Euclidean RGB distance; the lowest id wins ties.
/// Distances are measured on the 0-255 scale so palette colors are exact.
inline ClassId nearest_class(const Palette& palette, const std::array<double, 3>& rgb) {
    double best = std::numeric_limits<double>::infinity();
    ClassId best_id = palette.entries().front().id;
    for (const auto& e : palette.entries()) {
        const double dr = rgb[0] * 255.0 - e.color.r;
        const double dg = rgb[1] * 255.0 - e.color.g;
        const double db = rgb[2] * 255.0 - e.color.b;
        const double d = dr * dr + dg * dg + db * db;
        if (d < best) {
            best = d;
            best_id = e.id;
        }
    }
    return best_id;
}

inline LabelMap snap_to_palette(const RasterImage& img, const Palette& palette) {
    if (palette.empty()) fail(ErrorKind::InvalidParameter, "palette is empty");
    if (img.channels() != 3) fail(ErrorKind::InvalidInput, "snap_to_palette expects RGB");
    LabelMap out(img.width(), img.height(), palette, palette.entries().front().id);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out.set(x, y, nearest_class(palette, img.rgb(x, y)));
    return out;
}

}  // namespace facade_forge
