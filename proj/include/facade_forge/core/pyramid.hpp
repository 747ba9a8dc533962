#pragma once

#include <vector>

#include "facade_forge/core/raster.hpp"

namespace facade_forge {

struct PyramidLevel {
    RasterImage image;
    BinaryMask mask;
};

/// Coarse-to-fine halving chain; levels.front() is the coarsest.
struct ImagePyramid {
    std::vector<PyramidLevel> levels;

    std::size_t size() const { return levels.size(); }
    const PyramidLevel& coarsest() const { return levels.front(); }
    const PyramidLevel& finest() const { return levels.back(); }
};

inline int half_up(int n) { return (n + 1) / 2; }

/// 2x2 box average; odd trailing rows/columns average the children that exist.
inline RasterImage downsample(const RasterImage& img) {
    const int w = half_up(img.width()), h = half_up(img.height());
    RasterImage out(w, h, img.channels());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < img.channels(); ++c) {
                double sum = 0.0;
                int n = 0;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int sx = 2 * x + dx, sy = 2 * y + dy;
                        if (!img.contains(sx, sy)) continue;
                        sum += img.at(sx, sy, c);
                        ++n;
                    }
                out.at(x, y, c) = sum / n;
            }
    return out;
}

/// Any-void rule: a coarse pixel is void if any of its children is.
inline BinaryMask downsample(const BinaryMask& mask) {
    const int w = half_up(mask.width()), h = half_up(mask.height());
    BinaryMask out(w, h);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask(x, y)) out.set(x / 2, y / 2, true);
    return out;
}

/// Halve while the next level keeps its smaller side >= min_dim. Inputs already
/// smaller than min_dim give a single level.
inline ImagePyramid build_pyramid(const RasterImage& img, const BinaryMask& mask, int min_dim = 32) {
    if (min_dim < 8) fail(ErrorKind::InvalidParameter, "pyramid min_dim must be >= 8");
    require_same_size(img.size(), mask.size(), "build_pyramid");
    std::vector<PyramidLevel> fine_to_coarse{{img, mask}};
    while (true) {
        const auto& last = fine_to_coarse.back();
        const int nw = half_up(last.image.width()), nh = half_up(last.image.height());
        if (std::min(nw, nh) < min_dim || last.image.width() == 1 || last.image.height() == 1)
            break;
        PyramidLevel next{downsample(last.image), downsample(last.mask)};
        fine_to_coarse.push_back(std::move(next));
    }
    ImagePyramid p;
    p.levels.assign(std::make_move_iterator(fine_to_coarse.rbegin()),
                    std::make_move_iterator(fine_to_coarse.rend()));
    return p;
}

}  // namespace facade_forge
