#pragma once

#include <png.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "facade_forge/core/palette.hpp"
#include "facade_forge/core/raster.hpp"

namespace facade_forge {

namespace fs = std::filesystem;

namespace detail {

inline std::uint8_t to_byte(double v) {
    if (!std::isfinite(v)) v = 0.0;
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

/// Sibling temp name so the final rename stays on one filesystem.
inline fs::path temp_sibling(const fs::path& path) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
    return tmp;
}

struct PngImage {
    png_image image{};
    PngImage() {
        std::memset(&image, 0, sizeof image);
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

inline void write_png_bytes(const fs::path& path, int width, int height, png_uint_32 format,
                            const std::vector<std::uint8_t>& bytes,
                            const std::vector<std::uint8_t>& colormap = {}) {
    PngImage png;
    png.image.width = static_cast<png_uint_32>(width);
    png.image.height = static_cast<png_uint_32>(height);
    png.image.format = format;
    if (!colormap.empty()) png.image.colormap_entries = static_cast<png_uint_32>(colormap.size() / 3);
    const fs::path tmp = temp_sibling(path);
    const int ok = png_image_write_to_file(&png.image, tmp.c_str(), 0, bytes.data(), 0,
                                           colormap.empty() ? nullptr : colormap.data());
    if (!ok) {
        std::error_code ec;
        fs::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot write " + path.string() + ": " + png.image.message);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot move PNG into place at " + path.string());
    }
}

}  // namespace detail

/// Reads an 8-bit gray or RGB PNG (palette and alpha are flattened to RGB/gray).
inline RasterImage load_png(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) fail(ErrorKind::NotFound, "no such file: " + path.string());

    detail::PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str()))
        fail(ErrorKind::MalformedFile, path.string() + ": " + png.image.message);
    if (png.image.format & PNG_FORMAT_FLAG_LINEAR)
        fail(ErrorKind::UnsupportedFormat, path.string() + ": 16-bit PNG is not supported");

    const bool color = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    const int w = static_cast<int>(png.image.width), h = static_cast<int>(png.image.height);
    std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, bytes.data(), 0, nullptr))
        fail(ErrorKind::MalformedFile, path.string() + ": " + png.image.message);

    RasterImage img(w, h, channels);
    auto out = img.samples();
    for (std::size_t i = 0; i < bytes.size(); ++i) out[i] = bytes[i] / 255.0;
    return img;
}

/// Samples are clamped to [0,1] and rounded to 8 bits. Written atomically.
inline void save_png(const fs::path& path, const RasterImage& img) {
    std::vector<std::uint8_t> bytes(img.samples().size());
    auto in = img.samples();
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = detail::to_byte(in[i]);
    detail::write_png_bytes(path, img.width(), img.height(),
                            img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY, bytes);
}

inline void save_mask_png(const fs::path& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> bytes(mask.area());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            bytes[static_cast<std::size_t>(y) * mask.width() + x] = mask(x, y) ? 255 : 0;
    detail::write_png_bytes(path, mask.width(), mask.height(), PNG_FORMAT_GRAY, bytes);
}

/// Any nonzero sample marks a void pixel.
inline BinaryMask load_mask_png(const fs::path& path) {
    const RasterImage img = load_png(path);
    BinaryMask m(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            bool on = false;
            for (int c = 0; c < img.channels(); ++c) on = on || img.at(x, y, c) > 0.0;
            m.set(x, y, on);
        }
    return m;
}

// ---------------------------------------------------------------------------
// Palette sidecar: {"classes": [{"id": 0, "name": "window", "color": [0,0,255]}, ...]}

inline nlohmann::json palette_to_json(const Palette& palette) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& e : palette.entries())
        classes.push_back({{"id", e.id}, {"name", e.name}, {"color", {e.color.r, e.color.g, e.color.b}}});
    return {{"classes", classes}};
}

inline Palette palette_from_json(const nlohmann::json& j) {
    try {
        std::vector<PaletteEntry> entries;
        for (const auto& c : j.at("classes")) {
            const int id = c.at("id").get<int>();
            if (id < 0 || id > 255) fail(ErrorKind::InvalidInput, "palette id out of range");
            const auto& col = c.at("color");
            if (col.size() != 3) fail(ErrorKind::InvalidInput, "palette color needs 3 components");
            Rgb8 rgb{col[0].get<std::uint8_t>(), col[1].get<std::uint8_t>(), col[2].get<std::uint8_t>()};
            entries.push_back({static_cast<ClassId>(id), c.value("name", std::string{}), rgb});
        }
        if (entries.empty()) fail(ErrorKind::InvalidInput, "palette has no classes");
        return Palette(std::move(entries));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, std::string("malformed palette JSON: ") + e.what());
    }
}

inline nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::NotFound, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::MalformedFile, path.string() + ": " + e.what());
    }
}

inline void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = detail::temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
        out << text;
        if (!out) fail(ErrorKind::Io, "short write to " + path.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot move file into place at " + path.string());
    }
}

inline void write_json_file(const fs::path& path, const nlohmann::json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

inline Palette load_palette(const fs::path& path) { return palette_from_json(read_json_file(path)); }

inline fs::path palette_sidecar_path(const fs::path& png_path) {
    fs::path p = png_path;
    p.replace_extension(".palette.json");
    return p;
}

/// Paletted PNG (one colormap entry per class, index = position in palette)
/// plus the palette sidecar next to it.
inline void save_label_map(const fs::path& path, const LabelMap& labels) {
    const auto& entries = labels.palette().entries();
    if (entries.size() > 256) fail(ErrorKind::InvalidInput, "palette too large for PNG");
    std::vector<std::uint8_t> colormap;
    for (const auto& e : entries) {
        colormap.push_back(e.color.r);
        colormap.push_back(e.color.g);
        colormap.push_back(e.color.b);
    }
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(labels.width()) * labels.height());
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x) {
            const ClassId id = labels(x, y);
            std::size_t idx = 0;
            while (entries[idx].id != id) ++idx;
            bytes[static_cast<std::size_t>(y) * labels.width() + x] = static_cast<std::uint8_t>(idx);
        }
    detail::write_png_bytes(path, labels.width(), labels.height(), PNG_FORMAT_RGB_COLORMAP, bytes,
                            colormap);
    write_json_file(palette_sidecar_path(path), palette_to_json(labels.palette()));
}

/// Loads any PNG and maps colors onto the palette (nearest color).
inline LabelMap load_label_map(const fs::path& path, const Palette& palette) {
    RasterImage img = load_png(path);
    if (img.channels() == 1) {
        RasterImage rgb(img.width(), img.height(), 3);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = img.at(x, y);
        img = std::move(rgb);
    }
    return snap_to_palette(img, palette);
}

/// Uses the sidecar palette when present, otherwise the façade palette.
inline LabelMap load_label_map(const fs::path& path) {
    const fs::path sidecar = palette_sidecar_path(path);
    std::error_code ec;
    return load_label_map(path, fs::exists(sidecar, ec) ? load_palette(sidecar) : facade_palette());
}

}  // namespace facade_forge
