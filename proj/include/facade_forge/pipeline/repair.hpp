#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>

#include "facade_forge/completion/patchmatch.hpp"
#include "facade_forge/metrics/report.hpp"
#include "facade_forge/pipeline/config.hpp"

namespace facade_forge {

inline constexpr int report_schema_version = 1;

/// True where the class is an occluder, grown by a (2 * dilation + 1) square.
inline BinaryMask derive_mask(const LabelMap& labels, const std::vector<ClassId>& occluder_classes, int dilation) {
    if (dilation < 0) fail(ErrorKind::InvalidParameter, "mask dilation must be >= 0");
    const int w = labels.width(), h = labels.height();
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            occ[static_cast<std::size_t>(y) * w + x] =
                std::find(occluder_classes.begin(), occluder_classes.end(), labels(x, y)) != occluder_classes.end();
    // Separable max filter: rows, then columns.
    std::vector<std::uint8_t> rows(occ.size(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!occ[static_cast<std::size_t>(y) * w + x]) continue;
            for (int i = std::max(0, x - dilation); i <= std::min(w - 1, x + dilation); ++i)
                rows[static_cast<std::size_t>(y) * w + i] = 1;
        }
    BinaryMask mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!rows[static_cast<std::size_t>(y) * w + x]) continue;
            for (int j = std::max(0, y - dilation); j <= std::min(h - 1, y + dilation); ++j) mask.set(x, j, true);
        }
    if (mask.all()) fail(ErrorKind::DegenerateMask, "occluder mask covers the whole image");
    return mask;
}

enum class RepairMode { Occlusion, Missing };

inline std::string to_string(RepairMode m) { return m == RepairMode::Occlusion ? "occlusion" : "missing"; }

struct RepairInputs {
    /// Occlusion path: labels with occluders; missing path: complete manual labels.
    LabelMap labels;
    /// Occluded photograph, used as the metrics reference when present.
    std::optional<RasterImage> texture;
    RasterImage style_image;
    LabelMap style_labels;
};

/// An error raised inside one pipeline stage.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), "stage '" + stage + "': " + strip_kind(cause)), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    static std::string strip_kind(const Error& e) {
        const std::string msg = e.what();
        const std::string prefix = std::string(facade_forge::to_string(e.kind())) + ": ";
        return msg.rfind(prefix, 0) == 0 ? msg.substr(prefix.size()) : msg;
    }

    std::string stage_;
};

struct GateDecision {
    std::optional<double> quality;  // empty when the style has no wall to compare against
    double threshold = 0.3;
    bool forced = false;
    bool quilted = false;
    bool wall_absent = false;
    int patch_n = 0;
    Rect source_region;
    std::optional<Rect> gate_region;
    std::optional<Rect> style_exemplar;
};

struct RunReport {
    RepairMode mode = RepairMode::Missing;
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::optional<std::string> failed_stage;
    std::string error;
    std::string backend;
    std::size_t mask_pixels = 0;
    std::vector<LevelReport> completion_levels;
    std::optional<GateDecision> gate;
    std::optional<MetricReport> metrics;
    std::string metrics_reference;
    std::vector<std::string> flags;
    std::map<std::string, fs::path> outputs;
    std::vector<std::pair<std::string, double>> timings_ms;
    nlohmann::json config;
};

inline nlohmann::json to_json(const Rect& r) { return {r.x, r.y, r.width, r.height}; }

inline nlohmann::json to_json(const RunReport& r, bool with_timings = true) {
    nlohmann::json j;
    j["schema_version"] = report_schema_version;
    j["mode"] = to_string(r.mode);
    j["status"] = r.status;
    if (r.failed_stage) {
        j["failed_stage"] = *r.failed_stage;
        j["error"] = r.error;
    }
    j["seed"] = r.seed;
    j["backend"] = r.backend;
    j["mask_pixels"] = r.mask_pixels;
    j["completion"] = nlohmann::json::array();
    for (const auto& l : r.completion_levels)
        j["completion"].push_back({{"level", l.level},
                                   {"width", l.width},
                                   {"height", l.height},
                                   {"void_pixels", l.void_pixels},
                                   {"iterations", l.iterations},
                                   {"energies", l.energies}});
    if (r.gate) {
        const auto& g = *r.gate;
        nlohmann::json gj{{"threshold", g.threshold}, {"forced", g.forced},     {"quilted", g.quilted},
                          {"wall_absent", g.wall_absent}, {"patch_n", g.patch_n}, {"source_region", to_json(g.source_region)}};
        gj["quality"] = g.quality ? nlohmann::json(*g.quality) : nlohmann::json(nullptr);
        if (g.gate_region) gj["gate_region"] = to_json(*g.gate_region);
        if (g.style_exemplar) gj["style_exemplar"] = to_json(*g.style_exemplar);
        j["gate"] = gj;
    }
    if (r.metrics) {
        j["metrics"] = to_json(*r.metrics);
        j["metrics"]["reference"] = r.metrics_reference;
    }
    j["flags"] = r.flags;
    j["outputs"] = nlohmann::json::object();
    for (const auto& [k, v] : r.outputs) j["outputs"][k] = v.string();
    if (with_timings) {
        j["timings_ms"] = nlohmann::json::object();
        for (const auto& [k, v] : r.timings_ms) j["timings_ms"][k] = v;
    }
    j["config"] = r.config;
    return j;
}

namespace detail {

inline bool rect_inside(Rect r, Size s) {
    return r.width > 0 && r.height > 0 && r.x >= 0 && r.y >= 0 && r.x + r.width <= s.width && r.y + r.height <= s.height;
}

}  // namespace detail

/// Mask, completion (occlusion path only), synthesis, quality gate with
/// quilting fallback, metrics. Each stage writes its outputs into
/// config.output_dir before the next one starts; when a stage fails the
/// outputs of earlier stages stay, a failed report is written, and a
/// StageError is thrown.
inline RunReport repair(const RepairConfig& config, RepairMode mode, const RepairInputs& in) {
    RunReport report;
    report.mode = mode;
    report.seed = config.seed;
    report.backend = to_string(config.backend);
    report.config = to_json(config);
    const fs::path dir = config.output_dir;
    const fs::path report_path = dir / "report.json";

    std::string stage = "setup";
    auto run_stage = [&](const std::string& name, auto&& body) {
        stage = name;
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
        report.timings_ms.emplace_back(name, dt.count());
    };

    try {
        run_stage("setup", [&] {
            config.validate();
            require_same_size(in.style_image.size(), in.style_labels.size(), "style image and style labels");
            if (in.texture) require_same_size(in.texture->size(), in.labels.size(), "texture and labels");
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string());
        });

        LabelMap completed = in.labels;
        if (mode == RepairMode::Occlusion) {
            BinaryMask mask;
            run_stage("mask", [&] {
                mask = derive_mask(in.labels, config.occluder_classes, config.mask_dilation);
                report.mask_pixels = mask.count();
                save_mask_png(dir / "mask.png", mask);
                report.outputs["mask"] = dir / "mask.png";
            });
            run_stage("completion", [&] {
                LabelCompletionResult done = complete(in.labels, mask, config.completion);
                completed = std::move(done.labels);
                report.completion_levels = std::move(done.raster.levels);
                save_label_map(dir / "completed_labels.png", completed);
                report.outputs["completed_labels"] = dir / "completed_labels.png";
            });
        } else {
            run_stage("labels", [&] {
                save_label_map(dir / "completed_labels.png", completed);
                report.outputs["completed_labels"] = dir / "completed_labels.png";
            });
        }

        SynthesisResult synth;
        run_stage("synthesis", [&] {
            SynthesisRequest req{completed, in.style_image, in.style_labels, config.seed};
            BackendOptions opt;
            opt.command = config.backend_command;
            opt.extra_args = config.backend_args;
            opt.keep_workspace = config.keep_workspace;
            opt.quilt = config.quilt;
            synth = synthesize(req, config.backend, opt);
            synth.image = to_rgb(synth.image);
            for (const auto& f : synth.flags) report.flags.push_back(f);
            if (synth.workspace) report.outputs["backend_workspace"] = *synth.workspace;
            save_png(dir / "synthesized.png", synth.image);
            report.outputs["synthesized"] = dir / "synthesized.png";
        });

        RasterImage final_image;
        run_stage("gate", [&] {
            GateDecision g;
            g.threshold = config.gate_threshold;
            g.forced = config.force_quilt;
            const Size size = synth.image.size();
            if (config.exemplar_region) {
                if (!detail::rect_inside(*config.exemplar_region, size))
                    fail(ErrorKind::InvalidInput, "exemplar_region lies outside the image");
                g.source_region = *config.exemplar_region;
            } else if (auto sq = largest_class_square(completed, classes::wall)) {
                g.source_region = *sq;
            } else {
                g.source_region = {0, 0, size.width, size.height};
            }
            // Wall texture against wall texture: the largest all-wall square of
            // the synthesized image against that of the style image.
            const auto synth_wall = largest_class_square(completed, classes::wall);
            g.style_exemplar = largest_class_square(in.style_labels, classes::wall);
            if (g.style_exemplar && synth_wall) {
                g.gate_region = *synth_wall;
                g.quality = gate_dissimilarity(synth.image, *synth_wall, crop(to_rgb(in.style_image), *g.style_exemplar));
            }
            else
                report.flags.push_back("gate-skipped:no-wall");
            FallbackParams fp;
            fp.threshold = config.gate_threshold;
            fp.force_quilt = config.force_quilt;
            fp.quilt = config.quilt;
            // Without a measurement only a forced run quilts.
            const double quality = g.quality.value_or(-std::numeric_limits<double>::infinity());
            FallbackResult fb = composite_fallback(synth.image, completed, classes::wall, g.source_region, quality, fp);
            g.quilted = fb.quilted;
            g.wall_absent = fb.wall_absent;
            g.patch_n = fb.patch_n;
            if (fb.wall_absent) report.flags.push_back("fallback-wall-absent");
            if (fb.quilted && fb.patch_n < config.quilt.patch_n)
                report.flags.push_back("fallback-patch-size-reduced:" + std::to_string(fb.patch_n));
            report.gate = g;
            final_image = std::move(fb.image);
            save_png(dir / "final.png", final_image);
            report.outputs["final"] = dir / "final.png";
        });

        run_stage("metrics", [&] {
            std::optional<RasterImage> reference;
            if (in.texture) {
                reference = to_rgb(*in.texture);
                report.metrics_reference = "texture";
            } else if (in.style_image.size() == final_image.size()) {
                reference = to_rgb(in.style_image);
                report.metrics_reference = "style";
            }
            if (!reference) {
                report.flags.push_back("metrics-skipped:no-reference");
                return;
            }
            DetailOptions d;
            report.metrics = measure(final_image, *reference, d, config.harris);
        });
    } catch (const Error& e) {
        report.status = "failed";
        report.failed_stage = stage;
        const StageError err(stage, e);
        report.error = err.what();
        // Outputs of stages that finished stay on disk; the failing stage
        // never leaves a half-written file because every writer is atomic.
        std::error_code ec;
        if (fs::is_directory(dir, ec)) {
            try {
                write_json_file(report_path, to_json(report));
            } catch (const Error&) {
            }
        }
        throw err;
    }

    write_json_file(report_path, to_json(report));
    report.outputs["report"] = report_path;
    return report;
}

}  // namespace facade_forge
