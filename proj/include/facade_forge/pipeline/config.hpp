#pragma once

#include <cstring>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "facade_forge/completion/cost.hpp"
#include "facade_forge/maps/corner.hpp"
#include "facade_forge/synthesis/backend.hpp"

namespace facade_forge {

struct RepairConfig {
    std::vector<ClassId> occluder_classes{classes::vegetation};
    int mask_dilation = 2;
    CompletionParams completion;
    QuiltParams quilt;
    HarrisParams harris;
    double gate_threshold = 0.3;
    bool force_quilt = false;
    /// Exemplar for the quilting fallback, in synthesized-image coordinates.
    /// Empty: the largest all-wall square of the completed labels.
    std::optional<Rect> exemplar_region;
    BackendKind backend = BackendKind::QuiltOnly;
    std::string backend_command;
    std::vector<std::string> backend_args;
    bool keep_workspace = false;
    std::uint64_t seed = 0;
    fs::path output_dir = "out";

    void validate() const {
        if (mask_dilation < 0) fail(ErrorKind::InvalidParameter, "mask_dilation must be >= 0");
        if (!(gate_threshold >= 0.0)) fail(ErrorKind::InvalidParameter, "gate_threshold must be >= 0");
        completion.validate();
        quilt.validate();
        harris.validate();
        if (backend == BackendKind::ExternalCommand && backend_command.empty())
            fail(ErrorKind::InvalidParameter, "external-command backend needs backend_command");
    }
};

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, std::string("config field '") + key + "': " + e.what());
    }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) fail(ErrorKind::InvalidInput, where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) fail(ErrorKind::InvalidInput, "unknown key '" + key + "' in " + where);
    }
}

inline Rect rect_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) fail(ErrorKind::InvalidInput, "rectangle must be [x, y, width, height]");
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

inline DirectionVariant parse_direction_variant(const std::string& s) {
    if (s == "literal") return DirectionVariant::Literal;
    if (s == "axis" || s == "axis-penalty") return DirectionVariant::AxisPenalty;
    fail(ErrorKind::InvalidParameter, "direction variant must be 'literal' or 'axis'");
}

}  // namespace detail

inline CompletionParams completion_from_json(const nlohmann::json& j, CompletionParams p = {}) {
    detail::reject_unknown(j, {"patch_size", "lambda_proximity", "lambda_direction", "directions",
                               "iterations_per_level", "seed", "direction_variant", "buffer_halfwidth",
                               "pyramid_min_dim"},
                           "completion");
    detail::read_field(j, "patch_size", p.patch_size);
    detail::read_field(j, "lambda_proximity", p.lambda_proximity);
    detail::read_field(j, "lambda_direction", p.lambda_direction);
    detail::read_field(j, "directions", p.directions);
    detail::read_field(j, "iterations_per_level", p.iterations_per_level);
    detail::read_field(j, "seed", p.seed);
    detail::read_field(j, "buffer_halfwidth", p.buffer_halfwidth);
    detail::read_field(j, "pyramid_min_dim", p.pyramid_min_dim);
    if (j.contains("direction_variant"))
        p.direction_variant = detail::parse_direction_variant(j["direction_variant"].get<std::string>());
    return p;
}

inline QuiltParams quilt_from_json(const nlohmann::json& j, QuiltParams p = {}) {
    detail::reject_unknown(j, {"patch_n", "overlap", "tolerance", "seed"}, "quilt");
    detail::read_field(j, "patch_n", p.patch_n);
    detail::read_field(j, "overlap", p.overlap);
    detail::read_field(j, "tolerance", p.tolerance);
    detail::read_field(j, "seed", p.seed);
    return p;
}

inline HarrisParams harris_from_json(const nlohmann::json& j, HarrisParams p = {}) {
    detail::reject_unknown(j, {"k", "omega", "window_sigma", "window_radius", "trace_power"}, "harris");
    detail::read_field(j, "k", p.k);
    detail::read_field(j, "omega", p.omega);
    detail::read_field(j, "window_sigma", p.window_sigma);
    detail::read_field(j, "window_radius", p.window_radius);
    detail::read_field(j, "trace_power", p.trace_power);
    return p;
}

/// Occluder classes may be given by id or by palette name.
inline RepairConfig config_from_json(const nlohmann::json& j, const Palette& palette = facade_palette()) {
    detail::reject_unknown(j, {"occluder_classes", "mask_dilation", "completion", "quilt", "harris", "gate_threshold",
                               "force_quilt", "exemplar_region", "backend", "backend_command", "backend_args",
                               "keep_workspace", "seed", "output_dir"},
                           "config");
    RepairConfig c;
    if (j.contains("occluder_classes")) {
        c.occluder_classes.clear();
        for (const auto& v : j["occluder_classes"]) {
            if (v.is_string()) {
                const std::string name = v.get<std::string>();
                const auto id = palette.id_of(name);
                if (!id) fail(ErrorKind::InvalidInput, "occluder class '" + name + "' not in palette");
                c.occluder_classes.push_back(*id);
            } else {
                const int id = v.get<int>();
                if (id < 0 || id > 255 || !palette.contains(static_cast<ClassId>(id)))
                    fail(ErrorKind::InvalidInput, "occluder class " + std::to_string(id) + " not in palette");
                c.occluder_classes.push_back(static_cast<ClassId>(id));
            }
        }
    }
    detail::read_field(j, "mask_dilation", c.mask_dilation);
    if (j.contains("completion")) c.completion = completion_from_json(j["completion"]);
    if (j.contains("quilt")) c.quilt = quilt_from_json(j["quilt"]);
    if (j.contains("harris")) c.harris = harris_from_json(j["harris"]);
    detail::read_field(j, "gate_threshold", c.gate_threshold);
    detail::read_field(j, "force_quilt", c.force_quilt);
    if (j.contains("exemplar_region")) c.exemplar_region = detail::rect_from_json(j["exemplar_region"]);
    if (j.contains("backend")) c.backend = parse_backend(j["backend"].get<std::string>());
    detail::read_field(j, "backend_command", c.backend_command);
    detail::read_field(j, "backend_args", c.backend_args);
    detail::read_field(j, "keep_workspace", c.keep_workspace);
    detail::read_field(j, "seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    return c;
}

inline nlohmann::json to_json(const CompletionParams& p) {
    return {{"patch_size", p.patch_size},
            {"lambda_proximity", p.lambda_proximity},
            {"lambda_direction", p.lambda_direction},
            {"directions", p.directions},
            {"iterations_per_level", p.iterations_per_level},
            {"seed", p.seed},
            {"direction_variant", p.direction_variant == DirectionVariant::Literal ? "literal" : "axis"},
            {"buffer_halfwidth", p.effective_buffer_halfwidth()},
            {"pyramid_min_dim", p.pyramid_min_dim}};
}

inline nlohmann::json to_json(const RepairConfig& c) {
    nlohmann::json j;
    j["occluder_classes"] = c.occluder_classes;
    j["mask_dilation"] = c.mask_dilation;
    j["completion"] = to_json(c.completion);
    j["quilt"] = {{"patch_n", c.quilt.patch_n}, {"overlap", c.quilt.overlap}, {"tolerance", c.quilt.tolerance},
                  {"seed", c.quilt.seed}};
    j["harris"] = {{"k", c.harris.k}, {"omega", c.harris.omega}, {"window_sigma", c.harris.window_sigma},
                   {"window_radius", c.harris.window_radius}, {"trace_power", c.harris.trace_power}};
    j["gate_threshold"] = c.gate_threshold;
    j["force_quilt"] = c.force_quilt;
    if (c.exemplar_region)
        j["exemplar_region"] = {c.exemplar_region->x, c.exemplar_region->y, c.exemplar_region->width,
                                c.exemplar_region->height};
    j["backend"] = to_string(c.backend);
    if (!c.backend_command.empty()) j["backend_command"] = c.backend_command;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir.string();
    return j;
}

/// The run seed drives every stochastic stage. FACADE_FORGE_SEED, when set,
/// overrides the configured value.
inline void apply_seed(RepairConfig& c, const char* env_seed) {
    if (env_seed && *env_seed) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(env_seed, &used, 10);
            if (used != std::strlen(env_seed)) throw std::invalid_argument("trailing characters");
            c.seed = v;
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidInput, std::string("FACADE_FORGE_SEED is not an unsigned integer: ") + env_seed);
        }
    }
    c.completion.seed = c.seed;
    c.quilt.seed = c.seed;
}

}  // namespace facade_forge
