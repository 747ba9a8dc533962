#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "facade_forge/maps/corner.hpp"
#include "facade_forge/maps/frequency.hpp"
#include "facade_forge/maps/spectrum.hpp"
#include "facade_forge/pipeline/repair.hpp"

using namespace facade_forge;

namespace {

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::BackendFailure: return 3;
        case ErrorKind::DegenerateMask: return 4;
        case ErrorKind::Io: return 1;
        default: return 2;
    }
}

std::uint64_t effective_seed(std::uint64_t seed) {
    RepairConfig c;
    c.seed = seed;
    apply_seed(c, std::getenv("FACADE_FORGE_SEED"));
    return c.seed;
}

Rect parse_rect(const std::string& s) {
    static const std::regex re(R"(^\s*(\d+),(\d+),(\d+),(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) fail(ErrorKind::InvalidInput, "region must be x,y,w,h: " + s);
    return {std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4])};
}

Size parse_size(const std::string& s) {
    static const std::regex re(R"(^\s*(\d+)[xX](\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) fail(ErrorKind::InvalidInput, "size must be WxH: " + s);
    return {std::stoi(m[1]), std::stoi(m[2])};
}

LabelMap read_labels(const std::string& path, const std::string& palette_path) {
    return palette_path.empty() ? load_label_map(path) : load_label_map(path, load_palette(palette_path));
}

/// Linear rescale to [0, 1]; returns (offset, scale) with value = v * scale + offset.
std::pair<double, double> rescale_unit(RasterImage& img) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : img.samples()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double scale = hi > lo ? hi - lo : 1.0;
    for (double& v : img.samples()) v = (v - lo) / scale;
    return {lo, scale};
}

struct CompleteArgs {
    std::string input, mask, palette, out, report, variant = "axis";
    std::uint64_t seed = 0;
    int patch_size = 7, iterations = 5;
    bool raster = false;
};

void run_complete(const CompleteArgs& a) {
    CompletionParams p;
    p.seed = effective_seed(a.seed);
    p.patch_size = a.patch_size;
    p.iterations_per_level = a.iterations;
    p.direction_variant = detail::parse_direction_variant(a.variant);
    const BinaryMask mask = load_mask_png(a.mask);
    CompletionResult raster;
    if (a.raster) {
        raster = complete(load_png(a.input), mask, p);
        save_png(a.out, raster.image);
    } else {
        LabelCompletionResult r = complete(read_labels(a.input, a.palette), mask, p);
        save_label_map(a.out, r.labels);
        raster = std::move(r.raster);
    }
    if (!a.report.empty()) {
        RunReport rep;
        rep.seed = p.seed;
        rep.mask_pixels = mask.count();
        rep.completion_levels = raster.levels;
        nlohmann::json j = to_json(rep, false)["completion"];
        write_json_file(a.report, {{"schema_version", report_schema_version},
                                   {"seed", p.seed},
                                   {"mask_pixels", mask.count()},
                                   {"params", to_json(p)},
                                   {"levels", j}});
    }
}

struct QuiltArgs {
    std::string source, region, out_size, out, plan;
    std::uint64_t seed = 0;
    int patch_n = 36, overlap = 5;
    double tolerance = 0.1;
};

void run_quilt(const QuiltArgs& a) {
    RasterImage src = load_png(a.source);
    if (!a.region.empty()) {
        const Rect r = parse_rect(a.region);
        if (!detail::rect_inside(r, src.size())) fail(ErrorKind::InvalidInput, "region lies outside the source");
        src = crop(src, r);
    }
    QuiltParams p;
    p.patch_n = a.patch_n;
    p.overlap = a.overlap;
    p.tolerance = a.tolerance;
    p.seed = effective_seed(a.seed);
    const QuiltResult q = quilt(src, parse_size(a.out_size), p);
    save_png(a.out, q.image);
    if (!a.plan.empty()) write_json_file(a.plan, to_json(q.plan));
}

struct MapsArgs {
    std::string input, prefix, spectrum_mode = "modulus";
    double sigma = 3.0;
};

void run_maps(const MapsArgs& a) {
    const RasterImage img = load_png(a.input);
    SpectrumMode mode;
    if (a.spectrum_mode == "modulus") mode = SpectrumMode::Modulus;
    else if (a.spectrum_mode == "parts") mode = SpectrumMode::AbsoluteParts;
    else fail(ErrorKind::InvalidParameter, "spectrum mode must be 'modulus' or 'parts'");

    FrequencyPair f = frequency_maps(img, a.sigma);
    save_png(a.prefix + "_low.png", f.low);
    const auto [high_offset, high_scale] = rescale_unit(f.high);
    save_png(a.prefix + "_high.png", f.high);

    RasterImage corner = corner_map(img);
    double corner_max = 0.0;
    for (double v : corner.samples()) corner_max = std::max(corner_max, v);
    if (corner_max > 0.0)
        for (double& v : corner.samples()) v /= corner_max;
    save_png(a.prefix + "_corner.png", corner);

    RasterImage spec = center_spectrum(spectrum_map(img, mode));
    double spec_max = 0.0;
    for (double v : spec.samples()) spec_max = std::max(spec_max, v);
    if (spec_max > 0.0)
        for (double& v : spec.samples()) v /= spec_max;
    save_png(a.prefix + "_spectrum.png", spec);

    write_json_file(a.prefix + "_maps.json",
                    {{"frequency_sigma", a.sigma},
                     {"high", {{"offset", high_offset}, {"scale", high_scale}}},
                     {"corner", {{"max", corner_max}}},
                     {"spectrum", {{"max", spec_max}, {"mode", a.spectrum_mode}, {"dc_centered", true}}}});
}

struct MetricsArgs {
    std::string a, b, out;
};

void run_metrics(const MetricsArgs& a) {
    const MetricReport r = measure(to_rgb(load_png(a.a)), to_rgb(load_png(a.b)));
    const nlohmann::json j = to_json(r);
    if (a.out.empty()) std::cout << j.dump(2) << "\n";
    else write_json_file(a.out, j);
}

struct RepairArgs {
    std::string texture, labels, palette, style, style_labels, style_palette, config, out_dir, backend, command;
    std::optional<std::uint64_t> seed;
    bool force_quilt = false, keep_workspace = false;
};

void run_repair(const RepairArgs& a, RepairMode mode) {
    RepairConfig cfg = a.config.empty() ? RepairConfig{} : config_from_json(read_json_file(a.config));
    if (!a.out_dir.empty()) cfg.output_dir = a.out_dir;
    if (!a.backend.empty()) cfg.backend = parse_backend(a.backend);
    if (!a.command.empty()) cfg.backend_command = a.command;
    if (a.force_quilt) cfg.force_quilt = true;
    if (a.keep_workspace) cfg.keep_workspace = true;
    if (a.seed) cfg.seed = *a.seed;
    apply_seed(cfg, std::getenv("FACADE_FORGE_SEED"));

    RepairInputs in;
    in.labels = read_labels(a.labels, a.palette);
    if (!a.texture.empty()) in.texture = load_png(a.texture);
    in.style_image = load_png(a.style);
    in.style_labels = read_labels(a.style_labels, a.style_palette);
    const RunReport r = repair(cfg, mode, in);
    std::cout << (cfg.output_dir / "report.json").string() << "\n";
    if (r.gate && r.gate->quilted) std::cout << "quilting fallback applied\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Façade label completion, texture synthesis and quilting"};
    app.require_subcommand(1);

    CompleteArgs ca;
    auto* complete_cmd = app.add_subcommand("complete", "Fill the masked region of a label map (or image)");
    complete_cmd->add_option("--input", ca.input, "Label map PNG")->required()->check(CLI::ExistingFile);
    complete_cmd->add_option("--mask", ca.mask, "Mask PNG, nonzero = void")->required()->check(CLI::ExistingFile);
    complete_cmd->add_option("--palette", ca.palette, "Palette JSON (default: sidecar of --input)");
    complete_cmd->add_option("--seed", ca.seed);
    complete_cmd->add_option("--out", ca.out)->required();
    complete_cmd->add_option("--direction-variant", ca.variant)->check(CLI::IsMember({"literal", "axis"}));
    complete_cmd->add_option("--report", ca.report, "Write per-level energies as JSON");
    complete_cmd->add_option("--patch-size", ca.patch_size);
    complete_cmd->add_option("--iterations", ca.iterations);
    complete_cmd->add_flag("--raster", ca.raster, "Treat --input as a plain image");

    QuiltArgs qa;
    auto* quilt_cmd = app.add_subcommand("quilt", "Quilt a texture from a source region");
    quilt_cmd->add_option("--source", qa.source)->required()->check(CLI::ExistingFile);
    quilt_cmd->add_option("--region", qa.region, "x,y,w,h (default: whole source)");
    quilt_cmd->add_option("--out-size", qa.out_size, "WxH")->required();
    quilt_cmd->add_option("--seed", qa.seed);
    quilt_cmd->add_option("--out", qa.out)->required();
    quilt_cmd->add_option("--plan", qa.plan, "Write the placement plan as JSON");
    quilt_cmd->add_option("--patch-n", qa.patch_n);
    quilt_cmd->add_option("--overlap", qa.overlap);
    quilt_cmd->add_option("--tolerance", qa.tolerance);

    MapsArgs ma;
    auto* maps_cmd = app.add_subcommand("maps", "Write frequency, corner and spectrum maps");
    maps_cmd->add_option("--input", ma.input)->required()->check(CLI::ExistingFile);
    maps_cmd->add_option("--out-prefix", ma.prefix)->required();
    maps_cmd->add_option("--sigma", ma.sigma, "Low-pass sigma");
    maps_cmd->add_option("--spectrum-mode", ma.spectrum_mode)->check(CLI::IsMember({"modulus", "parts"}));

    MetricsArgs mt;
    auto* metrics_cmd = app.add_subcommand("metrics", "Compare two images");
    metrics_cmd->add_option("--a", mt.a)->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--b", mt.b)->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--out", mt.out, "Report path (default: stdout)");

    RepairArgs ra;
    auto* repair_cmd = app.add_subcommand("repair", "End-to-end façade repair");
    repair_cmd->require_subcommand(1);
    auto add_repair_options = [&](CLI::App* c, bool occlusion) {
        if (occlusion) c->add_option("--texture", ra.texture, "Occluded photograph")->check(CLI::ExistingFile);
        c->add_option("--labels", ra.labels)->required()->check(CLI::ExistingFile);
        c->add_option("--palette", ra.palette);
        c->add_option("--style", ra.style)->required()->check(CLI::ExistingFile);
        c->add_option("--style-labels", ra.style_labels)->required()->check(CLI::ExistingFile);
        c->add_option("--style-palette", ra.style_palette);
        c->add_option("--config", ra.config)->check(CLI::ExistingFile);
        c->add_option("--out-dir", ra.out_dir);
        c->add_option("--seed", ra.seed);
        c->add_option("--backend", ra.backend)->check(
            CLI::IsMember({"external-command", "external", "quilt-only", "quilt", "passthrough"}));
        c->add_option("--backend-command", ra.command);
        c->add_flag("--force-quilt", ra.force_quilt);
        c->add_flag("--keep-workspace", ra.keep_workspace);
    };
    auto* occlusion_cmd = repair_cmd->add_subcommand("occlusion", "Remove occluders, then synthesize");
    add_repair_options(occlusion_cmd, true);
    auto* missing_cmd = repair_cmd->add_subcommand("missing", "Synthesize from complete manual labels");
    add_repair_options(missing_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*complete_cmd) run_complete(ca);
        else if (*quilt_cmd) run_quilt(qa);
        else if (*maps_cmd) run_maps(ma);
        else if (*metrics_cmd) run_metrics(mt);
        else if (*occlusion_cmd) run_repair(ra, RepairMode::Occlusion);
        else if (*missing_cmd) run_repair(ra, RepairMode::Missing);
    } catch (const Error& e) {
        std::cerr << "facade-forge: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "facade-forge: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
