// Command-line driver: runs one named verification experiment (or a
// deterministic Cartesian sweep of one) and reports pass/fail.
//
// Exit codes: 0 every acceptance check passed, 1 at least one numeric check
// failed (or an internal error), 2 configuration/validation error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "singulax/config.hpp"
#include "singulax/experiments.hpp"
#include "singulax/report.hpp"

namespace {

singulax::SweepAxis parse_axis(const std::string& text) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw singulax::ConfigError("sweep axis must be key=v1,v2,..., got `" + text + "`");
    singulax::SweepAxis axis;
    axis.key = text.substr(0, eq);
    std::string rest = text.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const std::size_t comma = rest.find(',', pos);
        const std::string item =
            rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (item.empty())
            throw singulax::ConfigError("sweep axis `" + axis.key + "`: empty value");
        axis.values.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (axis.values.empty())
        throw singulax::ConfigError("sweep axis `" + axis.key + "`: no values");
    return axis;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"singulax: numerical verification experiments for degenerate "
                 "diffusion operators on the half-space"};
    app.get_formatter()->column_width(30);

    std::string experiment;
    std::string config_path;
    std::vector<std::string> overrides;
    std::vector<std::string> sweep_specs;
    std::string out_dir = "singulax-out";
    std::size_t sweep_cap = 64;
    bool list_only = false;

    app.add_flag("--list", list_only, "List the available experiments and exit");
    app.add_option("experiment", experiment, "Experiment name (see --list)");
    app.add_option("--config", config_path, "Config file of `key = value` lines");
    app.add_option("--set", overrides, "Override one config key (key=value); repeatable")
        ->type_name("KEY=VALUE");
    app.add_option("--sweep", sweep_specs,
                   "Sweep one config key over comma-separated values "
                   "(key=v1,v2,...); repeatable, at most 2 axes")
        ->type_name("KEY=V1,V2,...");
    app.add_option("--sweep-cap", sweep_cap, "Maximum number of sweep runs")
        ->capture_default_str();
    app.add_option("--out", out_dir, "Output directory for reports and tables")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit cleanly; bad usage is a config error
    }

    if (list_only) {
        for (const std::string& name : singulax::experiment_names()) std::printf("%s\n", name.c_str());
        return 0;
    }

    try {
        if (experiment.empty())
            throw singulax::ConfigError("no experiment given; see --list for the names");
        if (sweep_specs.size() > 2)
            throw singulax::ConfigError("at most 2 sweep axes are supported");

        singulax::KeyValueConfig cfg;
        if (!config_path.empty()) cfg = singulax::KeyValueConfig::from_file(config_path);
        for (const std::string& ov : overrides) cfg.apply_override(ov);

        std::vector<singulax::SweepAxis> axes;
        axes.reserve(sweep_specs.size());
        for (const std::string& s : sweep_specs) axes.push_back(parse_axis(s));

        const std::filesystem::path out(out_dir);
        std::filesystem::create_directories(out);

        const singulax::ExperimentOutcome outcome =
            axes.empty() ? singulax::run_experiment(experiment, cfg, out)
                         : singulax::run_sweep(experiment, cfg, axes, sweep_cap, out);

        for (const singulax::MetricRow& m : outcome.metrics)
            std::printf("[%s] %-42s %-24s (%s)\n", m.pass ? "PASS" : "FAIL", m.name.c_str(),
                        singulax::format_g17(m.value).c_str(), m.threshold.c_str());
        std::printf("%s: %s -> %s\n", experiment.c_str(), outcome.pass ? "PASS" : "FAIL",
                    outcome.report_path.string().c_str());
        return outcome.pass ? 0 : 1;
    } catch (const singulax::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
