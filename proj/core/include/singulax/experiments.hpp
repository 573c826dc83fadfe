/// @file experiments.hpp
/// @brief Named verification experiments: deterministic computations over the
///        operator library, emitting self-describing JSON reports and CSV
///        tables into an output directory.
///
/// Every experiment is a pure function of (config, output directory): no
/// clocks, no environment reads, RNG seeded from the config only — rerunning
/// with the same config yields byte-identical files.
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "singulax/config.hpp"
#include "singulax/report.hpp"

namespace singulax {

struct ExperimentOutcome {
    bool pass = false;
    std::filesystem::path report_path;
    std::string report_json;        ///< exact bytes written to report.json
    std::vector<MetricRow> metrics; ///< same rows as in the JSON
};

/// The available experiment names, in dispatch order.
const std::vector<std::string>& experiment_names();

/// Runs one experiment.  Throws ConfigError for invalid configuration or
/// violated hypotheses; the returned outcome's `pass` reflects the numeric
/// acceptance checks.
ExperimentOutcome run_experiment(const std::string& name, const KeyValueConfig& cfg,
                                 const std::filesystem::path& out_dir);

/// One sweep axis: config key plus the raw values to substitute.
struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

/// Cartesian sweep of `base` over the axes (deterministic odometer order,
/// first axis slowest).  Each run lands in <out_dir>/run_<idx>/; per-run
/// validation errors are recorded in the summary without aborting the sweep.
/// Writes <out_dir>/summary.csv; `pass` is true when every run passed.
ExperimentOutcome run_sweep(const std::string& name, const KeyValueConfig& base,
                            const std::vector<SweepAxis>& axes, std::size_t cap,
                            const std::filesystem::path& out_dir);

}  // namespace singulax
