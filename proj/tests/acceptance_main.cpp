// Acceptance gate: runs every verification experiment at its default
// (full-size) configuration and checks the fourteen acceptance criteria,
// printing one [PASS]/[FAIL] line per criterion.  Exit code 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "singulax/config.hpp"
#include "singulax/experiments.hpp"
#include "singulax/report.hpp"

using singulax::ExperimentOutcome;
using singulax::KeyValueConfig;
using singulax::MetricRow;

namespace {

struct CachedRun {
    ExperimentOutcome outcome;
    double seconds = 0.0;
    bool failed_to_run = false;
    std::string error;
};

std::map<std::string, CachedRun> g_runs;
const std::filesystem::path g_root = "acceptance_out";

const CachedRun& run_cached(const std::string& name) {
    auto it = g_runs.find(name);
    if (it != g_runs.end()) return it->second;
    std::fprintf(stderr, "... running %s\n", name.c_str());
    CachedRun r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        KeyValueConfig cfg;  // defaults are the acceptance-scale parameters
        r.outcome = singulax::run_experiment(name, cfg, g_root / name);
    } catch (const std::exception& e) {
        r.failed_to_run = true;
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "... %s done in %.1f s\n", name.c_str(), r.seconds);
    return g_runs.emplace(name, std::move(r)).first->second;
}

bool matches_any(const std::string& name, const std::vector<std::string>& prefixes) {
    for (const std::string& p : prefixes)
        if (name.rfind(p, 0) == 0) return true;
    return false;
}

/// Pass iff the experiment ran, at least one metric matches, and every
/// matching metric passed.  Failing rows are echoed for diagnosis.
bool metrics_pass(const std::string& experiment, const std::vector<std::string>& prefixes) {
    const CachedRun& run = run_cached(experiment);
    if (run.failed_to_run) {
        std::fprintf(stderr, "    %s did not run: %s\n", experiment.c_str(), run.error.c_str());
        return false;
    }
    std::size_t selected = 0;
    bool ok = true;
    for (const MetricRow& m : run.outcome.metrics) {
        if (!matches_any(m.name, prefixes)) continue;
        ++selected;
        if (!m.pass) {
            ok = false;
            std::fprintf(stderr, "    failing metric: %s = %s (want %s)\n", m.name.c_str(),
                         singulax::format_g17(m.value).c_str(), m.threshold.c_str());
        }
    }
    if (selected == 0) {
        std::fprintf(stderr, "    no metrics matched in %s\n", experiment.c_str());
        return false;
    }
    return ok;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Criterion 14: identical configurations must produce byte-identical
/// reports and tables.  Checked on reduced-size runs of two experiments,
/// one of which consumes seeded random draws heavily.
bool determinism_pass() {
    KeyValueConfig sector;
    sector.set("probes", "4");
    sector.set("nx", "4");
    sector.set("cells", "24");
    sector.set("sweep_args", "2");
    sector.set("sweep_cells", "16");

    KeyValueConfig mik;
    mik.set("tuple_limit", "1");
    mik.set("cells", "24");
    mik.set("refined_cells", "32");
    mik.set("power_iters", "10");
    mik.set("n_probes", "4");
    mik.set("fd_draws", "2");

    struct Case {
        const char* name;
        KeyValueConfig cfg;
        std::vector<const char*> files;
    };
    const Case cases[] = {
        {"sector-sweep", sector, {"report.json", "sector.csv"}},
        {"mikhlin-scan", mik, {"report.json", "scan.csv"}},
    };
    bool ok = true;
    for (const Case& c : cases) {
        const std::filesystem::path d1 = g_root / "determinism" / (std::string(c.name) + "_1");
        const std::filesystem::path d2 = g_root / "determinism" / (std::string(c.name) + "_2");
        try {
            (void)singulax::run_experiment(c.name, c.cfg, d1);
            (void)singulax::run_experiment(c.name, c.cfg, d2);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "    determinism rerun of %s failed: %s\n", c.name, e.what());
            ok = false;
            continue;
        }
        for (const char* f : c.files) {
            const std::string b1 = slurp(d1 / f), b2 = slurp(d2 / f);
            if (b1.empty() || b1 != b2) {
                std::fprintf(stderr, "    %s/%s differs between identical runs\n", c.name, f);
                ok = false;
            }
        }
    }
    return ok;
}

}  // namespace

int main() {
    std::filesystem::create_directories(g_root);

    struct Criterion {
        int id;
        const char* label;
        const char* experiment;  // nullptr for the special cases
        std::vector<std::string> prefixes;
    };
    const std::vector<Criterion> criteria = {
        {1, "radial kernel matches the closed form and refines at first order",
         "kernel-verify", {"kernel_l1", "kernel_order"}},
        {2, "kernel columns conserve weighted mass", "kernel-verify", {"kernel_mass"}},
        {3, "Gaussian envelope fits: finite, grid-stable constants and decay rate",
         "kernel-verify", {"fit_constant", "fit_stability", "fit_kappa"}},
        {4, "complex-time kernel tables admit finite envelope fits after growth removal",
         "scaling", {"complex_fit"}},
        {5, "oscillatory split steps are dominated by the plain diffusion",
         "domination", {"domination"}},
        {6, "kernel dilation identity: exact route at rounding, resampled route improving",
         "scaling", {"scaling_resampled", "scaling_improves", "scaling_exact"}},
        {7, "gauged and direct semigroup routes agree and converge at first order",
         "domination", {"gauge_vs_direct", "gauge_order", "conjugation_identity"}},
        {8, "exact frequency-derivative formula matches finite differences",
         "mikhlin-scan", {"deriv_fd"}},
        {9, "multiplier norm scans: finite, grid-stable, oracle-sharp (within budget)",
         "mikhlin-scan", {"mikhlin."}},
        {10, "second-derivative-to-generator ratios are finite and refinement-stable",
         "elliptic-reg", {"elliptic."}},
        {11, "space-time regularity quotients are step-stable with superposition check",
         "maxreg", {"maxreg."}},
        {12, "sesquilinear form obeys both sector inequalities on seeded probes",
         "sector-sweep", {"form_accretive", "form_angle"}},
        {13, "oblique reduction: congruence, sign resolution, shear isometry, roundtrip",
         "oblique-roundtrip", {"oblique_"}},
        {14, "identical configurations yield byte-identical reports", nullptr, {}},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        bool pass = false;
        if (c.id == 14) {
            pass = determinism_pass();
        } else {
            pass = metrics_pass(c.experiment, c.prefixes);
            if (c.id == 9) {
                const double secs = run_cached(c.experiment).seconds;
                if (secs > 600.0) {
                    std::fprintf(stderr, "    scan exceeded its 600 s budget: %.1f s\n", secs);
                    pass = false;
                }
            }
        }
        if (!pass) ++failures;
        std::printf("[%s] %02d %s\n", pass ? "PASS" : "FAIL", c.id, c.label);
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d of 14 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
