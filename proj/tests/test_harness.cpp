#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "singulax/config.hpp"
#include "singulax/experiments.hpp"
#include "singulax/report.hpp"

using namespace singulax;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path fresh_dir(const std::string& leaf) {
    const std::filesystem::path p = std::filesystem::temp_directory_path() / "singulax_tests" / leaf;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

KeyValueConfig tiny_sector_config() {
    KeyValueConfig cfg;
    cfg.set("probes", "2");
    cfg.set("nx", "4");
    cfg.set("cells", "16");
    cfg.set("sweep_args", "2");
    cfg.set("sweep_cells", "16");
    return cfg;
}

}  // namespace

TEST_CASE("config parsing: comments, trimming, types, duplicates") {
    const KeyValueConfig cfg = KeyValueConfig::from_text(
        "# a comment line\n"
        "cells = 128\n"
        "time = 0.25   # trailing comment\n"
        "flag = true\n"
        "name = graded\n"
        "values = 1.0, 2.5, -3\n");
    CHECK(cfg.get_size("cells", 0) == 128);
    CHECK(cfg.get_double("time", 0.0) == doctest::Approx(0.25));
    CHECK(cfg.get_bool("flag", false));
    CHECK(cfg.get_string("name", "") == "graded");
    const std::vector<double> vals = cfg.get_double_list("values", {});
    REQUIRE(vals.size() == 3);
    CHECK(vals[1] == doctest::Approx(2.5));
    CHECK(cfg.get_double("absent", 7.5) == doctest::Approx(7.5));  // fallback recorded
    CHECK_NOTHROW(cfg.reject_unknown());

    CHECK_THROWS_AS(KeyValueConfig::from_text("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::from_text("bad key = 1\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::from_text("novalue\n"), ConfigError);
}

TEST_CASE("unconsumed keys are rejected by name") {
    KeyValueConfig cfg;
    cfg.set("cells", "32");
    cfg.set("tpyo", "1");
    (void)cfg.get_size("cells", 0);
    try {
        cfg.reject_unknown();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("tpyo") != std::string::npos);
    }
}

TEST_CASE("overrides and typed failures") {
    KeyValueConfig cfg;
    cfg.apply_override("cells=64");
    CHECK(cfg.get_size("cells", 0) == 64);
    CHECK_THROWS_AS(cfg.apply_override("nonsense"), ConfigError);
    cfg.set("cells2", "notanumber");
    CHECK_THROWS_AS(cfg.get_double("cells2", 0.0), ConfigError);
}

TEST_CASE("admissibility guard names the failing constraint") {
    CHECK_NOTHROW(check_admissible(2.0, 0.0, 0.0, "ctx"));
    CHECK_THROWS_AS(check_admissible(2.0, 3.6, 0.8, "ctx"), ConfigError);
}

TEST_CASE("shortest float formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.0}) {
        const std::string s = format_g17(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_g17(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_g17(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("JSON nodes keep field order and quote non-finite numbers") {
    JsonNode obj = JsonNode::object();
    obj.field("zeta", 1.5).field("alpha", 2).field("flag", true);
    JsonNode arr = JsonNode::array();
    arr.push(JsonNode::number(std::numeric_limits<double>::infinity()));
    obj.field("values", std::move(arr));
    const std::string s = obj.dump();
    CHECK(s.find("\"zeta\"") < s.find("\"alpha\""));   // insertion order, not sorted
    CHECK(s.find("\"inf\"") != std::string::npos);     // non-finite as string
}

TEST_CASE("report builder aggregates pass flags and writes a file") {
    const std::filesystem::path dir = fresh_dir("report");
    ReportBuilder rep("demo");
    rep.metric("alpha", 0.5, "<= 1", true);
    rep.metric("beta", 2.0, "<= 1", false);
    rep.note("text note");
    rep.artifact("table.csv");
    CHECK_FALSE(rep.all_pass());
    const std::filesystem::path p = rep.write(dir);
    const std::string body = slurp(p);
    CHECK(body.find("\"experiment\": \"demo\"") != std::string::npos);
    CHECK(body.find("\"pass\": false") != std::string::npos);
    CHECK(body.find("table.csv") != std::string::npos);
}

TEST_CASE("csv writer emits a header and LF rows") {
    const std::filesystem::path dir = fresh_dir("csv");
    CsvWriter csv({"a", "b"});
    const double r1[] = {1.0, 2.5};
    csv.row(r1);
    csv.write(dir, "t.csv");
    const std::string body = slurp(dir / "t.csv");
    CHECK(body == "a,b\n1,2.5\n");
}

TEST_CASE("unknown experiment names are configuration errors") {
    KeyValueConfig cfg;
    const std::filesystem::path dir = fresh_dir("unknown");
    CHECK_THROWS_AS(run_experiment("no-such-thing", cfg, dir), ConfigError);
}

TEST_CASE("experiments reject stray keys") {
    KeyValueConfig cfg = tiny_sector_config();
    cfg.set("not_a_real_knob", "3");
    const std::filesystem::path dir = fresh_dir("stray");
    CHECK_THROWS_AS(run_experiment("sector-sweep", cfg, dir), ConfigError);
}

TEST_CASE("a tiny experiment runs, reports, and is byte-deterministic") {
    const std::filesystem::path d1 = fresh_dir("det1");
    const std::filesystem::path d2 = fresh_dir("det2");
    const ExperimentOutcome o1 = run_experiment("sector-sweep", tiny_sector_config(), d1);
    const ExperimentOutcome o2 = run_experiment("sector-sweep", tiny_sector_config(), d2);
    CHECK(o1.pass);
    CHECK(!o1.metrics.empty());
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "sector.csv") == slurp(d2 / "sector.csv"));
    CHECK(o1.report_json == slurp(d1 / "report.json"));
}

TEST_CASE("sweeps enumerate the Cartesian grid deterministically") {
    const std::filesystem::path dir = fresh_dir("sweep");
    std::vector<SweepAxis> axes = {{"seed", {"1", "2"}}, {"probes", {"2", "3"}}};
    const ExperimentOutcome oc =
        run_sweep("sector-sweep", tiny_sector_config(), axes, 64, dir);
    CHECK(oc.pass);
    CHECK(std::filesystem::exists(dir / "summary.csv"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    for (const char* leaf : {"run_000", "run_001", "run_002", "run_003"})
        CHECK(std::filesystem::exists(dir / leaf / "report.json"));
    const std::string summary = slurp(dir / "summary.csv");
    // First axis slowest: seed=1 rows come before seed=2 rows.
    CHECK(summary.find("0,1,2,") < summary.find("2,2,2,"));

    // Per-run validation problems are flagged, not fatal.
    std::vector<SweepAxis> bad_axes = {{"probes", {"2", "notanumber"}}};
    const std::filesystem::path dir2 = fresh_dir("sweep_bad");
    const ExperimentOutcome oc2 =
        run_sweep("sector-sweep", tiny_sector_config(), bad_axes, 64, dir2);
    CHECK_FALSE(oc2.pass);  // one run invalid, but the sweep completed
    const std::string s2 = slurp(dir2 / "summary.csv");
    CHECK(s2.find("invalid") != std::string::npos);

    // The cap is enforced up front.
    CHECK_THROWS_AS(run_sweep("sector-sweep", tiny_sector_config(), axes, 3, dir), ConfigError);
}
