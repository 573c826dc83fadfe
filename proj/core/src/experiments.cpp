#include "singulax/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "singulax/bessel.hpp"
#include "singulax/grid.hpp"
#include "singulax/halfspace.hpp"
#include "singulax/linalg.hpp"
#include "singulax/multiplier.hpp"
#include "singulax/oscillatory.hpp"
#include "singulax/probes.hpp"
#include "singulax/reductions.hpp"
#include "singulax/special.hpp"

namespace singulax {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) { return format_g17(v); }

std::string tag(const std::string& base, std::initializer_list<std::pair<const char*, double>> kv) {
    std::string s = base;
    for (const auto& [k, v] : kv) {
        char buf[64];
        std::snprintf(buf, sizeof buf, ".%s%g", k, v);
        s += buf;
    }
    return s;
}

void check_le(ReportBuilder& rep, const std::string& name, double value, double bound) {
    rep.metric(name, value, "<= " + fmt(bound), std::isfinite(value) && value <= bound);
}

void check_ge(ReportBuilder& rep, const std::string& name, double value, double bound) {
    rep.metric(name, value, ">= " + fmt(bound), std::isfinite(value) && value >= bound);
}

void check_finite(ReportBuilder& rep, const std::string& name, double value) {
    rep.metric(name, value, "finite", std::isfinite(value));
}

void check_range(ReportBuilder& rep, const std::string& name, double value, double lo, double hi) {
    rep.metric(name, value, "in [" + fmt(lo) + ", " + fmt(hi) + "]",
               std::isfinite(value) && value >= lo && value <= hi);
}

/// fine <= max(coarse, floor): refinement must not worsen a quantity that is
/// already at the arithmetic noise floor.
void check_not_worse(ReportBuilder& rep, const std::string& name, double fine, double coarse,
                     double floor) {
    rep.metric(name, fine, "<= max(coarse = " + fmt(coarse) + ", " + fmt(floor) + ")",
               std::isfinite(fine) && fine <= std::max(coarse, floor));
}

double rel_l2(std::span<const cdouble> u, std::span<const cdouble> ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num += std::norm(u[i] - ref[i]);
        den += std::norm(ref[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<cdouble> to_complex(std::span<const double> u) {
    std::vector<cdouble> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i];
    return v;
}

std::size_t nearest_node(const RadialGrid& g, double target) {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.cells(); ++j) {
        const double d = std::abs(g.node(j) - target);
        if (d < dist) {
            dist = d;
            best = j;
        }
    }
    return best;
}

/// Bit-exact uniform draw (independent of library distribution internals).
double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

// ---------------------------------------------------------------------------
// kernel-verify: closed-form kernel match, stochastic completeness, and
// Gaussian envelope fits for the plain radial diffusion.
// ---------------------------------------------------------------------------
void exp_kernel_verify(const KeyValueConfig& cfg, const std::filesystem::path& out,
                       ReportBuilder& rep) {
    const std::vector<double> c_list = cfg.get_double_list("c_list", {-0.5, 0.0, 1.0, 2.0});
    const std::vector<double> t_list = cfg.get_double_list("t_list", {0.1, 1.0});
    const std::size_t cells = cfg.get_size("cells", 512);
    const std::size_t coarse = cfg.get_size("coarse_cells", cells / 2);
    const double grading = cfg.get_double("grading", 2.0);
    const std::vector<double> source_fracs =
        cfg.get_double_list("source_fracs", {0.05, 0.2, 0.45});
    const bool run_fits = cfg.get_bool("run_fits", true);
    const std::size_t fit_cells = cfg.get_size("fit_cells", 512);
    const std::size_t fit_refined = cfg.get_size("fit_refined_cells", 2 * fit_cells);
    const double fit_t_lo = cfg.get_double("fit_t_lo", 1e-2);
    const double fit_t_hi = cfg.get_double("fit_t_hi", 10.0);
    const std::size_t fit_t_count = cfg.get_size("fit_t_count", 13);
    const std::size_t fit_row_stride = cfg.get_size("fit_row_stride", 4);
    cfg.reject_unknown();

    CsvWriter err_csv({"c", "t", "cells", "rel_l1", "mass_dev"});

    for (double c : c_list) {
        for (double t : t_list) {
            double err_at[2] = {0.0, 0.0};
            double mass_at[2] = {0.0, 0.0};
            const std::size_t sizes[2] = {coarse, cells};
            for (int lev = 0; lev < 2; ++lev) {
                const RadialGrid g(sizes[lev], 20.0 * std::sqrt(t), grading);
                const BesselOperator op(g, c);
                const std::vector<double>& mass = op.masses();
                double worst_err = 0.0, worst_mass = 0.0;
                for (double frac : source_fracs) {
                    const std::size_t col = nearest_node(g, frac * g.y_max());
                    const double rho = g.node(col);
                    const std::vector<double> kcol = op.kernel_column(t, col);
                    double num = 0.0, den = 0.0;
                    for (std::size_t i = 0; i < g.cells(); ++i) {
                        const double oracle = bessel_heat_kernel(c, t, g.node(i), rho);
                        num += std::abs(kcol[i] - oracle) * mass[i];
                        den += oracle * mass[i];
                    }
                    worst_err = std::max(worst_err, num / den);
                    worst_mass = std::max(worst_mass, std::abs(op.kernel_mass(t, col) - 1.0));
                }
                err_at[lev] = worst_err;
                mass_at[lev] = worst_mass;
                const double row[] = {c, t, static_cast<double>(sizes[lev]), worst_err,
                                      worst_mass};
                err_csv.row(row);
            }
            check_le(rep, tag("kernel_l1", {{"c", c}, {"t", t}}), err_at[1], 1e-3);
            check_ge(rep, tag("kernel_order", {{"c", c}, {"t", t}}),
                     std::log2(err_at[0] / err_at[1]), 1.0);
            check_le(rep, tag("kernel_mass", {{"c", c}, {"t", t}}), mass_at[1], 1e-6);
        }
    }
    err_csv.write(out, "kernel_error.csv");
    rep.artifact("kernel_error.csv");

    if (!run_fits) return;

    CsvWriter fit_csv({"c", "cells", "kind", "constant", "kappa", "samples"});
    const std::vector<double> fit_targets = {0.1, 0.5, 2.0, 8.0};
    const double max_target = *std::max_element(fit_targets.begin(), fit_targets.end());
    for (double c : c_list) {
        GaussianBoundFit fits[2][2];  // [level][kind]
        const std::size_t sizes[2] = {fit_cells, fit_refined};
        for (int lev = 0; lev < 2; ++lev) {
            std::vector<KernelSample> sv, sd;
            for (std::size_t it = 0; it < fit_t_count; ++it) {
                const double frac =
                    fit_t_count > 1 ? static_cast<double>(it) / (fit_t_count - 1) : 0.0;
                const double t = fit_t_lo * std::pow(fit_t_hi / fit_t_lo, frac);
                // One uniform grid per time, sized to the diffusive scale, so
                // every source column keeps a resolved Gaussian flank: tail
                // samples on cells wider than the flank would read as extra
                // decay-rate slack, not as kernel values.
                const RadialGrid g(sizes[lev], max_target + 20.0 * std::sqrt(t), 1.0);
                const BesselOperator op(g, c);
                const TridiagD dmat = derivative_matrix(g);
                for (double target : fit_targets) {
                    const std::size_t col = nearest_node(g, target);
                    const double rho = g.node(col);
                    const std::vector<double> kcol =
                        op.kernel_column(t, col, TimeScheme::backward_euler, 1024);
                    const std::vector<double> dcol = dmat.apply(std::span<const double>(kcol));
                    for (std::size_t i = 0; i < g.cells(); i += fit_row_stride) {
                        sv.push_back({cdouble(t, 0.0), g.node(i), rho, std::abs(kcol[i])});
                        sd.push_back({cdouble(t, 0.0), g.node(i), rho, std::abs(dcol[i])});
                    }
                }
            }
            fits[lev][0] = fit_gaussian_bound(sv, c, KernelBoundKind::value);
            fits[lev][1] = fit_gaussian_bound(sd, c, KernelBoundKind::y_derivative);
            for (int kind = 0; kind < 2; ++kind) {
                const double row[] = {c,
                                      static_cast<double>(sizes[lev]),
                                      static_cast<double>(kind),
                                      fits[lev][kind].constant,
                                      fits[lev][kind].kappa,
                                      static_cast<double>(fits[lev][kind].samples_used)};
                fit_csv.row(row);
            }
        }
        check_finite(rep, tag("fit_constant", {{"c", c}}), fits[1][0].constant);
        check_finite(rep, tag("fit_constant_dy", {{"c", c}}), fits[1][1].constant);
        check_le(rep, tag("fit_stability", {{"c", c}}),
                 std::abs(fits[1][0].constant / fits[0][0].constant - 1.0), 0.10);
        check_le(rep, tag("fit_stability_dy", {{"c", c}}),
                 std::abs(fits[1][1].constant / fits[0][1].constant - 1.0), 0.10);
        if (c == 0.0) check_le(rep, "fit_kappa.c0", fits[1][0].kappa, 4.5);
    }
    fit_csv.write(out, "gaussian_fit.csv");
    rep.artifact("gaussian_fit.csv");
}

// ---------------------------------------------------------------------------
// domination: entrywise split-step domination by the plain diffusion, plus
// agreement of the gauged and direct realizations of the semigroup.
// ---------------------------------------------------------------------------
void exp_domination(const KeyValueConfig& cfg, const std::filesystem::path& out,
                    ReportBuilder& rep) {
    const std::vector<double> b_list = cfg.get_double_list("b_list", {0.5, 1.0, 2.0});
    const std::vector<double> t_list = cfg.get_double_list("t_list", {0.1, 0.5, 1.0});
    const double c = cfg.get_double("drift_exponent", 0.5);
    const std::size_t cells = cfg.get_size("cells", 512);
    const std::size_t coarse = cfg.get_size("coarse_cells", cells / 2);
    const double grading = cfg.get_double("grading", 2.0);
    const double y_max = cfg.get_double("y_max", 8.0);
    const std::size_t steps = cfg.get_size("steps", 64);
    const std::size_t stride = cfg.get_size("column_stride", 13);
    const double gauge_t = cfg.get_double("gauge_t", 0.7);
    const std::size_t gauge_steps = cfg.get_size("gauge_steps", 256);
    const std::size_t reference_steps = cfg.get_size("reference_steps", 4096);
    cfg.reject_unknown();

    const RadialGrid g_fine(cells, y_max, grading);
    const RadialGrid g_coarse(coarse, y_max, grading);
    CsvWriter csv({"b", "t", "cells", "violation"});

    for (double b : b_list) {
        const OscillatoryOperator fine(g_fine, c, b);
        const OscillatoryOperator coarse_op(g_coarse, c, b);
        for (double t : t_list) {
            const double vf = fine.domination_violation(t, static_cast<int>(steps), stride);
            const double vc = coarse_op.domination_violation(t, static_cast<int>(steps), stride);
            const double rowf[] = {b, t, static_cast<double>(cells), vf};
            const double rowc[] = {b, t, static_cast<double>(coarse), vc};
            csv.row(rowc);
            csv.row(rowf);
            check_le(rep, tag("domination", {{"b", b}, {"t", t}}), vf, 1e-6);
            check_not_worse(rep, tag("domination_refinement", {{"b", b}, {"t", t}}), vf, vc,
                            1e-12);
        }

        // Gauged route (time-converged trapezoidal on the auxiliary operator)
        // against the direct-matrix stepping at the working step count.
        std::vector<double> f(g_fine.cells());
        for (std::size_t j = 0; j < f.size(); ++j)
            f[j] = annular_bump(g_fine.node(j), 0.3 * y_max, 0.18 * y_max) +
                   0.5 * plateau_profile(g_fine.node(j), 0.1 * y_max, 0.35 * y_max);
        const std::vector<cdouble> fc = to_complex(f);
        const std::vector<cdouble> ref =
            fine.evolve(cdouble(gauge_t, 0.0), fc, OscScheme::crank_nicolson,
                        static_cast<int>(reference_steps));
        const std::vector<cdouble> c1 =
            fine.evolve_direct_cn(gauge_t, fc, static_cast<int>(gauge_steps));
        const std::vector<cdouble> c2 =
            fine.evolve_direct_cn(gauge_t, fc, static_cast<int>(2 * gauge_steps));
        const std::vector<cdouble> same_steps =
            fine.evolve(cdouble(gauge_t, 0.0), fc, OscScheme::crank_nicolson,
                        static_cast<int>(gauge_steps));

        double e1 = 0.0, e2 = 0.0, num = 0.0, den = 0.0;
        {
            std::vector<cdouble> d1(fc.size()), d2(fc.size()), d3(fc.size());
            for (std::size_t j = 0; j < fc.size(); ++j) {
                d1[j] = c1[j] - ref[j];
                d2[j] = c2[j] - ref[j];
                d3[j] = same_steps[j] - c1[j];
            }
            const double nr = weighted_norm(g_fine, std::span<const cdouble>(ref), 2.0, c);
            e1 = weighted_norm(g_fine, std::span<const cdouble>(d1), 2.0, c) / nr;
            e2 = weighted_norm(g_fine, std::span<const cdouble>(d2), 2.0, c) / nr;
            num = weighted_norm(g_fine, std::span<const cdouble>(d3), 2.0, c);
            den = nr;
        }
        check_le(rep, tag("gauge_vs_direct", {{"b", b}}), e1, 1e-3);
        check_ge(rep, tag("gauge_order", {{"b", b}}), std::log2(e1 / e2), 1.0);
        check_le(rep, tag("conjugation_identity", {{"b", b}}), num / den, 1e-12);
    }
    csv.write(out, "domination.csv");
    rep.artifact("domination.csv");
}

// ---------------------------------------------------------------------------
// scaling: the kernel dilation identity (exact discrete route and a
// continuum-referenced resampled route) plus complex-time envelope fits.
// ---------------------------------------------------------------------------

/// Resampled deviation: kernel for (b, grid) at time t against the dilated
/// kernel on an incommensurate grid (different cell count), brought back by
/// cubic interpolation in y and 3-point interpolation across source columns.
/// Unlike the node-exact dilation this has genuine discretization content, so
/// it must decrease under refinement.
double scaling_resampled(double c, double b, double t, const RadialGrid& g1, double factor,
                         int steps) {
    const double ab = std::abs(b);
    const double sgn = b > 0.0 ? 1.0 : -1.0;
    const OscillatoryOperator op1(g1, c, b);
    const std::size_t n1 = g1.cells();
    const auto n2 = static_cast<std::size_t>(std::lround(factor * static_cast<double>(n1)));
    const RadialGrid g2(n2, ab * g1.y_max(), g1.grading());
    const OscillatoryOperator op2(g2, c, sgn);
    const double scale = std::pow(ab, c + 1.0);

    double peak = 0.0, worst = 0.0;
    std::vector<std::pair<std::vector<cdouble>, std::vector<cdouble>>> pairs;
    for (double frac : {1.0 / 6.0, 1.0 / 3.0, 0.6}) {
        const auto col1 = static_cast<std::size_t>(frac * static_cast<double>(n1));
        const double rho2 = ab * g1.node(col1);
        const std::vector<cdouble> k1 =
            op1.kernel_column(cdouble(t, 0.0), col1, OscScheme::backward_euler, steps);

        // Bracketing source columns on the dilated grid.
        std::size_t k0 = nearest_node(g2, rho2);
        k0 = std::min(std::max<std::size_t>(k0, 1), n2 - 2);
        const std::size_t ks[3] = {k0 - 1, k0, k0 + 1};
        const double x0 = g2.node(ks[0]), x1 = g2.node(ks[1]), x2 = g2.node(ks[2]);
        const double w0 = (rho2 - x1) * (rho2 - x2) / ((x0 - x1) * (x0 - x2));
        const double w1 = (rho2 - x0) * (rho2 - x2) / ((x1 - x0) * (x1 - x2));
        const double w2 = (rho2 - x0) * (rho2 - x1) / ((x2 - x0) * (x2 - x1));
        std::vector<cdouble> comb(n2, cdouble(0.0, 0.0));
        const double ws[3] = {w0, w1, w2};
        for (int a = 0; a < 3; ++a) {
            const std::vector<cdouble> colv = op2.kernel_column(
                cdouble(ab * ab * t, 0.0), ks[a], OscScheme::backward_euler, steps);
            for (std::size_t i = 0; i < n2; ++i) comb[i] += ws[a] * colv[i];
        }
        std::vector<double> re(n2), im(n2);
        for (std::size_t i = 0; i < n2; ++i) {
            re[i] = comb[i].real();
            im[i] = comb[i].imag();
        }
        const MonotoneCubic sre(g2.nodes(), re), sim(g2.nodes(), im);
        std::vector<cdouble> mapped(n1);
        for (std::size_t j = 0; j < n1; ++j) {
            const double yt = ab * g1.node(j);
            mapped[j] = scale * cdouble(sre(yt), sim(yt));
        }
        for (const cdouble& v : k1) peak = std::max(peak, std::abs(v));
        pairs.emplace_back(k1, std::move(mapped));
    }
    if (peak == 0.0) return 0.0;
    for (const auto& [k1, mapped] : pairs)
        for (std::size_t j = 0; j < k1.size(); ++j)
            worst = std::max(worst, std::abs(k1[j] - mapped[j]) / peak);
    return worst;
}

void exp_scaling(const KeyValueConfig& cfg, const std::filesystem::path& out,
                 ReportBuilder& rep) {
    const std::vector<double> b_list = cfg.get_double_list("b_list", {1.0, 2.0, 4.0});
    const double c = cfg.get_double("drift_exponent", 0.5);
    const double t = cfg.get_double("time", 0.25);
    const std::size_t cells = cfg.get_size("cells", 512);
    const std::size_t coarse = cfg.get_size("coarse_cells", cells / 2);
    const double grading = cfg.get_double("grading", 2.0);
    const double y_max = cfg.get_double("y_max", 10.0);
    const double factor = cfg.get_double("resample_factor", 1.5);
    const std::size_t resample_steps = cfg.get_size("resample_steps", 192);
    const std::vector<double> fit_b_list = cfg.get_double_list("fit_b_list", {0.0, 1.0, 2.0});
    const std::vector<double> fit_t_list = cfg.get_double_list("fit_t_list", {0.1, 0.3, 1.0});
    const std::size_t fit_cells = cfg.get_size("fit_cells", 192);
    const double fit_y_max = cfg.get_double("fit_y_max", 12.0);
    const std::size_t fit_steps = cfg.get_size("fit_steps", 192);
    const double eps = cfg.get_double("epsilon", 1.0);
    const double delta = cfg.get_double("delta", 0.9);
    cfg.reject_unknown();

    const RadialGrid g_fine(cells, y_max, grading);
    const RadialGrid g_coarse(coarse, y_max, grading);
    CsvWriter csv({"b", "cells", "resampled_dev", "exact_dev"});

    for (double b : b_list) {
        const double rf = scaling_resampled(c, b, t, g_fine, factor,
                                            static_cast<int>(resample_steps));
        const double rc = scaling_resampled(c, b, t, g_coarse, factor,
                                            static_cast<int>(resample_steps));
        const double ef = scaling_deviation(c, b, cdouble(t, 0.0), g_fine);
        const double ec = scaling_deviation(c, b, cdouble(t, 0.0), g_coarse);
        const double rowc[] = {b, static_cast<double>(coarse), rc, ec};
        const double rowf[] = {b, static_cast<double>(cells), rf, ef};
        csv.row(rowc);
        csv.row(rowf);
        check_le(rep, tag("scaling_resampled", {{"b", b}}), rf, 1e-2);
        rep.metric(tag("scaling_improves", {{"b", b}}), rf,
                   "<= coarse deviation = " + fmt(rc), std::isfinite(rf) && rf <= rc);
        check_le(rep, tag("scaling_exact", {{"b", b}}), ef, 1e-10);
        check_not_worse(rep, tag("scaling_exact_refinement", {{"b", b}}), ef, ec, 1e-12);
    }
    csv.write(out, "scaling.csv");
    rep.artifact("scaling.csv");

    // Complex-time kernel tables: fit a Gaussian envelope after dividing out
    // the oscillation growth factor exp(b^2 Re z / (4 eps^2 delta)).
    CsvWriter fit_csv({"b", "constant", "kappa", "samples"});
    const RadialGrid g_fit(fit_cells, fit_y_max, grading);
    for (double b : fit_b_list) {
        const OscillatoryOperator op(g_fit, c, b);
        std::vector<KernelSample> samples;
        std::vector<std::size_t> cols;
        for (double frac : {0.125, 0.25, 0.5, 0.75})
            cols.push_back(static_cast<std::size_t>(frac * static_cast<double>(fit_cells)));
        for (double tm : fit_t_list) {
            for (double arg : {kPi / 4.0, -kPi / 4.0, kPi / 3.0, -kPi / 3.0}) {
                const cdouble z = tm * cdouble(std::cos(arg), std::sin(arg));
                for (std::size_t col : cols) {
                    const std::vector<cdouble> kc =
                        op.kernel_column(z, col, OscScheme::backward_euler,
                                         static_cast<int>(fit_steps));
                    for (std::size_t i = 0; i < g_fit.cells(); i += 2)
                        samples.push_back({z, g_fit.node(i), g_fit.node(col), std::abs(kc[i])});
                }
            }
        }
        const double growth = b * b / (4.0 * eps * eps * delta);
        const GaussianBoundFit fit =
            fit_gaussian_bound(samples, c, KernelBoundKind::value, growth);
        const double row[] = {b, fit.constant, fit.kappa,
                              static_cast<double>(fit.samples_used)};
        fit_csv.row(row);
        check_finite(rep, tag("complex_fit", {{"b", b}}), fit.constant);
        rep.metric(tag("complex_fit_kappa", {{"b", b}}), fit.kappa, "recorded", true);
    }
    fit_csv.write(out, "complex_fit.csv");
    rep.artifact("complex_fit.csv");
}

// ---------------------------------------------------------------------------
// mikhlin-scan: symbol-family norm scans over the (lambda, xi) lattices for a
// 12-point admissible parameter lattice, the self-adjoint spectral oracle,
// and finite-difference validation of the exact derivative product formula.
// ---------------------------------------------------------------------------
struct ScanTuple {
    double c, a, p, m;
};

void exp_mikhlin(const KeyValueConfig& cfg, const std::filesystem::path& out,
                 ReportBuilder& rep) {
    const std::size_t cells = cfg.get_size("cells", 96);
    // Defaults to double the base resolution so sweeping `cells` co-refines.
    const std::size_t refined = cfg.get_size("refined_cells", 2 * cells);
    if (refined <= cells)
        throw ConfigError("refined_cells (" + std::to_string(refined) +
                          ") must exceed cells (" + std::to_string(cells) +
                          "): the stability comparison needs a strictly finer grid");
    const double y_max = cfg.get_double("y_max", 8.0);
    const double grading = cfg.get_double("grading", 2.0);
    const auto power_iters = static_cast<int>(cfg.get_int("power_iters", 48));
    const auto n_probes = static_cast<int>(cfg.get_int("n_probes", 32));
    const auto seed = static_cast<unsigned>(cfg.get_size("seed", 101));
    const std::size_t tuple_limit = cfg.get_size("tuple_limit", 12);
    const bool csv_points = cfg.get_bool("csv_points", true);
    const std::size_t fd_draws = cfg.get_size("fd_draws", 8);
    const double fd_step = cfg.get_double("fd_step", 1e-3);
    const auto fd_seed = static_cast<std::uint64_t>(cfg.get_size("fd_seed", 202));
    cfg.reject_unknown();

    static const ScanTuple tuples[12] = {
        {0.0, 0.0, 2.0, 0.0},  {0.0, 0.4, 2.0, 0.0},   {0.0, 0.0, 4.0, 1.0},
        {0.5, 0.0, 2.0, 0.0},  {0.5, 0.6, 3.0, 1.5},   {-0.5, 0.0, 2.0, -0.5},
        {-0.5, 0.3, 2.5, -0.2}, {1.0, 0.0, 2.0, 0.5},  {1.0, 0.5, 2.0, 1.0},
        {2.0, 0.0, 3.0, 2.0},  {2.0, 0.7, 2.0, 0.5},   {1.0, 0.4, 5.0, 2.5},
    };
    static const SymbolTarget targets[3] = {SymbolTarget::lambda_r, SymbolTarget::xisq_r,
                                            SymbolTarget::xi_dy_r};
    static const char* target_names[3] = {"lambda_r", "xisq_r", "xi_dy_r"};

    CsvWriter scan_csv({"re_lambda", "im_lambda", "xi0", "alpha", "family", "norm"});
    const std::size_t n_tuples = std::min<std::size_t>(tuple_limit, 12);
    for (std::size_t ti = 0; ti < n_tuples; ++ti) {
        const ScanTuple& tp = tuples[ti];
        check_admissible(tp.p, tp.m, tp.c, "mikhlin-scan tuple " + std::to_string(ti));
        const double max_arg = kPi - anisotropy_angle(tp.a) - 5.0 * kPi / 180.0;
        const std::vector<cdouble> lambdas = sector_lambda_lattice(max_arg);
        const std::vector<std::vector<double>> xis = xi_lattice(1);

        const SymbolFamily fam_fine(RadialGrid(cells, y_max, grading), tp.c, {tp.a});
        const SymbolFamily fam_ref(RadialGrid(refined, y_max, grading), tp.c, {tp.a});
        for (int fi = 0; fi < 3; ++fi) {
            const SymbolScanReport r1 = mikhlin_scan(fam_fine, targets[fi], tp.p, tp.m, lambdas,
                                                     xis, power_iters, n_probes, seed);
            const SymbolScanReport r2 = mikhlin_scan(fam_ref, targets[fi], tp.p, tp.m, lambdas,
                                                     xis, power_iters, n_probes, seed);
            const std::string base =
                "mikhlin." + std::to_string(ti) + "." + target_names[fi];
            check_finite(rep, base + ".sup", r1.sup);
            check_range(rep, base + ".stability", r2.sup / r1.sup, 0.5, 2.0);
            if (ti == 0 && csv_points) {
                for (const ScanPoint& pt : r1.points) {
                    const double row[] = {pt.lambda.real(),
                                          pt.lambda.imag(),
                                          pt.xi[0],
                                          static_cast<double>(pt.alpha_mask),
                                          static_cast<double>(fi),
                                          pt.norm};
                    scan_csv.row(row);
                }
            }
            // Self-adjoint oracle: with a = 0, p = 2, and the norm weight
            // matching the drift exponent, the radial part is self-adjoint
            // in the measured space and the undifferentiated lambda-resolvent
            // norm is known exactly from the spectrum. A mismatched weight
            // (m != c) breaks self-adjointness and the closed form no longer
            // applies.
            if (fi == 0 && tp.a == 0.0 && tp.p == 2.0 && tp.m == tp.c) {
                double worst_ratio = 0.0;
                for (const ScanPoint& pt : r1.points) {
                    if (pt.alpha_mask != 0) continue;
                    const double xisq = pt.xi[0] * pt.xi[0];
                    const double oracle =
                        lambda_resolvent_norm_selfadjoint(fam_fine.base(), pt.lambda, xisq);
                    if (oracle > 0.0) worst_ratio = std::max(worst_ratio, pt.norm / oracle);
                }
                check_le(rep, base + ".oracle_ratio", worst_ratio, 1.0 + 1e-6);
            }
        }
    }
    if (csv_points) {
        scan_csv.write(out, "scan.csv");
        rep.artifact("scan.csv");
    }

    // Finite-difference validation of the exact xi-derivative product formula.
    {
        const RadialGrid g(cells, y_max, grading);
        std::mt19937_64 rng(fd_seed);
        ProbeGenerator gen(fd_seed + 1);

        const SymbolFamily fam1(g, 0.5, {0.4});
        const SymbolFamily fam2(g, 1.0, {0.3, -0.4});
        double worst1 = 0.0, worst2_single = 0.0, worst2_mixed = 0.0;
        for (std::size_t d = 0; d < fd_draws; ++d) {
            const std::vector<cdouble> f = gen.radial_complex(g);
            const auto draw_lambda = [&](double a_norm) {
                const double mod = std::pow(10.0, draw_uniform(rng, -0.3, 1.5));
                const double lim = kPi - anisotropy_angle(a_norm) - 0.2;
                const double arg = draw_uniform(rng, -lim, lim);
                return mod * cdouble(std::cos(arg), std::sin(arg));
            };
            const auto fd_axis = [&](const SymbolFamily& fam, cdouble lam,
                                     std::vector<double> xi, std::size_t ax) {
                const double h = fd_step * std::max(1.0, std::abs(xi[ax]));
                std::vector<double> xp = xi, xm = xi;
                xp[ax] += h;
                xm[ax] -= h;
                const std::vector<cdouble> up = fam.at(lam, xp).resolvent.apply(f);
                const std::vector<cdouble> um = fam.at(lam, xm).resolvent.apply(f);
                std::vector<cdouble> r(up.size());
                for (std::size_t i = 0; i < r.size(); ++i) r[i] = (up[i] - um[i]) / (2.0 * h);
                return r;
            };

            {  // one axis
                const cdouble lam = draw_lambda(0.4);
                const double mag = draw_uniform(rng, 0.3, 3.0);
                std::vector<double> xi = {rng() % 2 ? mag : -mag};
                const SymbolFamily::Point pt = fam1.at(lam, xi);
                const std::vector<cdouble> exact = fam1.symbol_derivative(pt, 1u).apply(f);
                worst1 = std::max(worst1, rel_l2(exact, fd_axis(fam1, lam, xi, 0)));
            }
            {  // two axes: each first derivative, then the mixed second
                const cdouble lam = draw_lambda(0.5);
                const double mag0 = draw_uniform(rng, 0.3, 3.0);
                const double mag1 = draw_uniform(rng, 0.3, 3.0);
                std::vector<double> xi = {mag0, rng() % 2 ? mag1 : -mag1};
                const SymbolFamily::Point pt = fam2.at(lam, xi);
                for (std::size_t ax = 0; ax < 2; ++ax) {
                    const std::vector<cdouble> exact =
                        fam2.symbol_derivative(pt, 1u << ax).apply(f);
                    worst2_single =
                        std::max(worst2_single, rel_l2(exact, fd_axis(fam2, lam, xi, ax)));
                }
                const double hx = fd_step * std::max(1.0, std::abs(xi[0]));
                const double hy = fd_step * std::max(1.0, std::abs(xi[1]));
                std::vector<cdouble> fd(f.size(), cdouble(0.0, 0.0));
                for (int sx = -1; sx <= 1; sx += 2) {
                    for (int sy = -1; sy <= 1; sy += 2) {
                        std::vector<double> xs = xi;
                        xs[0] += sx * hx;
                        xs[1] += sy * hy;
                        const std::vector<cdouble> u = fam2.at(lam, xs).resolvent.apply(f);
                        const double w = sx * sy / (4.0 * hx * hy);
                        for (std::size_t i = 0; i < fd.size(); ++i) fd[i] += w * u[i];
                    }
                }
                const std::vector<cdouble> exact = fam2.symbol_derivative(pt, 3u).apply(f);
                worst2_mixed = std::max(worst2_mixed, rel_l2(exact, fd));
            }
        }
        check_le(rep, "deriv_fd.one_axis", worst1, 1e-4);
        check_le(rep, "deriv_fd.two_axes_first", worst2_single, 1e-4);
        check_le(rep, "deriv_fd.two_axes_mixed", worst2_mixed, 1e-3);
    }
}

// ---------------------------------------------------------------------------
// elliptic-reg: second-derivative-to-generator norm ratios through the
// small-lambda elliptic surrogate, across admissible parameter tuples.
// ---------------------------------------------------------------------------
struct EllipticTuple {
    double c, a, p, m;
};

void exp_elliptic(const KeyValueConfig& cfg, const std::filesystem::path& out,
                  ReportBuilder& rep) {
    const std::size_t nx = cfg.get_size("nx", 32);
    const std::size_t cells = cfg.get_size("cells", 128);
    // Refined levels default to double the base ones so sweeping the base
    // keys co-refines both resolutions.
    const std::size_t refined_nx = cfg.get_size("refined_nx", 2 * nx);
    const std::size_t refined_cells = cfg.get_size("refined_cells", 2 * cells);
    if (refined_nx <= nx || refined_cells <= cells)
        throw ConfigError("refined_nx/refined_cells must exceed nx/cells: the "
                          "stability comparison needs a strictly finer grid");
    const double y_max = cfg.get_double("y_max", 6.0);
    const double grading = cfg.get_double("grading", 2.0);
    const double period = cfg.get_double("period", 2.0 * kPi);
    const std::size_t n_probes = cfg.get_size("probes", 16);
    const double lam_re = cfg.get_double("lambda_re", 1e-6);
    const double lam_im = cfg.get_double("lambda_im", 0.0);
    const std::size_t seed = cfg.get_size("seed", 318);
    cfg.reject_unknown();

    // Includes one tuple at 10% and one at 90% of the admissible range for
    // (m+1)/p against (0, c+1).
    static const EllipticTuple tuples[6] = {
        {0.0, 0.0, 2.0, 0.0}, {0.0, 0.4, 2.0, -0.8}, {0.0, 0.4, 2.0, 0.8},
        {1.0, 0.6, 3.0, 1.4}, {-0.5, 0.0, 2.0, -0.6}, {2.0, 0.5, 2.5, 1.5},
    };

    CsvWriter csv({"tuple", "c", "a", "p", "m", "nx", "cells", "xx", "xy", "yy", "singular",
                   "max"});
    for (std::size_t ti = 0; ti < 6; ++ti) {
        const EllipticTuple& tp = tuples[ti];
        check_admissible(tp.p, tp.m, tp.c, "elliptic-reg tuple " + std::to_string(ti));
        HalfSpaceSolver::RegularityReport reports[2];
        const std::size_t nxs[2] = {nx, refined_nx};
        const std::size_t ys[2] = {cells, refined_cells};
        for (int lev = 0; lev < 2; ++lev) {
            HalfSpaceConfig hc;
            hc.dim_x = 1;
            hc.nx = nxs[lev];
            hc.periods = {period};
            hc.grid = RadialGrid(ys[lev], y_max, grading);
            hc.drift_exponent = tp.c;
            hc.a = {tp.a};
            hc.m = tp.m;
            hc.p = tp.p;
            const HalfSpaceSolver solver(std::move(hc));
            ProbeGenerator gen(seed + 1000 * ti);
            std::vector<std::vector<cdouble>> batch;
            for (std::size_t k = 0; k < n_probes; ++k)
                batch.push_back(gen.planar(1, static_cast<int>(nxs[lev]), period,
                                           solver.config().grid));
            reports[lev] = solver.regularity_ratios(batch, cdouble(lam_re, lam_im));
            const double row[] = {static_cast<double>(ti),
                                  tp.c,
                                  tp.a,
                                  tp.p,
                                  tp.m,
                                  static_cast<double>(nxs[lev]),
                                  static_cast<double>(ys[lev]),
                                  reports[lev].xx_ratio,
                                  reports[lev].xy_ratio,
                                  reports[lev].yy_ratio,
                                  reports[lev].singular_ratio,
                                  reports[lev].max_ratio};
            csv.row(row);
        }
        const std::string base = "elliptic." + std::to_string(ti);
        check_finite(rep, base + ".max_ratio", reports[1].max_ratio);
        const std::pair<const char*, double HalfSpaceSolver::RegularityReport::*> fields[4] = {
            {"xx", &HalfSpaceSolver::RegularityReport::xx_ratio},
            {"xy", &HalfSpaceSolver::RegularityReport::xy_ratio},
            {"yy", &HalfSpaceSolver::RegularityReport::yy_ratio},
            {"singular", &HalfSpaceSolver::RegularityReport::singular_ratio},
        };
        for (const auto& [fname, fptr] : fields) {
            const double fine = reports[1].*fptr, coarseval = reports[0].*fptr;
            check_le(rep, base + ".stability_" + fname,
                     std::abs(fine / coarseval - 1.0), 0.10);
        }
    }
    csv.write(out, "elliptic.csv");
    rep.artifact("elliptic.csv");
}

// ---------------------------------------------------------------------------
// maxreg: space-time regularity quotients for the zero-initial-data parabolic
// problem, stability under time-step halving, and a manufactured-solution
// superposition cross-check.
// ---------------------------------------------------------------------------
void exp_maxreg(const KeyValueConfig& cfg, const std::filesystem::path& out,
                ReportBuilder& rep) {
    const std::size_t nx = cfg.get_size("nx", 24);
    const std::size_t cells = cfg.get_size("cells", 96);
    const double y_max = cfg.get_double("y_max", 6.0);
    const double grading = cfg.get_double("grading", 2.0);
    const double period = cfg.get_double("period", 2.0 * kPi);
    const double horizon = cfg.get_double("horizon", 1.0);
    const std::size_t steps = cfg.get_size("steps", 128);
    const std::size_t duhamel_steps = cfg.get_size("duhamel_steps", 512);
    const std::size_t seed = cfg.get_size("seed", 9);
    cfg.reject_unknown();

    static const EllipticTuple tuples[4] = {
        {0.0, 0.0, 2.0, 0.0},
        {1.0, 0.5, 2.0, 0.5},
        {0.5, 0.3, 3.0, 0.5},
        {2.0, 0.0, 2.0, 1.0},
    };

    CsvWriter csv({"tuple", "steps", "ratio", "time_deriv", "generator", "source"});
    for (std::size_t ti = 0; ti < 4; ++ti) {
        const EllipticTuple& tp = tuples[ti];
        check_admissible(tp.p, tp.m, tp.c, "maxreg tuple " + std::to_string(ti));
        HalfSpaceConfig hc;
        hc.dim_x = 1;
        hc.nx = nx;
        hc.periods = {period};
        hc.grid = RadialGrid(cells, y_max, grading);
        hc.drift_exponent = tp.c;
        hc.a = {tp.a};
        hc.m = tp.m;
        hc.p = tp.p;
        const HalfSpaceSolver solver(std::move(hc));

        ProbeGenerator gen(seed + 31 * ti);
        const std::vector<cdouble> phi =
            gen.planar(1, static_cast<int>(nx), period, solver.config().grid);
        const auto shaped = [&phi](double scale) {
            std::vector<cdouble> v(phi.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * phi[i];
            return v;
        };
        const auto source = [&](double tv) {
            return shaped(std::exp(-tv) * (1.0 + 0.5 * std::sin(3.0 * tv)));
        };
        const std::vector<cdouble> zero(phi.size(), cdouble(0.0, 0.0));

        HalfSpaceSolver::MaxRegReport mr[2];
        const std::size_t stepcounts[2] = {steps, 2 * steps};
        for (int lev = 0; lev < 2; ++lev) {
            const HalfSpaceSolver::Trajectory traj = solver.parabolic_solve(
                zero, source, horizon, static_cast<int>(stepcounts[lev]));
            mr[lev] = solver.maxreg_ratio(traj, source);
            const double row[] = {static_cast<double>(ti),
                                  static_cast<double>(stepcounts[lev]),
                                  mr[lev].ratio,
                                  mr[lev].time_deriv_norm,
                                  mr[lev].generator_norm,
                                  mr[lev].source_norm};
            csv.row(row);
        }
        const std::string base = "maxreg." + std::to_string(ti);
        check_finite(rep, base + ".ratio", mr[1].ratio);
        check_le(rep, base + ".stability", std::abs(mr[1].ratio / mr[0].ratio - 1.0), 0.10);
        check_le(rep, base + ".step_identity",
                 std::max(mr[0].identity_residual, mr[1].identity_residual), 1e-8);

        // Superposition cross-check: with u(t) = sin(t) phi the source is
        // cos(t) phi - sin(t) L phi, and the integrated solution must return
        // u(T) to the stepping scheme's accuracy.
        const std::vector<cdouble> lphi = solver.apply(phi);
        const auto dsource = [&](double tv) {
            std::vector<cdouble> v(phi.size());
            const double ct = std::cos(tv), st = std::sin(tv);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = ct * phi[i] - st * lphi[i];
            return v;
        };
        const HalfSpaceSolver::Trajectory dtraj =
            solver.parabolic_solve(zero, dsource, horizon, static_cast<int>(duhamel_steps));
        std::vector<cdouble> diff = dtraj.states.back();
        const double sT = std::sin(horizon);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= sT * phi[i];
        const double rel = solver.norm(diff) / solver.norm(shaped(sT));
        check_le(rep, base + ".superposition", rel, 1e-3);
    }
    csv.write(out, "maxreg.csv");
    rep.artifact("maxreg.csv");
}

// ---------------------------------------------------------------------------
// sector-sweep: exact sesquilinear-form sector inequalities on seeded probes
// and a resolvent-norm sweep across the sector arguments.
// ---------------------------------------------------------------------------
void exp_sector(const KeyValueConfig& cfg, const std::filesystem::path& out,
                ReportBuilder& rep) {
    const std::size_t n_probes = cfg.get_size("probes", 64);
    const std::size_t seed = cfg.get_size("seed", 77);
    const std::size_t nx = cfg.get_size("nx", 8);
    const std::size_t cells = cfg.get_size("cells", 64);
    const double y_max = cfg.get_double("y_max", 6.0);
    const double grading = cfg.get_double("grading", 2.0);
    const double c = cfg.get_double("drift_exponent", 0.5);
    const double period = cfg.get_double("period", 2.0 * kPi);
    const double tol = cfg.get_double("tolerance", 1e-12);
    const std::size_t sweep_args = cfg.get_size("sweep_args", 9);
    const double sweep_a = cfg.get_double("sweep_a", 0.6);
    const std::size_t sweep_cells = cfg.get_size("sweep_cells", 64);
    cfg.reject_unknown();

    const std::vector<std::vector<double>> a_cases = {{0.0}, {0.5, 0.0}, {0.7, 0.0}};
    for (std::size_t ai = 0; ai < a_cases.size(); ++ai) {
        const std::vector<double>& a = a_cases[ai];
        double a_norm = 0.0;
        for (double v : a) a_norm += v * v;
        a_norm = std::sqrt(a_norm);

        HalfSpaceConfig hc;
        hc.dim_x = a.size();
        hc.nx = nx;
        hc.periods.assign(a.size(), period);
        hc.grid = RadialGrid(cells, y_max, grading);
        hc.drift_exponent = c;
        hc.a = a;
        hc.m = c;
        hc.p = 2.0;
        const HalfSpaceSolver solver(std::move(hc));

        ProbeGenerator gen(seed + 97 * ai);
        double v_accretive = 0.0, v_angle = 0.0;
        for (std::size_t k = 0; k < n_probes; ++k) {
            const std::vector<cdouble> u = gen.planar(static_cast<int>(a.size()),
                                                      static_cast<int>(nx), period,
                                                      solver.config().grid);
            const HalfSpaceSolver::FormReport fr = solver.form_values(u);
            const double scale = std::max(fr.energy, 1e-300);
            v_accretive = std::max(v_accretive, ((1.0 - a_norm) * fr.energy - fr.re) / scale);
            const double re_scale = std::max(fr.re, 1e-300);
            v_angle = std::max(v_angle,
                               (std::abs(fr.im) - a_norm / (1.0 - a_norm) * fr.re) / re_scale);
        }
        check_le(rep, tag("form_accretive", {{"case", static_cast<double>(ai)}}), v_accretive,
                 tol);
        check_le(rep, tag("form_angle", {{"case", static_cast<double>(ai)}}), v_angle, tol);
    }

    // Resolvent-norm sweep over sector arguments for a genuinely skewed case.
    CsvWriter csv({"arg", "modulus", "sup_norm"});
    const SymbolFamily fam(RadialGrid(sweep_cells, y_max, grading), c, {sweep_a});
    const double omega = anisotropy_angle(sweep_a);
    const std::vector<std::vector<double>> xis = xi_lattice(1, 8, 2, 1e-1, 1e1);
    const std::vector<double>& masses = fam.base().masses();
    double sweep_sup = 0.0;
    for (std::size_t k = 0; k < sweep_args; ++k) {
        const double arg =
            (kPi - omega - 0.035) * static_cast<double>(k) / (sweep_args > 1 ? sweep_args - 1 : 1);
        for (double mod : {0.1, 1.0, 10.0}) {
            const cdouble lam = mod * cdouble(std::cos(arg), std::sin(arg));
            double sup = 0.0;
            for (const std::vector<double>& xi : xis) {
                const SymbolFamily::Point pt = fam.at(lam, xi);
                const LinearOpZ member = pt.resolvent.scaled(lam);
                sup = std::max(sup, op_norm_l2(member, masses).value);
            }
            const double row[] = {arg, mod, sup};
            csv.row(row);
            sweep_sup = std::max(sweep_sup, sup);
        }
    }
    csv.write(out, "sector.csv");
    rep.artifact("sector.csv");
    check_finite(rep, "sector_sweep_sup", sweep_sup);
}

// ---------------------------------------------------------------------------
// oblique-roundtrip: congruence positivity, the worked 2x2 instance, sign
// discrimination for the sheared block, spectral shear isometry, conjugated
// solve roundtrip, and conjugated-versus-direct agreement under refinement.
// ---------------------------------------------------------------------------
void exp_oblique(const KeyValueConfig& cfg, const std::filesystem::path& out,
                 ReportBuilder& rep) {
    const std::size_t draws = cfg.get_size("draws", 100);
    const std::size_t seed = cfg.get_size("seed", 4242);
    const std::size_t cells = cfg.get_size("cells", 96);
    const std::size_t nx = cfg.get_size("nx", 16);
    const std::size_t cells2 = cfg.get_size("cells_2d", 64);
    const std::size_t nx2 = cfg.get_size("nx_2d", 12);
    // Refined levels default to double the base ones so sweeping a base key
    // co-refines both resolutions (the convergence-order estimate needs a
    // genuinely finer second level).
    const std::size_t refined_cells = cfg.get_size("refined_cells", 2 * cells);
    const std::size_t refined_nx = cfg.get_size("refined_nx", 2 * nx);
    const std::size_t refined_cells2 = cfg.get_size("refined_cells_2d", 2 * cells2);
    const std::size_t refined_nx2 = cfg.get_size("refined_nx_2d", 2 * nx2);
    if (refined_cells <= cells || refined_nx <= nx || refined_cells2 <= cells2 ||
        refined_nx2 <= nx2)
        throw ConfigError("refined_* resolutions must exceed their base values: "
                          "order estimates need a strictly finer grid");
    const double y_max = cfg.get_double("y_max", 4.0);
    const double grading = cfg.get_double("grading", 2.0);
    const double period = cfg.get_double("period", 8.0);
    const cdouble lambda(cfg.get_double("lambda_re", 3.0), cfg.get_double("lambda_im", 0.8));
    const double m = cfg.get_double("m", 0.3);
    const double p = cfg.get_double("p", 2.0);
    const std::size_t iso_probes = cfg.get_size("probes", 16);
    cfg.reject_unknown();

    // --- congruence positivity over random SPD draws --------------------
    {
        std::mt19937_64 rng(seed);
        std::size_t failures = 0;
        for (std::size_t d = 0; d < draws; ++d) {
            const std::size_t n = 1 + d % 2;
            const std::size_t dd = n + 1;
            std::vector<double> gmat(dd * dd);
            for (double& v : gmat) v = draw_uniform(rng, -1.0, 1.0);
            std::vector<double> full(dd * dd, 0.0);
            for (std::size_t i = 0; i < dd; ++i)
                for (std::size_t j = 0; j < dd; ++j) {
                    for (std::size_t k = 0; k < dd; ++k)
                        full[i * dd + j] += gmat[i * dd + k] * gmat[j * dd + k];
                    if (i == j) full[i * dd + j] += 0.05;
                }
            GeneralCoefficients gc;
            gc.dim_x = n;
            gc.q1.resize(n * n);
            gc.q.resize(n);
            gc.b.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) gc.q1[i * n + j] = full[i * dd + j];
                gc.q[i] = full[i * dd + n];
                gc.b[i] = draw_uniform(rng, -1.0, 1.0);
            }
            gc.gamma = full[n * dd + n];
            gc.c = (d % 2 ? 1.0 : -1.0) * draw_uniform(rng, 0.4, 2.0);
            const std::vector<double> tq = tilde_q(gc);
            if (!check_spd(tq, dd).positive) ++failures;
        }
        rep.metric("oblique_congruence_pd_failures", static_cast<double>(failures),
                   "== 0 over " + std::to_string(draws) + " SPD draws", failures == 0);
    }

    // --- worked instance and sign discrimination ------------------------
    {
        GeneralCoefficients gcw;
        gcw.dim_x = 1;
        gcw.q1 = {1.0};
        gcw.q = {0.0};
        gcw.gamma = 1.0;
        gcw.b = {0.5};
        gcw.c = 1.0;
        const std::vector<double> tqw = tilde_q(gcw);
        const double expected[4] = {1.25, -0.5, -0.5, 1.0};
        double dev = 0.0;
        for (int i = 0; i < 4; ++i) dev = std::max(dev, std::abs(tqw[i] - expected[i]));
        check_le(rep, "oblique_worked_instance", dev, 1e-15);

        JsonNode inst = JsonNode::object();
        JsonNode qm = JsonNode::array();
        for (double v : std::initializer_list<double>{1.0, 0.0, 0.0, 1.0}) qm.push(JsonNode::number(v));
        JsonNode tm = JsonNode::array();
        for (double v : tqw) tm.push(JsonNode::number(v));
        inst.field("input_matrix_row_major", std::move(qm));
        inst.field("b", 0.5).field("c", 1.0);
        inst.field("sheared_matrix_row_major", std::move(tm));
        rep.section("congruence_example", std::move(inst));

        // Sign discrimination: the congruence puts + (gamma/c^2) b b^T into
        // the upper block.  Flip that term's sign and the operator-level
        // identity fails at O(1); keep it and the identity defect vanishes
        // under refinement.
        const double q1_minus = 1.0 - 0.25;  // flipped-sign sheared block
        const double qt = -0.5;              // mixed entry (same either way)
        double dev_plus[2] = {0.0, 0.0}, dev_minus[2] = {0.0, 0.0};
        const std::size_t sizes[2] = {cells, refined_cells};
        const std::size_t nxs[2] = {nx, refined_nx};
        for (int lev = 0; lev < 2; ++lev) {
            const RadialGrid grid(sizes[lev], y_max, grading);
            const ObliqueSolver os(gcw, nxs[lev], {period}, grid, 0.0, 2.0);
            ProbeGenerator gen(seed + 5);
            const std::vector<cdouble> phi =
                gen.planar(1, static_cast<int>(nxs[lev]), period, grid);
            const std::vector<cdouble> psi = os.shear(phi);
            const std::vector<cdouble> lhs = os.apply(psi);
            const std::vector<cdouble> rhs_plus = os.apply_conjugated(psi);
            dev_plus[lev] = rel_l2(rhs_plus, lhs);

            // Flipped-sign sheared operator, applied per frequency by hand.
            const HalfSpaceSolver& fft = os.reduced_solver();
            const BesselOperator rad(grid, gcw.c / gcw.gamma);
            const TridiagD dy = derivative_matrix(grid);
            std::vector<cdouble> ph = fft.forward_fft(phi);
            const std::size_t slice = fft.slice();
            std::vector<cdouble> col(grid.cells()), acc;
            for (std::size_t s = 0; s < slice; ++s) {
                const double f =
                    s <= nxs[lev] / 2 ? static_cast<double>(s)
                                      : static_cast<double>(s) - static_cast<double>(nxs[lev]);
                const double xi = 2.0 * kPi / period * f;
                for (std::size_t j = 0; j < grid.cells(); ++j) col[j] = ph[j * slice + s];
                const std::vector<cdouble> bu = rad.apply(std::span<const cdouble>(col));
                const std::vector<cdouble> du = dy.apply(std::span<const cdouble>(col));
                for (std::size_t j = 0; j < grid.cells(); ++j)
                    ph[j * slice + s] = gcw.gamma * bu[j] + cdouble(0.0, 2.0 * qt * xi) * du[j] -
                                        q1_minus * xi * xi * col[j];
            }
            const std::vector<cdouble> rhs_minus = os.shear(fft.inverse_fft(ph));
            dev_minus[lev] = rel_l2(rhs_minus, lhs);
        }
        check_le(rep, "oblique_conjugation_identity", dev_plus[1], 1e-2);
        check_ge(rep, "oblique_conjugation_order", std::log2(dev_plus[0] / dev_plus[1]), 1.0);
        check_ge(rep, "oblique_sign_discrimination", dev_minus[1] / dev_plus[1], 10.0);
        rep.metric("oblique_sign_flipped_deviation", dev_minus[1],
                   "O(1), not improving under refinement (recorded)", true);
        rep.note("Sign resolution: conjugating the coefficient matrix with the shear Jacobian "
                 "places + (gamma/c^2) b b^T in the sheared second-order block (worked "
                 "instance above).  The sign-flipped variant of that block fails the "
                 "operator-level conjugation identity by an O(1) margin that does not improve "
                 "under refinement, and can lose positive definiteness for large |b|; the "
                 "congruence form is the one every solve in this module uses.");
    }

    // --- one-axis coefficient set: isometry, roundtrip, direct agreement ---
    GeneralCoefficients gc1;
    gc1.dim_x = 1;
    gc1.q1 = {2.0};
    gc1.q = {0.8};
    gc1.gamma = 1.5;
    gc1.b = {0.4};
    gc1.c = 1.2;

    CsvWriter csv({"case", "cells", "nx", "conjugated_vs_direct"});
    double dev_1d[2] = {0.0, 0.0};
    {
        const std::size_t sizes[2] = {cells, refined_cells};
        const std::size_t nxs[2] = {nx, refined_nx};
        for (int lev = 0; lev < 2; ++lev) {
            const RadialGrid grid(sizes[lev], y_max, grading);
            const ObliqueSolver os(gc1, nxs[lev], {period}, grid, m, p);
            ProbeGenerator gen(seed + 11);
            const std::vector<cdouble> f =
                gen.planar(1, static_cast<int>(nxs[lev]), period, grid);

            if (lev == 1) {
                // Spectral shear isometry in the square-integral norm.
                ProbeGenerator igen(seed + 13);
                double iso = 0.0;
                for (std::size_t k = 0; k < iso_probes; ++k) {
                    const std::vector<cdouble> u =
                        igen.planar(1, static_cast<int>(nxs[lev]), period, grid);
                    const std::vector<cdouble> su = os.shear(u);
                    const double r = os.reduced_solver().norm(su, 2.0, m) /
                                     os.reduced_solver().norm(u, 2.0, m);
                    iso = std::max(iso, std::abs(r - 1.0));
                }
                check_le(rep, "oblique_shear_isometry", iso, 1e-12);

                // Conjugated roundtrip: f := (lambda - L) psi, then solve.
                const std::vector<cdouble> psi = os.shear(f);
                std::vector<cdouble> rhs = os.apply_conjugated(psi);
                for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = lambda * psi[i] - rhs[i];
                const std::vector<cdouble> u = os.solve(lambda, rhs);
                check_le(rep, "oblique_roundtrip", rel_l2(u, psi), 1e-6);
            }

            const std::vector<cdouble> uc = os.solve(lambda, f);
            const std::vector<cdouble> ud = os.solve_direct(lambda, f);
            dev_1d[lev] = rel_l2(uc, ud);
            const double row[] = {1.0, static_cast<double>(sizes[lev]),
                                  static_cast<double>(nxs[lev]), dev_1d[lev]};
            csv.row(row);
        }
        check_le(rep, "oblique_direct_vs_conjugated", dev_1d[1], 1e-2);
        rep.metric("oblique_direct_improves", dev_1d[1],
                   "<= coarse deviation = " + fmt(dev_1d[0]),
                   std::isfinite(dev_1d[1]) && dev_1d[1] <= dev_1d[0]);
    }

    // --- two-axis diagonal-sheared-block case ----------------------------
    {
        GeneralCoefficients gc2;
        gc2.dim_x = 2;
        gc2.gamma = 1.2;
        gc2.c = 1.1;
        gc2.b = {0.5, -0.3};
        const double mu = gc2.gamma / (2.0 * gc2.c);
        gc2.q = {mu * gc2.b[0], mu * gc2.b[1]};
        gc2.q1 = {1.5, 0.0, 0.0, 0.9};

        double dev2[2] = {0.0, 0.0};
        const std::size_t sizes[2] = {cells2, refined_cells2};
        const std::size_t nxs[2] = {nx2, refined_nx2};
        for (int lev = 0; lev < 2; ++lev) {
            const RadialGrid grid(sizes[lev], y_max, grading);
            const ObliqueSolver os(gc2, nxs[lev], {period, period}, grid, m, p);
            ProbeGenerator gen(seed + 17);
            const std::vector<cdouble> f =
                gen.planar(2, static_cast<int>(nxs[lev]), period, grid);
            const std::vector<cdouble> uc = os.solve(lambda, f);
            const std::vector<cdouble> ud = os.solve_direct(lambda, f);
            dev2[lev] = rel_l2(uc, ud);
            const double row[] = {2.0, static_cast<double>(sizes[lev]),
                                  static_cast<double>(nxs[lev]), dev2[lev]};
            csv.row(row);
        }
        check_le(rep, "oblique_direct_vs_conjugated_2d", dev2[1], 1e-2);
        rep.metric("oblique_direct_improves_2d", dev2[1],
                   "<= coarse deviation = " + fmt(dev2[0]),
                   std::isfinite(dev2[1]) && dev2[1] <= dev2[0]);
        rep.note("Two-axis solves require the sheared second-order block to be diagonal: a "
                 "uniform product lattice can absorb per-axis rescalings but not a rotation "
                 "of the periodic coordinates.  General blocks remain available through the "
                 "per-frequency direct factorization.");
    }

    // --- zero x-drift degenerates to the standard solve ------------------
    {
        GeneralCoefficients gc0 = gc1;
        gc0.b = {0.0};
        const RadialGrid grid(cells, y_max, grading);
        const ObliqueSolver os(gc0, nx, {period}, grid, m, p);
        ProbeGenerator gen(seed + 19);
        const std::vector<cdouble> f = gen.planar(1, static_cast<int>(nx), period, grid);
        // With b = 0 the shear is the identity and the rescaled-torus
        // frequencies make the conjugated per-frequency systems coincide
        // entrywise with the direct ones, so the two solves must agree to
        // factorization roundoff rather than to discretization order.
        const std::vector<cdouble> u1 = os.solve(lambda, f);
        const std::vector<cdouble> u2 = os.solve_direct(lambda, f);
        check_le(rep, "oblique_neumann_reduction", rel_l2(u1, u2), 1e-12);
    }

    // --- hypothesis transfer: inadmissible pair must be rejected ---------
    {
        bool rejected = false;
        try {
            const RadialGrid grid(16, y_max, grading);
            const double bad_m = p * (gc1.c / gc1.gamma + 1.5) - 1.0;
            const ObliqueSolver os(gc1, 8, {period}, grid, bad_m, p);
            (void)os;
        } catch (const std::invalid_argument&) {
            rejected = true;
        } catch (const ConfigError&) {
            rejected = true;
        }
        rep.metric("oblique_admissibility_enforced", rejected ? 1.0 : 0.0,
                   "inadmissible (m+1)/p rejected before compute", rejected);
    }

    csv.write(out, "oblique.csv");
    rep.artifact("oblique.csv");
}

using ExperimentFn = void (*)(const KeyValueConfig&, const std::filesystem::path&,
                              ReportBuilder&);

struct ExperimentEntry {
    const char* name;
    ExperimentFn fn;
};

const ExperimentEntry kExperiments[] = {
    {"kernel-verify", exp_kernel_verify},
    {"domination", exp_domination},
    {"scaling", exp_scaling},
    {"mikhlin-scan", exp_mikhlin},
    {"elliptic-reg", exp_elliptic},
    {"maxreg", exp_maxreg},
    {"sector-sweep", exp_sector},
    {"oblique-roundtrip", exp_oblique},
};

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const ExperimentEntry& e : kExperiments) v.emplace_back(e.name);
        return v;
    }();
    return names;
}

ExperimentOutcome run_experiment(const std::string& name, const KeyValueConfig& cfg,
                                 const std::filesystem::path& out_dir) {
    const ExperimentEntry* entry = nullptr;
    for (const ExperimentEntry& e : kExperiments)
        if (name == e.name) entry = &e;
    if (!entry) {
        std::string known;
        for (const ExperimentEntry& e : kExperiments) {
            if (!known.empty()) known += ", ";
            known += e.name;
        }
        throw ConfigError("unknown experiment `" + name + "`; expected one of: " + known);
    }

    ReportBuilder rep(name);
    try {
        entry->fn(cfg, out_dir, rep);
    } catch (const std::invalid_argument& e) {
        // Operator-level precondition violations are configuration errors.
        throw ConfigError(std::string(e.what()));
    }
    rep.params(cfg.resolved());

    ExperimentOutcome outcome;
    outcome.report_path = rep.write(out_dir);
    outcome.report_json = rep.to_json();
    outcome.metrics = rep.metrics();
    outcome.pass = rep.all_pass();
    return outcome;
}

ExperimentOutcome run_sweep(const std::string& name, const KeyValueConfig& base,
                            const std::vector<SweepAxis>& axes, std::size_t cap,
                            const std::filesystem::path& out_dir) {
    if (axes.empty()) throw ConfigError("sweep: need at least one axis");
    std::size_t total = 1;
    for (const SweepAxis& ax : axes) {
        if (ax.values.empty()) throw ConfigError("sweep axis `" + ax.key + "`: no values");
        total *= ax.values.size();
    }
    if (total > cap)
        throw ConfigError("sweep: " + std::to_string(total) + " runs exceed the cap of " +
                          std::to_string(cap));

    std::vector<std::string> cols = {"run"};
    for (const SweepAxis& ax : axes) cols.push_back(ax.key);
    cols.insert(cols.end(), {"status", "pass", "headline_metric", "headline_value",
                             "ratio_to_prev", "report"});
    CsvWriter summary(cols);

    bool all_pass = true;
    std::size_t valid_runs = 0;
    double prev_headline = std::numeric_limits<double>::quiet_NaN();
    JsonNode runs = JsonNode::array();
    for (std::size_t idx = 0; idx < total; ++idx) {
        // Odometer decode, first axis slowest.
        std::vector<std::size_t> digit(axes.size());
        std::size_t rem = idx;
        for (std::size_t ax = axes.size(); ax-- > 0;) {
            digit[ax] = rem % axes[ax].values.size();
            rem /= axes[ax].values.size();
        }
        KeyValueConfig cfg = base;
        std::vector<std::string> cells = {std::to_string(idx)};
        for (std::size_t ax = 0; ax < axes.size(); ++ax) {
            cfg.set(axes[ax].key, axes[ax].values[digit[ax]]);
            cells.push_back(axes[ax].values[digit[ax]]);
        }
        char dirbuf[32];
        std::snprintf(dirbuf, sizeof dirbuf, "run_%03zu", idx);
        const std::filesystem::path run_dir = out_dir / dirbuf;

        std::string status = "ok", headline_name, report_rel;
        double headline = std::numeric_limits<double>::quiet_NaN();
        bool run_pass = false;
        try {
            const ExperimentOutcome oc = run_experiment(name, cfg, run_dir);
            run_pass = oc.pass;
            ++valid_runs;
            if (!oc.pass) all_pass = false;
            if (!oc.metrics.empty()) {
                headline_name = oc.metrics.front().name;
                headline = oc.metrics.front().value;
            }
            report_rel = std::string(dirbuf) + "/report.json";
        } catch (const ConfigError& e) {
            status = std::string("invalid: ") + e.what();
            all_pass = false;  // flagged, not fatal, but the sweep cannot claim success
        }
        const double ratio = (std::isfinite(headline) && std::isfinite(prev_headline) &&
                              prev_headline != 0.0)
                                 ? headline / prev_headline
                                 : std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(headline)) prev_headline = headline;

        cells.insert(cells.end(), {status, run_pass ? "true" : "false", headline_name,
                                   format_g17(headline), format_g17(ratio), report_rel});
        summary.row_mixed(cells);

        JsonNode row = JsonNode::object();
        row.field("run", idx);
        for (std::size_t ax = 0; ax < axes.size(); ++ax)
            row.field(axes[ax].key, axes[ax].values[digit[ax]]);
        row.field("status", status).field("pass", run_pass);
        runs.push(std::move(row));
    }
    if (valid_runs == 0) all_pass = false;

    ReportBuilder rep("sweep:" + name);
    rep.params(base.entries());
    rep.metric("sweep_runs", static_cast<double>(total), "cartesian size", true);
    rep.metric("sweep_valid_runs", static_cast<double>(valid_runs), ">= 1", valid_runs >= 1);
    rep.metric("sweep_all_pass", all_pass ? 1.0 : 0.0, "every run valid and passing", all_pass);
    rep.section("runs", std::move(runs));
    rep.artifact("summary.csv");
    summary.write(out_dir, "summary.csv");

    ExperimentOutcome outcome;
    outcome.report_path = rep.write(out_dir);
    outcome.report_json = rep.to_json();
    outcome.metrics = rep.metrics();
    outcome.pass = all_pass;
    return outcome;
}

}  // namespace singulax
