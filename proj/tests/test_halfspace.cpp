#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "singulax/bessel.hpp"
#include "singulax/grid.hpp"
#include "singulax/halfspace.hpp"
#include "singulax/probes.hpp"

using namespace singulax;

namespace {

constexpr double kTau = 6.283185307179586477;

HalfSpaceConfig small_config(std::size_t dim_x = 1, std::size_t nx = 8, std::size_t cells = 48,
                             double c = 0.5, std::vector<double> a = {0.4}) {
    HalfSpaceConfig cfg;
    cfg.dim_x = dim_x;
    cfg.nx = nx;
    cfg.periods.assign(dim_x, kTau);
    cfg.grid = RadialGrid(cells, 5.0, 2.0);
    cfg.drift_exponent = c;
    cfg.a = std::move(a);
    cfg.m = 0.5;
    cfg.p = 2.0;
    return cfg;
}

double rel_l2(const std::vector<cdouble>& u, const std::vector<cdouble>& v) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        num += std::norm(u[j] - v[j]);
        den += std::norm(v[j]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("config validation rejects bad anisotropy and indices") {
    HalfSpaceConfig cfg = small_config();
    cfg.a = {1.0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.m = 5.0;  // (m+1)/p out of the admissible window
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.nx = 7;  // odd
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.drift_exponent = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("transform round trip is the identity") {
    const HalfSpaceSolver solver(small_config());
    ProbeGenerator gen(4);
    const std::vector<cdouble> u = gen.planar(1, 8, kTau, solver.config().grid);
    const std::vector<cdouble> v = solver.inverse_fft(solver.forward_fft(u));
    CHECK(rel_l2(v, u) < 1e-13);
}

TEST_CASE("apply agrees with the per-frequency definition on a pure mode") {
    const HalfSpaceSolver solver(small_config());
    const RadialGrid& g = solver.config().grid;
    const BesselOperator rad(g, 0.5);
    const TridiagD dmat = derivative_matrix(g);
    ProbeGenerator gen(9);
    const std::vector<double> prof = gen.radial(g);

    const int mode = 3;
    const double xi = mode;  // 2 pi / period * mode with period 2 pi
    std::vector<cdouble> u(solver.size());
    for (std::size_t j = 0; j < g.cells(); ++j)
        for (std::size_t i = 0; i < 8; ++i) {
            const double x = kTau * static_cast<double>(i) / 8.0;
            u[j * 8 + i] = prof[j] * std::polar(1.0, xi * x);
        }
    const std::vector<cdouble> lu = solver.apply(u);

    std::vector<cdouble> pc(prof.begin(), prof.end());
    const std::vector<cdouble> bu = rad.apply(std::span<const cdouble>(pc));
    const std::vector<cdouble> du = dmat.apply(std::span<const cdouble>(pc));
    double worst = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < g.cells(); ++j) {
        const cdouble expected =
            bu[j] + cdouble(0.0, 2.0 * 0.4 * xi) * du[j] - xi * xi * pc[j];
        for (std::size_t i = 0; i < 8; ++i) {
            const double x = kTau * static_cast<double>(i) / 8.0;
            worst = std::max(worst,
                             std::abs(lu[j * 8 + i] - expected * std::polar(1.0, xi * x)));
        }
        scale = std::max(scale, std::abs(expected));
    }
    CHECK(worst / scale < 1e-11);
}

TEST_CASE("solve inverts the shifted operator") {
    const HalfSpaceSolver solver(small_config());
    ProbeGenerator gen(31);
    const std::vector<cdouble> f = gen.planar(1, 8, kTau, solver.config().grid);
    const cdouble lam(1.5, 2.0);
    const std::vector<cdouble> u = solver.solve(lam, f);
    std::vector<cdouble> res = solver.apply(u);
    for (std::size_t j = 0; j < res.size(); ++j) res[j] = lam * u[j] - res[j];
    CHECK(rel_l2(res, f) < 1e-11);
}

TEST_CASE("solve rejects spectrum-side shifts") {
    const HalfSpaceSolver solver(small_config());
    std::vector<cdouble> f(solver.size(), cdouble(1.0, 0.0));
    CHECK_THROWS_AS(solver.solve(cdouble(-3.0, 0.0), f), std::invalid_argument);
}

TEST_CASE("norm reduces to the weighted radial norm for x-constant fields") {
    HalfSpaceConfig cfg = small_config();
    const double period_volume = kTau;  // one axis
    const HalfSpaceSolver solver(std::move(cfg));
    const RadialGrid& g = solver.config().grid;
    ProbeGenerator gen(6);
    const std::vector<double> prof = gen.radial(g);
    std::vector<cdouble> u(solver.size());
    for (std::size_t j = 0; j < g.cells(); ++j)
        for (std::size_t i = 0; i < 8; ++i) u[j * 8 + i] = prof[j];
    const double direct = weighted_norm(g, std::span<const double>(prof), 2.0, 0.5) *
                          std::sqrt(period_volume);
    CHECK(solver.norm(u) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("spectral x-derivative matches the mode multiplier") {
    const HalfSpaceSolver solver(small_config());
    const RadialGrid& g = solver.config().grid;
    std::vector<cdouble> u(solver.size());
    const double xi = 2.0;
    for (std::size_t j = 0; j < g.cells(); ++j)
        for (std::size_t i = 0; i < 8; ++i) {
            const double x = kTau * static_cast<double>(i) / 8.0;
            u[j * 8 + i] = std::polar(1.0, xi * x) * (1.0 + g.node(j));
        }
    const std::vector<cdouble> du = solver.dx(u, 0);
    std::vector<cdouble> expected(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) expected[k] = cdouble(0.0, xi) * u[k];
    CHECK(rel_l2(du, expected) < 1e-12);
}

TEST_CASE("form values obey the sector inequalities exactly") {
    for (const std::vector<double>& a : {std::vector<double>{0.0}, std::vector<double>{0.6}}) {
        HalfSpaceConfig cfg = small_config(1, 8, 40, 0.5, a);
        const HalfSpaceSolver solver(std::move(cfg));
        const double an = std::abs(a[0]);
        ProbeGenerator gen(77);
        for (int k = 0; k < 8; ++k) {
            const std::vector<cdouble> u = gen.planar(1, 8, kTau, solver.config().grid);
            const HalfSpaceSolver::FormReport fr = solver.form_values(u);
            CHECK(fr.re >= (1.0 - an) * fr.energy - 1e-12 * fr.energy);
            CHECK(std::abs(fr.im) <= an / (1.0 - an) * fr.re + 1e-12 * fr.re);
        }
    }
}

TEST_CASE("parabolic stepping integrates a manufactured superposition") {
    const HalfSpaceSolver solver(small_config(1, 8, 40));
    ProbeGenerator gen(13);
    const std::vector<cdouble> phi = gen.planar(1, 8, kTau, solver.config().grid);
    const std::vector<cdouble> lphi = solver.apply(phi);
    const auto src = [&](double t) {
        std::vector<cdouble> v(phi.size());
        for (std::size_t k = 0; k < v.size(); ++k)
            v[k] = std::cos(t) * phi[k] - std::sin(t) * lphi[k];
        return v;
    };
    const std::vector<cdouble> zero(phi.size(), cdouble(0.0, 0.0));
    const HalfSpaceSolver::Trajectory traj = solver.parabolic_solve(zero, src, 0.8, 256);
    std::vector<cdouble> expected(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) expected[k] = std::sin(0.8) * phi[k];
    CHECK(rel_l2(traj.states.back(), expected) < 1e-4);
}

TEST_CASE("space-time quotient report is finite with a tiny step identity defect") {
    const HalfSpaceSolver solver(small_config(1, 8, 40));
    ProbeGenerator gen(40);
    const std::vector<cdouble> phi = gen.planar(1, 8, kTau, solver.config().grid);
    const auto src = [&](double t) {
        std::vector<cdouble> v(phi.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::exp(-t) * phi[k];
        return v;
    };
    const std::vector<cdouble> zero(phi.size(), cdouble(0.0, 0.0));
    const HalfSpaceSolver::Trajectory traj = solver.parabolic_solve(zero, src, 1.0, 64);
    const HalfSpaceSolver::MaxRegReport mr = solver.maxreg_ratio(traj, src);
    CHECK(std::isfinite(mr.ratio));
    CHECK(mr.ratio > 0.0);
    CHECK(mr.identity_residual < 1e-10);
}

TEST_CASE("regularity ratios are finite on smooth probes") {
    const HalfSpaceSolver solver(small_config(1, 8, 48));
    ProbeGenerator gen(55);
    std::vector<std::vector<cdouble>> batch;
    for (int k = 0; k < 3; ++k) batch.push_back(gen.planar(1, 8, kTau, solver.config().grid));
    const HalfSpaceSolver::RegularityReport rr =
        solver.regularity_ratios(batch, cdouble(1e-6, 0.0));
    CHECK(rr.probes == 3);
    CHECK(std::isfinite(rr.max_ratio));
    CHECK(rr.max_ratio > 0.0);
    CHECK(rr.min_generator_norm > 0.0);
    CHECK(rr.xx_ratio <= rr.max_ratio + 1e-12);
}

TEST_CASE("two periodic axes: apply matches the per-frequency definition") {
    HalfSpaceConfig cfg = small_config(2, 6, 32, 0.5, {0.3, -0.2});
    const HalfSpaceSolver solver(std::move(cfg));
    const RadialGrid& g = solver.config().grid;
    const BesselOperator rad(g, 0.5);
    const TridiagD dmat = derivative_matrix(g);
    ProbeGenerator gen(64);
    const std::vector<double> prof = gen.radial(g);
    std::vector<cdouble> pc(prof.begin(), prof.end());

    const double x1 = 1.0, x2 = -2.0;  // integer modes
    std::vector<cdouble> u(solver.size());
    for (std::size_t j = 0; j < g.cells(); ++j)
        for (std::size_t i2 = 0; i2 < 6; ++i2)
            for (std::size_t i1 = 0; i1 < 6; ++i1) {
                const double xa = kTau * static_cast<double>(i1) / 6.0;
                const double xb = kTau * static_cast<double>(i2) / 6.0;
                u[j * 36 + i2 * 6 + i1] = prof[j] * std::polar(1.0, x1 * xa + x2 * xb);
            }
    const std::vector<cdouble> lu = solver.apply(u);
    const std::vector<cdouble> bu = rad.apply(std::span<const cdouble>(pc));
    const std::vector<cdouble> du = dmat.apply(std::span<const cdouble>(pc));
    const double xisq = x1 * x1 + x2 * x2;
    const double adotxi = 0.3 * x1 + (-0.2) * x2;
    double worst = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < g.cells(); ++j) {
        const cdouble expected = bu[j] + cdouble(0.0, 2.0 * adotxi) * du[j] - xisq * pc[j];
        scale = std::max(scale, std::abs(expected));
        for (std::size_t i2 = 0; i2 < 6; ++i2)
            for (std::size_t i1 = 0; i1 < 6; ++i1) {
                const double xa = kTau * static_cast<double>(i1) / 6.0;
                const double xb = kTau * static_cast<double>(i2) / 6.0;
                const cdouble phase = std::polar(1.0, x1 * xa + x2 * xb);
                worst = std::max(worst, std::abs(lu[j * 36 + i2 * 6 + i1] - expected * phase));
            }
    }
    CHECK(worst / scale < 1e-11);
}
