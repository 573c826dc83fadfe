#include <doctest.h>

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "singulax/grid.hpp"
#include "singulax/multiplier.hpp"
#include "singulax/probes.hpp"

using namespace singulax;

namespace {

double rel_l2(const std::vector<cdouble>& u, const std::vector<cdouble>& v) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        num += std::norm(u[j] - v[j]);
        den += std::norm(v[j]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("quadratic symbol and sector angles") {
    const std::vector<double> a = {0.6, 0.0};
    const std::vector<double> xi = {1.0, 2.0};
    // |xi|^2 - (a.xi)^2 = 5 - 0.36
    CHECK(quadratic_symbol(a, xi) == doctest::Approx(4.64).epsilon(1e-14));
    CHECK(anisotropy_angle(0.5) == doctest::Approx(std::asin(0.5)).epsilon(1e-14));
    CHECK(sector_half_angle(0.5, 1.0) == doctest::Approx(std::asin(0.5)).epsilon(1e-12));
    CHECK(sector_half_angle(0.0, 0.7) == doctest::Approx(0.0));
}

TEST_CASE("resolvent point solves the shifted per-frequency system") {
    const RadialGrid g(56, 6.0, 2.0);
    const SymbolFamily fam(g, 0.5, {0.4});
    ProbeGenerator gen(17);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const SymbolFamily::Point pt = fam.at(cdouble(1.2, 0.9), std::vector<double>{1.7});
    const std::vector<cdouble> u = pt.resolvent.apply(f);
    const std::vector<cdouble> back = fam.shifted_apply(pt, u);
    CHECK(rel_l2(back, f) < 1e-11);
}

TEST_CASE("operator norm estimator on known operators") {
    const RadialGrid g(48, 5.0, 2.0);
    const std::vector<double> mass = g.cell_masses(0.5);
    CHECK(op_norm_l2(LinearOpZ::identity(), mass).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(op_norm_l2(LinearOpZ::scalar(cdouble(0.0, -2.0)), mass).value ==
          doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("self-adjoint resolvent norm matches the spectral oracle") {
    const RadialGrid g(64, 6.0, 2.0);
    const SymbolFamily fam(g, 1.0, {0.0});
    for (const cdouble lam : {cdouble(0.5, 0.0), cdouble(1.0, 3.0), cdouble(-0.2, 2.0)}) {
        const double xisq = 1.9;
        const SymbolFamily::Point pt = fam.at(lam, std::vector<double>{std::sqrt(xisq)});
        const double est =
            op_norm_l2(pt.resolvent.scaled(lam), fam.base().masses()).value;
        const double oracle = lambda_resolvent_norm_selfadjoint(fam.base(), lam, xisq);
        CHECK(est == doctest::Approx(oracle).epsilon(1e-7));
    }
}

TEST_CASE("exact frequency derivative against finite differences (one axis)") {
    const RadialGrid g(48, 6.0, 2.0);
    const SymbolFamily fam(g, 0.5, {0.4});
    ProbeGenerator gen(23);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const cdouble lam(2.0, 1.0);
    const std::vector<double> xi = {1.3};
    const SymbolFamily::Point pt = fam.at(lam, xi);
    const std::vector<cdouble> exact = fam.symbol_derivative(pt, 1u).apply(f);
    const double h = 1e-4;
    const std::vector<cdouble> up = fam.at(lam, std::vector<double>{xi[0] + h}).resolvent.apply(f);
    const std::vector<cdouble> um = fam.at(lam, std::vector<double>{xi[0] - h}).resolvent.apply(f);
    std::vector<cdouble> fd(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) fd[j] = (up[j] - um[j]) / (2.0 * h);
    CHECK(rel_l2(exact, fd) < 1e-6);
}

TEST_CASE("second mixed derivative against finite differences (two axes)") {
    const RadialGrid g(40, 6.0, 2.0);
    const SymbolFamily fam(g, 1.0, {0.3, -0.2});
    ProbeGenerator gen(29);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const cdouble lam(1.5, -0.7);
    const std::vector<double> xi = {0.9, 1.4};
    const SymbolFamily::Point pt = fam.at(lam, xi);
    const std::vector<cdouble> exact = fam.symbol_derivative(pt, 3u).apply(f);
    const double h = 2e-3;
    std::vector<cdouble> fd(f.size(), cdouble(0.0, 0.0));
    for (int sx = -1; sx <= 1; sx += 2) {
        for (int sy = -1; sy <= 1; sy += 2) {
            const std::vector<double> xs = {xi[0] + sx * h, xi[1] + sy * h};
            const std::vector<cdouble> u = fam.at(lam, xs).resolvent.apply(f);
            for (std::size_t j = 0; j < f.size(); ++j)
                fd[j] += (sx * sy / (4.0 * h * h)) * u[j];
        }
    }
    CHECK(rel_l2(exact, fd) < 1e-4);
}

TEST_CASE("probe lower bound never exceeds the two-sided norm at p = 2") {
    const RadialGrid g(40, 5.0, 2.0);
    const SymbolFamily fam(g, 0.5, {0.3});
    const SymbolFamily::Point pt = fam.at(cdouble(1.0, 0.4), std::vector<double>{0.8});
    const LinearOpZ member = pt.resolvent.scaled(pt.lambda);
    const double two_sided = op_norm_l2(member, fam.base().masses()).value;
    const double lower = op_norm_lp_lower(member, g, 2.0, 0.5, 16, 99);
    CHECK(lower <= two_sided * (1.0 + 1e-9));
}

TEST_CASE("lattices have the promised shape") {
    const std::vector<cdouble> lams = sector_lambda_lattice(2.0, 4, 3, 0.1, 10.0);
    CHECK(lams.size() == 12);
    for (const cdouble& l : lams) {
        CHECK(std::abs(l) >= 0.1 * (1.0 - 1e-12));
        CHECK(std::abs(l) <= 10.0 * (1.0 + 1e-12));
        CHECK(std::abs(std::arg(l)) <= 2.0 + 1e-12);
    }
    const std::vector<std::vector<double>> xs1 = xi_lattice(1, 5, 3, 0.5, 2.0);
    CHECK(xs1.size() == 10);  // both signs in one axis
    const std::vector<std::vector<double>> xs2 = xi_lattice(2, 4, 6, 0.5, 2.0);
    CHECK(xs2.size() == 24);
    for (const auto& x : xs2) CHECK(x.size() == 2);
}

TEST_CASE("scan produces finite suprema and records points") {
    const RadialGrid g(32, 5.0, 2.0);
    const SymbolFamily fam(g, 0.5, {0.4});
    const std::vector<cdouble> lams = sector_lambda_lattice(2.2, 3, 3, 0.5, 50.0);
    const std::vector<std::vector<double>> xis = xi_lattice(1, 4, 2, 0.1, 4.0);
    const SymbolScanReport r =
        mikhlin_scan(fam, SymbolTarget::lambda_r, 2.0, 0.5, lams, xis, 32, 8, 7);
    CHECK(r.sup > 0.0);
    CHECK(std::isfinite(r.sup));
    CHECK(!r.points.empty());
    for (const ScanPoint& p : r.points) CHECK(std::isfinite(p.norm));
}
