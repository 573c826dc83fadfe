#include <doctest.h>

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "singulax/bessel.hpp"
#include "singulax/grid.hpp"
#include "singulax/oscillatory.hpp"
#include "singulax/probes.hpp"

using namespace singulax;

namespace {

double rel_linf(const std::vector<cdouble>& u, const std::vector<cdouble>& v) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        num = std::max(num, std::abs(u[j] - v[j]));
        den = std::max(den, std::abs(v[j]));
    }
    return num / den;
}

}  // namespace

TEST_CASE("gauge conjugation at the matrix level") {
    const RadialGrid g(40, 5.0, 2.0);
    const OscillatoryOperator op(g, 0.7, 1.2);
    ProbeGenerator gen(3);
    const std::vector<cdouble> u = gen.radial_complex(g);

    // L u computed two ways: the direct tridiagonal, and P^{-1} A (P u).
    const std::vector<cdouble> direct = op.apply_direct(u);
    const std::vector<cdouble>& phase = op.gauge_phase();
    std::vector<cdouble> pu(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) pu[j] = phase[j] * u[j];
    std::vector<cdouble> apu = op.apply_auxiliary(pu);
    for (std::size_t j = 0; j < u.size(); ++j) apu[j] /= phase[j];
    // Identity holds exactly; the float route differs by the rounding of
    // the extra phase multiplications against entries of size ~1/h^2.
    CHECK(rel_linf(direct, apu) < 1e-12);
}

TEST_CASE("zero oscillation degenerates to the plain diffusion") {
    const RadialGrid g(32, 4.0, 2.0);
    const OscillatoryOperator op(g, 0.5, 0.0);
    const BesselOperator plain(g, 0.5);
    ProbeGenerator gen(8);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const std::vector<cdouble> a = op.evolve(cdouble(0.3, 0.0), f);
    const std::vector<cdouble> b = plain.evolve(cdouble(0.3, 0.0), f);
    CHECK(rel_linf(a, b) < 1e-11);
}

TEST_CASE("rational steppers commute with the gauge") {
    // Trapezoidal stepping applied to the direct matrix must equal the
    // gauged trapezoidal route to rounding, at any step count.
    const RadialGrid g(48, 5.0, 2.0);
    const OscillatoryOperator op(g, 0.5, 1.5);
    ProbeGenerator gen(12);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const std::vector<cdouble> gauged =
        op.evolve(cdouble(0.6, 0.0), f, OscScheme::crank_nicolson, 24);
    const std::vector<cdouble> direct = op.evolve_direct_cn(0.6, f, 24);
    CHECK(rel_linf(direct, gauged) < 1e-12);
}

TEST_CASE("stepping converges to the exact oscillatory evolution") {
    const RadialGrid g(40, 5.0, 2.0);
    const OscillatoryOperator op(g, 0.8, 1.0);
    ProbeGenerator gen(30);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const std::vector<cdouble> exact = op.evolve(cdouble(0.5, 0.0), f);
    double prev = -1.0;
    for (int steps : {20, 40}) {
        const std::vector<cdouble> cn =
            op.evolve(cdouble(0.5, 0.0), f, OscScheme::crank_nicolson, steps);
        const double err = rel_linf(cn, exact);
        if (prev > 0.0) CHECK(err < 0.35 * prev);
        prev = err;
    }
}

TEST_CASE("backward Euler is first order and damping") {
    const RadialGrid g(40, 5.0, 2.0);
    const OscillatoryOperator op(g, 0.5, 1.0);
    ProbeGenerator gen(14);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const std::vector<cdouble> exact = op.evolve(cdouble(0.5, 0.0), f);
    double prev = -1.0;
    for (int steps : {40, 80}) {
        const std::vector<cdouble> be =
            op.evolve(cdouble(0.5, 0.0), f, OscScheme::backward_euler, steps);
        const double err = rel_linf(be, exact);
        if (prev > 0.0) {
            CHECK(err < 0.7 * prev);  // first order: ratio ~ 0.5
            CHECK(err > 0.3 * prev);
        }
        prev = err;
    }
}

TEST_CASE("split-step magnitudes are dominated by the plain diffusion") {
    const RadialGrid g(64, 6.0, 2.0);
    for (double b : {0.5, 2.0}) {
        const OscillatoryOperator op(g, 0.5, b);
        CHECK(op.domination_violation(0.4, 16, 9) <= 1e-8);
    }
}

TEST_CASE("discrete kernel dilation identity is exact") {
    const RadialGrid g(64, 8.0, 2.0);
    CHECK(scaling_deviation(0.5, 2.0, cdouble(0.2, 0.0), g) < 1e-10);
    CHECK(scaling_deviation(0.0, -1.5, cdouble(0.4, 0.0), g) < 1e-10);
}

TEST_CASE("complex time: sectorial evolution stays bounded") {
    const RadialGrid g(40, 5.0, 2.0);
    const OscillatoryOperator op(g, 0.5, 1.0);
    ProbeGenerator gen(44);
    const std::vector<cdouble> f = gen.radial_complex(g);
    const cdouble z = 0.3 * cdouble(std::cos(M_PI / 4.0), std::sin(M_PI / 4.0));
    const std::vector<cdouble> u =
        op.evolve(z, f, OscScheme::backward_euler, 64);
    double peak = 0.0;
    for (const cdouble& v : u) peak = std::max(peak, std::abs(v));
    CHECK(std::isfinite(peak));
    CHECK(peak > 0.0);
}
