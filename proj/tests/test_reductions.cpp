#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "singulax/grid.hpp"
#include "singulax/halfspace.hpp"
#include "singulax/probes.hpp"
#include "singulax/reductions.hpp"

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

GeneralCoefficients one_axis_case() {
    GeneralCoefficients gc;
    gc.dim_x = 1;
    gc.q1 = {2.0};
    gc.q = {0.8};
    gc.gamma = 1.5;
    gc.b = {0.4};
    gc.c = 1.2;
    return gc;
}

}  // namespace

TEST_CASE("congruence on the worked 2x2 instance") {
    GeneralCoefficients gc;
    gc.dim_x = 1;
    gc.q1 = {1.0};
    gc.q = {0.0};
    gc.gamma = 1.0;
    gc.b = {0.5};
    gc.c = 1.0;
    const std::vector<double> tq = tilde_q(gc);
    REQUIRE(tq.size() == 4);
    CHECK(tq[0] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(tq[1] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(tq[2] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(tq[3] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("congruence equals an independent M Q M^T evaluation") {
    std::mt19937_64 rng(2024);
    const auto u = [&rng](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 2, d = n + 1;
        GeneralCoefficients gc;
        gc.dim_x = n;
        gc.q1.resize(n * n);
        gc.q.resize(n);
        gc.b.resize(n);
        // Symmetric Q1 with dominant diagonal.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = i == j ? 1.5 + u(0.0, 1.0) : u(-0.3, 0.3);
                gc.q1[i * n + j] = v;
                gc.q1[j * n + i] = v;
            }
        for (std::size_t i = 0; i < n; ++i) {
            gc.q[i] = u(-0.4, 0.4);
            gc.b[i] = u(-1.0, 1.0);
        }
        gc.gamma = 1.0 + u(0.0, 1.0);
        gc.c = u(0.5, 2.0) * (trial % 3 == 0 ? -1.0 : 1.0);

        // Independent evaluation with explicit loops.
        std::vector<double> mm(d * d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            mm[i * d + i] = 1.0;
            mm[i * d + n] = -gc.b[i] / gc.c;
        }
        mm[n * d + n] = 1.0;
        const std::vector<double> full = gc.full_matrix();
        std::vector<double> tmp(d * d, 0.0), ref(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t j = 0; j < d; ++j)
                    tmp[i * d + j] += mm[i * d + k] * full[k * d + j];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t j = 0; j < d; ++j)
                    ref[i * d + j] += tmp[i * d + k] * mm[j * d + k];

        const std::vector<double> tq = tilde_q(gc);
        for (std::size_t k = 0; k < d * d; ++k)
            CHECK(tq[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    }
}

TEST_CASE("positive definiteness checker finds the first violated minor") {
    const std::vector<double> good = {2.0, -0.5, -0.5, 1.0};
    CHECK(check_spd(good, 2).positive);
    const std::vector<double> bad = {1.0, 2.0, 2.0, 1.0};  // det = -3
    const SpdCheck r = check_spd(bad, 2);
    CHECK_FALSE(r.positive);
    CHECK(r.violated_minor == 2);
    CHECK(r.minor_value < 0.0);
    const std::vector<double> neg_first = {-1.0, 0.0, 0.0, 1.0};
    CHECK(check_spd(neg_first, 2).violated_minor == 1);
}

TEST_CASE("reduction produces the normal form") {
    const GeneralCoefficients gc = one_axis_case();
    const ReductionResult red = reduce_general(gc);
    // S Q1 S^T = gamma I in one dimension.
    CHECK(red.s[0] * gc.q1[0] * red.s[0] == doctest::Approx(gc.gamma).epsilon(1e-13));
    // Reduced anisotropy magnitude stays below 1 exactly when Q is SPD.
    double an = 0.0;
    for (double v : red.a) an += v * v;
    CHECK(an < 1.0);
    CHECK(red.reduced_exponent == doctest::Approx(gc.c / gc.gamma).epsilon(1e-15));
    CHECK(red.schur > 0.0);

    GeneralCoefficients sick = gc;
    sick.q = {1.75};  // q^2 >= gamma * q1 makes the full matrix indefinite
    CHECK_THROWS_AS(reduce_general(sick), std::invalid_argument);
}

TEST_CASE("spectral shear is unitary and invertible") {
    const GeneralCoefficients gc = one_axis_case();
    const RadialGrid grid(40, 4.0, 2.0);
    const ObliqueSolver os(gc, 8, {8.0}, grid, 0.3, 2.0);
    ProbeGenerator gen(88);
    const std::vector<cdouble> u = gen.planar(1, 8, 8.0, grid);
    const std::vector<cdouble> su = os.shear(u);
    const std::vector<cdouble> usu = os.unshear(su);
    CHECK(rel_l2(usu, u) < 1e-13);
    const double n1 = os.reduced_solver().norm(u, 2.0, 0.3);
    const double n2 = os.reduced_solver().norm(su, 2.0, 0.3);
    CHECK(n2 == doctest::Approx(n1).epsilon(1e-12));
}

TEST_CASE("conjugated and direct solves agree on smooth data") {
    const GeneralCoefficients gc = one_axis_case();
    const RadialGrid grid(96, 4.0, 2.0);
    const ObliqueSolver os(gc, 16, {8.0}, grid, 0.3, 2.0);
    ProbeGenerator gen(19);
    const std::vector<cdouble> f = gen.planar(1, 16, 8.0, grid);
    const cdouble lam(3.0, 0.8);
    const std::vector<cdouble> uc = os.solve(lam, f);
    const std::vector<cdouble> ud = os.solve_direct(lam, f);
    CHECK(rel_l2(uc, ud) < 5e-2);
}

TEST_CASE("zero x-drift: conjugated route collapses onto the direct one") {
    GeneralCoefficients gc = one_axis_case();
    gc.b = {0.0};
    const RadialGrid grid(48, 4.0, 2.0);
    const ObliqueSolver os(gc, 8, {8.0}, grid, 0.3, 2.0);
    ProbeGenerator gen(23);
    const std::vector<cdouble> f = gen.planar(1, 8, 8.0, grid);
    const cdouble lam(2.0, 0.5);
    CHECK(rel_l2(os.solve(lam, f), os.solve_direct(lam, f)) < 1e-12);
}

TEST_CASE("support wrap guard rejects shear displacements beyond half a period") {
    const GeneralCoefficients gc = one_axis_case();  // |b/c| = 1/3
    const RadialGrid tall(16, 20.0, 2.0);            // displacement ~6.7 > period/2
    CHECK_THROWS_AS(ObliqueSolver(gc, 8, {8.0}, tall, 0.3, 2.0), std::invalid_argument);
}

TEST_CASE("two-axis solver requires a diagonal sheared block") {
    GeneralCoefficients gc;
    gc.dim_x = 2;
    gc.gamma = 1.2;
    gc.c = 1.1;
    gc.b = {0.5, -0.3};
    const double mu = gc.gamma / (2.0 * gc.c);
    gc.q = {mu * gc.b[0], mu * gc.b[1]};
    gc.q1 = {1.5, 0.0, 0.0, 0.9};  // sheared block stays equal to Q1 here
    const RadialGrid grid(32, 4.0, 2.0);
    const ObliqueSolver os(gc, 8, {8.0, 8.0}, grid, 0.3, 2.0);
    CHECK(os.size() == 32 * 64);

    GeneralCoefficients skew = gc;
    skew.q = {0.0, 0.0};  // now the shear leaves off-diagonal couplings
    skew.q1 = {1.5, 0.2, 0.2, 0.9};
    CHECK_THROWS_AS(ObliqueSolver(skew, 8, {8.0, 8.0}, grid, 0.3, 2.0),
                    std::invalid_argument);
}

TEST_CASE("norm indices are checked against the reduced exponent") {
    const GeneralCoefficients gc = one_axis_case();  // c/gamma = 0.8
    const RadialGrid grid(16, 4.0, 2.0);
    const double bad_m = 2.0 * (gc.c / gc.gamma + 1.5) - 1.0;
    CHECK_THROWS(ObliqueSolver(gc, 8, {8.0}, grid, bad_m, 2.0));
}

TEST_CASE("oblique trace term matches a hand computation on a pure mode") {
    const GeneralCoefficients gc = one_axis_case();
    const RadialGrid grid(48, 4.0, 2.0);
    const ObliqueSolver os(gc, 8, {8.0}, grid, 0.3, 2.0);
    ProbeGenerator gen(91);
    const std::vector<double> prof = gen.radial(grid);
    std::vector<cdouble> u(os.size());
    const double xi = 2.0 * M_PI / 8.0;  // mode 1
    for (std::size_t j = 0; j < grid.cells(); ++j)
        for (std::size_t i = 0; i < 8; ++i) {
            const double x = 8.0 * static_cast<double>(i) / 8.0;
            u[j * 8 + i] = prof[j] * std::polar(1.0, xi * x);
        }
    const double tn = os.oblique_trace_norm(u);
    CHECK(std::isfinite(tn));
    CHECK(tn > 0.0);
}
