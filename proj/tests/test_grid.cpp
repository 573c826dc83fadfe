#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "singulax/grid.hpp"

using namespace singulax;

TEST_CASE("graded grid geometry") {
    const RadialGrid g(64, 10.0, 2.0);
    CHECK(g.cells() == 64);
    CHECK(g.y_max() == doctest::Approx(10.0));
    CHECK(g.face(0) == 0.0);
    CHECK(g.face(64) == doctest::Approx(10.0));
    for (std::size_t j = 0; j < 64; ++j) {
        CHECK(g.face(j) < g.node(j));
        CHECK(g.node(j) < g.face(j + 1));
        if (j > 0) CHECK(g.node(j - 1) < g.node(j));
    }
    // Grading 2 concentrates cells near 0: the first cell is much finer
    // than the last.
    CHECK(g.face(1) - g.face(0) < 0.05 * (g.face(64) - g.face(63)));
}

TEST_CASE("uniform grid spacing") {
    const RadialGrid g = RadialGrid::uniform(10, 5.0);
    for (std::size_t j = 0; j + 1 < 10; ++j)
        CHECK(g.spacing(j) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cell masses are exact antiderivative differences") {
    const RadialGrid g(37, 3.0, 1.7);
    for (double m : {-0.5, 0.0, 1.0, 2.3}) {
        const std::vector<double> mass = g.cell_masses(m);
        double total = 0.0;
        for (double v : mass) total += v;
        // Telescoping: the cell masses sum to the full-interval mass.
        CHECK(total == doctest::Approx(power_weight_mass(0.0, 3.0, m)).epsilon(1e-13));
        // Against the closed form on one interior cell.
        const double a = g.face(20), b = g.face(21);
        const double direct = (std::pow(b, m + 1.0) - std::pow(a, m + 1.0)) / (m + 1.0);
        CHECK(g.cell_mass(20, m) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("ball mass closed forms") {
    CHECK(ball_mass(0.0, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ball_mass(1.0, 2.0, 1.0) == doctest::Approx((9.0 - 4.0) / 2.0).epsilon(1e-14));
    CHECK(ball_mass(-0.5, 0.0, 4.0) == doctest::Approx(2.0 * std::sqrt(4.0)).epsilon(1e-14));
}

TEST_CASE("weighted norms") {
    const RadialGrid g(50, 2.0, 1.5);
    std::vector<double> ones(50, 1.0);
    const double m = 0.7;
    const double total = power_weight_mass(0.0, 2.0, m);
    CHECK(weighted_norm(g, std::span<const double>(ones), 2.0, m) ==
          doctest::Approx(std::sqrt(total)).epsilon(1e-13));
    CHECK(weighted_norm(g, std::span<const double>(ones), 1.0, m) ==
          doctest::Approx(total).epsilon(1e-13));

    std::vector<double> spike(50, 0.0);
    spike[31] = -3.0;
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(weighted_norm(g, std::span<const double>(spike), inf, m) == doctest::Approx(3.0));

    std::vector<cdouble> cplx(50, cdouble(3.0, 4.0));
    CHECK(weighted_norm(g, std::span<const cdouble>(cplx), 2.0, 0.0) ==
          doctest::Approx(5.0 * std::sqrt(power_weight_mass(0.0, 2.0, 0.0))).epsilon(1e-13));
}

TEST_CASE("norm index admissibility") {
    // requires 0 < (m+1)/p < exponent + 1
    CHECK(pair_admissible(2.0, 0.0, 0.0));
    CHECK(pair_admissible(2.0, 0.5, 1.0));
    CHECK_FALSE(pair_admissible(2.0, -1.0, 0.0));   // lower endpoint
    CHECK_FALSE(pair_admissible(2.0, 1.0, 0.0));    // upper endpoint
    CHECK_FALSE(pair_admissible(2.0, 3.6, 0.8));    // above the window
    CHECK(pair_admissible(4.0, 1.0, 0.0));          // 0.5 < 1
}
