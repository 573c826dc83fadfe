#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "singulax/special.hpp"

using namespace singulax;

namespace {

// Fine quadrature of f(rho) rho^c on [0, hi]: the weight rho^c is
// integrated exactly over each cell (it may blow up at 0 for c < 0),
// and f is sampled at the cell midpoint.
template <typename F>
double weighted_quad(F&& f, double c, double hi, int n = 40000) {
    double sum = 0.0;
    const double h = hi / n;
    for (int i = 0; i < n; ++i) {
        const double rho = (i + 0.5) * h;
        const double wmass =
            (std::pow((i + 1) * h, c + 1.0) - std::pow(i * h, c + 1.0)) / (c + 1.0);
        sum += std::forward<F>(f)(rho) * wmass;
    }
    return sum;
}

}  // namespace

TEST_CASE("scaled Bessel function: series and asymptotic branches agree with references") {
    // I_0(1) = 1.2660658777520083, e^{-1} I_0(1):
    CHECK(scaled_bessel_i(0.0, 1.0) == doctest::Approx(0.46575960759364043).epsilon(1e-12));
    // I_1(2) = 1.5906368546373291
    CHECK(scaled_bessel_i(1.0, 2.0) ==
          doctest::Approx(1.5906368546373291 * std::exp(-2.0)).epsilon(1e-12));
    // Large argument: e^{-x} I_nu(x) ~ 1/sqrt(2 pi x) (1 - (4nu^2-1)/(8x) + ...)
    const double x = 500.0;
    const double lead = 1.0 / std::sqrt(2.0 * M_PI * x);
    CHECK(scaled_bessel_i(0.5, x) == doctest::Approx(lead).epsilon(1e-2));
    // Half-integer closed form: I_{1/2}(x) = sqrt(2/(pi x)) sinh x.
    for (double xv : {0.3, 1.0, 5.0, 40.0}) {
        const double exact = std::sqrt(2.0 / (M_PI * xv)) * 0.5 * (1.0 - std::exp(-2.0 * xv));
        CHECK(scaled_bessel_i(0.5, xv) == doctest::Approx(exact).epsilon(1e-11));
    }
    // nu = -1/2: I_{-1/2}(x) = sqrt(2/(pi x)) cosh x.
    for (double xv : {0.4, 3.0, 25.0}) {
        const double exact = std::sqrt(2.0 / (M_PI * xv)) * 0.5 * (1.0 + std::exp(-2.0 * xv));
        CHECK(scaled_bessel_i(-0.5, xv) == doctest::Approx(exact).epsilon(1e-11));
    }
}

TEST_CASE("heat kernel symmetry and positivity") {
    for (double c : {-0.5, 0.0, 1.0, 2.7}) {
        for (double t : {0.05, 1.0}) {
            CHECK(bessel_heat_kernel(c, t, 0.7, 1.9) ==
                  doctest::Approx(bessel_heat_kernel(c, t, 1.9, 0.7)).epsilon(1e-13));
            CHECK(bessel_heat_kernel(c, t, 0.3, 0.8) > 0.0);
        }
    }
}

TEST_CASE("heat kernel integrates to one in its weighted measure") {
    for (double c : {-0.5, 0.0, 1.0, 2.0}) {
        for (double t : {0.1, 0.5}) {
            const double y = 0.9;
            const double mass = weighted_quad(
                [&](double rho) { return bessel_heat_kernel(c, t, y, rho); }, c,
                y + 30.0 * std::sqrt(t));
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("heat kernel semigroup property") {
    const double c = 1.3, t = 0.2, s = 0.35, y = 0.6, rho = 1.1;
    const double conv = weighted_quad(
        [&](double sigma) {
            return bessel_heat_kernel(c, t, y, sigma) * bessel_heat_kernel(c, s, sigma, rho);
        },
        c, 25.0);
    CHECK(conv == doctest::Approx(bessel_heat_kernel(c, t + s, y, rho)).epsilon(1e-7));
}

TEST_CASE("heat kernel is flat at the reflecting endpoint") {
    // The weighted reflection condition kills the y-derivative at 0: values
    // at two small y differ only at second order.
    const double c = 0.8, t = 0.3, rho = 1.0;
    const double p0 = bessel_heat_kernel(c, t, 0.0, rho);
    const double p1 = bessel_heat_kernel(c, t, 1e-4, rho);
    CHECK(std::abs(p1 - p0) < 1e-6 * p0);
}

TEST_CASE("c = 0 kernel equals the reflected Gaussian") {
    for (double y : {0.0, 0.4, 2.0}) {
        for (double rho : {0.1, 1.5}) {
            CHECK(bessel_heat_kernel(0.0, 0.7, y, rho) ==
                  doctest::Approx(reflected_gaussian_kernel(0.7, y, rho)).epsilon(1e-11));
        }
    }
}

TEST_CASE("reflected Gaussian derivative matches finite differences") {
    const double t = 0.4, rho = 0.8, h = 1e-6;
    for (double y : {0.3, 1.2}) {
        const double fd = (reflected_gaussian_kernel(t, y + h, rho) -
                           reflected_gaussian_kernel(t, y - h, rho)) /
                          (2.0 * h);
        CHECK(reflected_gaussian_kernel_dy(t, y, rho) == doctest::Approx(fd).epsilon(1e-6));
    }
}
