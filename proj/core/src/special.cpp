#include "singulax/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace singulax {

namespace {

constexpr double kSeriesCrossover = 50.0;

/// Sum_k (x/2)^{2k} / (k! Gamma(nu+k+1)) = (x/2)^{-nu} I_nu(x).
/// All terms positive, so the sum is well conditioned up to the crossover.
double reduced_bessel_series(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= q / (k * (nu + k));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

/// exp(-x) I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k for large x.
double scaled_bessel_asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = term;
    for (int k = 1; k < 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(next) >= std::abs(term)) break; // divergent tail of the expansion
        term = next;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

} // namespace

double scaled_bessel_i(double nu, double x) {
    if (!(nu > -1.0)) throw std::invalid_argument("scaled_bessel_i: order must exceed -1");
    if (x < 0.0) throw std::invalid_argument("scaled_bessel_i: negative argument");
    if (x == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (x < kSeriesCrossover) return std::exp(-x + nu * std::log(0.5 * x)) * reduced_bessel_series(nu, x);
    return scaled_bessel_asymptotic(nu, x);
}

double bessel_heat_kernel(double c, double t, double y, double rho) {
    if (!(c > -1.0)) throw std::invalid_argument("bessel_heat_kernel: weight exponent must exceed -1");
    if (!(t > 0.0)) throw std::invalid_argument("bessel_heat_kernel: time must be positive");
    if (y < 0.0 || rho < 0.0) throw std::invalid_argument("bessel_heat_kernel: coordinates must be >= 0");
    const double nu = 0.5 * (c - 1.0);
    const double x = y * rho / (2.0 * t);
    if (x < kSeriesCrossover) {
        // (y rho)^{-nu} I_nu = (4t)^{-nu} * reduced series; regular at y = 0 or rho = 0.
        const double expo = -(y * y + rho * rho) / (4.0 * t) - nu * std::log(4.0 * t);
        return 0.5 / t * std::exp(expo) * reduced_bessel_series(nu, x);
    }
    const double expo = -(y - rho) * (y - rho) / (4.0 * t) - nu * std::log(y * rho);
    return 0.5 / t * std::exp(expo) * scaled_bessel_asymptotic(nu, x);
}

double reflected_gaussian_kernel(double t, double y, double rho) {
    if (!(t > 0.0)) throw std::invalid_argument("reflected_gaussian_kernel: time must be positive");
    const double a = std::exp(-(y - rho) * (y - rho) / (4.0 * t));
    const double b = std::exp(-(y + rho) * (y + rho) / (4.0 * t));
    return (a + b) / std::sqrt(4.0 * M_PI * t);
}

double reflected_gaussian_kernel_dy(double t, double y, double rho) {
    if (!(t > 0.0)) throw std::invalid_argument("reflected_gaussian_kernel_dy: time must be positive");
    const double a = std::exp(-(y - rho) * (y - rho) / (4.0 * t));
    const double b = std::exp(-(y + rho) * (y + rho) / (4.0 * t));
    return (-(y - rho) * a - (y + rho) * b) / (2.0 * t * std::sqrt(4.0 * M_PI * t));
}

} // namespace singulax
