#include "singulax/probes.hpp"

#include <cmath>
#include <stdexcept>

namespace singulax {

namespace {

double smooth_sigma(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double smooth_sigma_dy(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

/// C^infty step: 0 at s <= 0, 1 at s >= 1.
double smooth_step(double s) {
    const double a = smooth_sigma(s);
    const double b = smooth_sigma(1.0 - s);
    return a / (a + b);
}

double smooth_step_dy(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = smooth_sigma(s);
    const double b = smooth_sigma(1.0 - s);
    const double da = smooth_sigma_dy(s);
    const double db = -smooth_sigma_dy(1.0 - s);
    const double denom = (a + b) * (a + b);
    return (da * b - a * db) / denom;
}

} // namespace

double plateau_profile(double y, double plateau_end, double support_end) {
    if (!(0.0 < plateau_end && plateau_end < support_end))
        throw std::invalid_argument("plateau_profile: need 0 < plateau_end < support_end");
    if (y <= plateau_end) return 1.0;
    if (y >= support_end) return 0.0;
    return smooth_step((support_end - y) / (support_end - plateau_end));
}

double plateau_profile_dy(double y, double plateau_end, double support_end) {
    if (!(0.0 < plateau_end && plateau_end < support_end))
        throw std::invalid_argument("plateau_profile_dy: need 0 < plateau_end < support_end");
    if (y <= plateau_end || y >= support_end) return 0.0;
    const double w = support_end - plateau_end;
    return -smooth_step_dy((support_end - y) / w) / w;
}

double annular_bump(double y, double center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("annular_bump: radius must be positive");
    const double s = (y - center) / radius;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double annular_bump_dy(double y, double center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("annular_bump_dy: radius must be positive");
    const double s = (y - center) / radius;
    if (std::abs(s) >= 1.0) return 0.0;
    const double den = 1.0 - s * s;
    return annular_bump(y, center, radius) * (-2.0 * s / (den * den)) / radius;
}

double ProbeGenerator::uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng_);
}

std::vector<double> ProbeGenerator::radial(const RadialGrid& g) {
    const double Y = g.y_max();
    const int terms = 1 + static_cast<int>(rng_() % 3);
    std::vector<double> out(g.cells(), 0.0);
    for (int k = 0; k < terms; ++k) {
        const double coef = uniform(0.4, 1.6) * (rng_() % 2 ? 1.0 : -1.0);
        if (rng_() % 2) {
            const double plateau = uniform(0.05, 0.25) * Y;
            const double support = plateau + uniform(0.15, 0.5) * Y;
            for (std::size_t j = 0; j < g.cells(); ++j)
                out[j] += coef * plateau_profile(g.node(j), plateau, support);
        } else {
            const double radius = uniform(0.08, 0.2) * Y;
            const double center = uniform(radius + 0.05 * Y, 0.75 * Y);
            for (std::size_t j = 0; j < g.cells(); ++j)
                out[j] += coef * annular_bump(g.node(j), center, radius);
        }
    }
    return out;
}

std::vector<cdouble> ProbeGenerator::radial_complex(const RadialGrid& g) {
    const std::vector<double> re = radial(g);
    const std::vector<double> im = radial(g);
    std::vector<cdouble> out(g.cells());
    for (std::size_t j = 0; j < g.cells(); ++j) out[j] = cdouble{re[j], 0.5 * im[j]};
    return out;
}

std::vector<cdouble> ProbeGenerator::planar(int dim_x, int nx, double period, const RadialGrid& g) {
    if (dim_x < 1 || dim_x > 2) throw std::invalid_argument("ProbeGenerator::planar: dim_x must be 1 or 2");
    if (nx < 4 || !(period > 0.0)) throw std::invalid_argument("ProbeGenerator::planar: bad x-grid");
    const std::size_t slice = dim_x == 1 ? static_cast<std::size_t>(nx)
                                         : static_cast<std::size_t>(nx) * static_cast<std::size_t>(nx);
    std::vector<cdouble> out(slice * g.cells(), cdouble{0.0, 0.0});
    const int terms = 1 + static_cast<int>(rng_() % 2);
    const double dx = period / nx;
    for (int k = 0; k < terms; ++k) {
        const std::vector<double> ry = radial(g);
        std::vector<double> bump_x(nx);
        std::vector<double> bump_x2(dim_x == 2 ? nx : 0);
        auto fill_periodic_bump = [&](std::vector<double>& b) {
            const double radius = uniform(0.12, 0.3) * period;
            const double center = uniform(0.0, period);
            for (int i = 0; i < nx; ++i) {
                double d = std::fmod(std::abs(i * dx - center), period);
                d = std::min(d, period - d);
                b[i] = annular_bump(d, 0.0, radius);
            }
        };
        fill_periodic_bump(bump_x);
        if (dim_x == 2) fill_periodic_bump(bump_x2);
        const cdouble coef{uniform(0.4, 1.4), uniform(-0.5, 0.5)};
        for (std::size_t j = 0; j < g.cells(); ++j) {
            if (dim_x == 1) {
                for (int i = 0; i < nx; ++i) out[j * slice + i] += coef * bump_x[i] * ry[j];
            } else {
                for (int iy = 0; iy < nx; ++iy)
                    for (int ix = 0; ix < nx; ++ix)
                        out[j * slice + static_cast<std::size_t>(iy) * nx + ix] +=
                            coef * bump_x[ix] * bump_x2[iy] * ry[j];
            }
        }
    }
    return out;
}

} // namespace singulax
