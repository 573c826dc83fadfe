#include "singulax/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace singulax {

RadialGrid::RadialGrid(std::size_t cells, double y_max, double grading) : y_max_(y_max), grading_(grading) {
    if (cells < 2) throw std::invalid_argument("RadialGrid: need at least 2 cells");
    if (!(y_max > 0.0)) throw std::invalid_argument("RadialGrid: y_max must be positive");
    if (!(grading >= 1.0)) throw std::invalid_argument("RadialGrid: grading must be >= 1");
    const double J = static_cast<double>(cells);
    nodes_.resize(cells);
    faces_.resize(cells + 1);
    faces_[0] = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
        nodes_[j] = y_max * std::pow((static_cast<double>(j) + 0.5) / J, grading);
        faces_[j + 1] = y_max * std::pow((static_cast<double>(j) + 1.0) / J, grading);
    }
    faces_[cells] = y_max;
}

double RadialGrid::spacing(std::size_t j) const {
    if (j + 1 < nodes_.size()) return nodes_[j + 1] - nodes_[j];
    if (j + 1 == nodes_.size()) return y_max_ - nodes_[j];
    throw std::out_of_range("RadialGrid::spacing");
}

double RadialGrid::cell_mass(std::size_t j, double m) const {
    return power_weight_mass(faces_[j], faces_[j + 1], m);
}

std::vector<double> RadialGrid::cell_masses(double m) const {
    std::vector<double> out(cells());
    for (std::size_t j = 0; j < cells(); ++j) out[j] = cell_mass(j, m);
    return out;
}

double power_weight_mass(double a, double b, double m) {
    if (!(m > -1.0)) throw std::invalid_argument("power_weight_mass: exponent must exceed -1");
    if (!(b > a) || a < 0.0) throw std::invalid_argument("power_weight_mass: need 0 <= a < b");
    const double q = m + 1.0;
    return (std::pow(b, q) - std::pow(a, q)) / q;
}

double ball_mass(double c, double y0, double r) {
    if (!(r > 0.0) || y0 < 0.0) throw std::invalid_argument("ball_mass: need y0 >= 0, r > 0");
    return power_weight_mass(y0, y0 + r, c);
}

namespace {

template <typename T>
double norm_impl(const RadialGrid& g, std::span<const T> u, double p, double m) {
    if (u.size() != g.cells()) throw std::invalid_argument("weighted_norm: size mismatch");
    if (std::isinf(p)) {
        double mx = 0.0;
        for (const T& v : u) mx = std::max(mx, std::abs(v));
        return mx;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("weighted_norm: p must be >= 1");
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += std::pow(std::abs(u[j]), p) * g.cell_mass(j, m);
    return std::pow(s, 1.0 / p);
}

} // namespace

double weighted_norm(const RadialGrid& g, std::span<const double> u, double p, double m) {
    return norm_impl(g, u, p, m);
}

double weighted_norm(const RadialGrid& g, std::span<const cdouble> u, double p, double m) {
    return norm_impl(g, u, p, m);
}

cdouble weighted_dot(const RadialGrid& g, std::span<const cdouble> u, std::span<const cdouble> v, double m) {
    if (u.size() != g.cells() || v.size() != g.cells()) throw std::invalid_argument("weighted_dot: size mismatch");
    cdouble s{0.0, 0.0};
    for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * std::conj(v[j]) * g.cell_mass(j, m);
    return s;
}

bool pair_admissible(double p, double m, double drift_exponent) {
    if (!(p > 1.0)) return false;
    const double q = (m + 1.0) / p;
    return q > 0.0 && q < drift_exponent + 1.0;
}

} // namespace singulax
