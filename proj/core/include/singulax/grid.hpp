/// @file grid.hpp
/// @brief Graded radial grids on (0, y_max] and power-weighted measures.
///
/// Nodes sit at cell centers in the reference coordinate s = (j+1/2)/J and are
/// mapped by y = y_max * s^grading, so cells concentrate near the singular
/// endpoint y = 0 when grading > 1. Cell masses for the measure y^m dy are
/// exact antiderivative differences, never midpoint approximations; that keeps
/// discrete mass balances exact for every admissible weight.
#pragma once

#include "singulax/linalg.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace singulax {

class RadialGrid {
public:
    /// @param cells   number of cells J >= 2
    /// @param y_max   truncation radius > 0
    /// @param grading power grading >= 1; 1 gives a uniform grid
    RadialGrid(std::size_t cells, double y_max, double grading);

    static RadialGrid uniform(std::size_t cells, double y_max) { return {cells, y_max, 1.0}; }

    std::size_t cells() const { return nodes_.size(); }
    double y_max() const { return y_max_; }
    double grading() const { return grading_; }

    /// Node (cell center in reference coordinate), j in [0, cells).
    double node(std::size_t j) const { return nodes_[j]; }
    const std::vector<double>& nodes() const { return nodes_; }

    /// Cell face below node j; face(0) == 0 and face(cells()) == y_max.
    double face(std::size_t j) const { return faces_[j]; }

    /// Distance from node j to node j+1; for the last node, distance to the
    /// wall y_max where the Dirichlet closure lives.
    double spacing(std::size_t j) const;

    /// Exact integral of y^m over cell j; requires m > -1.
    double cell_mass(std::size_t j, double m) const;
    std::vector<double> cell_masses(double m) const;

private:
    double y_max_ = 0.0;
    double grading_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> faces_;
};

/// Exact integral of y^m over [a, b], 0 <= a < b, m > -1.
double power_weight_mass(double a, double b, double m);

/// Mass of the interval [y0, y0+r] under y^c dy: the measure of the
/// one-dimensional "ball" touching y0 from above. c > -1, y0 >= 0, r > 0.
double ball_mass(double c, double y0, double r);

/// Weighted Lp norm of nodal values: (sum_j |u_j|^p mass_j(m))^{1/p}.
/// p must be >= 1; p = infinity gives the unweighted max.
double weighted_norm(const RadialGrid& g, std::span<const double> u, double p, double m);
double weighted_norm(const RadialGrid& g, std::span<const cdouble> u, double p, double m);

/// <u, v>_m = sum_j u_j conj(v_j) mass_j(m).
cdouble weighted_dot(const RadialGrid& g, std::span<const cdouble> u, std::span<const cdouble> v, double m);

/// Admissibility of the integrability pair: 0 < (m+1)/p < drift_exponent + 1.
bool pair_admissible(double p, double m, double drift_exponent);

} // namespace singulax
