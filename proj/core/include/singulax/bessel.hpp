/// @file bessel.hpp
/// @brief Flux-form discretization of the radial operator D_yy + (c/y) D_y,
///        its semigroup and resolvent, heat-kernel extraction, and the
///        Gaussian smoothing families used to bound resolvents.
///
/// The operator is assembled from face fluxes F = y^c du/dy with zero flux
/// through the bottom face and a homogeneous Dirichlet closure at y_max. In
/// the y^c-weighted inner product the matrix is symmetric and negative
/// definite; constants are annihilated except in the top row, which carries
/// the truncation. All off-diagonal entries are positive, so backward Euler
/// steps preserve positivity exactly.
#pragma once

#include "singulax/grid.hpp"
#include "singulax/linalg.hpp"

#include <memory>
#include <span>
#include <vector>

namespace singulax {

enum class TimeScheme { eigen_exact, crank_nicolson, backward_euler };

class BesselOperator {
public:
    BesselOperator(RadialGrid grid, double drift_exponent);

    const RadialGrid& grid() const { return grid_; }
    double drift_exponent() const { return c_; }

    /// Nodal action as a tridiagonal matrix.
    const TridiagD& matrix() const { return mat_; }

    /// Cell masses of the natural weight y^c.
    const std::vector<double>& masses() const { return mass_; }

    /// Diagonal face-difference realization of the singular factor c/y:
    /// g_j = (w(face_{j+1}) - w(face_j)) / mass_j with the bottom face dropped.
    const std::vector<double>& singular_factor() const { return skew_; }

    /// Square roots of the cell masses (the similarity weights that symmetrize
    /// the generator).
    const std::vector<double>& sqrt_masses() const { return sqrt_mass_; }

    /// Off-diagonal entries of the symmetrized generator M^{1/2} B M^{-1/2},
    /// whose diagonal coincides with matrix().diag.
    const std::vector<double>& symmetric_off() const { return sym_off_; }

    std::vector<double> apply(std::span<const double> u) const;
    std::vector<cdouble> apply(std::span<const cdouble> u) const;

    /// (lambda - B)^{-1} f via a factored banded solve plus one refinement pass.
    std::vector<cdouble> resolvent(cdouble lambda, std::span<const cdouble> f) const;

    /// Spectrum of the symmetrized operator; cached after first use.
    /// Eigenvalues are clamped to (-inf, 0].
    const SymTridiagEigen& eigensystem() const;

    /// e^{zB} f. eigen_exact admits any z with Re z >= 0; the stepping schemes
    /// integrate along the straight segment [0, z] with `steps` steps.
    std::vector<cdouble> evolve(cdouble z, std::span<const cdouble> f,
                                TimeScheme scheme = TimeScheme::eigen_exact, int steps = 256) const;
    std::vector<double> evolve(double t, std::span<const double> f,
                               TimeScheme scheme = TimeScheme::eigen_exact, int steps = 256) const;

    /// Heat-kernel column with respect to the weighted measure:
    /// result[i] = p(z, y_i, y_col), the semigroup applied to delta_col / mass_col.
    std::vector<cdouble> kernel_column(cdouble z, std::size_t col,
                                       TimeScheme scheme = TimeScheme::eigen_exact, int steps = 256) const;
    std::vector<double> kernel_column(double t, std::size_t col,
                                      TimeScheme scheme = TimeScheme::eigen_exact, int steps = 256) const;

    /// Mass of the kernel column: integral of p(z, ., y_col) against y^c dy,
    /// equal by symmetry to (e^{zB} 1)(y_col).
    double kernel_mass(double t, std::size_t col) const;

    /// Dense nodal propagator e^{tB} for splitting loops; column-major J*J.
    std::vector<double> dense_propagator(double t) const;

private:
    RadialGrid grid_;
    double c_ = 0.0;
    TridiagD mat_;
    std::vector<double> mass_;
    std::vector<double> skew_;
    std::vector<double> sqrt_mass_;
    std::vector<double> sym_off_;
    mutable std::shared_ptr<const SymTridiagEigen> eigen_;
};

/// Centered first-derivative matrix on the graded grid with divided-difference
/// weights; one-sided two-point closures at both ends.
TridiagD derivative_matrix(const RadialGrid& g);

/// Nonuniform 3-point second derivative, one-sided at both ends.
TridiagD second_derivative_matrix(const RadialGrid& g);

/// Smoothing family with Gaussian envelope: result(y) =
///   t^{-1/2} (y/sqrt t ∧ 1)^{-alpha} * sum_z (z/sqrt t ∧ 1)^{-beta} exp(-(y-z)^2/(kappa t)) f(z) dz,
/// the z-integral taken against Lebesgue measure on the grid cells.
std::vector<double> gaussian_family_apply(const RadialGrid& g, double t, double alpha, double beta,
                                          double kappa, std::span<const double> f);

/// Laplace transforms of the (0,-c) smoothing family, with cached time
/// quadrature so that sweeps over the transform variable are cheap:
///   plain:        integral of e^{-lambda t} S(t) f dt
///   sqrt-weight:  integral of t^{-1/2} e^{-lambda t} S(t) f dt
class LaplaceEnvelope {
public:
    LaplaceEnvelope(const RadialGrid& g, double c, double kappa, std::span<const double> f);

    std::vector<double> apply(double lambda, bool sqrt_weight) const;

private:
    std::size_t n_ = 0;
    std::vector<double> times_;
    std::vector<double> log_step_;
    std::vector<std::vector<double>> snapshots_;
};

/// One magnitude sample of a kernel table.
struct KernelSample {
    cdouble z;
    double y = 0.0;
    double rho = 0.0;
    double value = 0.0; ///< |kernel| or |d/dy kernel|
};

enum class KernelBoundKind { value, y_derivative };

struct GaussianBoundFit {
    double constant = 0.0;
    double kappa = 0.0;
    bool finite = false;
    std::size_t samples_used = 0;
};

/// Fit sup |p| / (prefactor * exp(-(y-rho)^2 / (kappa |z|))) over the samples,
/// scanning kappa over a fixed log grid in [1, 64] and keeping the smallest
/// kappa whose constant is within 0.1% of the minimum. A growth factor
/// exp(growth_rate * Re z) is divided out first. Samples below 1e-13 of the
/// peak magnitude are discarded as under the discretization noise floor.
GaussianBoundFit fit_gaussian_bound(std::span<const KernelSample> samples, double c, KernelBoundKind kind,
                                    double growth_rate = 0.0);

} // namespace singulax
