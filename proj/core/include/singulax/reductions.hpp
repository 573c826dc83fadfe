#pragma once
// Reductions for general constant-coefficient second-order parts and oblique
// boundary drifts.
//
// The full coefficient matrix is Q = [[Q1, q], [q^T, gamma]] acting on (x, y)
// second derivatives, with an oblique drift (1/y)(b . grad_x + c D_y), c != 0.
// Two exact transformations bring this to the standard form handled by
// HalfSpaceSolver:
//
//  * the shear u(x, y) |-> u(x - (b/c) y, y), realized spectrally as the
//    unitary per-slice phase e^{-i xi.(b/c) y}, removes the x-part of the
//    drift and replaces Q by the congruent matrix Qt = M Q M^T with
//    M = [[I, -b/c], [0, 1]] (computed by conjugation, not transcription);
//  * a linear change of x variables S with S Qt1 S^T = gamma I turns the
//    upper block into gamma times the identity; on the torus a diagonal S is
//    a pure period rescaling, leaving nodal values untouched.
//
// After both, (lambda - L)^{-1} = shear o (1/gamma)(lambda/gamma - L')^{-1}
// o shear^{-1}, where L' is the standard operator with anisotropy
// a = Qt1^{-1/2} qt / sqrt(gamma) and drift exponent c/gamma.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "singulax/grid.hpp"
#include "singulax/halfspace.hpp"
#include "singulax/linalg.hpp"

namespace singulax {

struct GeneralCoefficients {
    std::size_t dim_x = 1;        ///< N
    std::vector<double> q1;       ///< N x N symmetric, row-major
    std::vector<double> q;        ///< mixed coefficients, size N
    double gamma = 1.0;           ///< (N+1, N+1) entry
    std::vector<double> b;        ///< oblique drift x-part, size N
    double c = 1.0;               ///< oblique drift y-part (nonzero for oblique use)

    /// Full (N+1) x (N+1) row-major matrix [[Q1, q], [q^T, gamma]].
    std::vector<double> full_matrix() const;
    void validate_shapes() const;
};

/// Leading-principal-minor test for symmetric positive definiteness
/// (n <= 3); on failure reports the first violated minor.
struct SpdCheck {
    bool positive = false;
    std::size_t violated_minor = 0;  ///< 1-based order of the first minor <= 0 (0 if none)
    double minor_value = 0.0;
};
SpdCheck check_spd(std::span<const double> mat, std::size_t n);

/// Congruence Qt = M Q M^T with the shear Jacobian M = [[I, -b/c], [0, 1]];
/// returns the (N+1) x (N+1) row-major result.  Requires c != 0.
std::vector<double> tilde_q(const GeneralCoefficients& gc);

struct ReductionResult {
    std::vector<double> s;        ///< N x N row-major, S Q1 S^T = gamma I
    std::vector<double> a;        ///< reduced anisotropy Q1^{-1/2} q / sqrt(gamma)
    double reduced_exponent = 0;  ///< c / gamma
    double schur = 0.0;           ///< gamma - q^T Q1^{-1} q (> 0 iff Q is SPD given Q1 SPD)
};

/// S = sqrt(gamma) Q1^{-1/2} (symmetric square root), reduced anisotropy and
/// drift exponent.  Throws on non-SPD input, reporting the violated minor.
ReductionResult reduce_general(const GeneralCoefficients& gc);

/// Spectral shear by phases e^{-+i xi.(b/c) y} (forward applies the shear,
/// inverse undoes it); exactly unitary per slice, so every weighted norm is
/// preserved to rounding.  The frequencies xi are those of `periods` (the
/// torus the samples of u live on); fft supplies the transforms.
std::vector<cdouble> oblique_shear(const HalfSpaceSolver& fft, std::span<const double> periods,
                                   std::span<const cdouble> u, std::span<const double> bvec,
                                   double cval, bool inverse);

class ObliqueSolver {
public:
    /// Geometry: x torus with `nx` points per axis and the given per-axis
    /// periods, radial grid for y.  Norm indices (m, p) are checked against
    /// the reduced exponent c/gamma.  dim_x = 2 requires the sheared block
    /// Qt1 to be diagonal (the torus lattice cannot absorb a rotation);
    /// the shear displacement |b/c| y_max must stay below half of each
    /// period so supports do not wrap.
    ObliqueSolver(GeneralCoefficients gc, std::size_t nx, std::vector<double> periods,
                  RadialGrid grid, double m, double p);

    const GeneralCoefficients& coefficients() const { return gc_; }
    const std::vector<double>& tilde_matrix() const { return tq_; }
    const ReductionResult& reduction() const { return red_; }
    /// The standard-form solver on the rescaled torus (drift exponent
    /// c/gamma, reduced anisotropy).
    const HalfSpaceSolver& reduced_solver() const { return *reduced_; }

    std::size_t size() const { return reduced_->size(); }

    /// Direct application of the oblique operator
    /// Tr(Q D^2) u + (1/y)(b . grad_x u + c D_y u), per-frequency assembly.
    std::vector<cdouble> apply(std::span<const cdouble> u) const;

    /// The same operator through the conjugation:
    /// shear o (gamma L') o inverse shear.  Exactly the operator the
    /// conjugated solve() inverts; its deviation from apply() is the
    /// discretization defect of the transformation identity.
    std::vector<cdouble> apply_conjugated(std::span<const cdouble> u) const;

    /// Conjugated solve: shear o (1/gamma)(lambda/gamma - L')^{-1} o
    /// inverse shear.
    std::vector<cdouble> solve(cdouble lambda, std::span<const cdouble> f) const;

    /// Independent oracle: factor (lambda - L_oblique) per frequency and
    /// solve directly, with no shear or change of variables.
    std::vector<cdouble> solve_direct(cdouble lambda, std::span<const cdouble> f) const;

    /// Shear helpers on the original torus.
    std::vector<cdouble> shear(std::span<const cdouble> u) const;
    std::vector<cdouble> unshear(std::span<const cdouble> u) const;

    /// || (1/y)(b . grad_x u + c D_y u) ||_{p, m} — the oblique trace term.
    double oblique_trace_norm(std::span<const cdouble> u) const;

private:
    GeneralCoefficients gc_;
    std::vector<double> periods_;
    std::vector<double> tq_;
    ReductionResult red_;
    std::unique_ptr<HalfSpaceSolver> reduced_;
    BesselOperator radial_;  ///< flux-form gamma-reduced radial part on the y grid
    TridiagD dy_;
    std::vector<double> wface_;  ///< face weights face_j^{c/gamma}, j = 1..cells
    std::vector<double> fmass_;  ///< weighted cell masses matching radial_

    TridiagZ direct_frequency_matrix(std::size_t s) const;
};

}  // namespace singulax
