#pragma once
// Full operator on the half-space slab: Laplacian in the periodic x variables,
// a mixed drift coupling x-gradients to the radial derivative, and the radial
// diffusion in y.  x lives on a torus (1 or 2 axes, uniform points), y on a
// graded radial grid.  Everything factors through the x-Fourier transform:
// each discrete frequency xi gives an independent tridiagonal operator
//     Lhat(xi) = B + i (2 a.xi) D - |xi|^2 I
// on the radial grid, so elliptic solves, parabolic stepping and derivative
// norms are per-frequency banded operations.
//
// Field layout: x-fastest slices per y node — entry (ix, j) sits at
// j * slice + ix, where slice = nx^N and ix flattens the x multi-index with
// axis 0 fastest.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "singulax/bessel.hpp"
#include "singulax/grid.hpp"
#include "singulax/linalg.hpp"

namespace singulax {

struct HalfSpaceConfig {
    std::size_t dim_x = 1;   ///< number of periodic axes (1 or 2)
    std::size_t nx = 64;     ///< points per axis (even, >= 4)
    std::vector<double> periods = {6.283185307179586477};  ///< per-axis torus periods
    RadialGrid grid{2, 1.0, 1.0};  ///< radial grid for y (placeholder until assigned)
    double drift_exponent = 0.0;  ///< c > -1
    std::vector<double> a;   ///< anisotropy, |a| < 1, size dim_x
    double m = 0.0;          ///< norm weight exponent
    double p = 2.0;          ///< norm integrability index

    void validate() const;   ///< throws std::invalid_argument on violation
};

class HalfSpaceSolver {
public:
    explicit HalfSpaceSolver(HalfSpaceConfig cfg);
    ~HalfSpaceSolver();
    HalfSpaceSolver(const HalfSpaceSolver&) = delete;
    HalfSpaceSolver& operator=(const HalfSpaceSolver&) = delete;

    const HalfSpaceConfig& config() const { return cfg_; }
    const BesselOperator& radial() const { return base_; }
    std::size_t slice() const { return slice_; }
    std::size_t size() const { return slice_ * cfg_.grid.cells(); }

    /// Wrapped integer-frequency vector xi for a flat in-slice index.
    std::vector<double> frequency(std::size_t s) const;

    /// Unnormalized forward x-transform / normalized inverse (per y slice).
    std::vector<cdouble> forward_fft(std::span<const cdouble> u) const;
    std::vector<cdouble> inverse_fft(std::span<const cdouble> u) const;

    /// L u with spectral x-derivatives and the banded radial pieces.
    std::vector<cdouble> apply(std::span<const cdouble> u) const;

    /// (lambda - L)^{-1} f; rejects lambda outside the resolvent sector.
    /// drop_zero_mode removes the constant-in-x mode from f first (used by
    /// the small-lambda elliptic surrogate, where that block degenerates).
    std::vector<cdouble> solve(cdouble lambda, std::span<const cdouble> f,
                               bool drop_zero_mode = false) const;

    std::vector<cdouble> dx(std::span<const cdouble> u, std::size_t axis) const;
    std::vector<cdouble> dxx(std::span<const cdouble> u, std::size_t ax1, std::size_t ax2) const;
    std::vector<cdouble> dy(std::span<const cdouble> u) const;
    std::vector<cdouble> dyy(std::span<const cdouble> u) const;
    std::vector<cdouble> dxy(std::span<const cdouble> u, std::size_t axis) const;
    std::vector<cdouble> dy_over_y(std::span<const cdouble> u) const;

    /// Weighted norm over the slab (includes the x cell volume); p, m from
    /// the config unless overridden.
    double norm(std::span<const cdouble> u) const;
    double norm(std::span<const cdouble> u, double p, double m) const;

    struct Trajectory {
        double dt = 0.0;
        std::vector<std::vector<cdouble>> states;  ///< u(t_k), k = 0..steps
    };

    /// Trapezoidal stepping per frequency; source sampled at step midpoints
    /// (pass nullptr-like empty function for a homogeneous march).
    Trajectory parabolic_solve(std::span<const cdouble> u0,
                               const std::function<std::vector<cdouble>(double)>& source,
                               double horizon, int steps) const;

    struct MaxRegReport {
        double ratio = 0.0;
        double time_deriv_norm = 0.0;
        double generator_norm = 0.0;
        double source_norm = 0.0;
        double identity_residual = 0.0;  ///< step-identity defect, relative
    };

    /// (||D_t u|| + ||L u_mid||) / ||f|| with the time integral of the p-th
    /// powers over midpoints; requires a trajectory started from zero data.
    MaxRegReport maxreg_ratio(const Trajectory& traj,
                              const std::function<std::vector<cdouble>(double)>& source) const;

    struct FormReport {
        double re = 0.0;
        double im = 0.0;
        double energy = 0.0;  ///< gradient-x energy + radial face energy
    };

    /// Sesquilinear form values computed on face-averaged pairs, so that
    /// Re >= (1 - |a|) * energy and |Im| <= |a|/(1-|a|) * Re hold exactly
    /// (up to rounding) by the pointwise Cauchy-Schwarz structure.
    FormReport form_values(std::span<const cdouble> u) const;

    struct RegularityReport {
        double xx_ratio = 0.0;        ///< max_{i,j} ||D_{x_i x_j} u|| / ||L u||
        double xy_ratio = 0.0;        ///< max_i ||D_{x_i} D_y u|| / ||L u||
        double yy_ratio = 0.0;        ///< ||D_yy u|| / ||L u||
        double singular_ratio = 0.0;  ///< ||y^{-1} D_y u|| / ||L u||
        double max_ratio = 0.0;
        double min_generator_norm = 0.0;
        std::size_t probes = 0;
    };

    /// Solves L u ≈ -f through the small-lambda surrogate for each probe and
    /// reports the worst second-derivative-to-generator norm ratios.
    RegularityReport regularity_ratios(const std::vector<std::vector<cdouble>>& batch,
                                       cdouble lambda) const;

private:
    struct FftPlans;

    HalfSpaceConfig cfg_;
    BesselOperator base_;
    TridiagD dy_;
    std::size_t slice_ = 0;
    std::vector<double> xisq_;           ///< |xi|^2 per in-slice index
    std::vector<double> bcoef_;          ///< 2 a.xi per in-slice index
    std::vector<std::vector<double>> freq_;
    std::unique_ptr<FftPlans> plans_;

    TridiagZ frequency_matrix(std::size_t s) const;  ///< Lhat(xi_s)
    void check_field(std::span<const cdouble> u) const;
    std::vector<cdouble> spectral_scale(std::span<const cdouble> u,
                                        const std::vector<cdouble>& factor) const;
    std::vector<cdouble> radial_tridiag_apply(std::span<const cdouble> u,
                                              const TridiagD& mat) const;
};

}  // namespace singulax
