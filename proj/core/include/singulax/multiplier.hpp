#pragma once
// Frequency-side machinery: the anisotropic quadratic symbol, the
// operator-valued resolvent family at a fixed frequency, its exact
// frequency-derivatives through a permutation product formula, weighted-norm
// scans of the three multiplier families, envelope domination fits, and a
// finite-family square-function diagnostic.
//
// The per-frequency generator used here is the linear-in-b realization
//     L_b = B + i b D - (b^2/4) I,        b = 2 a.xi,
// with a fixed discrete derivative D.  Because the family depends on xi only
// through the scalar b and the exact quadratic counterterm, differentiating
// the resolvent in xi yields exactly the factors (2i a_j D - 2 xi_j) between
// resolvents; the permutation sum below is an algebraic identity for the
// discrete family, not an approximation.

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

/// Q_a(xi) = |xi|^2 - (a.xi)^2.  Requires |a| < 1.
double quadratic_symbol(std::span<const double> a, std::span<const double> xi);

/// theta_delta = arctan(|a| / sqrt(delta^2 - |a|^2)) for |a| <= delta <= 1.
double sector_half_angle(double a_norm, double delta);

/// omega_a = theta_1 = arcsin(|a|).
double anisotropy_angle(double a_norm);

/// Composable complex linear operator handle with a Euclidean
/// conjugate-transpose companion (weighted adjoints are formed by the norm
/// estimators from this pair).
class LinearOpZ {
public:
    using Fn = std::function<std::vector<cdouble>(std::span<const cdouble>)>;

    LinearOpZ() = default;
    LinearOpZ(Fn forward, Fn conj_transpose);

    std::vector<cdouble> apply(std::span<const cdouble> f) const;
    std::vector<cdouble> apply_ct(std::span<const cdouble> f) const;

    static LinearOpZ identity();
    static LinearOpZ scalar(cdouble s);
    static LinearOpZ from_tridiag(TridiagZ m);
    /// Inverse through a prefactored tridiagonal (conjugate-transpose solves
    /// are served by the same factorization).
    static LinearOpZ from_factored(std::shared_ptr<const FactoredTridiagZ> f);
    /// Mathematical product: factors.front() applied last.
    static LinearOpZ product(std::vector<LinearOpZ> factors);
    static LinearOpZ sum(std::vector<LinearOpZ> terms);
    LinearOpZ scaled(cdouble s) const;

    bool valid() const { return static_cast<bool>(fwd_); }

private:
    Fn fwd_;
    Fn adj_;
};

/// The three scanned multiplier families.
enum class SymbolTarget {
    lambda_r,  ///< lambda R_lambda(xi)
    xisq_r,    ///< |xi|^2 R_lambda(xi)
    xi_dy_r,   ///< xi_k D R_lambda(xi), one vector component k
};

/// Fixed (grid, drift exponent, anisotropy); builds per-(lambda, xi) solve
/// handles and assembles weighted family members xi^alpha D^alpha_xi M(xi).
class SymbolFamily {
public:
    SymbolFamily(RadialGrid grid, double drift_exponent, std::vector<double> a);

    const BesselOperator& base() const { return base_; }
    const RadialGrid& grid() const { return base_.grid(); }
    double drift_exponent() const { return base_.drift_exponent(); }
    const std::vector<double>& anisotropy() const { return a_; }
    double anisotropy_norm() const;
    std::size_t dim() const { return a_.size(); }
    const TridiagD& derivative() const { return dy_; }

    /// One lattice point: factored resolvent plus cached scalars.
    struct Point {
        cdouble lambda;
        std::vector<double> xi;
        double b = 0.0;        ///< 2 a.xi
        double qa = 0.0;       ///< Q_a(xi)
        double xisq = 0.0;     ///< |xi|^2
        LinearOpZ resolvent;
        LinearOpZ derivative;  ///< the discrete D as an operator handle
        std::shared_ptr<const FactoredTridiagZ> solver;
    };

    Point at(cdouble lambda, std::span<const double> xi) const;

    /// (lambda + Q_a(xi) - L_b) u, for residual checks.
    std::vector<cdouble> shifted_apply(const Point& pt, std::span<const cdouble> u) const;

    /// Exact D^alpha_xi of the resolvent for a 0/1 multi-index given as an
    /// axis bitmask: sum over permutations of R prod_j [(2i a_j D - 2 xi_j) R].
    LinearOpZ symbol_derivative(const Point& pt, unsigned alpha_mask) const;

    /// xi^alpha D^alpha_xi M(xi) for the chosen family (component k is used
    /// only by xi_dy_r); Leibniz corrections for the polynomial prefactors of
    /// xisq_r and xi_dy_r are included exactly.
    LinearOpZ weighted_member(const Point& pt, SymbolTarget target, unsigned alpha_mask,
                              std::size_t component = 0) const;

private:
    BesselOperator base_;
    std::vector<double> a_;
    TridiagD dy_;

    TridiagZ factor_matrix(const Point& pt, std::size_t axis) const;
};

/// Exact weighted L^2 operator norm by adjoint power iteration: the adjoint
/// w.r.t. the weight masses w is W^{-1} T^H W.  Deterministic start vector.
struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};
NormEstimate op_norm_l2(const LinearOpZ& op, std::span<const double> weight_masses,
                        int max_iter = 64, double tol = 1e-10);

/// Probe-maximization lower bound for the L^p_m operator norm (reported as a
/// lower bound; used when p != 2).
double op_norm_lp_lower(const LinearOpZ& op, const RadialGrid& g, double p, double m,
                        int n_probes = 32, unsigned seed = 0x5eed);

/// lambda moduli log-spaced in [mod_lo, mod_hi], n_arg arguments spread
/// symmetrically in [-max_arg, max_arg].
std::vector<cdouble> sector_lambda_lattice(double max_arg, int n_mod = 16, int n_arg = 5,
                                           double mod_lo = 1e-2, double mod_hi = 1e4);

/// Frequency lattice: n_mag log-spaced magnitudes in [lo, hi] times n_dir
/// unit directions (dim 1 uses both signs regardless of n_dir).
std::vector<std::vector<double>> xi_lattice(std::size_t dim, int n_mag = 24, int n_dir = 8,
                                            double lo = 1e-2, double hi = 1e2);

struct ScanPoint {
    cdouble lambda;
    std::vector<double> xi;
    unsigned alpha_mask = 0;
    std::size_t component = 0;
    double norm = 0.0;
    bool two_sided = false;
};

struct SymbolScanReport {
    SymbolTarget target = SymbolTarget::lambda_r;
    double p = 2.0;
    double m = 0.0;
    double drift_exponent = 0.0;
    std::vector<double> a;
    double sup = 0.0;
    double stability_ratio = 0.0;  ///< filled by callers comparing two grids
    std::vector<ScanPoint> points;
};

/// Scans xi^alpha D^alpha_xi M(xi) over the lattices on L^p_m.  p = 2 norms
/// are two-sided power-iteration values; other p are probe lower bounds.
SymbolScanReport mikhlin_scan(const SymbolFamily& family, SymbolTarget target, double p, double m,
                              std::span<const cdouble> lambdas,
                              const std::vector<std::vector<double>>& xis,
                              int power_iters = 48, int n_probes = 32, unsigned seed = 0x5eed);

/// Oracle for the self-adjoint case b = 0 on the natural weight: the exact
/// weighted L^2 norm of lambda (lambda + |xi|^2 - B)^{-1} from the spectrum.
double lambda_resolvent_norm_selfadjoint(const BesselOperator& base, cdouble lambda, double xisq);

/// Pointwise envelope domination fit: smallest constant C such that
/// |R f| <= C * Env(k (|lambda| + |xi|^2)) |f| over nonnegative probes,
/// minimized over the k grid (Env is the Laplace envelope of the plain
/// diffusion; derivative = true uses the sqrt-weighted variant and D R f).
struct EnvelopeDominationFit {
    double constant = 0.0;
    double k = 0.0;
    bool finite = false;
    std::size_t probes = 0;
};
EnvelopeDominationFit fit_envelope_domination(const SymbolFamily& family, cdouble lambda,
                                              std::span<const double> xi, bool derivative,
                                              std::span<const double> k_grid, double kappa,
                                              int n_probes = 6, unsigned seed = 0x5eed);

/// || (sum_i |S_i f_i|^2)^{1/2} ||_{p,m} / || (sum_i |f_i|^2)^{1/2} ||_{p,m}.
double square_function_ratio(const std::vector<LinearOpZ>& ops,
                             const std::vector<std::vector<cdouble>>& fs, const RadialGrid& g,
                             double p, double m);

}  // namespace singulax
