#include "singulax/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace singulax {

BesselOperator::BesselOperator(RadialGrid grid, double drift_exponent)
    : grid_(std::move(grid)), c_(drift_exponent) {
    if (!(c_ > -1.0)) throw std::invalid_argument("BesselOperator: drift exponent must exceed -1");
    const std::size_t n = grid_.cells();
    mass_ = grid_.cell_masses(c_);
    mat_.sub.assign(n - 1, 0.0);
    mat_.diag.assign(n, 0.0);
    mat_.sup.assign(n - 1, 0.0);
    skew_.assign(n, 0.0);
    sqrt_mass_.resize(n);
    sym_off_.assign(n - 1, 0.0);

    // Face conductances w_j = face_j^c / spacing; the bottom face carries no
    // flux and is never evaluated (face(0)^c may be singular).
    std::vector<double> cond(n + 1, 0.0);
    std::vector<double> wface(n + 1, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        wface[j] = std::pow(grid_.face(j), c_);
        cond[j] = wface[j] / grid_.spacing(j - 1);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double lower = j > 0 ? cond[j] : 0.0;
        const double upper = cond[j + 1];
        mat_.diag[j] = -(lower + upper) / mass_[j];
        if (j > 0) mat_.sub[j - 1] = cond[j] / mass_[j];
        if (j + 1 < n) mat_.sup[j] = cond[j + 1] / mass_[j];
        skew_[j] = (wface[j + 1] - (j > 0 ? wface[j] : 0.0)) / mass_[j];
        sqrt_mass_[j] = std::sqrt(mass_[j]);
    }
    for (std::size_t j = 0; j + 1 < n; ++j) sym_off_[j] = cond[j + 1] / (sqrt_mass_[j] * sqrt_mass_[j + 1]);
}

std::vector<double> BesselOperator::apply(std::span<const double> u) const { return mat_.apply(u); }

std::vector<cdouble> BesselOperator::apply(std::span<const cdouble> u) const { return mat_.apply(u); }

std::vector<cdouble> BesselOperator::resolvent(cdouble lambda, std::span<const cdouble> f) const {
    const std::size_t n = grid_.cells();
    if (f.size() != n) throw std::invalid_argument("BesselOperator::resolvent: size mismatch");
    TridiagZ a;
    a.sub.assign(n - 1, cdouble{});
    a.diag.assign(n, cdouble{});
    a.sup.assign(n - 1, cdouble{});
    for (std::size_t j = 0; j < n; ++j) a.diag[j] = lambda - mat_.diag[j];
    for (std::size_t j = 0; j + 1 < n; ++j) {
        a.sub[j] = -mat_.sub[j];
        a.sup[j] = -mat_.sup[j];
    }
    const FactoredTridiagZ lu(a);
    std::vector<cdouble> u = lu.solve(std::vector<cdouble>(f.begin(), f.end()));
    // One refinement pass keeps the relative residual at roundoff even for
    // strongly graded grids.
    std::vector<cdouble> au = a.apply(std::span<const cdouble>(u));
    std::vector<cdouble> r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = f[j] - au[j];
    lu.solve_in_place(r);
    for (std::size_t j = 0; j < n; ++j) u[j] += r[j];
    return u;
}

const SymTridiagEigen& BesselOperator::eigensystem() const {
    if (!eigen_) {
        auto e = std::make_shared<SymTridiagEigen>(eigh_tridiag(mat_.diag, sym_off_));
        for (double& w : e->values) w = std::min(w, 0.0);
        eigen_ = std::move(e);
    }
    return *eigen_;
}

namespace {

int checked_steps(int steps) {
    if (steps < 1) throw std::invalid_argument("evolve: steps must be >= 1");
    return steps;
}

} // namespace

std::vector<cdouble> BesselOperator::evolve(cdouble z, std::span<const cdouble> f, TimeScheme scheme,
                                            int steps) const {
    const std::size_t n = grid_.cells();
    if (f.size() != n) throw std::invalid_argument("BesselOperator::evolve: size mismatch");
    if (z.real() < 0.0) throw std::invalid_argument("BesselOperator::evolve: Re z must be >= 0");
    if (scheme == TimeScheme::eigen_exact) {
        const SymTridiagEigen& e = eigensystem();
        std::vector<cdouble> w(n, cdouble{});
        for (std::size_t k = 0; k < n; ++k) {
            cdouble s{};
            const double* col = e.vectors.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) s += col[j] * (sqrt_mass_[j] * f[j]);
            w[k] = s * std::exp(z * e.values[k]);
        }
        std::vector<cdouble> u(n, cdouble{});
        for (std::size_t k = 0; k < n; ++k) {
            const double* col = e.vectors.data() + k * n;
            const cdouble wk = w[k];
            for (std::size_t j = 0; j < n; ++j) u[j] += col[j] * wk;
        }
        for (std::size_t j = 0; j < n; ++j) u[j] /= sqrt_mass_[j];
        return u;
    }

    const int m = checked_steps(steps);
    const cdouble dz = z / static_cast<double>(m);
    std::vector<cdouble> u(f.begin(), f.end());
    TridiagZ lhs = to_complex(mat_);
    const double theta = scheme == TimeScheme::crank_nicolson ? 0.5 : 1.0;
    for (std::size_t j = 0; j < n; ++j) lhs.diag[j] = 1.0 - theta * dz * mat_.diag[j];
    for (std::size_t j = 0; j + 1 < n; ++j) {
        lhs.sub[j] = -theta * dz * mat_.sub[j];
        lhs.sup[j] = -theta * dz * mat_.sup[j];
    }
    const FactoredTridiagZ lu(lhs);
    for (int s = 0; s < m; ++s) {
        if (scheme == TimeScheme::crank_nicolson) {
            std::vector<cdouble> bu = mat_.apply(std::span<const cdouble>(u));
            for (std::size_t j = 0; j < n; ++j) u[j] += 0.5 * dz * bu[j];
        }
        lu.solve_in_place(u);
    }
    return u;
}

std::vector<double> BesselOperator::evolve(double t, std::span<const double> f, TimeScheme scheme,
                                           int steps) const {
    std::vector<cdouble> fc(f.begin(), f.end());
    const std::vector<cdouble> uc = evolve(cdouble{t, 0.0}, fc, scheme, steps);
    std::vector<double> u(uc.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = uc[j].real();
    return u;
}

std::vector<cdouble> BesselOperator::kernel_column(cdouble z, std::size_t col, TimeScheme scheme,
                                                   int steps) const {
    const std::size_t n = grid_.cells();
    if (col >= n) throw std::invalid_argument("kernel_column: column out of range");
    if (scheme == TimeScheme::eigen_exact) {
        if (z.real() < 0.0) throw std::invalid_argument("kernel_column: Re z must be >= 0");
        // p(z, y_i, y_col) = (m_i m_col)^{-1/2} sum_k V_ik e^{z mu_k} V_col,k
        const SymTridiagEigen& e = eigensystem();
        std::vector<cdouble> w(n);
        for (std::size_t k = 0; k < n; ++k)
            w[k] = e.vectors[k * n + col] * std::exp(z * e.values[k]) / sqrt_mass_[col];
        std::vector<cdouble> p(n, cdouble{});
        for (std::size_t k = 0; k < n; ++k) {
            const double* vcol = e.vectors.data() + k * n;
            const cdouble wk = w[k];
            for (std::size_t j = 0; j < n; ++j) p[j] += vcol[j] * wk;
        }
        for (std::size_t j = 0; j < n; ++j) p[j] /= sqrt_mass_[j];
        return p;
    }
    std::vector<cdouble> f(n, cdouble{});
    f[col] = 1.0 / mass_[col];
    return evolve(z, f, scheme, steps);
}

std::vector<double> BesselOperator::kernel_column(double t, std::size_t col, TimeScheme scheme,
                                                  int steps) const {
    const std::vector<cdouble> pc = kernel_column(cdouble{t, 0.0}, col, scheme, steps);
    std::vector<double> p(pc.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = pc[j].real();
    return p;
}

double BesselOperator::kernel_mass(double t, std::size_t col) const {
    const std::size_t n = grid_.cells();
    if (col >= n) throw std::invalid_argument("kernel_mass: column out of range");
    std::vector<double> ones(n, 1.0);
    const std::vector<double> u = evolve(t, ones, TimeScheme::eigen_exact, 1);
    return u[col];
}

std::vector<double> BesselOperator::dense_propagator(double t) const {
    const std::size_t n = grid_.cells();
    const SymTridiagEigen& e = eigensystem();
    // P = M^{-1/2} V e^{t Lambda} V^T M^{1/2}, assembled row-wise from the
    // row-major copies so the inner contraction is contiguous.
    std::vector<double> vrow(n * n), wrow(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ek = std::exp(t * e.values[k]);
        const double* col = e.vectors.data() + k * n;
        for (std::size_t j = 0; j < n; ++j) {
            vrow[j * n + k] = col[j];
            wrow[j * n + k] = col[j] * ek;
        }
    }
    std::vector<double> p(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* wi = wrow.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* vj = vrow.data() + j * n;
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += wi[k] * vj[k];
            p[j * n + i] = s * sqrt_mass_[j] / sqrt_mass_[i];
        }
    }
    return p;
}

TridiagD derivative_matrix(const RadialGrid& g) {
    const std::size_t n = g.cells();
    TridiagD d;
    d.sub.assign(n - 1, 0.0);
    d.diag.assign(n, 0.0);
    d.sup.assign(n - 1, 0.0);
    // One-sided closures at both ends.
    d.diag[0] = -1.0 / g.spacing(0);
    d.sup[0] = 1.0 / g.spacing(0);
    d.diag[n - 1] = 1.0 / g.spacing(n - 2);
    d.sub[n - 2] = -1.0 / g.spacing(n - 2);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double hl = g.spacing(j - 1);
        const double hr = g.spacing(j);
        d.sub[j - 1] = -hr / (hl * (hl + hr));
        d.sup[j] = hl / (hr * (hl + hr));
        d.diag[j] = (hr - hl) / (hl * hr);
    }
    return d;
}

TridiagD second_derivative_matrix(const RadialGrid& g) {
    const std::size_t n = g.cells();
    TridiagD d;
    d.sub.assign(n - 1, 0.0);
    d.diag.assign(n, 0.0);
    d.sup.assign(n - 1, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double hl = g.spacing(j - 1);
        const double hr = g.spacing(j);
        d.sub[j - 1] = 2.0 / (hl * (hl + hr));
        d.diag[j] = -2.0 / (hl * hr);
        d.sup[j] = 2.0 / (hr * (hl + hr));
    }
    // End rows use ghost nodes consistent with the function class of interest:
    // an even reflection across y = 0 (ghost value u_0 at distance 2*node(0))
    // and a homogeneous ghost at the outer wall.
    {
        const double hl = 2.0 * g.node(0);
        const double hr = g.spacing(0);
        d.diag[0] = 2.0 / (hl * (hl + hr)) - 2.0 / (hl * hr);
        d.sup[0] = 2.0 / (hr * (hl + hr));
    }
    {
        const double hl = g.spacing(n - 2);
        const double hr = g.spacing(n - 1);  // distance from last node to the wall
        d.sub[n - 2] = 2.0 / (hl * (hl + hr));
        d.diag[n - 1] = -2.0 / (hl * hr);
    }
    return d;
}

std::vector<double> gaussian_family_apply(const RadialGrid& g, double t, double alpha, double beta,
                                          double kappa, std::span<const double> f) {
    const std::size_t n = g.cells();
    if (f.size() != n) throw std::invalid_argument("gaussian_family_apply: size mismatch");
    if (!(t > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("gaussian_family_apply: need t, kappa > 0");
    const double rt = std::sqrt(t);
    std::vector<double> lengths(n), zfac(n);
    for (std::size_t j = 0; j < n; ++j) {
        lengths[j] = g.face(j + 1) - g.face(j);
        zfac[j] = std::pow(std::min(g.node(j) / rt, 1.0), -beta);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = g.node(i);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = yi - g.node(j);
            s += zfac[j] * std::exp(-d * d / (kappa * t)) * f[j] * lengths[j];
        }
        out[i] = s * std::pow(std::min(yi / rt, 1.0), -alpha) / rt;
    }
    return out;
}

LaplaceEnvelope::LaplaceEnvelope(const RadialGrid& g, double c, double kappa, std::span<const double> f) {
    n_ = g.cells();
    // Fixed log-time quadrature grid; transforms are then sums over cached
    // snapshots, so sweeps over the transform variable cost O(n) each.
    const double t_lo = 1e-9, t_hi = 1e4;
    const int per_decade = 12;
    const int m = static_cast<int>(std::ceil(std::log10(t_hi / t_lo) * per_decade)) + 1;
    const double dlog = std::log(t_hi / t_lo) / (m - 1);
    times_.resize(m);
    log_step_.assign(m, dlog);
    log_step_.front() = 0.5 * dlog;
    log_step_.back() = 0.5 * dlog;
    snapshots_.resize(m);
    for (int q = 0; q < m; ++q) {
        times_[q] = t_lo * std::exp(dlog * q);
        snapshots_[q] = gaussian_family_apply(g, times_[q], 0.0, -c, kappa, f);
    }
}

std::vector<double> LaplaceEnvelope::apply(double lambda, bool sqrt_weight) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("LaplaceEnvelope::apply: lambda must be positive");
    std::vector<double> out(n_, 0.0);
    for (std::size_t q = 0; q < times_.size(); ++q) {
        const double t = times_[q];
        double w = std::exp(-lambda * t) * t * log_step_[q]; // dt = t dlog
        if (sqrt_weight) w /= std::sqrt(t);
        if (w == 0.0) continue;
        const std::vector<double>& s = snapshots_[q];
        for (std::size_t j = 0; j < n_; ++j) out[j] += w * s[j];
    }
    return out;
}

GaussianBoundFit fit_gaussian_bound(std::span<const KernelSample> samples, double c, KernelBoundKind kind,
                                    double growth_rate) {
    GaussianBoundFit fit;
    if (samples.empty()) return fit;
    // Dynamic-range cut per evolved column: samples sharing the same (z, rho)
    // come from one table column, and each column is certified down to six
    // orders below its own peak. Deeper tails mix discretization fattening
    // and solver roundoff rather than kernel values, and one global floor
    // would be useless because column peaks span many orders of magnitude
    // across the (z, rho) table.
    std::map<std::tuple<double, double, double>, double> col_peak;
    for (const KernelSample& s : samples) {
        double& pk = col_peak[{s.z.real(), s.z.imag(), s.rho}];
        pk = std::max(pk, s.value);
    }

    constexpr int kKappaCount = 32;
    std::vector<double> kappas(kKappaCount);
    for (int i = 0; i < kKappaCount; ++i)
        kappas[i] = std::exp(std::log(64.0) * static_cast<double>(i) / (kKappaCount - 1));

    std::vector<double> constants(kKappaCount, 0.0);
    std::size_t used = 0;
    bool finite = true;
    for (const KernelSample& s : samples) {
        const double floor =
            std::max(col_peak[{s.z.real(), s.z.imag(), s.rho}] * 1e-6, 1e-280);
        if (!(s.value > floor)) continue;
        ++used;
        const double az = std::abs(s.z);
        const double rz = std::sqrt(az);
        double pref;
        if (kind == KernelBoundKind::value) {
            pref = 1.0 / rz;
        } else {
            pref = std::min(s.y / rz, 1.0) / az;
        }
        // rho^{-c} (rho/sqrt|z| ∧ 1)^c collapses to |z|^{-c/2} below the
        // diffusive scale; evaluate it that way to stay regular at rho -> 0.
        pref *= s.rho < rz ? std::pow(az, -0.5 * c) : std::pow(s.rho, -c);
        const double ratio0 = s.value / (pref * std::exp(growth_rate * s.z.real()));
        if (!std::isfinite(ratio0)) {
            finite = false;
            continue;
        }
        const double d2 = (s.y - s.rho) * (s.y - s.rho) / az;
        for (int i = 0; i < kKappaCount; ++i) {
            const double r = ratio0 * std::exp(d2 / kappas[i]);
            if (std::isfinite(r))
                constants[i] = std::max(constants[i], r);
            else
                constants[i] = std::numeric_limits<double>::infinity();
        }
    }
    // The sup-constant is nonincreasing in kappa and flattens once the
    // envelope matches the true decay; report the smallest kappa on the
    // plateau. The 1.5 factor tolerates the mild tail excess a discrete
    // semigroup has over the continuum Gaussian near the dynamic-range cut.
    double cmin = std::numeric_limits<double>::infinity();
    for (double v : constants) cmin = std::min(cmin, v);
    int pick = kKappaCount - 1;
    for (int i = 0; i < kKappaCount; ++i) {
        if (constants[i] <= cmin * 1.5) {
            pick = i;
            break;
        }
    }
    fit.constant = constants[pick];
    fit.kappa = kappas[pick];
    fit.finite = finite && std::isfinite(fit.constant);
    fit.samples_used = used;
    return fit;
}

} // namespace singulax
