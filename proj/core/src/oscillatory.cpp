#include "singulax/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace singulax {

namespace {

std::vector<cdouble> hadamard(const std::vector<cdouble>& a, std::span<const cdouble> b) {
    std::vector<cdouble> out(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) out[j] = a[j] * b[j];
    return out;
}

void dense_matvec(const std::vector<double>& a_colmajor, std::vector<cdouble>& x,
                  std::vector<cdouble>& scratch) {
    const std::size_t n = x.size();
    scratch.assign(n, cdouble(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        const cdouble xj = x[j];
        const double* col = a_colmajor.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) scratch[i] += col[i] * xj;
    }
    x.swap(scratch);
}

void dense_matvec_real(const std::vector<double>& a_colmajor, std::vector<double>& x,
                       std::vector<double>& scratch) {
    const std::size_t n = x.size();
    scratch.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double xj = x[j];
        const double* col = a_colmajor.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) scratch[i] += col[i] * xj;
    }
    x.swap(scratch);
}

}  // namespace

OscillatoryOperator::OscillatoryOperator(RadialGrid grid, double drift_exponent,
                                         double wave_coefficient)
    : base_(std::move(grid), drift_exponent), b_(wave_coefficient) {
    const std::size_t n = base_.grid().cells();
    phase_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double arg = 0.5 * b_ * base_.grid().node(j);
        phase_[j] = cdouble(std::cos(arg), std::sin(arg));
    }
}

TridiagZ OscillatoryOperator::auxiliary_matrix() const {
    const TridiagD& m = base_.matrix();
    const std::vector<double>& g = base_.singular_factor();
    const std::size_t n = m.size();
    TridiagZ a;
    a.sub.assign(m.sub.begin(), m.sub.end());
    a.sup.assign(m.sup.begin(), m.sup.end());
    a.diag.resize(n);
    for (std::size_t j = 0; j < n; ++j) a.diag[j] = cdouble(m.diag[j], -0.5 * b_ * g[j]);
    return a;
}

TridiagZ OscillatoryOperator::direct_matrix() const {
    TridiagZ a = auxiliary_matrix();
    const std::size_t n = a.size();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        // row j+1, col j picks up phase_j / phase_{j+1}; row j, col j+1 the inverse.
        const cdouble ratio = phase_[j] * std::conj(phase_[j + 1]);
        a.sub[j] *= ratio;
        a.sup[j] *= std::conj(ratio);
    }
    return a;
}

std::vector<cdouble> OscillatoryOperator::apply_direct(std::span<const cdouble> u) const {
    return direct_matrix().apply(u);
}

std::vector<cdouble> OscillatoryOperator::apply_auxiliary(std::span<const cdouble> u) const {
    return auxiliary_matrix().apply(u);
}

const DenseEigenZ& OscillatoryOperator::auxiliary_eigensystem() const {
    if (!aux_eigen_) {
        const std::size_t n = base_.grid().cells();
        const TridiagD& m = base_.matrix();
        const std::vector<double>& off = base_.symmetric_off();
        const std::vector<double>& g = base_.singular_factor();
        std::vector<cdouble> dense(n * n, cdouble(0.0, 0.0));
        for (std::size_t j = 0; j < n; ++j) {
            dense[j * n + j] = cdouble(m.diag[j], -0.5 * b_ * g[j]);
            if (j + 1 < n) {
                dense[j * n + (j + 1)] = off[j];      // row j+1, col j
                dense[(j + 1) * n + j] = off[j];      // row j, col j+1
            }
        }
        aux_eigen_ = std::make_shared<DenseEigenZ>(std::move(dense), static_cast<int>(n));
    }
    return *aux_eigen_;
}

std::vector<cdouble> OscillatoryOperator::evolve_auxiliary(cdouble z, std::span<const cdouble> f,
                                                           OscScheme scheme, int steps) const {
    const std::size_t n = base_.grid().cells();
    if (f.size() != n) throw std::invalid_argument("evolve_auxiliary: size mismatch");
    if (z.real() < 0.0) throw std::invalid_argument("evolve_auxiliary: requires Re z >= 0");
    if (steps < 1) steps = 1;
    const std::vector<double>& sm = base_.sqrt_masses();

    switch (scheme) {
        case OscScheme::eigen_exact: {
            const DenseEigenZ& es = auxiliary_eigensystem();
            std::vector<cdouble> w(n);
            for (std::size_t j = 0; j < n; ++j) w[j] = f[j] * sm[j];
            std::vector<cdouble> coef = es.solve_v(std::move(w));
            const std::vector<cdouble>& lam = es.values();
            for (std::size_t k = 0; k < n; ++k) coef[k] *= std::exp(z * lam[k]);
            std::vector<cdouble> v = es.apply_v(coef);
            for (std::size_t j = 0; j < n; ++j) v[j] /= sm[j];
            return v;
        }
        case OscScheme::strang: {
            if (std::abs(z.imag()) > 1e-14 * std::max(1.0, std::abs(z)))
                throw std::invalid_argument("strang splitting requires real time");
            const double t = z.real();
            if (t == 0.0) return std::vector<cdouble>(f.begin(), f.end());
            const double dt = t / steps;
            const std::vector<double> prop = base_.dense_propagator(dt);
            const std::vector<double>& g = base_.singular_factor();
            std::vector<cdouble> half(n), full(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double arg = -0.25 * b_ * g[j] * dt;  // half-step of -i(b/2) g
                half[j] = cdouble(std::cos(arg), std::sin(arg));
                full[j] = half[j] * half[j];
            }
            std::vector<cdouble> u(f.begin(), f.end());
            std::vector<cdouble> scratch;
            for (std::size_t j = 0; j < n; ++j) u[j] *= half[j];
            for (int s = 0; s < steps; ++s) {
                dense_matvec(prop, u, scratch);
                const std::vector<cdouble>& ph = (s + 1 < steps) ? full : half;
                for (std::size_t j = 0; j < n; ++j) u[j] *= ph[j];
            }
            return u;
        }
        case OscScheme::crank_nicolson: {
            const cdouble dz = z / static_cast<double>(steps);
            const TridiagZ a = auxiliary_matrix();
            TridiagZ lhs = a;
            const std::size_t m = n;
            for (std::size_t j = 0; j < m; ++j) {
                lhs.diag[j] = 1.0 - 0.5 * dz * a.diag[j];
                if (j + 1 < m) {
                    lhs.sub[j] = -0.5 * dz * a.sub[j];
                    lhs.sup[j] = -0.5 * dz * a.sup[j];
                }
            }
            const FactoredTridiagZ fac(lhs);
            std::vector<cdouble> u(f.begin(), f.end());
            for (int s = 0; s < steps; ++s) {
                std::vector<cdouble> au = a.apply(std::span<const cdouble>(u));
                for (std::size_t j = 0; j < m; ++j) u[j] += 0.5 * dz * au[j];
                fac.solve_in_place(u);
            }
            return u;
        }
        case OscScheme::backward_euler: {
            const cdouble dz = z / static_cast<double>(steps);
            const TridiagZ a = auxiliary_matrix();
            TridiagZ lhs = a;
            const std::size_t m = n;
            for (std::size_t j = 0; j < m; ++j) {
                lhs.diag[j] = 1.0 - dz * a.diag[j];
                if (j + 1 < m) {
                    lhs.sub[j] = -dz * a.sub[j];
                    lhs.sup[j] = -dz * a.sup[j];
                }
            }
            const FactoredTridiagZ fac(lhs);
            std::vector<cdouble> u(f.begin(), f.end());
            for (int s = 0; s < steps; ++s) fac.solve_in_place(u);
            return u;
        }
    }
    throw std::logic_error("evolve_auxiliary: unknown scheme");
}

std::vector<cdouble> OscillatoryOperator::evolve(cdouble z, std::span<const cdouble> f,
                                                 OscScheme scheme, int steps) const {
    std::vector<cdouble> gauged = hadamard(phase_, f);
    std::vector<cdouble> v = evolve_auxiliary(z, gauged, scheme, steps);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] *= std::conj(phase_[j]);
    return v;
}

std::vector<cdouble> OscillatoryOperator::evolve_direct_cn(double t, std::span<const cdouble> f,
                                                           int steps) const {
    const std::size_t n = base_.grid().cells();
    if (f.size() != n) throw std::invalid_argument("evolve_direct_cn: size mismatch");
    if (steps < 1) steps = 1;
    const double dt = t / steps;
    const TridiagZ l = direct_matrix();
    TridiagZ lhs = l;
    for (std::size_t j = 0; j < n; ++j) {
        lhs.diag[j] = 1.0 - 0.5 * dt * l.diag[j];
        if (j + 1 < n) {
            lhs.sub[j] = -0.5 * dt * l.sub[j];
            lhs.sup[j] = -0.5 * dt * l.sup[j];
        }
    }
    const FactoredTridiagZ fac(lhs);
    std::vector<cdouble> u(f.begin(), f.end());
    for (int s = 0; s < steps; ++s) {
        std::vector<cdouble> lu = l.apply(std::span<const cdouble>(u));
        for (std::size_t j = 0; j < n; ++j) u[j] += 0.5 * dt * lu[j];
        fac.solve_in_place(u);
    }
    return u;
}

std::vector<cdouble> OscillatoryOperator::kernel_column(cdouble z, std::size_t col,
                                                        OscScheme scheme, int steps) const {
    const std::size_t n = base_.grid().cells();
    if (col >= n) throw std::invalid_argument("kernel_column: column out of range");
    std::vector<cdouble> f(n, cdouble(0.0, 0.0));
    f[col] = 1.0 / base_.masses()[col];
    return evolve(z, f, scheme, steps);
}

std::vector<cdouble> OscillatoryOperator::kernel_matrix(cdouble z) const {
    const std::size_t n = base_.grid().cells();
    if (z.real() < 0.0) throw std::invalid_argument("kernel_matrix: requires Re z >= 0");
    const DenseEigenZ& es = auxiliary_eigensystem();
    const std::vector<cdouble>& lam = es.values();
    const std::vector<double>& sm = base_.sqrt_masses();
    std::vector<cdouble> expz(n);
    for (std::size_t k = 0; k < n; ++k) expz[k] = std::exp(z * lam[k]);
    std::vector<cdouble> kernel(n * n);
    std::vector<cdouble> unit(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(unit.begin(), unit.end(), cdouble(0.0, 0.0));
        unit[j] = 1.0;
        std::vector<cdouble> coef = es.solve_v(unit);
        for (std::size_t k = 0; k < n; ++k) coef[k] *= expz[k];
        std::vector<cdouble> w = es.apply_v(coef);
        cdouble* col = kernel.data() + j * n;
        const cdouble pj = phase_[j] / sm[j];
        for (std::size_t i = 0; i < n; ++i) col[i] = std::conj(phase_[i]) * w[i] * pj / sm[i];
    }
    return kernel;
}

double OscillatoryOperator::domination_violation(double t, int steps,
                                                 std::size_t column_stride) const {
    const std::size_t n = base_.grid().cells();
    if (steps < 1) steps = 1;
    if (column_stride == 0) column_stride = 1;
    const double dt = t / steps;
    const std::vector<double> prop = base_.dense_propagator(dt);
    const std::vector<double>& g = base_.singular_factor();
    std::vector<cdouble> half(n), full(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double arg = -0.25 * b_ * g[j] * dt;
        half[j] = cdouble(std::cos(arg), std::sin(arg));
        full[j] = half[j] * half[j];
    }
    double worst = 0.0;
    std::vector<cdouble> u(n), uscratch;
    std::vector<double> v(n), vscratch;
    for (std::size_t col = 0; col < n; col += column_stride) {
        std::fill(u.begin(), u.end(), cdouble(0.0, 0.0));
        std::fill(v.begin(), v.end(), 0.0);
        u[col] = 1.0;
        v[col] = 1.0;
        for (std::size_t j = 0; j < n; ++j) u[j] *= half[j];
        for (int s = 0; s < steps; ++s) {
            dense_matvec(prop, u, uscratch);
            dense_matvec_real(prop, v, vscratch);
            const std::vector<cdouble>& ph = (s + 1 < steps) ? full : half;
            for (std::size_t j = 0; j < n; ++j) u[j] *= ph[j];
        }
        double ref = 0.0;
        for (std::size_t i = 0; i < n; ++i) ref = std::max(ref, v[i]);
        if (ref <= 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double excess = std::abs(u[i]) - v[i];
            if (excess > worst * ref) worst = excess / ref;
        }
    }
    return std::max(worst, 0.0);
}

double scaling_deviation(double drift_exponent, double wave_coefficient, cdouble z,
                         const RadialGrid& grid) {
    const double b = wave_coefficient;
    if (b == 0.0) throw std::invalid_argument("scaling_deviation: wave coefficient must be nonzero");
    const double ab = std::abs(b);
    const double sign = b > 0.0 ? 1.0 : -1.0;
    const OscillatoryOperator op1(grid, drift_exponent, b);
    const RadialGrid dilated(grid.cells(), ab * grid.y_max(), grid.grading());
    const OscillatoryOperator op2(dilated, drift_exponent, sign);
    const double scale = std::pow(ab, drift_exponent + 1.0);

    // Trapezoidal kernel columns: each step is a fixed rational function of
    // dz * A, and dz * A is invariant under the dilation (A scales by
    // |b|^{-2}, the time by |b|^2), so the identity transfers step by step
    // and the deviation measures pure arithmetic noise.
    const int steps = 96;
    const std::size_t n = grid.cells();
    constexpr double fracs[] = {0.125, 1.0 / 3.0, 0.625, 0.875};
    std::vector<std::vector<cdouble>> cols1, cols2;
    for (double frac : fracs) {
        const auto col = static_cast<std::size_t>(frac * static_cast<double>(n));
        cols1.push_back(op1.kernel_column(z, col, OscScheme::crank_nicolson, steps));
        cols2.push_back(op2.kernel_column(ab * ab * z, col, OscScheme::crank_nicolson, steps));
    }
    double peak = 0.0;
    for (const auto& c : cols1)
        for (const cdouble& v : c) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < cols1.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(cols1[k][i]) <= 1e-12 * peak) continue;
            worst = std::max(worst, std::abs(cols1[k][i] - scale * cols2[k][i]) / peak);
        }
    }
    return worst;
}

}  // namespace singulax
