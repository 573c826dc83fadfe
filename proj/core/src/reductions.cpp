#include "singulax/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace singulax {

namespace {

double det3(std::span<const double> m, std::size_t stride) {
    return m[0] * (m[stride + 1] * m[2 * stride + 2] - m[stride + 2] * m[2 * stride + 1]) -
           m[1] * (m[stride] * m[2 * stride + 2] - m[stride + 2] * m[2 * stride]) +
           m[2] * (m[stride] * m[2 * stride + 1] - m[stride + 1] * m[2 * stride]);
}

/// Symmetric inverse square root of an n x n SPD matrix, n <= 2.
std::vector<double> inv_sqrt_spd(std::span<const double> m, std::size_t n) {
    if (n == 1) {
        if (!(m[0] > 0.0)) throw std::invalid_argument("inv_sqrt_spd: not positive");
        return {1.0 / std::sqrt(m[0])};
    }
    const double alpha = m[0], beta = 0.5 * (m[1] + m[2]), delta = m[3];
    const double tr = alpha + delta;
    const double det = alpha * delta - beta * beta;
    if (!(det > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("inv_sqrt_spd: not positive");
    const double gap = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double l1 = 0.5 * tr + gap, l2 = 0.5 * tr - gap;
    // eigenvector for l1
    double v1x, v1y;
    if (std::abs(beta) > 1e-300) {
        v1x = beta;
        v1y = l1 - alpha;
    } else if (alpha >= delta) {
        v1x = 1.0;
        v1y = 0.0;
    } else {
        v1x = 0.0;
        v1y = 1.0;
    }
    const double nrm = std::hypot(v1x, v1y);
    v1x /= nrm;
    v1y /= nrm;
    const double v2x = -v1y, v2y = v1x;
    const double w1 = 1.0 / std::sqrt(l1), w2 = 1.0 / std::sqrt(l2);
    return {w1 * v1x * v1x + w2 * v2x * v2x, w1 * v1x * v1y + w2 * v2x * v2y,
            w1 * v1x * v1y + w2 * v2x * v2y, w1 * v1y * v1y + w2 * v2y * v2y};
}

std::vector<double> matmul(std::span<const double> a, std::span<const double> b, std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

std::vector<double> transpose(std::span<const double> a, std::size_t n) {
    std::vector<double> t(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j * n + i] = a[i * n + j];
    return t;
}

}  // namespace

void GeneralCoefficients::validate_shapes() const {
    const std::size_t n = dim_x;
    if (n < 1 || n > 2) throw std::invalid_argument("GeneralCoefficients: dim_x must be 1 or 2");
    if (q1.size() != n * n || q.size() != n || b.size() != n)
        throw std::invalid_argument("GeneralCoefficients: block sizes inconsistent with dim_x");
    double scale = std::abs(gamma);
    for (double v : q1) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(q1[i * n + j] - q1[j * n + i]) > 1e-12 * std::max(scale, 1.0))
                throw std::invalid_argument("GeneralCoefficients: q1 must be symmetric");
}

std::vector<double> GeneralCoefficients::full_matrix() const {
    validate_shapes();
    const std::size_t n = dim_x, d = n + 1;
    std::vector<double> full(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) full[i * d + j] = q1[i * n + j];
        full[i * d + n] = q[i];
        full[n * d + i] = q[i];
    }
    full[n * d + n] = gamma;
    return full;
}

SpdCheck check_spd(std::span<const double> mat, std::size_t n) {
    if (n < 1 || n > 3 || mat.size() != n * n)
        throw std::invalid_argument("check_spd: supports 1 <= n <= 3");
    SpdCheck res;
    for (std::size_t k = 1; k <= n; ++k) {
        double minor = 0.0;
        if (k == 1) {
            minor = mat[0];
        } else if (k == 2) {
            minor = mat[0] * mat[n + 1] - mat[1] * mat[n];
        } else {
            minor = det3(mat, n);
        }
        if (!(minor > 0.0)) {
            res.positive = false;
            res.violated_minor = k;
            res.minor_value = minor;
            return res;
        }
    }
    res.positive = true;
    return res;
}

std::vector<double> tilde_q(const GeneralCoefficients& gc) {
    gc.validate_shapes();
    if (gc.c == 0.0) throw std::invalid_argument("tilde_q: requires c != 0");
    const std::size_t n = gc.dim_x, d = n + 1;
    std::vector<double> mshear(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) mshear[i * d + i] = 1.0;
    for (std::size_t i = 0; i < n; ++i) mshear[i * d + n] = -gc.b[i] / gc.c;
    const std::vector<double> full = gc.full_matrix();
    return matmul(matmul(mshear, full, d), transpose(mshear, d), d);
}

ReductionResult reduce_general(const GeneralCoefficients& gc) {
    gc.validate_shapes();
    const std::size_t n = gc.dim_x;
    const std::vector<double> full = gc.full_matrix();
    const SpdCheck spd = check_spd(full, n + 1);
    if (!spd.positive)
        throw std::invalid_argument("reduce_general: coefficient matrix not positive definite "
                                    "(leading minor " +
                                    std::to_string(spd.violated_minor) + " = " +
                                    std::to_string(spd.minor_value) + ")");
    ReductionResult res;
    const std::vector<double> q1half_inv = inv_sqrt_spd(gc.q1, n);
    const double rg = std::sqrt(gc.gamma);
    res.s.resize(n * n);
    for (std::size_t i = 0; i < n * n; ++i) res.s[i] = rg * q1half_inv[i];
    res.a.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) res.a[i] += q1half_inv[i * n + j] * gc.q[j] / rg;
    double asq = 0.0;
    for (double v : res.a) asq += v * v;
    res.schur = gc.gamma * (1.0 - asq);
    res.reduced_exponent = gc.c / gc.gamma;
    if (!(asq < 1.0))
        throw std::invalid_argument("reduce_general: reduced anisotropy not strictly subunit");
    return res;
}

std::vector<cdouble> oblique_shear(const HalfSpaceSolver& fft, std::span<const double> periods,
                                   std::span<const cdouble> u, std::span<const double> bvec,
                                   double cval, bool inverse) {
    if (cval == 0.0) throw std::invalid_argument("oblique_shear: requires c != 0");
    const HalfSpaceConfig& cfg = fft.config();
    if (periods.size() != cfg.dim_x || bvec.size() != cfg.dim_x)
        throw std::invalid_argument("oblique_shear: dimension mismatch");
    std::vector<cdouble> uh = fft.forward_fft(u);
    const std::size_t slice = fft.slice();
    const std::size_t n_y = cfg.grid.cells();

    std::vector<double> shift(slice, 0.0);  // xi . b / c per in-slice index
    for (std::size_t s = 0; s < slice; ++s) {
        std::size_t rem = s;
        double acc = 0.0;
        for (std::size_t ax = 0; ax < cfg.dim_x; ++ax) {
            const std::size_t k = rem % cfg.nx;
            rem /= cfg.nx;
            const double f = k <= cfg.nx / 2 ? static_cast<double>(k)
                                             : static_cast<double>(k) - static_cast<double>(cfg.nx);
            acc += 2.0 * M_PI / periods[ax] * f * bvec[ax];
        }
        shift[s] = acc / cval;
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n_y; ++j) {
        const double y = cfg.grid.node(j);
        for (std::size_t s = 0; s < slice; ++s) {
            const double arg = sign * shift[s] * y;
            uh[j * slice + s] *= cdouble(std::cos(arg), std::sin(arg));
        }
    }
    return fft.inverse_fft(uh);
}

ObliqueSolver::ObliqueSolver(GeneralCoefficients gc, std::size_t nx, std::vector<double> periods,
                             RadialGrid grid, double m, double p)
    : gc_(std::move(gc)),
      periods_(std::move(periods)),
      tq_(tilde_q(gc_)),
      red_(),
      radial_(grid, gc_.c / gc_.gamma),
      dy_(derivative_matrix(grid)) {
    const std::size_t n = gc_.dim_x, d = n + 1;
    if (periods_.size() != n) throw std::invalid_argument("ObliqueSolver: periods size mismatch");

    const SpdCheck spd = check_spd(tq_, d);
    if (!spd.positive)
        throw std::invalid_argument("ObliqueSolver: sheared matrix not positive definite (minor " +
                                    std::to_string(spd.violated_minor) + ")");

    GeneralCoefficients sheared;
    sheared.dim_x = n;
    sheared.q1.resize(n * n);
    sheared.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sheared.q1[i * n + j] = tq_[i * d + j];
        sheared.q[i] = tq_[i * d + n];
    }
    sheared.gamma = tq_[n * d + n];
    sheared.b.assign(n, 0.0);
    sheared.c = gc_.c;
    if (n == 2) {
        const double diag_scale = std::max(std::abs(sheared.q1[0]), std::abs(sheared.q1[3]));
        if (std::abs(sheared.q1[1]) > 1e-10 * diag_scale)
            throw std::invalid_argument(
                "ObliqueSolver: two-axis solves need a diagonal sheared block (the torus "
                "lattice cannot absorb a rotation)");
    }
    red_ = reduce_general(sheared);

    // Wrap guard: the shear displacement at the top of the grid must not
    // reach half a period, or supports would alias around the torus.
    for (std::size_t i = 0; i < n; ++i) {
        const double shift = std::abs(gc_.b[i] / gc_.c) * grid.y_max();
        if (shift > 0.5 * periods_[i])
            throw std::invalid_argument("ObliqueSolver: shear displacement exceeds half a period");
    }

    HalfSpaceConfig cfg;
    cfg.dim_x = n;
    cfg.nx = nx;
    cfg.periods.resize(n);
    for (std::size_t i = 0; i < n; ++i) cfg.periods[i] = red_.s[i * n + i] * periods_[i];
    cfg.grid = grid;
    cfg.drift_exponent = red_.reduced_exponent;
    cfg.a = red_.a;
    cfg.m = m;
    cfg.p = p;
    reduced_ = std::make_unique<HalfSpaceSolver>(std::move(cfg));

    // Face weights and cell masses of the reduced radial flux form, used by
    // the direct per-frequency assembly (same expressions as the flux
    // operator itself, so the b = 0 case degenerates to it bitwise).
    const RadialGrid& g = reduced_->config().grid;
    const double ce = gc_.c / gc_.gamma;
    fmass_ = g.cell_masses(ce);
    wface_.assign(g.cells() + 1, 0.0);
    for (std::size_t j = 1; j <= g.cells(); ++j) wface_[j] = std::pow(g.face(j), ce);
}

TridiagZ ObliqueSolver::direct_frequency_matrix(std::size_t s) const {
    const HalfSpaceConfig& cfg = reduced_->config();
    const std::size_t n = gc_.dim_x;
    const std::size_t n_y = cfg.grid.cells();

    std::vector<double> xi(n);
    std::size_t rem = s;
    for (std::size_t ax = 0; ax < n; ++ax) {
        const std::size_t k = rem % cfg.nx;
        rem /= cfg.nx;
        const double f = k <= cfg.nx / 2 ? static_cast<double>(k)
                                         : static_cast<double>(k) - static_cast<double>(cfg.nx);
        xi[ax] = 2.0 * M_PI / periods_[ax] * f;
    }
    double q1form = 0.0, qdot = 0.0, bdot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        qdot += gc_.q[i] * xi[i];
        bdot += gc_.b[i] * xi[i];
        for (std::size_t j = 0; j < n; ++j) q1form += xi[i] * gc_.q1[i * n + j] * xi[j];
    }

    const TridiagD& bm = radial_.matrix();
    const cdouble two_iq(0.0, 2.0 * qdot);
    // The oblique trace term i (b . xi)/y enters through the phase-completed
    // flux face^{c'} (D_y + i beta) u with beta = (b . xi)/c: the zero-flux
    // wall closure of that flux is exactly the sheared Neumann condition, so
    // the wall row stays consistent on sheared inputs (a bare 1/y diagonal
    // term would be left uncancelled there and blow up). The parasitic
    // i gamma beta D_y the completion introduces is subtracted again as a
    // regular first-order term.
    const double beta = bdot / gc_.c;
    const cdouble igb(0.0, gc_.gamma * beta);
    const cdouble first = two_iq - igb;
    TridiagZ t;
    t.diag.resize(n_y);
    t.sub.resize(n_y - 1);
    t.sup.resize(n_y - 1);
    for (std::size_t j = 0; j < n_y; ++j) {
        const double wlo = j > 0 ? wface_[j] : 0.0;
        t.diag[j] = gc_.gamma * bm.diag[j] + first * dy_.diag[j] - q1form +
                    igb * ((wface_[j + 1] - wlo) / (2.0 * fmass_[j]));
    }
    for (std::size_t j = 0; j + 1 < n_y; ++j) {
        t.sub[j] = gc_.gamma * bm.sub[j] + first * dy_.sub[j] -
                   igb * (wface_[j + 1] / (2.0 * fmass_[j + 1]));
        t.sup[j] = gc_.gamma * bm.sup[j] + first * dy_.sup[j] +
                   igb * (wface_[j + 1] / (2.0 * fmass_[j]));
    }
    return t;
}

std::vector<cdouble> ObliqueSolver::apply(std::span<const cdouble> u) const {
    std::vector<cdouble> uh = reduced_->forward_fft(u);
    const std::size_t slice = reduced_->slice();
    const std::size_t n_y = reduced_->config().grid.cells();
    std::vector<cdouble> col(n_y), res;
    for (std::size_t s = 0; s < slice; ++s) {
        const TridiagZ t = direct_frequency_matrix(s);
        for (std::size_t j = 0; j < n_y; ++j) col[j] = uh[j * slice + s];
        res = t.apply(std::span<const cdouble>(col));
        for (std::size_t j = 0; j < n_y; ++j) uh[j * slice + s] = res[j];
    }
    return reduced_->inverse_fft(uh);
}

std::vector<cdouble> ObliqueSolver::apply_conjugated(std::span<const cdouble> u) const {
    std::vector<cdouble> v = unshear(u);
    std::vector<cdouble> w = reduced_->apply(v);
    for (cdouble& x : w) x *= gc_.gamma;
    return shear(w);
}

std::vector<cdouble> ObliqueSolver::solve(cdouble lambda, std::span<const cdouble> f) const {
    std::vector<cdouble> v = unshear(f);
    std::vector<cdouble> w = reduced_->solve(lambda / gc_.gamma, v);
    const double inv_gamma = 1.0 / gc_.gamma;
    for (cdouble& x : w) x *= inv_gamma;
    return shear(w);
}

std::vector<cdouble> ObliqueSolver::solve_direct(cdouble lambda, std::span<const cdouble> f) const {
    std::vector<cdouble> fh = reduced_->forward_fft(f);
    const std::size_t slice = reduced_->slice();
    const std::size_t n_y = reduced_->config().grid.cells();
    std::vector<cdouble> col(n_y);
    for (std::size_t s = 0; s < slice; ++s) {
        TridiagZ t = direct_frequency_matrix(s);
        for (std::size_t j = 0; j < n_y; ++j) t.diag[j] = lambda - t.diag[j];
        for (std::size_t j = 0; j + 1 < n_y; ++j) {
            t.sub[j] = -t.sub[j];
            t.sup[j] = -t.sup[j];
        }
        const FactoredTridiagZ fac(t);
        for (std::size_t j = 0; j < n_y; ++j) col[j] = fh[j * slice + s];
        fac.solve_in_place(col);
        for (std::size_t j = 0; j < n_y; ++j) fh[j * slice + s] = col[j];
    }
    return reduced_->inverse_fft(fh);
}

std::vector<cdouble> ObliqueSolver::shear(std::span<const cdouble> u) const {
    return oblique_shear(*reduced_, periods_, u, gc_.b, gc_.c, false);
}

std::vector<cdouble> ObliqueSolver::unshear(std::span<const cdouble> u) const {
    return oblique_shear(*reduced_, periods_, u, gc_.b, gc_.c, true);
}

double ObliqueSolver::oblique_trace_norm(std::span<const cdouble> u) const {
    const HalfSpaceConfig& cfg = reduced_->config();
    const std::size_t slice = reduced_->slice();
    const std::size_t n_y = cfg.grid.cells();
    std::vector<cdouble> uh = reduced_->forward_fft(u);

    std::vector<cdouble> col(n_y), dcol;
    for (std::size_t s = 0; s < slice; ++s) {
        std::size_t rem = s;
        double bdot = 0.0;
        for (std::size_t ax = 0; ax < cfg.dim_x; ++ax) {
            const std::size_t k = rem % cfg.nx;
            rem /= cfg.nx;
            const double f = k <= cfg.nx / 2 ? static_cast<double>(k)
                                             : static_cast<double>(k) - static_cast<double>(cfg.nx);
            bdot += 2.0 * M_PI / periods_[ax] * f * gc_.b[ax];
        }
        for (std::size_t j = 0; j < n_y; ++j) col[j] = uh[j * slice + s];
        dcol = dy_.apply(std::span<const cdouble>(col));
        for (std::size_t j = 0; j < n_y; ++j) {
            const cdouble trace = cdouble(0.0, bdot) * col[j] + gc_.c * dcol[j];
            uh[j * slice + s] = trace / cfg.grid.node(j);
        }
    }
    const std::vector<cdouble> v = reduced_->inverse_fft(uh);

    // Weighted norm against the *original* torus volume.
    const std::vector<double> masses = cfg.grid.cell_masses(reduced_->config().m);
    double dx_cell = 1.0;
    for (double x : periods_) dx_cell *= x / static_cast<double>(cfg.nx);
    const double p = reduced_->config().p;
    if (std::isinf(p)) {
        double mx = 0.0;
        for (const cdouble& z : v) mx = std::max(mx, std::abs(z));
        return mx;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < n_y; ++j) {
        double row = 0.0;
        for (std::size_t s = 0; s < slice; ++s) row += std::pow(std::abs(v[j * slice + s]), p);
        acc += masses[j] * row;
    }
    return std::pow(dx_cell * acc, 1.0 / p);
}

}  // namespace singulax
