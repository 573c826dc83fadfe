#include "singulax/halfspace.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "singulax/multiplier.hpp"

namespace singulax {

namespace {

double vec_norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

void HalfSpaceConfig::validate() const {
    if (dim_x < 1 || dim_x > 2)
        throw std::invalid_argument("HalfSpaceConfig: dim_x must be 1 or 2");
    if (nx < 4 || nx % 2 != 0)
        throw std::invalid_argument("HalfSpaceConfig: nx must be even and >= 4");
    if (periods.size() != dim_x)
        throw std::invalid_argument("HalfSpaceConfig: periods size must match dim_x");
    for (double x : periods)
        if (!(x > 0.0)) throw std::invalid_argument("HalfSpaceConfig: periods must be positive");
    if (a.size() != dim_x)
        throw std::invalid_argument("HalfSpaceConfig: anisotropy size must match dim_x");
    if (vec_norm2(a) >= 1.0) throw std::invalid_argument("HalfSpaceConfig: requires |a| < 1");
    if (!(drift_exponent > -1.0))
        throw std::invalid_argument("HalfSpaceConfig: drift exponent must exceed -1");
    if (!(p >= 1.0)) throw std::invalid_argument("HalfSpaceConfig: p must be >= 1");
    if (!pair_admissible(p, m, drift_exponent))
        throw std::invalid_argument("HalfSpaceConfig: (m, p) outside the admissible range");
}

struct HalfSpaceSolver::FftPlans {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::size_t total = 0;

    FftPlans(std::size_t nx, std::size_t dim, std::size_t n_y) {
        const std::size_t slice = dim == 1 ? nx : nx * nx;
        total = slice * n_y;
        buf = fftw_alloc_complex(total);
        if (!buf) throw std::bad_alloc();
        int n[2] = {static_cast<int>(nx), static_cast<int>(nx)};
        fwd = fftw_plan_many_dft(static_cast<int>(dim), n, static_cast<int>(n_y), buf, nullptr, 1,
                                 static_cast<int>(slice), buf, nullptr, 1, static_cast<int>(slice),
                                 FFTW_FORWARD, FFTW_ESTIMATE);
        inv = fftw_plan_many_dft(static_cast<int>(dim), n, static_cast<int>(n_y), buf, nullptr, 1,
                                 static_cast<int>(slice), buf, nullptr, 1, static_cast<int>(slice),
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd || !inv) throw std::runtime_error("FFT plan creation failed");
    }

    ~FftPlans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        if (buf) fftw_free(buf);
    }
};

HalfSpaceSolver::HalfSpaceSolver(HalfSpaceConfig cfg)
    : cfg_(std::move(cfg)), base_(cfg_.grid, cfg_.drift_exponent), dy_(derivative_matrix(cfg_.grid)) {
    cfg_.validate();
    slice_ = cfg_.dim_x == 1 ? cfg_.nx : cfg_.nx * cfg_.nx;
    xisq_.resize(slice_);
    bcoef_.resize(slice_);
    freq_.resize(slice_);
    for (std::size_t s = 0; s < slice_; ++s) {
        std::vector<double> xi(cfg_.dim_x);
        std::size_t rem = s;
        for (std::size_t ax = 0; ax < cfg_.dim_x; ++ax) {
            const std::size_t k = rem % cfg_.nx;
            rem /= cfg_.nx;
            const double f = k <= cfg_.nx / 2 ? static_cast<double>(k)
                                              : static_cast<double>(k) - static_cast<double>(cfg_.nx);
            xi[ax] = 2.0 * M_PI / cfg_.periods[ax] * f;
        }
        double sq = 0.0, ab = 0.0;
        for (std::size_t ax = 0; ax < cfg_.dim_x; ++ax) {
            sq += xi[ax] * xi[ax];
            ab += cfg_.a[ax] * xi[ax];
        }
        xisq_[s] = sq;
        bcoef_[s] = 2.0 * ab;
        freq_[s] = std::move(xi);
    }
    plans_ = std::make_unique<FftPlans>(cfg_.nx, cfg_.dim_x, cfg_.grid.cells());
}

HalfSpaceSolver::~HalfSpaceSolver() = default;

std::vector<double> HalfSpaceSolver::frequency(std::size_t s) const {
    if (s >= slice_) throw std::invalid_argument("frequency: index out of range");
    return freq_[s];
}

void HalfSpaceSolver::check_field(std::span<const cdouble> u) const {
    if (u.size() != size()) throw std::invalid_argument("field size mismatch");
}

std::vector<cdouble> HalfSpaceSolver::forward_fft(std::span<const cdouble> u) const {
    check_field(u);
    std::memcpy(plans_->buf, u.data(), u.size() * sizeof(cdouble));
    fftw_execute(plans_->fwd);
    std::vector<cdouble> out(u.size());
    std::memcpy(out.data(), plans_->buf, u.size() * sizeof(cdouble));
    return out;
}

std::vector<cdouble> HalfSpaceSolver::inverse_fft(std::span<const cdouble> u) const {
    check_field(u);
    std::memcpy(plans_->buf, u.data(), u.size() * sizeof(cdouble));
    fftw_execute(plans_->inv);
    std::vector<cdouble> out(u.size());
    std::memcpy(out.data(), plans_->buf, u.size() * sizeof(cdouble));
    const double scale = 1.0 / static_cast<double>(slice_);
    for (cdouble& v : out) v *= scale;
    return out;
}

TridiagZ HalfSpaceSolver::frequency_matrix(std::size_t s) const {
    const TridiagD& bm = base_.matrix();
    const std::size_t n = bm.size();
    const cdouble ib(0.0, bcoef_[s]);
    TridiagZ t;
    t.diag.resize(n);
    t.sub.resize(n - 1);
    t.sup.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) t.diag[j] = bm.diag[j] + ib * dy_.diag[j] - xisq_[s];
    for (std::size_t j = 0; j + 1 < n; ++j) {
        t.sub[j] = bm.sub[j] + ib * dy_.sub[j];
        t.sup[j] = bm.sup[j] + ib * dy_.sup[j];
    }
    return t;
}

std::vector<cdouble> HalfSpaceSolver::apply(std::span<const cdouble> u) const {
    std::vector<cdouble> uh = forward_fft(u);
    const std::size_t n_y = cfg_.grid.cells();
    std::vector<cdouble> col(n_y), res;
    for (std::size_t s = 0; s < slice_; ++s) {
        const TridiagZ t = frequency_matrix(s);
        for (std::size_t j = 0; j < n_y; ++j) col[j] = uh[j * slice_ + s];
        res = t.apply(std::span<const cdouble>(col));
        for (std::size_t j = 0; j < n_y; ++j) uh[j * slice_ + s] = res[j];
    }
    return inverse_fft(uh);
}

std::vector<cdouble> HalfSpaceSolver::solve(cdouble lambda, std::span<const cdouble> f,
                                            bool drop_zero_mode) const {
    const double omega = anisotropy_angle(vec_norm2(cfg_.a));
    if (lambda == cdouble(0.0, 0.0) || std::abs(std::arg(lambda)) >= M_PI - omega)
        throw std::invalid_argument("solve: lambda outside the resolvent sector");
    std::vector<cdouble> fh = forward_fft(f);
    const std::size_t n_y = cfg_.grid.cells();
    if (drop_zero_mode) {
        for (std::size_t j = 0; j < n_y; ++j) fh[j * slice_] = 0.0;
    }
    const TridiagD& bm = base_.matrix();
    std::vector<cdouble> col(n_y);
    TridiagZ sys;
    sys.diag.resize(n_y);
    sys.sub.resize(n_y - 1);
    sys.sup.resize(n_y - 1);
    for (std::size_t s = 0; s < slice_; ++s) {
        const cdouble ib(0.0, bcoef_[s]);
        for (std::size_t j = 0; j < n_y; ++j)
            sys.diag[j] = lambda + xisq_[s] - bm.diag[j] - ib * dy_.diag[j];
        for (std::size_t j = 0; j + 1 < n_y; ++j) {
            sys.sub[j] = -bm.sub[j] - ib * dy_.sub[j];
            sys.sup[j] = -bm.sup[j] - ib * dy_.sup[j];
        }
        const FactoredTridiagZ fac(sys);
        for (std::size_t j = 0; j < n_y; ++j) col[j] = fh[j * slice_ + s];
        fac.solve_in_place(col);
        for (std::size_t j = 0; j < n_y; ++j) fh[j * slice_ + s] = col[j];
    }
    return inverse_fft(fh);
}

std::vector<cdouble> HalfSpaceSolver::spectral_scale(std::span<const cdouble> u,
                                                     const std::vector<cdouble>& factor) const {
    std::vector<cdouble> uh = forward_fft(u);
    const std::size_t n_y = cfg_.grid.cells();
    for (std::size_t j = 0; j < n_y; ++j)
        for (std::size_t s = 0; s < slice_; ++s) uh[j * slice_ + s] *= factor[s];
    return inverse_fft(uh);
}

std::vector<cdouble> HalfSpaceSolver::dx(std::span<const cdouble> u, std::size_t axis) const {
    if (axis >= cfg_.dim_x) throw std::invalid_argument("dx: axis out of range");
    std::vector<cdouble> factor(slice_);
    for (std::size_t s = 0; s < slice_; ++s) {
        const std::size_t k = (axis == 0 ? s : s / cfg_.nx) % cfg_.nx;
        factor[s] = (k == cfg_.nx / 2) ? cdouble(0.0, 0.0) : cdouble(0.0, freq_[s][axis]);
    }
    return spectral_scale(u, factor);
}

std::vector<cdouble> HalfSpaceSolver::dxx(std::span<const cdouble> u, std::size_t ax1,
                                          std::size_t ax2) const {
    if (ax1 >= cfg_.dim_x || ax2 >= cfg_.dim_x) throw std::invalid_argument("dxx: axis out of range");
    std::vector<cdouble> factor(slice_);
    for (std::size_t s = 0; s < slice_; ++s) {
        if (ax1 == ax2) {
            factor[s] = -freq_[s][ax1] * freq_[s][ax1];
        } else {
            const std::size_t k1 = (ax1 == 0 ? s : s / cfg_.nx) % cfg_.nx;
            const std::size_t k2 = (ax2 == 0 ? s : s / cfg_.nx) % cfg_.nx;
            const double f1 = (k1 == cfg_.nx / 2) ? 0.0 : freq_[s][ax1];
            const double f2 = (k2 == cfg_.nx / 2) ? 0.0 : freq_[s][ax2];
            factor[s] = -f1 * f2;
        }
    }
    return spectral_scale(u, factor);
}

std::vector<cdouble> HalfSpaceSolver::radial_tridiag_apply(std::span<const cdouble> u,
                                                           const TridiagD& mat) const {
    check_field(u);
    const std::size_t n_y = cfg_.grid.cells();
    std::vector<cdouble> out(u.size());
    std::vector<cdouble> col(n_y), res;
    for (std::size_t s = 0; s < slice_; ++s) {
        for (std::size_t j = 0; j < n_y; ++j) col[j] = u[j * slice_ + s];
        res = mat.apply(std::span<const cdouble>(col));
        for (std::size_t j = 0; j < n_y; ++j) out[j * slice_ + s] = res[j];
    }
    return out;
}

std::vector<cdouble> HalfSpaceSolver::dy(std::span<const cdouble> u) const {
    return radial_tridiag_apply(u, dy_);
}

std::vector<cdouble> HalfSpaceSolver::dyy(std::span<const cdouble> u) const {
    return radial_tridiag_apply(u, second_derivative_matrix(cfg_.grid));
}

std::vector<cdouble> HalfSpaceSolver::dxy(std::span<const cdouble> u, std::size_t axis) const {
    std::vector<cdouble> v = dx(u, axis);
    return dy(v);
}

std::vector<cdouble> HalfSpaceSolver::dy_over_y(std::span<const cdouble> u) const {
    std::vector<cdouble> v = dy(u);
    const std::size_t n_y = cfg_.grid.cells();
    for (std::size_t j = 0; j < n_y; ++j) {
        const double inv = 1.0 / cfg_.grid.node(j);
        for (std::size_t s = 0; s < slice_; ++s) v[j * slice_ + s] *= inv;
    }
    return v;
}

double HalfSpaceSolver::norm(std::span<const cdouble> u) const { return norm(u, cfg_.p, cfg_.m); }

double HalfSpaceSolver::norm(std::span<const cdouble> u, double p, double m) const {
    check_field(u);
    const std::size_t n_y = cfg_.grid.cells();
    if (std::isinf(p)) {
        double mx = 0.0;
        for (const cdouble& v : u) mx = std::max(mx, std::abs(v));
        return mx;
    }
    const std::vector<double> masses = cfg_.grid.cell_masses(m);
    double dx_cell = 1.0;
    for (double x : cfg_.periods) dx_cell *= x / static_cast<double>(cfg_.nx);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_y; ++j) {
        double row = 0.0;
        for (std::size_t s = 0; s < slice_; ++s) row += std::pow(std::abs(u[j * slice_ + s]), p);
        acc += masses[j] * row;
    }
    return std::pow(dx_cell * acc, 1.0 / p);
}

HalfSpaceSolver::Trajectory HalfSpaceSolver::parabolic_solve(
    std::span<const cdouble> u0, const std::function<std::vector<cdouble>(double)>& source,
    double horizon, int steps) const {
    check_field(u0);
    if (steps < 2) throw std::invalid_argument("parabolic_solve: needs at least 2 steps");
    if (!(horizon > 0.0)) throw std::invalid_argument("parabolic_solve: horizon must be positive");
    const double dt = horizon / steps;
    const std::size_t n_y = cfg_.grid.cells();

    std::vector<TridiagZ> mats;
    std::vector<FactoredTridiagZ> facs;
    mats.reserve(slice_);
    facs.reserve(slice_);
    for (std::size_t s = 0; s < slice_; ++s) {
        TridiagZ t = frequency_matrix(s);
        TridiagZ lhs = t;
        for (std::size_t j = 0; j < n_y; ++j) lhs.diag[j] = 1.0 - 0.5 * dt * t.diag[j];
        for (std::size_t j = 0; j + 1 < n_y; ++j) {
            lhs.sub[j] = -0.5 * dt * t.sub[j];
            lhs.sup[j] = -0.5 * dt * t.sup[j];
        }
        facs.emplace_back(lhs);
        mats.push_back(std::move(t));
    }

    Trajectory traj;
    traj.dt = dt;
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.emplace_back(u0.begin(), u0.end());

    std::vector<cdouble> uh = forward_fft(u0);
    std::vector<cdouble> col(n_y), lcol;
    for (int k = 0; k < steps; ++k) {
        std::vector<cdouble> fh;
        if (source) {
            const double t_mid = (k + 0.5) * dt;
            std::vector<cdouble> fm = source(t_mid);
            check_field(fm);
            fh = forward_fft(fm);
        }
        for (std::size_t s = 0; s < slice_; ++s) {
            for (std::size_t j = 0; j < n_y; ++j) col[j] = uh[j * slice_ + s];
            lcol = mats[s].apply(std::span<const cdouble>(col));
            for (std::size_t j = 0; j < n_y; ++j) {
                col[j] += 0.5 * dt * lcol[j];
                if (!fh.empty()) col[j] += dt * fh[j * slice_ + s];
            }
            facs[s].solve_in_place(col);
            for (std::size_t j = 0; j < n_y; ++j) uh[j * slice_ + s] = col[j];
        }
        traj.states.push_back(inverse_fft(uh));
    }
    return traj;
}

HalfSpaceSolver::MaxRegReport HalfSpaceSolver::maxreg_ratio(
    const Trajectory& traj, const std::function<std::vector<cdouble>(double)>& source) const {
    if (traj.states.size() < 3) throw std::invalid_argument("maxreg_ratio: trajectory too short");
    const double dt = traj.dt;
    double peak = 0.0;
    for (const auto& st : traj.states) peak = std::max(peak, norm(st));
    if (norm(traj.states[0]) > 1e-10 * std::max(peak, 1e-300))
        throw std::invalid_argument("maxreg_ratio: requires zero initial data");

    const double p = cfg_.p;
    const bool pinf = std::isinf(p);
    double acc_dt = 0.0, acc_lu = 0.0, acc_f = 0.0, ident = 0.0;
    std::vector<cdouble> u_mid(size()), dtu(size()), defect(size());
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const std::vector<cdouble>& a = traj.states[k];
        const std::vector<cdouble>& b = traj.states[k + 1];
        for (std::size_t i = 0; i < size(); ++i) {
            u_mid[i] = 0.5 * (a[i] + b[i]);
            dtu[i] = (b[i] - a[i]) / dt;
        }
        std::vector<cdouble> lu = apply(u_mid);
        std::vector<cdouble> fm(size(), cdouble(0.0, 0.0));
        if (source) {
            fm = source((static_cast<double>(k) + 0.5) * dt);
            check_field(fm);
        }
        for (std::size_t i = 0; i < size(); ++i) defect[i] = dtu[i] - lu[i] - fm[i];
        const double n_dt = norm(dtu), n_lu = norm(lu), n_f = norm(fm), n_d = norm(defect);
        ident = std::max(ident, n_d / std::max({n_f, n_dt, 1e-300}));
        if (pinf) {
            acc_dt = std::max(acc_dt, n_dt);
            acc_lu = std::max(acc_lu, n_lu);
            acc_f = std::max(acc_f, n_f);
        } else {
            acc_dt += dt * std::pow(n_dt, p);
            acc_lu += dt * std::pow(n_lu, p);
            acc_f += dt * std::pow(n_f, p);
        }
    }
    MaxRegReport rep;
    rep.identity_residual = ident;
    if (pinf) {
        rep.time_deriv_norm = acc_dt;
        rep.generator_norm = acc_lu;
        rep.source_norm = acc_f;
    } else {
        rep.time_deriv_norm = std::pow(acc_dt, 1.0 / p);
        rep.generator_norm = std::pow(acc_lu, 1.0 / p);
        rep.source_norm = std::pow(acc_f, 1.0 / p);
    }
    if (rep.source_norm <= 1e-300) throw std::invalid_argument("maxreg_ratio: zero source");
    rep.ratio = (rep.time_deriv_norm + rep.generator_norm) / rep.source_norm;
    return rep;
}

HalfSpaceSolver::FormReport HalfSpaceSolver::form_values(std::span<const cdouble> u) const {
    std::vector<cdouble> uh = forward_fft(u);
    const std::size_t n_y = cfg_.grid.cells();
    const double c = cfg_.drift_exponent;

    // Face weights reproducing the flux-form radial energy exactly.
    std::vector<double> wface(n_y), hface(n_y);
    for (std::size_t f = 1; f <= n_y; ++f) {
        const double h = cfg_.grid.spacing(f - 1);
        wface[f - 1] = std::pow(cfg_.grid.face(f), c) * h;
        hface[f - 1] = h;
    }

    double volume = 1.0;
    for (double x : cfg_.periods) volume *= x;
    const double scale = volume / std::pow(static_cast<double>(slice_), 2.0);
    FormReport rep;
    for (std::size_t s = 0; s < slice_; ++s) {
        double ex = 0.0, ey = 0.0;
        cdouble pair(0.0, 0.0);
        for (std::size_t f = 1; f <= n_y; ++f) {
            const cdouble lo = uh[(f - 1) * slice_ + s];
            const cdouble hi = f < n_y ? uh[f * slice_ + s] : cdouble(0.0, 0.0);
            const cdouble g = (hi - lo) / hface[f - 1];
            const cdouble v = 0.5 * (hi + lo);
            const double w = wface[f - 1];
            ex += std::norm(v) * w;
            ey += std::norm(g) * w;
            pair += w * g * std::conj(v);
        }
        ex *= xisq_[s];
        rep.energy += scale * (ex + ey);
        rep.re += scale * (ex + ey + bcoef_[s] * pair.imag());
        rep.im += scale * (-bcoef_[s] * pair.real());
    }
    return rep;
}

HalfSpaceSolver::RegularityReport HalfSpaceSolver::regularity_ratios(
    const std::vector<std::vector<cdouble>>& batch, cdouble lambda) const {
    if (batch.empty())
        throw std::invalid_argument("regularity_ratios: needs at least one probe");
    RegularityReport rep;
    rep.probes = batch.size();
    rep.min_generator_norm = std::numeric_limits<double>::infinity();
    for (const std::vector<cdouble>& f : batch) {
        const std::vector<cdouble> u = solve(lambda, f, true);
        const std::vector<cdouble> lu = apply(u);
        const double gen = norm(lu);
        if (gen <= 1e-300) continue;
        rep.min_generator_norm = std::min(rep.min_generator_norm, gen);
        double xx = 0.0, xy = 0.0;
        for (std::size_t i = 0; i < cfg_.dim_x; ++i) {
            for (std::size_t j = i; j < cfg_.dim_x; ++j)
                xx = std::max(xx, norm(dxx(u, i, j)));
            xy = std::max(xy, norm(dxy(u, i)));
        }
        rep.xx_ratio = std::max(rep.xx_ratio, xx / gen);
        rep.xy_ratio = std::max(rep.xy_ratio, xy / gen);
        rep.yy_ratio = std::max(rep.yy_ratio, norm(dyy(u)) / gen);
        rep.singular_ratio = std::max(rep.singular_ratio, norm(dy_over_y(u)) / gen);
    }
    rep.max_ratio = std::max({rep.xx_ratio, rep.xy_ratio, rep.yy_ratio, rep.singular_ratio});
    return rep;
}

}  // namespace singulax
