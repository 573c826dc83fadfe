#include "singulax/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace singulax {

TridiagZ to_complex(const TridiagD& a) {
    TridiagZ z;
    z.sub.assign(a.sub.begin(), a.sub.end());
    z.diag.assign(a.diag.begin(), a.diag.end());
    z.sup.assign(a.sup.begin(), a.sup.end());
    return z;
}

FactoredTridiagZ::FactoredTridiagZ(const TridiagZ& a)
    : n_(static_cast<int>(a.size())),
      dl_(a.sub),
      d_(a.diag),
      du_(a.sup),
      du2_(a.size() >= 2 ? a.size() - 2 : 0),
      ipiv_(a.size()) {
    if (n_ < 1) throw std::invalid_argument("FactoredTridiagZ: empty matrix");
    const lapack_int info = LAPACKE_zgttrf(n_, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data());
    if (info != 0) throw std::runtime_error("zgttrf failed, info=" + std::to_string(info));
}

void FactoredTridiagZ::solve_in_place(std::span<cdouble> rhs, char trans) const {
    if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("FactoredTridiagZ: size mismatch");
    const lapack_int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, trans, n_, 1, dl_.data(), d_.data(), du_.data(),
                                           du2_.data(), ipiv_.data(), rhs.data(), n_);
    if (info != 0) throw std::runtime_error("zgttrs failed, info=" + std::to_string(info));
}

SymTridiagEigen eigh_tridiag(std::vector<double> diag, std::vector<double> off) {
    SymTridiagEigen out;
    out.n = static_cast<int>(diag.size());
    if (out.n < 1) throw std::invalid_argument("eigh_tridiag: empty matrix");
    if (off.size() + 1 != diag.size()) throw std::invalid_argument("eigh_tridiag: band size mismatch");
    out.vectors.assign(static_cast<std::size_t>(out.n) * out.n, 0.0);
    const lapack_int info =
        LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', out.n, diag.data(), off.data(), out.vectors.data(), out.n);
    if (info != 0) throw std::runtime_error("dstevd failed, info=" + std::to_string(info));
    out.values = std::move(diag);
    return out;
}

DenseEigenZ::DenseEigenZ(std::vector<cdouble> a, int n) : n_(n), w_(n), v_(static_cast<std::size_t>(n) * n) {
    if (n < 1 || a.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("DenseEigenZ: bad dimensions");
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n_, a.data(), n_, w_.data(), nullptr, 1,
                                    v_.data(), n_);
    if (info != 0) throw std::runtime_error("zgeev failed, info=" + std::to_string(info));
    vlu_ = v_;
    ipiv_.resize(n_);
    info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n_, n_, vlu_.data(), n_, ipiv_.data());
    if (info != 0) throw std::runtime_error("zgetrf failed, info=" + std::to_string(info));
}

std::vector<cdouble> DenseEigenZ::apply_v(std::span<const cdouble> x) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("DenseEigenZ::apply_v: size mismatch");
    std::vector<cdouble> y(n_, cdouble{0.0, 0.0});
    for (int k = 0; k < n_; ++k) {
        const cdouble xk = x[k];
        if (xk == cdouble{0.0, 0.0}) continue;
        const cdouble* col = v_.data() + static_cast<std::size_t>(k) * n_;
        for (int i = 0; i < n_; ++i) y[i] += col[i] * xk;
    }
    return y;
}

std::vector<cdouble> DenseEigenZ::solve_v(std::vector<cdouble> x) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("DenseEigenZ::solve_v: size mismatch");
    const lapack_int info =
        LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n_, 1, vlu_.data(), n_, ipiv_.data(), x.data(), n_);
    if (info != 0) throw std::runtime_error("zgetrs failed, info=" + std::to_string(info));
    return x;
}

double DenseEigenZ::residual(const std::vector<cdouble>& a) const {
    double num = 0.0, den = 0.0;
    for (const cdouble& e : a) den += std::norm(e);
    den = std::sqrt(den);
    const int cols = std::min(n_, 8);
    for (int k = 0; k < cols; ++k) {
        const int col = k * std::max(1, n_ / cols);
        const cdouble* v = v_.data() + static_cast<std::size_t>(col) * n_;
        double r = 0.0;
        for (int i = 0; i < n_; ++i) {
            cdouble av{0.0, 0.0};
            for (int j = 0; j < n_; ++j) av += a[static_cast<std::size_t>(j) * n_ + i] * v[j];
            r += std::norm(av - w_[col] * v[i]);
        }
        num = std::max(num, std::sqrt(r));
    }
    return den > 0.0 ? num / den : num;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("MonotoneCubic: nodes must increase");

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    d_[0] = delta[0];
    d_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // Fritsch-Carlson limiter keeps the interpolant monotone on each interval.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (delta[i] == 0.0) {
            d_[i] = d_[i + 1] = 0.0;
            continue;
        }
        const double a = d_[i] / delta[i];
        const double b = d_[i + 1] / delta[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            d_[i] = tau * a * delta[i];
            d_[i + 1] = tau * b * delta[i];
        }
    }
}

double MonotoneCubic::operator()(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double s = (xq - x_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

} // namespace singulax
