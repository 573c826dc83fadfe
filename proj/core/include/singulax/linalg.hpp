/// @file linalg.hpp
/// @brief Banded and dense linear algebra used by the one-dimensional solvers.
///
/// Thin wrappers around LAPACK: tridiagonal LU with reusable factorizations,
/// symmetric tridiagonal eigendecomposition, and dense complex
/// eigendecomposition for non-selfadjoint one-dimensional operators.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace singulax {

using cdouble = std::complex<double>;

/// Tridiagonal matrix in band storage. sub/sup have size()-1 entries.
template <typename T>
struct Tridiag {
    std::vector<T> sub;
    std::vector<T> diag;
    std::vector<T> sup;

    std::size_t size() const { return diag.size(); }

    template <typename U>
    std::vector<decltype(T{} * U{})> apply(std::span<const U> x) const {
        const std::size_t n = diag.size();
        std::vector<decltype(T{} * U{})> y(n);
        for (std::size_t j = 0; j < n; ++j) {
            auto v = diag[j] * x[j];
            if (j > 0) v += sub[j - 1] * x[j - 1];
            if (j + 1 < n) v += sup[j] * x[j + 1];
            y[j] = v;
        }
        return y;
    }
};

using TridiagD = Tridiag<double>;
using TridiagZ = Tridiag<cdouble>;

TridiagZ to_complex(const TridiagD& a);

/// LU-factorized complex tridiagonal system (zgttrf). Solves share the
/// factorization; trans = 'N' solves A x = b, 'C' solves A^H x = b.
class FactoredTridiagZ {
public:
    explicit FactoredTridiagZ(const TridiagZ& a);

    void solve_in_place(std::span<cdouble> rhs, char trans = 'N') const;

    std::vector<cdouble> solve(std::vector<cdouble> rhs, char trans = 'N') const {
        solve_in_place(rhs, trans);
        return rhs;
    }

    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<cdouble> dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
};

/// Eigendecomposition of a symmetric tridiagonal matrix (dstevd).
/// Eigenvectors are the columns of `vectors`, column-major, length n each.
struct SymTridiagEigen {
    std::vector<double> values;
    std::vector<double> vectors;
    int n = 0;

    double vec(int row, int col) const { return vectors[static_cast<std::size_t>(col) * n + row]; }
};

SymTridiagEigen eigh_tridiag(std::vector<double> diag, std::vector<double> off);

/// Dense complex eigendecomposition A = V diag(w) V^{-1} (zgeev), with the
/// eigenvector matrix kept LU-factorized so V^{-1} x is a backsolve.
class DenseEigenZ {
public:
    /// a is column-major n*n and is consumed.
    DenseEigenZ(std::vector<cdouble> a, int n);

    const std::vector<cdouble>& values() const { return w_; }
    int size() const { return n_; }

    /// V x
    std::vector<cdouble> apply_v(std::span<const cdouble> x) const;
    /// V^{-1} x
    std::vector<cdouble> solve_v(std::vector<cdouble> x) const;

    /// max_j |A v_j - w_j v_j|_2 / |A|_F over a few columns; cheap sanity probe.
    double residual(const std::vector<cdouble>& a_colmajor) const;

private:
    int n_ = 0;
    std::vector<cdouble> w_;
    std::vector<cdouble> v_;
    std::vector<cdouble> vlu_;
    std::vector<int> ipiv_;
};

/// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing nodes.
/// Evaluation outside [x.front(), x.back()] clamps to the end values.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const;

private:
    std::vector<double> x_, y_, d_;
};

} // namespace singulax
