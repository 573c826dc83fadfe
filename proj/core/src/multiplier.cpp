#include "singulax/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "singulax/probes.hpp"

namespace singulax {

namespace {

double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * v[j];
    return s;
}

double norm2(std::span<const double> u) { return std::sqrt(dot(u, u)); }

TridiagZ conj_transpose(const TridiagZ& m) {
    TridiagZ t;
    const std::size_t n = m.size();
    t.diag.resize(n);
    t.sub.resize(n > 0 ? n - 1 : 0);
    t.sup.resize(n > 0 ? n - 1 : 0);
    for (std::size_t j = 0; j < n; ++j) t.diag[j] = std::conj(m.diag[j]);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        t.sub[j] = std::conj(m.sup[j]);
        t.sup[j] = std::conj(m.sub[j]);
    }
    return t;
}

}  // namespace

double quadratic_symbol(std::span<const double> a, std::span<const double> xi) {
    if (a.size() != xi.size()) throw std::invalid_argument("quadratic_symbol: dimension mismatch");
    if (norm2(a) >= 1.0) throw std::invalid_argument("quadratic_symbol: requires |a| < 1");
    const double ax = dot(a, xi);
    return dot(xi, xi) - ax * ax;
}

double sector_half_angle(double a_norm, double delta) {
    if (a_norm < 0.0 || a_norm > delta || delta > 1.0)
        throw std::invalid_argument("sector_half_angle: requires 0 <= |a| <= delta <= 1");
    return std::atan2(a_norm, std::sqrt(std::max(0.0, delta * delta - a_norm * a_norm)));
}

double anisotropy_angle(double a_norm) { return sector_half_angle(a_norm, 1.0); }

// ---------------------------------------------------------------------------
// LinearOpZ

LinearOpZ::LinearOpZ(Fn forward, Fn conj_transpose)
    : fwd_(std::move(forward)), adj_(std::move(conj_transpose)) {}

std::vector<cdouble> LinearOpZ::apply(std::span<const cdouble> f) const { return fwd_(f); }

std::vector<cdouble> LinearOpZ::apply_ct(std::span<const cdouble> f) const { return adj_(f); }

LinearOpZ LinearOpZ::identity() {
    auto copy = [](std::span<const cdouble> f) { return std::vector<cdouble>(f.begin(), f.end()); };
    return {copy, copy};
}

LinearOpZ LinearOpZ::scalar(cdouble s) {
    auto fwd = [s](std::span<const cdouble> f) {
        std::vector<cdouble> out(f.begin(), f.end());
        for (cdouble& v : out) v *= s;
        return out;
    };
    const cdouble sc = std::conj(s);
    auto adj = [sc](std::span<const cdouble> f) {
        std::vector<cdouble> out(f.begin(), f.end());
        for (cdouble& v : out) v *= sc;
        return out;
    };
    return {fwd, adj};
}

LinearOpZ LinearOpZ::from_tridiag(TridiagZ m) {
    auto mat = std::make_shared<const TridiagZ>(std::move(m));
    auto matH = std::make_shared<const TridiagZ>(conj_transpose(*mat));
    auto fwd = [mat](std::span<const cdouble> f) { return mat->apply(f); };
    auto adj = [matH](std::span<const cdouble> f) { return matH->apply(f); };
    return {fwd, adj};
}

LinearOpZ LinearOpZ::from_factored(std::shared_ptr<const FactoredTridiagZ> f) {
    auto fwd = [f](std::span<const cdouble> rhs) {
        return f->solve(std::vector<cdouble>(rhs.begin(), rhs.end()), 'N');
    };
    auto adj = [f](std::span<const cdouble> rhs) {
        return f->solve(std::vector<cdouble>(rhs.begin(), rhs.end()), 'C');
    };
    return {fwd, adj};
}

LinearOpZ LinearOpZ::product(std::vector<LinearOpZ> factors) {
    if (factors.empty()) return identity();
    auto fs = std::make_shared<const std::vector<LinearOpZ>>(std::move(factors));
    auto fwd = [fs](std::span<const cdouble> f) {
        std::vector<cdouble> v(f.begin(), f.end());
        for (std::size_t i = fs->size(); i-- > 0;) v = (*fs)[i].apply(v);
        return v;
    };
    auto adj = [fs](std::span<const cdouble> f) {
        std::vector<cdouble> v(f.begin(), f.end());
        for (const LinearOpZ& op : *fs) v = op.apply_ct(v);
        return v;
    };
    return {fwd, adj};
}

LinearOpZ LinearOpZ::sum(std::vector<LinearOpZ> terms) {
    if (terms.empty()) throw std::invalid_argument("LinearOpZ::sum: empty");
    auto ts = std::make_shared<const std::vector<LinearOpZ>>(std::move(terms));
    auto fwd = [ts](std::span<const cdouble> f) {
        std::vector<cdouble> acc = (*ts)[0].apply(f);
        for (std::size_t i = 1; i < ts->size(); ++i) {
            std::vector<cdouble> v = (*ts)[i].apply(f);
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += v[j];
        }
        return acc;
    };
    auto adj = [ts](std::span<const cdouble> f) {
        std::vector<cdouble> acc = (*ts)[0].apply_ct(f);
        for (std::size_t i = 1; i < ts->size(); ++i) {
            std::vector<cdouble> v = (*ts)[i].apply_ct(f);
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += v[j];
        }
        return acc;
    };
    return {fwd, adj};
}

LinearOpZ LinearOpZ::scaled(cdouble s) const {
    return LinearOpZ::product({LinearOpZ::scalar(s), *this});
}

// ---------------------------------------------------------------------------
// SymbolFamily

SymbolFamily::SymbolFamily(RadialGrid grid, double drift_exponent, std::vector<double> a)
    : base_(std::move(grid), drift_exponent), a_(std::move(a)), dy_(derivative_matrix(base_.grid())) {
    if (a_.empty()) throw std::invalid_argument("SymbolFamily: empty anisotropy");
    if (norm2(a_) >= 1.0) throw std::invalid_argument("SymbolFamily: requires |a| < 1");
}

double SymbolFamily::anisotropy_norm() const { return norm2(a_); }

SymbolFamily::Point SymbolFamily::at(cdouble lambda, std::span<const double> xi) const {
    if (xi.size() != a_.size()) throw std::invalid_argument("SymbolFamily::at: dimension mismatch");
    Point pt;
    pt.lambda = lambda;
    pt.xi.assign(xi.begin(), xi.end());
    pt.b = 2.0 * dot(a_, xi);
    pt.qa = quadratic_symbol(a_, xi);
    pt.xisq = dot(xi, xi);

    const TridiagD& bm = base_.matrix();
    const std::size_t n = bm.size();
    const cdouble shift = lambda + pt.qa + 0.25 * pt.b * pt.b;
    const cdouble ib(0.0, pt.b);
    TridiagZ sys;
    sys.diag.resize(n);
    sys.sub.resize(n - 1);
    sys.sup.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) sys.diag[j] = shift - bm.diag[j] - ib * dy_.diag[j];
    for (std::size_t j = 0; j + 1 < n; ++j) {
        sys.sub[j] = -bm.sub[j] - ib * dy_.sub[j];
        sys.sup[j] = -bm.sup[j] - ib * dy_.sup[j];
    }
    pt.solver = std::make_shared<const FactoredTridiagZ>(sys);
    pt.resolvent = LinearOpZ::from_factored(pt.solver);

    TridiagZ dz;
    dz.diag.assign(dy_.diag.begin(), dy_.diag.end());
    dz.sub.assign(dy_.sub.begin(), dy_.sub.end());
    dz.sup.assign(dy_.sup.begin(), dy_.sup.end());
    pt.derivative = LinearOpZ::from_tridiag(std::move(dz));
    return pt;
}

std::vector<cdouble> SymbolFamily::shifted_apply(const Point& pt, std::span<const cdouble> u) const {
    const TridiagD& bm = base_.matrix();
    const std::size_t n = bm.size();
    if (u.size() != n) throw std::invalid_argument("shifted_apply: size mismatch");
    const cdouble shift = pt.lambda + pt.qa + 0.25 * pt.b * pt.b;
    const cdouble ib(0.0, pt.b);
    std::vector<cdouble> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        cdouble v = (shift - bm.diag[j] - ib * dy_.diag[j]) * u[j];
        if (j > 0) v += (-bm.sub[j - 1] - ib * dy_.sub[j - 1]) * u[j - 1];
        if (j + 1 < n) v += (-bm.sup[j] - ib * dy_.sup[j]) * u[j + 1];
        out[j] = v;
    }
    return out;
}

TridiagZ SymbolFamily::factor_matrix(const Point& pt, std::size_t axis) const {
    // exact xi_axis-derivative factor of the shifted system: 2i a_axis D - 2 xi_axis
    const cdouble two_ia(0.0, 2.0 * a_[axis]);
    const double two_xi = 2.0 * pt.xi[axis];
    const std::size_t n = dy_.size();
    TridiagZ f;
    f.diag.resize(n);
    f.sub.resize(n - 1);
    f.sup.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) f.diag[j] = two_ia * dy_.diag[j] - two_xi;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        f.sub[j] = two_ia * dy_.sub[j];
        f.sup[j] = two_ia * dy_.sup[j];
    }
    return f;
}

LinearOpZ SymbolFamily::symbol_derivative(const Point& pt, unsigned alpha_mask) const {
    if (alpha_mask >= (1u << a_.size()))
        throw std::invalid_argument("symbol_derivative: multi-index outside dimension");
    if (alpha_mask != 0 && pt.xisq == 0.0)
        throw std::invalid_argument("symbol_derivative: requires xi != 0");
    std::vector<std::size_t> axes;
    for (std::size_t j = 0; j < a_.size(); ++j)
        if (alpha_mask & (1u << j)) axes.push_back(j);
    if (axes.empty()) return pt.resolvent;

    std::vector<LinearOpZ> factor_of(a_.size());
    for (std::size_t ax : axes) factor_of[ax] = LinearOpZ::from_tridiag(factor_matrix(pt, ax));

    std::vector<LinearOpZ> terms;
    std::vector<std::size_t> perm = axes;
    do {
        std::vector<LinearOpZ> chain;
        chain.push_back(pt.resolvent);
        for (std::size_t ax : perm) {
            chain.push_back(factor_of[ax]);
            chain.push_back(pt.resolvent);
        }
        terms.push_back(LinearOpZ::product(std::move(chain)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return LinearOpZ::sum(std::move(terms));
}

LinearOpZ SymbolFamily::weighted_member(const Point& pt, SymbolTarget target, unsigned alpha_mask,
                                        std::size_t component) const {
    double xi_alpha = 1.0;
    for (std::size_t j = 0; j < a_.size(); ++j)
        if (alpha_mask & (1u << j)) xi_alpha *= pt.xi[j];

    const LinearOpZ d_alpha = symbol_derivative(pt, alpha_mask);
    switch (target) {
        case SymbolTarget::lambda_r:
            return d_alpha.scaled(pt.lambda * xi_alpha);
        case SymbolTarget::xisq_r: {
            std::vector<LinearOpZ> terms;
            terms.push_back(d_alpha.scaled(pt.xisq));
            for (std::size_t j = 0; j < a_.size(); ++j) {
                if (!(alpha_mask & (1u << j))) continue;
                terms.push_back(
                    symbol_derivative(pt, alpha_mask & ~(1u << j)).scaled(2.0 * pt.xi[j]));
            }
            return LinearOpZ::sum(std::move(terms)).scaled(xi_alpha);
        }
        case SymbolTarget::xi_dy_r: {
            if (component >= a_.size())
                throw std::invalid_argument("weighted_member: component out of range");
            std::vector<LinearOpZ> terms;
            terms.push_back(
                LinearOpZ::product({pt.derivative, d_alpha}).scaled(pt.xi[component]));
            if (alpha_mask & (1u << component)) {
                terms.push_back(LinearOpZ::product(
                    {pt.derivative, symbol_derivative(pt, alpha_mask & ~(1u << component))}));
            }
            return LinearOpZ::sum(std::move(terms)).scaled(xi_alpha);
        }
    }
    throw std::logic_error("weighted_member: unknown target");
}

// ---------------------------------------------------------------------------
// Norm estimation

NormEstimate op_norm_l2(const LinearOpZ& op, std::span<const double> weight_masses, int max_iter,
                        double tol) {
    const std::size_t n = weight_masses.size();
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<cdouble> v(n);
    for (cdouble& x : v) x = cdouble(unif(rng), unif(rng));

    auto wnorm = [&](const std::vector<cdouble>& u) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += weight_masses[j] * std::norm(u[j]);
        return std::sqrt(s);
    };

    NormEstimate est;
    double prev = -1.0;
    const double v0 = wnorm(v);
    if (v0 == 0.0) return est;
    for (cdouble& x : v) x /= v0;

    for (int it = 0; it < max_iter; ++it) {
        std::vector<cdouble> tv = op.apply(v);
        const double num = wnorm(tv);
        est.value = num;  // since ||v||_W = 1
        est.iterations = it + 1;
        if (prev >= 0.0 && std::abs(num - prev) <= tol * std::max(num, 1e-300)) {
            est.converged = true;
            return est;
        }
        prev = num;
        if (num == 0.0) return est;
        // v <- normalized W^{-1} T^H W (T v)
        for (std::size_t j = 0; j < n; ++j) tv[j] *= weight_masses[j];
        std::vector<cdouble> u = op.apply_ct(tv);
        for (std::size_t j = 0; j < n; ++j) u[j] /= weight_masses[j];
        const double un = wnorm(u);
        if (un == 0.0) return est;
        for (std::size_t j = 0; j < n; ++j) v[j] = u[j] / un;
    }
    return est;
}

double op_norm_lp_lower(const LinearOpZ& op, const RadialGrid& g, double p, double m, int n_probes,
                        unsigned seed) {
    ProbeGenerator gen(seed);
    double best = 0.0;
    for (int i = 0; i < n_probes; ++i) {
        std::vector<cdouble> f = gen.radial_complex(g);
        const double den = weighted_norm(g, std::span<const cdouble>(f), p, m);
        if (den <= 1e-300) continue;
        std::vector<cdouble> tf = op.apply(f);
        best = std::max(best, weighted_norm(g, std::span<const cdouble>(tf), p, m) / den);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Lattices

std::vector<cdouble> sector_lambda_lattice(double max_arg, int n_mod, int n_arg, double mod_lo,
                                           double mod_hi) {
    if (n_mod < 1 || n_arg < 1 || mod_lo <= 0.0 || mod_hi < mod_lo)
        throw std::invalid_argument("sector_lambda_lattice: bad lattice parameters");
    std::vector<cdouble> out;
    out.reserve(static_cast<std::size_t>(n_mod) * n_arg);
    for (int i = 0; i < n_mod; ++i) {
        const double frac = n_mod == 1 ? 0.0 : static_cast<double>(i) / (n_mod - 1);
        const double mod = mod_lo * std::pow(mod_hi / mod_lo, frac);
        for (int k = 0; k < n_arg; ++k) {
            const double arg =
                n_arg == 1 ? 0.0 : -max_arg + 2.0 * max_arg * static_cast<double>(k) / (n_arg - 1);
            out.emplace_back(mod * std::cos(arg), mod * std::sin(arg));
        }
    }
    return out;
}

std::vector<std::vector<double>> xi_lattice(std::size_t dim, int n_mag, int n_dir, double lo,
                                            double hi) {
    if (dim < 1 || dim > 2) throw std::invalid_argument("xi_lattice: dim must be 1 or 2");
    if (n_mag < 1 || n_dir < 1 || lo <= 0.0 || hi < lo)
        throw std::invalid_argument("xi_lattice: bad lattice parameters");
    std::vector<std::vector<double>> dirs;
    if (dim == 1) {
        dirs = {{1.0}, {-1.0}};
    } else {
        for (int d = 0; d < n_dir; ++d) {
            const double ang = 2.0 * M_PI * d / n_dir;
            dirs.push_back({std::cos(ang), std::sin(ang)});
        }
    }
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(n_mag) * dirs.size());
    for (int i = 0; i < n_mag; ++i) {
        const double frac = n_mag == 1 ? 0.0 : static_cast<double>(i) / (n_mag - 1);
        const double mag = lo * std::pow(hi / lo, frac);
        for (const auto& d : dirs) {
            std::vector<double> xi(dim);
            for (std::size_t j = 0; j < dim; ++j) xi[j] = mag * d[j];
            out.push_back(std::move(xi));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scan driver

SymbolScanReport mikhlin_scan(const SymbolFamily& family, SymbolTarget target, double p, double m,
                              std::span<const cdouble> lambdas,
                              const std::vector<std::vector<double>>& xis, int power_iters,
                              int n_probes, unsigned seed) {
    if (!pair_admissible(p, m, family.drift_exponent()))
        throw std::invalid_argument("mikhlin_scan: inadmissible (p, m) pair");
    const std::size_t dim = family.dim();
    const unsigned n_masks = 1u << dim;
    const std::size_t n_comp = target == SymbolTarget::xi_dy_r ? dim : 1;
    const std::vector<double> w = family.grid().cell_masses(m);

    SymbolScanReport rep;
    rep.target = target;
    rep.p = p;
    rep.m = m;
    rep.drift_exponent = family.drift_exponent();
    rep.a = family.anisotropy();
    rep.points.reserve(lambdas.size() * xis.size() * n_masks * n_comp);

    for (const cdouble lambda : lambdas) {
        for (const auto& xi : xis) {
            const SymbolFamily::Point pt = family.at(lambda, xi);
            for (unsigned mask = 0; mask < n_masks; ++mask) {
                for (std::size_t comp = 0; comp < n_comp; ++comp) {
                    const LinearOpZ op = family.weighted_member(pt, target, mask, comp);
                    ScanPoint sp;
                    sp.lambda = lambda;
                    sp.xi = xi;
                    sp.alpha_mask = mask;
                    sp.component = comp;
                    if (p == 2.0) {
                        sp.norm = op_norm_l2(op, w, power_iters).value;
                        sp.two_sided = true;
                    } else {
                        sp.norm = op_norm_lp_lower(op, family.grid(), p, m, n_probes, seed);
                        sp.two_sided = false;
                    }
                    rep.sup = std::max(rep.sup, sp.norm);
                    rep.points.push_back(std::move(sp));
                }
            }
        }
    }
    return rep;
}

double lambda_resolvent_norm_selfadjoint(const BesselOperator& base, cdouble lambda, double xisq) {
    const SymTridiagEigen& es = base.eigensystem();
    double best = 0.0;
    for (int k = 0; k < es.n; ++k) {
        const double denom = std::abs(lambda + cdouble(xisq - es.values[static_cast<std::size_t>(k)]));
        if (denom <= 0.0) throw std::runtime_error("resolvent norm oracle: singular point");
        best = std::max(best, std::abs(lambda) / denom);
    }
    return best;
}

EnvelopeDominationFit fit_envelope_domination(const SymbolFamily& family, cdouble lambda,
                                              std::span<const double> xi, bool derivative,
                                              std::span<const double> k_grid, double kappa,
                                              int n_probes, unsigned seed) {
    if (k_grid.empty()) throw std::invalid_argument("fit_envelope_domination: empty k grid");
    const RadialGrid& g = family.grid();
    const std::size_t n = g.cells();
    const SymbolFamily::Point pt = family.at(lambda, xi);
    const double arg_base = std::abs(lambda) + pt.xisq;

    ProbeGenerator gen(seed);
    std::vector<std::vector<double>> probes;
    std::vector<std::vector<cdouble>> images;
    std::vector<LaplaceEnvelope> envelopes;
    probes.reserve(static_cast<std::size_t>(n_probes));
    for (int i = 0; i < n_probes; ++i) {
        std::vector<double> f = gen.radial(g);
        for (double& v : f) v = std::abs(v);
        double peak = 0.0;
        for (double v : f) peak = std::max(peak, v);
        if (peak <= 0.0) continue;
        std::vector<cdouble> fc(n);
        for (std::size_t j = 0; j < n; ++j) fc[j] = f[j];
        std::vector<cdouble> u = pt.resolvent.apply(fc);
        if (derivative) u = pt.derivative.apply(u);
        envelopes.emplace_back(g, family.drift_exponent(), kappa, std::span<const double>(f));
        probes.push_back(std::move(f));
        images.push_back(std::move(u));
    }

    EnvelopeDominationFit fit;
    fit.probes = probes.size();
    if (probes.empty()) return fit;

    double best_c = std::numeric_limits<double>::infinity();
    double best_k = k_grid[0];
    for (const double k : k_grid) {
        double c_k = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const std::vector<double> env = envelopes[i].apply(k * arg_base, derivative);
            double env_peak = 0.0;
            for (double v : env) env_peak = std::max(env_peak, v);
            if (env_peak <= 0.0) {
                c_k = std::numeric_limits<double>::infinity();
                break;
            }
            for (std::size_t j = 0; j < n; ++j) {
                const double mag = std::abs(images[i][j]);
                if (mag <= 1e-14 * env_peak) continue;
                if (env[j] <= 1e-14 * env_peak) {
                    c_k = std::numeric_limits<double>::infinity();
                    break;
                }
                c_k = std::max(c_k, mag / env[j]);
            }
            if (std::isinf(c_k)) break;
        }
        if (c_k < best_c) {
            best_c = c_k;
            best_k = k;
        }
    }
    fit.constant = best_c;
    fit.k = best_k;
    fit.finite = std::isfinite(best_c);
    return fit;
}

double square_function_ratio(const std::vector<LinearOpZ>& ops,
                             const std::vector<std::vector<cdouble>>& fs, const RadialGrid& g,
                             double p, double m) {
    if (ops.empty() || ops.size() != fs.size())
        throw std::invalid_argument("square_function_ratio: family size mismatch");
    const std::size_t n = g.cells();
    std::vector<double> num_sq(n, 0.0), den_sq(n, 0.0);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (fs[i].size() != n) throw std::invalid_argument("square_function_ratio: probe size");
        const std::vector<cdouble> sf = ops[i].apply(fs[i]);
        for (std::size_t j = 0; j < n; ++j) {
            num_sq[j] += std::norm(sf[j]);
            den_sq[j] += std::norm(fs[i][j]);
        }
    }
    std::vector<double> num(n), den(n);
    for (std::size_t j = 0; j < n; ++j) {
        num[j] = std::sqrt(num_sq[j]);
        den[j] = std::sqrt(den_sq[j]);
    }
    const double den_norm = weighted_norm(g, std::span<const double>(den), p, m);
    if (den_norm <= 1e-300) throw std::invalid_argument("square_function_ratio: zero denominator");
    return weighted_norm(g, std::span<const double>(num), p, m) / den_norm;
}

}  // namespace singulax
