// Microbenchmarks for the hot paths of the operator library: banded solves,
// semigroup stepping, the slab FFT round trip, and one multiplier-family
// norm evaluation.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "singulax/bessel.hpp"
#include "singulax/grid.hpp"
#include "singulax/halfspace.hpp"
#include "singulax/linalg.hpp"
#include "singulax/multiplier.hpp"
#include "singulax/oscillatory.hpp"
#include "singulax/probes.hpp"

namespace {

using singulax::cdouble;

void bm_tridiag_factor_solve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const singulax::RadialGrid g(n, 10.0, 2.0);
    const singulax::BesselOperator op(g, 0.5);
    singulax::TridiagZ m;
    m.diag.assign(n, cdouble(0.0, 0.0));
    m.sub.assign(n - 1, cdouble(0.0, 0.0));
    m.sup.assign(n - 1, cdouble(0.0, 0.0));
    const singulax::TridiagD& b = op.matrix();
    for (std::size_t i = 0; i < n; ++i) m.diag[i] = cdouble(2.0, 0.3) - b.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m.sub[i] = -b.sub[i];
        m.sup[i] = -b.sup[i];
    }
    singulax::ProbeGenerator gen(11);
    std::vector<cdouble> f = gen.radial_complex(g);
    for (auto _ : state) {
        const singulax::FactoredTridiagZ fac(m);
        std::vector<cdouble> u = f;
        fac.solve_in_place(u);
        benchmark::DoNotOptimize(u.data());
    }
}
BENCHMARK(bm_tridiag_factor_solve)->Arg(256)->Arg(512)->Arg(1024);

void bm_semigroup_column(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const singulax::RadialGrid g(n, 10.0, 2.0);
    const singulax::OscillatoryOperator op(g, 0.5, 1.0);
    for (auto _ : state) {
        const std::vector<cdouble> col =
            op.kernel_column(cdouble(0.5, 0.0), n / 3, singulax::OscScheme::crank_nicolson, 64);
        benchmark::DoNotOptimize(col.data());
    }
}
BENCHMARK(bm_semigroup_column)->Arg(256)->Arg(512);

void bm_halfspace_apply(benchmark::State& state) {
    singulax::HalfSpaceConfig cfg;
    cfg.dim_x = 1;
    cfg.nx = static_cast<std::size_t>(state.range(0));
    cfg.periods = {6.283185307179586477};
    cfg.grid = singulax::RadialGrid(128, 6.0, 2.0);
    cfg.drift_exponent = 0.5;
    cfg.a = {0.4};
    const singulax::HalfSpaceSolver solver(std::move(cfg));
    singulax::ProbeGenerator gen(7);
    const std::vector<cdouble> u = gen.planar(1, static_cast<int>(state.range(0)),
                                              6.283185307179586477, solver.config().grid);
    for (auto _ : state) {
        const std::vector<cdouble> v = solver.apply(u);
        benchmark::DoNotOptimize(v.data());
    }
}
BENCHMARK(bm_halfspace_apply)->Arg(32)->Arg(64);

void bm_multiplier_norm(benchmark::State& state) {
    const singulax::RadialGrid g(static_cast<std::size_t>(state.range(0)), 8.0, 2.0);
    const singulax::SymbolFamily fam(g, 0.5, {0.4});
    const singulax::SymbolFamily::Point pt = fam.at(cdouble(1.0, 0.5), std::vector<double>{1.3});
    const singulax::LinearOpZ member =
        fam.weighted_member(pt, singulax::SymbolTarget::lambda_r, 1u);
    for (auto _ : state) {
        const singulax::NormEstimate est = singulax::op_norm_l2(member, fam.base().masses(), 32);
        benchmark::DoNotOptimize(est.value);
    }
}
BENCHMARK(bm_multiplier_norm)->Arg(96)->Arg(192);

}  // namespace

BENCHMARK_MAIN();
