#include "hplab/approx.hpp"
#include "hplab/asym.hpp"
#include "hplab/geometry.hpp"
#include "hplab/ode.hpp"
#include "hplab/series.hpp"
#include "hplab/zeros.hpp"

#include <benchmark/benchmark.h>

using namespace hplab;

namespace {

BranchConfig fig4_config() { return BranchConfig::parse("1,-1,-1/3*sqrt(-3)", "1/3,1/3,-2/3"); }

void BM_ExpandRational(benchmark::State& state)
{
    const auto cfg = BranchConfig::segment(ratio(1, 4));
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(expand_f(cfg, order, Rational(0)));
}
BENCHMARK(BM_ExpandRational)->Arg(50)->Arg(130);

void BM_HermitePadeRational(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto f = expand_f(BranchConfig::segment(ratio(1, 4)), 3 * n + 10, Rational(0));
    const Laurent<Rational> f2 = f * f;
    for (auto _ : state) benchmark::DoNotOptimize(hp_solve(f, f2, n));
}
BENCHMARK(BM_HermitePadeRational)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_HermitePadeQuadraticField(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto cfg = fig4_config();
    const auto f = expand_f(cfg, 3 * n + 10, QF(Rational(0), Rational(0), cfg.field()));
    const Laurent<QF> f2 = f * f;
    for (auto _ : state) benchmark::DoNotOptimize(hp_solve(f, f2, n));
}
BENCHMARK(BM_HermitePadeQuadraticField)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_HermitePadeFloat(benchmark::State& state)
{
    const auto cfg = BranchConfig::segment(ratio(1, 4));
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_float(cfg, n, 3, FloatPolicy{256, 4096}));
}
BENCHMARK(BM_HermitePadeFloat)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Roots(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto f = expand_f(BranchConfig::segment(ratio(1, 4)), 3 * n + 10, Rational(0));
    const auto sol = hp_solve(f, f * f, n);
    for (auto _ : state) benchmark::DoNotOptimize(find_roots(sol.polys[0], 256));
}
BENCHMARK(BM_Roots)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Chebotarev(benchmark::State& state)
{
    const auto pts = fig4_config().points_c();
    for (auto _ : state) benchmark::DoNotOptimize(chebotarev_point(pts));
}
BENCHMARK(BM_Chebotarev)->Unit(benchmark::kMicrosecond);

void BM_TraceStahl(benchmark::State& state)
{
    const auto pts = fig4_config().points_c();
    const auto v = chebotarev_point(pts);
    for (auto _ : state) benchmark::DoNotOptimize(trace_stahl(pts, v));
}
BENCHMARK(BM_TraceStahl)->Unit(benchmark::kMillisecond);

void BM_DensityProfile(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(density_profile(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DensityProfile)->Arg(64)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_LgEval(benchmark::State& state)
{
    const auto cubic = limit_cubic_p2();
    const std::vector<cplx> path{cplx(1.0, 0.3), cplx(2.5, 0.3), cplx(2.5, 0.1)};
    LgOptions opts;
    opts.branch_point = cplx(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(lg_eval(cubic, path, 20, opts));
}
BENCHMARK(BM_LgEval)->Unit(benchmark::kMillisecond);

void BM_RecoverOde(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto f = expand_f(BranchConfig::segment(ratio(1, 4)), 5 * n + 40, Rational(0));
    const Laurent<Rational> f2 = f * f;
    const auto s = hp_solve(f, f2, n);
    const std::vector<Laurent<Rational>> sols{Laurent<Rational>::from_poly(s.polys[0], f.low_known(), Rational(0)), s.polys[1] * f, s.polys[2] * f2};
    for (auto _ : state) benchmark::DoNotOptimize(recover_ode(sols, 3, order3_profile(2), n));
}
BENCHMARK(BM_RecoverOde)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
