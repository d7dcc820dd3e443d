// Serial reference kernels against their OpenMP counterparts.

#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "duopoly/equilibrium.hpp"
#include "duopoly/game.hpp"
#include "duopoly/monte_carlo.hpp"

using namespace duopoly;

namespace {

struct Setup {
    PayoffModel model;
    PreemptionIntervals a;
    EquilibriumProfile profile;
    SimConfig sim;

    Setup() {
        MarketParams m{0.1, 0.8, 1.0};
        EconParams e;
        e.pi_low = 1.0;
        e.pi_high = 2.0;
        e.theta = 0.7;
        e.inv_cost = 10.0;
        e.xi = 64.0;
        model = build_model(m, e);
        a = find_intervals(model);
        profile = build_profile(model, a, compute_b_sets(model, a));
        sim.n_paths = 4000;
        sim.dt = 1e-3;
    }
};

const Setup& setup() {
    static const Setup s;
    return s;
}

const std::vector<double> kStarts = {0.1, 3.0, 8.0, 12.5, 14.0, 16.0};

void mc_args(const Setup& s, IntervalSet& stop, std::vector<PathPayoff>& payoffs) {
    stop = s.a.as_set().unite(s.profile.b.b3);
    const PayoffModel* m = &s.model;
    payoffs = {discounted_reward([m](double z) { return m->L(z); }, m->market.r),
               discounted_reward([m](double z) { return m->F(z); }, m->market.r)};
}

void BM_PolicyValues(benchmark::State& state) {
    const Setup& s = setup();
    IntervalSet stop;
    std::vector<PathPayoff> payoffs;
    mc_args(s, stop, payoffs);
    omp_set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mc_policy_values(kStarts, stop, payoffs, s.sim, s.model.market));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.sim.n_paths));
}

void BM_PolicyValuesSerial(benchmark::State& state) {
    const Setup& s = setup();
    IntervalSet stop;
    std::vector<PathPayoff> payoffs;
    mc_args(s, stop, payoffs);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::mc_policy_values(kStarts, stop, payoffs, s.sim, s.model.market));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.sim.n_paths));
}

void BM_BSets(benchmark::State& state) {
    const Setup& s = setup();
    omp_set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(compute_b_sets(s.model, s.a));
}

void BM_BSetsSerial(benchmark::State& state) {
    const Setup& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(reference::compute_b_sets(s.model, s.a));
}

std::vector<ProfilePair> pairs(const Setup& s) {
    const StrategySpec i = eager_strategy(s.profile);
    const StrategySpec j = patient_strategy(s.profile);
    std::vector<ProfilePair> out = {{i, j}};
    for (const auto& f : threshold_family(0.5 * s.a.a1_lo, 3.0 * s.a.a2_hi, 10, 5, 5)) out.push_back({f, j});
    return out;
}

void BM_EvaluatePairs(benchmark::State& state) {
    const Setup& s = setup();
    const auto p = pairs(s);
    omp_set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_pairs(kStarts, p, s.sim, s.model));
}

void BM_EvaluatePairsSerial(benchmark::State& state) {
    const Setup& s = setup();
    const auto p = pairs(s);
    for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate_pairs(kStarts, p, s.sim, s.model));
}

}  // namespace

BENCHMARK(BM_PolicyValuesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolicyValues)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BSetsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BSets)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluatePairsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluatePairs)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
