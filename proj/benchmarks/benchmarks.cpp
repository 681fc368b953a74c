// Microbenchmarks for the hot paths: table construction, attractor analysis,
// the effective suppression recursion, statevector simulation, and the full
// search driver. Run ./qbn_benchmarks --benchmark_filter=... to narrow down.

#include <benchmark/benchmark.h>

#include <qbn/bnet.hpp>
#include <qbn/dynamics.hpp>
#include <qbn/rng.hpp>
#include <qbn/search.hpp>
#include <qbn/simulator.hpp>
#include <qbn/synthesis.hpp>

#include <string>
#include <vector>

using namespace qbn;

namespace {

// Deterministic rule soup: every gene reads three ring neighbours, which
// keeps the truth tables nontrivial at any size without a parser dependency
// on external files.
NetworkSpec ring_network(int n) {
    std::string text = "targets, factors\n";
    auto g = [&](int i, int k) { return "g" + std::to_string((i + k) % n); };
    for (int i = 0; i < n; ++i)
        text += g(i, 0) + ", (" + g(i, 1) + " & !" + g(i, 2) + ") | " + g(i, 3) + "\n";
    return parse_network(text);
}

Circuit random_layered_circuit(int qubits, int gates, std::uint64_t seed) {
    Rng rng(seed);
    Circuit c(qubits);
    auto pick = [&] { return static_cast<int>(rng.uniform() * qubits) % qubits; };
    for (int i = 0; i < gates; ++i) {
        const int t = pick();
        switch (i % 3) {
        case 0: c.h(t); break;
        case 1: {
            int ctl = pick();
            if (ctl == t) ctl = (ctl + 1) % qubits;
            c.mcx({{ctl, Polarity::Positive}}, t);
            break;
        }
        default: c.mcphase({}, t, 0.31 + 0.01 * (i % 7)); break;
        }
    }
    return c;
}

} // namespace

static void BM_ParseNetwork(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::string text = "targets, factors\n";
    auto g = [&](int i, int k) { return "g" + std::to_string((i + k) % n); };
    for (int i = 0; i < n; ++i)
        text += g(i, 0) + ", (" + g(i, 1) + " & !" + g(i, 2) + ") | " + g(i, 3) + "\n";
    for (auto _ : state) benchmark::DoNotOptimize(parse_network(text));
}
BENCHMARK(BM_ParseNetwork)->Arg(8)->Arg(16)->Arg(24);

static void BM_PprmExpansion(benchmark::State& state) {
    NetworkSpec spec = ring_network(static_cast<int>(state.range(0)));
    for (auto _ : state)
        for (const auto& rule : spec.rules)
            benchmark::DoNotOptimize(pprm_expansion(*rule, spec));
}
BENCHMARK(BM_PprmExpansion)->Arg(8)->Arg(16);

static void BM_TransitionTable(benchmark::State& state) {
    NetworkSpec spec = ring_network(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_transition_table(spec));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_TransitionTable)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

static void BM_AttractorAnalysis(benchmark::State& state) {
    TransitionTable table = build_transition_table(ring_network(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(analyze_attractors(table));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(table.size()));
}
BENCHMARK(BM_AttractorAnalysis)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

static void BM_EffectiveSuppression(benchmark::State& state) {
    TransitionTable table = build_transition_table(ring_network(static_cast<int>(state.range(0))));
    AttractorAnalysis analysis = analyze_attractors(table);
    const AttractorInfo& first = analysis.attractors.front();
    SuppressionPlan plan = plan_suppression(first.basin_size, table.size());
    for (auto _ : state)
        benchmark::DoNotOptimize(apply_effective_suppression(table, first.cycle_states, plan));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(table.size()));
}
BENCHMARK(BM_EffectiveSuppression)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

static void BM_DenseSimulation(benchmark::State& state) {
    const int qubits = static_cast<int>(state.range(0));
    const int gates = 200;
    Circuit c = random_layered_circuit(qubits, gates, 42);
    SimOptions opt;
    opt.backend = Backend::Dense;
    for (auto _ : state) benchmark::DoNotOptimize(run(c, opt));
    state.SetItemsProcessed(state.iterations() * gates);
}
BENCHMARK(BM_DenseSimulation)->Arg(8)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_SparseBasisEvolution(benchmark::State& state) {
    // the permutation workload behind the circuit-faithful search backend:
    // X/MCX chains acting on a single basis state stay single-entry sparse
    const int n = static_cast<int>(state.range(0));
    NetworkSpec spec = ring_network(n);
    const int T = 4;
    Circuit c = synthesize_evolution(spec, T);
    SimOptions opt;
    opt.backend = Backend::Sparse;
    StateVector init = StateVector::basis_state(c.num_qubits, 1, opt);
    for (auto _ : state) benchmark::DoNotOptimize(run(c, init));
    state.SetItemsProcessed(state.iterations() * c.gate_count());
}
BENCHMARK(BM_SparseBasisEvolution)->Arg(4)->Arg(6)->Arg(8);

static void BM_SuppressionCircuit(benchmark::State& state) {
    // end-to-end gate-level deletion of the first basin on (T+1)*n qubits
    const int n = static_cast<int>(state.range(0));
    NetworkSpec spec = ring_network(n);
    TransitionTable table = build_transition_table(spec);
    AttractorAnalysis analysis = analyze_attractors(table);
    const AttractorInfo& first = analysis.attractors.front();
    SuppressionPlan plan = plan_suppression(first.basin_size, table.size());
    const int T = transient_horizon(table);
    Circuit c = build_suppression_circuit(spec, first.cycle_states, plan, T);
    for (auto _ : state) benchmark::DoNotOptimize(run(c));
    state.SetLabel("T=" + std::to_string(T) + " gates=" + std::to_string(c.gate_count()));
}
BENCHMARK(BM_SuppressionCircuit)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_QuantumCountingEstimate(benchmark::State& state) {
    NetworkSpec spec = ring_network(4);
    TransitionTable table = build_transition_table(spec);
    AttractorAnalysis analysis = analyze_attractors(table);
    QuantumCounting counter(spec, analysis.attractors.front().cycle_states,
                            transient_horizon(table), 7);
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(counter.estimate(seed++));
}
BENCHMARK(BM_QuantumCountingEstimate);

static void BM_SearchEffective(benchmark::State& state) {
    NetworkSpec spec = ring_network(static_cast<int>(state.range(0)));
    SearchConfig cfg;
    cfg.shots = 1024;
    cfg.seed = 7;
    for (auto _ : state) benchmark::DoNotOptimize(run_search(spec, cfg));
}
BENCHMARK(BM_SearchEffective)->Arg(5)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
