#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "helpers.hpp"
#include "qbn/bnet.hpp"
#include "qbn/dynamics.hpp"
#include "qbn/errors.hpp"
#include "qbn/search.hpp"
#include "qbn/simulator.hpp"
#include "qbn/synthesis.hpp"

using namespace qbn;

namespace {

constexpr double kPi = std::numbers::pi;

const char* kCortical =
    "targets, factors\n"
    "Coup_tfi, !Fgf8 & !Sp8\n"
    "Emx2, Coup_tfi & !Fgf8 & !Pax6 & !Sp8\n"
    "Fgf8, Fgf8 & Sp8 & !Emx2\n"
    "Pax6, !Coup_tfi & !Emx2\n"
    "Sp8, Fgf8 & !Emx2\n";

const char* kDemo4 =
    "targets, factors\n"
    "a, a & b\n"
    "b, a | b\n"
    "c, d\n"
    "d, !c\n";

// Attractor cycles rotated to their smallest state and sorted, so discovery
// order is irrelevant when comparing against the exhaustive analysis.
std::vector<std::vector<StateIndex>> canonical(std::vector<std::vector<StateIndex>> cycles) {
    for (auto& cyc : cycles)
        std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
    std::sort(cycles.begin(), cycles.end());
    return cycles;
}

std::vector<std::vector<StateIndex>> expected_cycles(const TransitionTable& table) {
    std::vector<std::vector<StateIndex>> out;
    for (const AttractorInfo& a : find_attractors(table)) out.push_back(a.cycle_states);
    return out;
}

std::vector<std::vector<StateIndex>> reported_cycles(const SearchReport& report) {
    std::vector<std::vector<StateIndex>> out;
    for (const AttractorRecord& a : report.attractors) {
        std::vector<StateIndex> cyc;
        for (const std::string& s : a.cycle) cyc.push_back(parse_display_state(s));
        out.push_back(std::move(cyc));
    }
    return out;
}

// Basin of a known-attractor union: all states whose horizon-step image lies
// on one of the listed cycles.
std::vector<StateIndex> basin_union(const TransitionTable& table,
                                    const std::vector<StateIndex>& known) {
    const auto pm = table.power_map(static_cast<std::uint64_t>(transient_horizon(table)));
    std::vector<StateIndex> out;
    for (StateIndex x = 0; x < table.size(); ++x)
        if (std::find(known.begin(), known.end(), pm[x]) != known.end()) out.push_back(x);
    return out;
}

} // namespace

TEST_CASE("suppression plans match their closed forms") {
    SuppressionPlan p1 = plan_suppression(12, 16);
    CHECK(p1.beta == doctest::Approx(kPi / 3).epsilon(1e-12));
    CHECK(p1.rounds == 1);
    CHECK(p1.phi == doctest::Approx(-kPi).epsilon(1e-7));

    SuppressionPlan p2 = plan_suppression(4, 32);
    CHECK(p2.rounds == 1);
    CHECK(p2.phi == doctest::Approx(-1.1278852827212575).epsilon(1e-9));

    SuppressionPlan p3 = plan_suppression(28, 32);
    CHECK(p3.rounds == 2);
    CHECK(p3.beta == doctest::Approx(1.2094292028881888).epsilon(1e-12));
    CHECK(p3.phi == doctest::Approx(-2.1268800471555034).epsilon(1e-9));

    SuppressionPlan none = plan_suppression(0, 8);
    CHECK(none.rounds == 0);
    CHECK(none.phi == 0.0);
    CHECK(none.beta == 0.0);

    CHECK_THROWS_AS(plan_suppression(8, 8), AllStatesMarked);
    CHECK_THROWS_AS(plan_suppression(9, 8), IndexOutOfRange);
}

TEST_CASE("one round suffices exactly up to the three-quarters boundary") {
    for (std::uint64_t N : {4ULL, 8ULL, 16ULL, 32ULL, 64ULL, 1024ULL, 4096ULL}) {
        CHECK(plan_suppression(3 * N / 4, N).rounds == 1);
        if (3 * N / 4 + 1 < N) // for N=4 the next step up marks everything
            CHECK(plan_suppression(3 * N / 4 + 1, N).rounds >= 2);
    }
    // the round count is the minimal J with J*(pi - 2*beta) >= beta
    Rng rng(61001);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t N = 2 + static_cast<std::uint64_t>(rng.uniform() * 4094);
        const std::uint64_t M = 1 + static_cast<std::uint64_t>(rng.uniform() * (N - 1));
        SuppressionPlan p = plan_suppression(M, N);
        const double beta = std::asin(std::sqrt(static_cast<double>(M) / N));
        CHECK(p.rounds * (kPi - 2 * beta) >= beta - 1e-9);
        if (p.rounds > 1) CHECK((p.rounds - 1) * (kPi - 2 * beta) < beta + 1e-9);
    }
}

TEST_CASE("signed phase flips under the audit switch") {
    SuppressionPlan p = plan_suppression(4, 32);
    CHECK(signed_phi(p, PhiSign::Negative) == p.phi);
    CHECK(signed_phi(p, PhiSign::Positive) == -p.phi);
}

TEST_CASE("amplitude recursion deletes marked basins exactly for both phase signs") {
    Rng rng(61002);
    int done = 0;
    while (done < 120) {
        const int n = 2 + static_cast<int>(rng.uniform() * 4);
        TransitionTable table = build_transition_table(qbn_test::random_network(rng, n));
        AttractorAnalysis analysis = analyze_attractors(table);
        if (analysis.attractors.size() < 2) continue;
        ++done;

        // mark a random nonempty strict subset of attractors
        std::vector<StateIndex> known;
        std::uint64_t mass = 0;
        const std::size_t pick =
            1 + static_cast<std::size_t>(rng.uniform() * (analysis.attractors.size() - 1));
        for (std::size_t i = 0; i < pick; ++i) {
            const AttractorInfo& a = analysis.attractors[i];
            known.insert(known.end(), a.cycle_states.begin(), a.cycle_states.end());
            mass += a.basin_size;
        }
        std::sort(known.begin(), known.end());

        SuppressionPlan plan = plan_suppression(mass, table.size());
        const PhiSign sign = (done % 2 == 0) ? PhiSign::Negative : PhiSign::Positive;
        std::vector<cplx> amps = apply_effective_suppression(table, known, plan, sign);

        const std::vector<StateIndex> marked = basin_union(table, known);
        double norm = 0.0;
        double survivor = -1.0;
        std::size_t m_at = 0;
        for (StateIndex x = 0; x < table.size(); ++x) {
            norm += std::norm(amps[x]);
            if (m_at < marked.size() && marked[m_at] == x) {
                ++m_at;
                CHECK(std::norm(amps[x]) <= 1e-20);
            } else if (survivor < 0) {
                survivor = std::abs(amps[x]);
            } else {
                CHECK(std::abs(std::abs(amps[x]) - survivor) <= 1e-12 * survivor);
            }
        }
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(survivor ==
              doctest::Approx(1.0 / std::sqrt(static_cast<double>(table.size() - mass)))
                  .epsilon(1e-9));
    }
}

TEST_CASE("amplitude recursion demands a transition-closed marked set") {
    TransitionTable table = build_transition_table(parse_network(kDemo4));
    SuppressionPlan plan = plan_suppression(4, 16);
    // state 1 is on a cycle, but its successor 3 is missing from the set
    CHECK_THROWS_AS(apply_effective_suppression(table, std::vector<StateIndex>{1}, plan), NotClosedUnderTransition);
    CHECK_NOTHROW(apply_effective_suppression(table, std::vector<StateIndex>{0, 1, 2, 3}, plan));
}

TEST_CASE("basin phase oracle imprints the conjugate phase on marked inputs only") {
    Rng rng(61003);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 2);
        NetworkSpec spec = qbn_test::random_network(rng, n);
        TransitionTable table = build_transition_table(spec);
        AttractorAnalysis analysis = analyze_attractors(table);
        const int T = transient_horizon(table);

        const AttractorInfo& a =
            analysis.attractors[static_cast<std::size_t>(rng.uniform() *
                                                         analysis.attractors.size()) %
                                analysis.attractors.size()];
        const double phi = 0.7;
        Circuit oracle = build_basin_phase_oracle(spec, a.cycle_states, T, phi);
        CHECK(oracle.num_qubits == (T + 1) * n);

        const auto pm = table.power_map(static_cast<std::uint64_t>(T));
        for (StateIndex x = 0; x < table.size(); ++x) {
            StateVector st =
                StateVector::basis_state(oracle.num_qubits, reverse_bits(x, n));
            st.apply(oracle);
            const bool marked = std::find(a.cycle_states.begin(), a.cycle_states.end(),
                                          pm[x]) != a.cycle_states.end();
            const cplx expect = marked ? std::polar(1.0, -phi) : cplx(1.0, 0.0);
            CHECK(st.support_size() == 1); // ancilla registers are uncomputed
            CHECK(std::abs(st.amplitude(reverse_bits(x, n)) - expect) <= 1e-12);
        }
    }
}

TEST_CASE("basin phase oracle rejects sets that are not closed under transition") {
    NetworkSpec spec = parse_network(kDemo4);
    CHECK_THROWS_AS(build_basin_phase_oracle(spec, std::vector<StateIndex>{1}, 1, 0.5),
                    NotClosedUnderTransition);
}

TEST_CASE("an empty marked set produces an empty oracle") {
    NetworkSpec spec = parse_network(kDemo4);
    Circuit oracle = build_basin_phase_oracle(spec, {}, 2, 0.5);
    CHECK(oracle.gate_count() == 0);
    CHECK(oracle.num_qubits == 12);
}

TEST_CASE("zero-state phase gate phases only the all-zeros state") {
    const double phi = -1.3;
    Circuit c = build_zero_phase(3, phi);
    auto m = qbn_test::circuit_matrix(c);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t k = 0; k < 8; ++k) {
            const cplx want =
                r != k ? cplx(0.0, 0.0) : (r == 0 ? std::polar(1.0, phi) : cplx(1.0, 0.0));
            CHECK(std::abs(m[r][k] - want) <= 1e-12);
        }
}

TEST_CASE("gate-level suppression equals the amplitude recursion exactly") {
    Rng rng(61004);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 2);
        NetworkSpec spec = qbn_test::random_network(rng, n);
        TransitionTable table = build_transition_table(spec);
        AttractorAnalysis analysis = analyze_attractors(table);
        if (analysis.attractors.size() < 2) continue;
        const int T = transient_horizon(table);

        const AttractorInfo& a = analysis.attractors[0];
        std::vector<StateIndex> known = a.cycle_states;
        std::sort(known.begin(), known.end());
        SuppressionPlan plan = plan_suppression(a.basin_size, table.size());

        Circuit c = build_suppression_circuit(spec, known, plan, T);
        StateVector st = run(c);
        std::vector<cplx> expect = apply_effective_suppression(table, known, plan);

        // the final state lives on register 0 with ancillas restored to zero
        for (StateIndex x = 0; x < table.size(); ++x)
            CHECK(std::abs(st.amplitude(reverse_bits(x, n)) - expect[x]) <= 1e-10);
        CHECK(st.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("suppressed basins vanish from the measured register") {
    NetworkSpec spec = parse_network(kCortical);
    TransitionTable table = build_transition_table(spec);
    AttractorAnalysis analysis = analyze_attractors(table);
    const AttractorInfo& large = analysis.attractors[1]; // 11000, basin 28
    SuppressionPlan plan = plan_suppression(large.basin_size, table.size());
    CHECK(plan.rounds == 2);

    const int T = transient_horizon(table);
    Circuit c = build_suppression_circuit(spec, large.cycle_states, plan, T);
    c.append(synthesize_evolution(spec, T));
    StateVector st = run(c);

    RegisterLayout lay{T, table.n};
    auto dist = outcome_distribution(st, lay.register_qubits(T));
    double p_small = 0.0;
    double p_large = 0.0;
    for (const auto& [outcome, p] : dist) {
        const StateIndex s = reverse_bits(static_cast<StateIndex>(outcome), table.n);
        if (s == parse_display_state("11000")) p_large += p;
        if (s == parse_display_state("00111")) p_small += p;
    }
    CHECK(p_large <= 1e-9); // only floating-point dust may remain
    CHECK(p_small == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("counting transform without swaps is the bit-reversed Fourier matrix") {
    const int t = 3;
    const std::vector<int> qubits = {0, 1, 2};
    Circuit c = qft_no_swap(t, qubits);
    auto m = qbn_test::circuit_matrix(c);
    const double root = 1.0 / std::sqrt(8.0);
    for (BasisIndex r = 0; r < 8; ++r) {
        const BasisIndex rev = reverse_bits(static_cast<StateIndex>(r), t);
        for (BasisIndex k = 0; k < 8; ++k) {
            const cplx want = std::polar(root, 2.0 * kPi * static_cast<double>(rev * k) / 8.0);
            CHECK(std::abs(m[r][k] - want) <= 1e-12);
        }
    }
}

TEST_CASE("quantum counting is certain for representable marked fractions") {
    // every state of the identity network is a fixed point, so any subset of
    // states is a valid union of attractor basins
    NetworkSpec id2 = qbn_test::identity_network(2);

    // aside from floating-point dust the distribution concentrates on one value
    auto mode_of = [](const auto& dist) {
        auto it = std::max_element(dist.begin(), dist.end(), [](const auto& a, const auto& b) {
            return a.second < b.second;
        });
        REQUIRE(it != dist.end());
        CHECK(it->second == doctest::Approx(1.0).epsilon(1e-9));
        return it->first;
    };

    QuantumCounting zero(id2, std::vector<StateIndex>{}, 0, 4);
    CHECK(mode_of(zero.estimate_distribution()) == 0);

    QuantumCounting half(id2, std::vector<StateIndex>{0, 1}, 0, 4);
    CHECK(mode_of(half.estimate_distribution()) == 2);

    QuantumCounting full(id2, std::vector<StateIndex>{0, 1, 2, 3}, 0, 4);
    CHECK(mode_of(full.estimate_distribution()) == 4);

    // a real basin: the middle attractor of the demo network owns half the space
    NetworkSpec demo = parse_network(kDemo4);
    QuantumCounting mid(demo, std::vector<StateIndex>{4, 5, 6, 7}, 1, 5);
    CHECK(mode_of(mid.estimate_distribution()) == 8);

    CHECK(mid.estimate(123) == 8);
    CHECK(quantum_count(demo, std::vector<StateIndex>{4, 5, 6, 7}, 1, 5, 99) == 8);
}

TEST_CASE("quantum counting distribution matches the two-dimensional phase model") {
    // four marked states out of 32 with eight counting qubits; the reference
    // value comes from phase estimation of the rotation on the marked/unmarked
    // plane, computed with an independent implementation
    NetworkSpec id5 = qbn_test::identity_network(5);
    QuantumCounting qc(id5, std::vector<StateIndex>{3, 8, 17, 30}, 0, 8);
    auto dist = qc.estimate_distribution();
    double p4 = 0.0;
    double total = 0.0;
    for (const auto& [m, p] : dist) {
        if (m == 4) p4 += p;
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p4 == doctest::Approx(0.903471304525).epsilon(1e-8));

    CHECK(qc.estimate(7) == qc.estimate(7)); // deterministic given the seed
}

TEST_CASE("quantum counting validates its qubit budget") {
    NetworkSpec id2 = qbn_test::identity_network(2);
    CHECK_THROWS_AS(QuantumCounting(id2, std::vector<StateIndex>{0}, 0, 0), IndexOutOfRange);
    CHECK_THROWS_AS(QuantumCounting(id2, std::vector<StateIndex>{0}, 10, 41),
                    CapacityExceeded); // 22 work + 41 counting > 62
}

TEST_CASE("search finds all attractors of the cortical network in two runs") {
    NetworkSpec spec = parse_network(kCortical);
    SearchConfig cfg;
    cfg.seed = 7;
    SearchReport report = run_search(spec, cfg);

    CHECK(report.genes == std::vector<std::string>{"Coup_tfi", "Emx2", "Fgf8", "Pax6", "Sp8"});
    CHECK(report.total_states == 32);
    CHECK(report.steps == 5);
    REQUIRE(report.runs.size() == 2);
    REQUIRE(report.attractors.size() == 2);
    CHECK(canonical(reported_cycles(report)) ==
          canonical(expected_cycles(build_transition_table(spec))));

    // the second run's histogram is pure: the known basin is deleted exactly
    const RunRecord& second = report.runs[1];
    CHECK(second.counted_marked + report.attractors[1].basin_size == 32);
    REQUIRE(second.histogram.counts.size() == 1);
    CHECK(second.histogram.counts.begin()->second == cfg.shots);
    CHECK(second.histogram.counts.begin()->first == report.attractors[1].cycle[0]);
    CHECK(second.rejected.empty());
}

TEST_CASE("search is deterministic: same seed, same serialized report") {
    NetworkSpec spec = parse_network(kDemo4);
    SearchConfig cfg;
    cfg.seed = 11;
    cfg.shots = 500;
    SearchReport a = run_search(spec, cfg);
    SearchReport b = run_search(spec, cfg);
    CHECK(a.to_json() == b.to_json());

    cfg.seed = 12;
    SearchReport c = run_search(spec, cfg);
    CHECK(a.to_json() != c.to_json()); // the histograms differ across seeds
}

TEST_CASE("search recovers the attractor sets of random networks") {
    Rng rng(61005);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform() * 5);
        NetworkSpec spec = qbn_test::random_network(rng, n);
        TransitionTable table = build_transition_table(spec);

        SearchConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(trial) + 1;
        cfg.shots = 256;
        SearchReport report = run_search(spec, cfg);

        CHECK(canonical(reported_cycles(report)) == canonical(expected_cycles(table)));
        CHECK(report.runs.size() == report.attractors.size());
        for (const RunRecord& r : report.runs) CHECK(r.rejected.empty());

        // basin sizes in the report match the analysis
        AttractorAnalysis analysis = analyze_attractors(table);
        std::uint64_t total = 0;
        for (const AttractorRecord& a : report.attractors) total += a.basin_size;
        CHECK(total == table.size());
        (void)analysis;
    }
}

TEST_CASE("search with quantum counting and the circuit backend stays exact") {
    NetworkSpec spec = parse_network(kDemo4);
    SearchConfig cfg;
    cfg.seed = 5;
    cfg.shots = 400;
    cfg.counting = CountingMode::Quantum;
    cfg.backend = SearchBackend::CircuitFaithful;
    SearchReport report = run_search(spec, cfg);
    CHECK(canonical(reported_cycles(report)) ==
          canonical(expected_cycles(build_transition_table(spec))));
    CHECK(report.runs.size() == 3);

    const char* kChain =
        "a, a\nb, a\nc, b\nd, c\n";
    NetworkSpec chain = parse_network(kChain);
    SearchConfig ccfg;
    ccfg.seed = 2;
    ccfg.shots = 300;
    ccfg.counting = CountingMode::Quantum;
    SearchReport creport = run_search(chain, ccfg);
    REQUIRE(creport.runs.size() == 2);
    CHECK(creport.runs[0].counted_marked == 0);
    CHECK(creport.runs[1].counted_marked == 8); // half the space, exactly countable
}

TEST_CASE("both backends induce the same measurement distribution") {
    Rng rng(61006);
    int done = 0;
    while (done < 15) {
        const int n = 1 + static_cast<int>(rng.uniform() * 3);
        NetworkSpec spec = qbn_test::random_network(rng, n);
        TransitionTable table = build_transition_table(spec);
        const int T = transient_horizon(table);
        if (T > 2) continue;
        AttractorAnalysis analysis = analyze_attractors(table);
        ++done;

        // compare after suppressing each single attractor (and suppressing nothing)
        for (int which = -1; which < static_cast<int>(analysis.attractors.size()); ++which) {
            std::vector<StateIndex> known;
            std::uint64_t mass = 0;
            if (which >= 0) {
                const AttractorInfo& a = analysis.attractors[static_cast<std::size_t>(which)];
                known = a.cycle_states;
                std::sort(known.begin(), known.end());
                mass = a.basin_size;
            }
            if (mass == table.size()) continue;
            SuppressionPlan plan = plan_suppression(mass, table.size());

            // effective: amplitudes pushed through T steps of the table
            std::vector<double> eff(table.size(), 0.0);
            std::vector<cplx> amps = apply_effective_suppression(table, known, plan);
            const auto pm = table.power_map(static_cast<std::uint64_t>(T));
            for (StateIndex x = 0; x < table.size(); ++x) eff[pm[x]] += std::norm(amps[x]);

            // circuit-faithful: measure the last register of the full circuit
            Circuit c = build_suppression_circuit(spec, known, plan, T);
            c.append(synthesize_evolution(spec, T));
            StateVector st = run(c);
            RegisterLayout lay{T, table.n};
            std::vector<double> cir(table.size(), 0.0);
            for (const auto& [outcome, p] : outcome_distribution(st, lay.register_qubits(T)))
                cir[reverse_bits(static_cast<StateIndex>(outcome), table.n)] += p;

            double tv = 0.0;
            for (StateIndex x = 0; x < table.size(); ++x) tv += std::abs(eff[x] - cir[x]);
            CHECK(tv / 2.0 <= 1e-9);
        }
    }
}

TEST_CASE("search tolerates mild noise and reports the run that breaks under heavy noise") {
    NetworkSpec spec = parse_network(kDemo4);

    SearchConfig mild;
    mild.seed = 5;
    mild.shots = 200;
    mild.backend = SearchBackend::CircuitFaithful;
    NoiseConfig noise;
    noise.p_x = noise.p_y = noise.p_z = 1e-4;
    noise.seed = 5;
    mild.noise = noise;
    mild.noise_trajectories = 20;
    SearchReport report = run_search(spec, mild);
    CHECK(canonical(reported_cycles(report)) ==
          canonical(expected_cycles(build_transition_table(spec))));

    SearchConfig heavy = mild;
    heavy.shots = 100;
    heavy.seed = 3;
    heavy.retry_budget = 2;
    NoiseConfig loud;
    loud.p_x = loud.p_y = loud.p_z = 0.05;
    loud.seed = 3;
    heavy.noise = loud;
    try {
        run_search(spec, heavy);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(std::string(e.what()).find("retry budget") != std::string::npos);
    }
}

TEST_CASE("effective backend warns when fewer steps than the horizon are requested") {
    NetworkSpec spec = parse_network(kCortical);
    SearchConfig cfg;
    cfg.seed = 1;
    cfg.shots = 100;
    cfg.steps = 2; // horizon is 5
    SearchReport report = run_search(spec, cfg);
    CHECK(!report.warnings.empty());
}
