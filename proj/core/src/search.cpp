#include "qbn/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace qbn {

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

SuppressionPlan plan_suppression(std::uint64_t marked, std::uint64_t total) {
    if (total == 0) throw IndexOutOfRange("empty state space");
    if (marked > total)
        throw IndexOutOfRange("marked count " + std::to_string(marked) +
                              " exceeds state count " + std::to_string(total));
    if (marked == total)
        throw AllStatesMarked("all " + std::to_string(total) +
                              " states are marked; nothing would survive suppression");

    SuppressionPlan p;
    p.marked = marked;
    p.total = total;
    if (marked == 0) return p; // no-op plan: J = 0, phi = 0

    const double ratio = static_cast<double>(marked) / static_cast<double>(total);
    p.beta = std::asin(std::sqrt(ratio));
    // The ceiling argument is exactly integral at capacity boundaries
    // (M/N = 3/4 gives exactly 1); nudge below so representation error
    // cannot push J to the next round count.
    double j_exact = p.beta / (std::numbers::pi - 2.0 * p.beta);
    p.rounds = std::max(1, static_cast<int>(std::ceil(j_exact - 1e-9)));

    // cos(arcsin(sqrt(M/N))) = sqrt((N-M)/N), computed directly for accuracy.
    const double cos_beta =
        std::sqrt(static_cast<double>(total - marked) / static_cast<double>(total));
    double arg = std::sin(std::numbers::pi / (4.0 * p.rounds + 2.0)) / cos_beta;
    p.phi = -2.0 * std::asin(std::min(arg, 1.0));
    return p;
}

// ---------------------------------------------------------------------------
// Circuits
// ---------------------------------------------------------------------------

namespace {

StateIndex classical_step(const NetworkSpec& spec, StateIndex x) {
    const int n = spec.n();
    StateIndex y = 0;
    for (int g = 0; g < n; ++g)
        if (eval_expr(*spec.rules[static_cast<std::size_t>(g)], x, spec))
            y |= StateIndex{1} << (n - 1 - g);
    return y;
}

std::vector<StateIndex> sorted_unique(std::span<const StateIndex> states) {
    std::vector<StateIndex> s(states.begin(), states.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

void require_closed(const std::vector<StateIndex>& sorted, const NetworkSpec& spec, int n) {
    for (StateIndex s : sorted) {
        if (s >> n)
            throw IndexOutOfRange("state " + std::to_string(s) + " out of range for " +
                                  std::to_string(n) + " genes");
        StateIndex next = classical_step(spec, s);
        if (!std::binary_search(sorted.begin(), sorted.end(), next))
            throw NotClosedUnderTransition(
                "marked set is not a union of full cycles: successor of " +
                display_state(s, n) + " is " + display_state(next, n) +
                ", which is not marked");
    }
}

void h_layer(Circuit& c, int n) {
    for (int g = 0; g < n; ++g) c.h(g);
}

} // namespace

Circuit build_basin_phase_oracle(const NetworkSpec& spec,
                                 std::span<const StateIndex> attractor_states, int T,
                                 double phi) {
    const int n = spec.n();
    RegisterLayout layout{T, n};
    std::vector<StateIndex> marked = sorted_unique(attractor_states);
    if (marked.empty()) return Circuit(layout.num_qubits());
    require_closed(marked, spec, n);

    Circuit evolution = synthesize_evolution(spec, T);
    Circuit c(layout.num_qubits());
    c.append(evolution);

    // Register T holds gene g on qubit T*n+g, so the register-local basis
    // index of a StateIndex is its n-bit reversal.
    std::vector<BasisIndex> local;
    local.reserve(marked.size());
    for (StateIndex s : marked) local.push_back(reverse_bits(s, n));
    std::sort(local.begin(), local.end());

    std::vector<int> reg = layout.register_qubits(T);
    for (BasisIndex j : local) append_phase_on(c, reg, j, -phi);

    c.append(inverse(evolution));
    return c;
}

Circuit build_zero_phase(int n, double phi) {
    return conditional_phase_shifter(n, 0, phi);
}

Circuit build_suppression_circuit(const NetworkSpec& spec,
                                  std::span<const StateIndex> known_attractor_states,
                                  const SuppressionPlan& plan, int T, PhiSign sign) {
    const int n = spec.n();
    RegisterLayout layout{T, n};
    Circuit c(layout.num_qubits());
    h_layer(c, n);
    if (plan.rounds == 0) return c;

    const double phi = signed_phi(plan, sign);
    Circuit oracle = build_basin_phase_oracle(spec, known_attractor_states, T, phi);
    Circuit zero = build_zero_phase(n, phi);
    for (int j = 0; j < plan.rounds; ++j) {
        c.append(oracle);
        h_layer(c, n);
        c.append(zero);
        h_layer(c, n);
    }
    return c;
}

std::vector<cplx> apply_effective_suppression(const TransitionTable& table,
                                              std::span<const StateIndex> known_attractor_states,
                                              const SuppressionPlan& plan, PhiSign sign) {
    const std::uint64_t N = table.size();
    std::vector<StateIndex> marked_set = sorted_unique(known_attractor_states);
    for (StateIndex s : marked_set) {
        if (s >= N)
            throw IndexOutOfRange("state " + std::to_string(s) + " out of range");
        if (!std::binary_search(marked_set.begin(), marked_set.end(), table.succ[s]))
            throw NotClosedUnderTransition(
                "marked set is not a union of full cycles: successor of " +
                display_state(s, table.n) + " is not marked");
    }

    std::vector<cplx> a(N, cplx{1.0 / std::sqrt(static_cast<double>(N)), 0.0});
    if (plan.rounds == 0) return a;

    // Basin membership: past the transient horizon every orbit sits on its
    // cycle, so succ^T(x) lands in the marked set exactly for basin states.
    std::vector<StateIndex> settled = table.power_map(transient_horizon(table));
    std::vector<bool> in_basin(N);
    for (std::uint64_t x = 0; x < N; ++x)
        in_basin[x] = std::binary_search(marked_set.begin(), marked_set.end(), settled[x]);

    const double phi = signed_phi(plan, sign);
    const cplx oracle_phase = std::polar(1.0, -phi);
    const cplx mean_weight = std::polar(1.0, phi) - 1.0;
    for (int j = 0; j < plan.rounds; ++j) {
        for (std::uint64_t x = 0; x < N; ++x)
            if (in_basin[x]) a[x] *= oracle_phase;
        cplx mean{};
        for (const cplx& v : a) mean += v;
        mean /= static_cast<double>(N);
        const cplx shift = mean_weight * mean;
        for (cplx& v : a) v += shift;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Quantum counting
// ---------------------------------------------------------------------------

Circuit qft_no_swap(int num_qubits, std::span<const int> qubits) {
    Circuit c(num_qubits);
    const int t = static_cast<int>(qubits.size());
    for (int j = t - 1; j >= 0; --j) {
        c.h(qubits[static_cast<std::size_t>(j)]);
        for (int m = j - 1; m >= 0; --m)
            c.mcphase({{qubits[static_cast<std::size_t>(m)], Polarity::Positive}},
                      qubits[static_cast<std::size_t>(j)],
                      std::numbers::pi / static_cast<double>(std::uint64_t{1} << (j - m)));
    }
    return c;
}

QuantumCounting::QuantumCounting(const NetworkSpec& spec,
                                 std::span<const StateIndex> attractor_states, int T,
                                 int counting_qubits, const SimOptions& opt) {
    if (counting_qubits < 1)
        throw IndexOutOfRange("quantum counting needs at least one counting qubit");
    const int n = spec.n();
    RegisterLayout layout{T, n};
    const int work = layout.num_qubits();
    t_ = counting_qubits;
    total_ = std::uint64_t{1} << n;
    if (work + t_ > 62)
        throw CapacityExceeded("counting circuit needs " + std::to_string(work + t_) +
                               " qubits; the limit is 62");

    // The Grover iterate with a pi-phase oracle. The H--zero-phase--H
    // sandwich realizes the negative of the reflection about the mean, so
    // each controlled application ends with a controlled global -1 (an
    // uncontrolled phase on the counting qubit) to estimate M, not N-M.
    Circuit iterate(work);
    iterate.append(build_basin_phase_oracle(spec, attractor_states, T, std::numbers::pi));
    h_layer(iterate, n);
    iterate.append(build_zero_phase(n, std::numbers::pi));
    h_layer(iterate, n);

    Circuit c(work + t_);
    for (int k = 0; k < t_; ++k) c.h(work + k);
    h_layer(c, n);

    for (int p = 0; p < t_; ++p) {
        // Counting qubit work + (t-1-p) controls iterate^(2^p); every gate of
        // the iterate is paired with its inverse except the diagonal phases,
        // so only those need the extra control.
        const int cq = work + (t_ - 1 - p);
        for (std::uint64_t rep = 0; rep < (std::uint64_t{1} << p); ++rep) {
            for (const Gate& g : iterate.gates) {
                if (g.kind == Gate::Kind::MCPhase) {
                    Gate controlled = g;
                    controlled.controls.push_back({cq, Polarity::Positive});
                    c.push(std::move(controlled));
                } else {
                    c.push(g);
                }
            }
            c.mcphase({}, cq, std::numbers::pi);
        }
    }

    counting_reg_.resize(static_cast<std::size_t>(t_));
    for (int k = 0; k < t_; ++k) counting_reg_[static_cast<std::size_t>(k)] = work + k;
    c.append(inverse(qft_no_swap(work + t_, counting_reg_)));

    state_ = run(c, opt);
}

namespace {

std::uint64_t phase_to_count(std::uint64_t y, int t, std::uint64_t total) {
    double s = std::sin(std::numbers::pi * static_cast<double>(y) /
                        static_cast<double>(std::uint64_t{1} << t));
    auto m = static_cast<std::uint64_t>(std::llround(static_cast<double>(total) * s * s));
    return std::min(m, total);
}

} // namespace

std::uint64_t QuantumCounting::estimate(std::uint64_t seed) const {
    MeasurementSampler sampler(state_, counting_reg_);
    Rng rng(seed);
    return phase_to_count(sampler.draw(rng), t_, total_);
}

std::vector<std::pair<std::uint64_t, double>> QuantumCounting::estimate_distribution() const {
    std::vector<std::pair<std::uint64_t, double>> out;
    for (const auto& [y, p] : outcome_distribution(state_, counting_reg_)) {
        std::uint64_t m = phase_to_count(y, t_, total_);
        if (!out.empty() && out.back().first == m)
            out.back().second += p;
        else
            out.emplace_back(m, p);
    }
    // Distinct y can fold to the same estimate out of order; merge.
    std::sort(out.begin(), out.end());
    std::vector<std::pair<std::uint64_t, double>> merged;
    for (const auto& [m, p] : out) {
        if (!merged.empty() && merged.back().first == m)
            merged.back().second += p;
        else
            merged.emplace_back(m, p);
    }
    return merged;
}

std::uint64_t quantum_count(const NetworkSpec& spec,
                            std::span<const StateIndex> attractor_states, int T,
                            int counting_qubits, std::uint64_t seed) {
    return QuantumCounting(spec, attractor_states, T, counting_qubits).estimate(seed);
}

// ---------------------------------------------------------------------------
// Search driver
// ---------------------------------------------------------------------------

namespace {

// Inverse-CDF sampling over an explicit distribution on [0, N); ascending
// index order keeps the draw sequence deterministic.
class IndexSampler {
public:
    explicit IndexSampler(const std::vector<double>& probs) {
        double running = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] == 0.0) continue;
            running += probs[i];
            cdf_.push_back(running);
            values_.push_back(static_cast<StateIndex>(i));
        }
        total_ = running;
    }

    StateIndex draw(Rng& rng) const {
        double u = rng.uniform() * total_;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return values_[static_cast<std::size_t>(it - cdf_.begin())];
    }

private:
    std::vector<double> cdf_;
    std::vector<StateIndex> values_;
    double total_ = 1.0;
};

} // namespace

SearchReport run_search(const NetworkSpec& spec, const SearchConfig& cfg) {
    const int n = spec.n();
    TransitionTable table = build_transition_table(spec);
    AttractorAnalysis analysis = analyze_attractors(table);
    const std::uint64_t N = table.size();

    int horizon = 0;
    for (const AttractorInfo& a : analysis.attractors)
        horizon = std::max(horizon, a.max_transient);
    const int T = cfg.steps.value_or(horizon);

    SearchReport report;
    report.genes = spec.genes;
    report.steps = T;
    report.total_states = N;
    if (T < horizon)
        report.warnings.push_back("evolution depth " + std::to_string(T) +
                                  " is below the transient horizon " +
                                  std::to_string(horizon) + "; suppression is approximate");

    const bool noisy = cfg.noise.has_value() && cfg.noise->enabled();
    const SearchBackend backend =
        noisy ? SearchBackend::CircuitFaithful : cfg.backend;
    if (noisy && cfg.backend == SearchBackend::Effective)
        report.warnings.push_back("noise requested: using the circuit-faithful backend");

    std::vector<StateIndex> power = table.power_map(static_cast<std::uint64_t>(T));
    std::vector<StateIndex> known;       // sorted union of found cycles
    std::uint64_t known_mass = 0;        // exact basin mass of `known`
    const int t_count = cfg.counting_qubits > 0 ? cfg.counting_qubits : n + 3;

    for (int run_no = 1;; ++run_no) {
        std::uint64_t M;
        if (cfg.counting == CountingMode::ClassicalExact)
            M = known_mass;
        else
            M = quantum_count(spec, known, T, t_count, derive_seed(cfg.seed, run_no, 1));
        if (M >= N) break;

        RunRecord rec;
        rec.run = run_no;
        rec.counted_marked = M;
        rec.plan = plan_suppression(M, N);

        // Measured outcomes for this run, as StateIndex values of the final
        // register, in draw order.
        std::vector<StateIndex> outcomes;
        if (backend == SearchBackend::Effective) {
            std::vector<cplx> a =
                apply_effective_suppression(table, known, rec.plan, cfg.phi_sign);
            std::vector<double> probs(N, 0.0);
            for (std::uint64_t x = 0; x < N; ++x) probs[power[x]] += std::norm(a[x]);
            IndexSampler sampler(probs);
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(run_no), 0));
            outcomes.reserve(cfg.shots);
            for (std::uint64_t i = 0; i < cfg.shots; ++i) outcomes.push_back(sampler.draw(rng));
        } else {
            Circuit circuit = build_suppression_circuit(spec, known, rec.plan, T, cfg.phi_sign);
            circuit.append(synthesize_evolution(spec, T));
            RegisterLayout layout{T, n};
            std::vector<int> measured = layout.register_qubits(T);

            std::vector<BasisIndex> raw;
            if (noisy) {
                NoiseConfig run_noise = *cfg.noise;
                run_noise.seed = derive_seed(cfg.noise->seed, static_cast<std::uint64_t>(run_no), 2);
                int trajectories = std::max(1, cfg.noise_trajectories);
                std::uint64_t spt =
                    std::max<std::uint64_t>(1, cfg.shots / static_cast<std::uint64_t>(trajectories));
                StateVector initial = StateVector::zero_state(circuit.num_qubits, cfg.sim);
                raw = run_noisy_outcomes(circuit, initial, run_noise, trajectories, measured, spt);
            } else {
                StateVector s = run(circuit, cfg.sim);
                MeasurementSampler sampler(s, measured);
                Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(run_no), 0));
                raw = sampler.draw_many(cfg.shots, rng);
            }
            outcomes.reserve(raw.size());
            for (BasisIndex o : raw)
                outcomes.push_back(static_cast<StateIndex>(reverse_bits(o, n)));
        }

        rec.histogram.shots = outcomes.size();
        for (StateIndex o : outcomes) ++rec.histogram.counts[display_state(o, n)];

        // Hybrid verification: walk the measured outcomes until one is a
        // genuinely new attractor state; anything else is a rejection.
        std::vector<StateIndex> cycle;
        int rejections = 0;
        for (StateIndex o : outcomes) {
            if (std::binary_search(known.begin(), known.end(), o)) {
                rec.rejected.push_back(display_state(o, n) + ": already-found attractor");
            } else {
                try {
                    cycle = unfold_cycle(table, o);
                } catch (const NotOnAttractor&) {
                    rec.rejected.push_back(display_state(o, n) + ": not on an attractor cycle");
                }
                if (!cycle.empty()) break;
            }
            if (++rejections > cfg.retry_budget) break;
        }
        if (cycle.empty()) {
            std::string log = "run " + std::to_string(run_no) + " rejected " +
                              std::to_string(rec.rejected.size()) +
                              " measurement(s) (retry budget " +
                              std::to_string(cfg.retry_budget) + ")";
            for (const std::string& r : rec.rejected) log += "\n  " + r;
            throw NonConvergence(log);
        }
        rec.accepted = display_state(cycle.front(), n);

        AttractorRecord found;
        for (StateIndex s : cycle) found.cycle.push_back(display_state(s, n));
        found.basin_size =
            analysis.attractors[static_cast<std::size_t>(analysis.attractor_of[cycle.front()])]
                .basin_size;
        known_mass += found.basin_size;
        report.attractors.push_back(std::move(found));
        report.runs.push_back(std::move(rec));

        known.insert(known.end(), cycle.begin(), cycle.end());
        std::sort(known.begin(), known.end());
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string SearchReport::to_json() const {
    nlohmann::json j;
    j["genes"] = genes;
    j["encoding"] = "display strings list gene 0 leftmost; StateIndex bit (n-1-i) holds gene i";
    j["total_states"] = total_states;
    j["steps"] = steps;
    j["attractors"] = nlohmann::json::array();
    for (const AttractorRecord& a : attractors) {
        nlohmann::json ja;
        ja["cycle"] = a.cycle;
        ja["period"] = a.period();
        ja["basin_size"] = a.basin_size;
        j["attractors"].push_back(std::move(ja));
    }
    j["runs"] = nlohmann::json::array();
    for (const RunRecord& r : runs) {
        nlohmann::json jr;
        jr["run"] = r.run;
        jr["counted_marked"] = r.counted_marked;
        jr["plan"] = {{"M", r.plan.marked},
                      {"N", r.plan.total},
                      {"beta", r.plan.beta},
                      {"J", r.plan.rounds},
                      {"phi", r.plan.phi}};
        jr["histogram"] = {{"shots", r.histogram.shots}, {"counts", nlohmann::json::object()}};
        for (const auto& [bits, count] : r.histogram.counts) jr["histogram"]["counts"][bits] = count;
        jr["accepted"] = r.accepted;
        jr["rejected"] = r.rejected;
        j["runs"].push_back(std::move(jr));
    }
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

} // namespace qbn
