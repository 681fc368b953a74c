#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbn/circuit.hpp"
#include "qbn/dynamics.hpp"
#include "qbn/simulator.hpp"
#include "qbn/synthesis.hpp"

namespace qbn {

// ---------------------------------------------------------------------------
// Exact amplitude suppression: a Grover variant that removes, rather than
// amplifies, a marked subspace of the uniform superposition.
// ---------------------------------------------------------------------------

/// Parameters that delete M marked states out of N exactly:
///   beta = arcsin(sqrt(M/N))
///   J    = ceil(beta / (pi - 2*beta))      (0 when M == 0)
///   phi  = -2 * arcsin(sin(pi / (4J+2)) / cos(beta))
/// After J oracle + diffusion rounds at angle phi the marked amplitudes are
/// exactly zero and the survivors are uniform. J == 1 exactly when
/// M/N <= 3/4.
struct SuppressionPlan {
    std::uint64_t marked = 0; // M
    std::uint64_t total = 0;  // N
    double beta = 0.0;
    int rounds = 0;   // J
    double phi = 0.0; // negative branch of the closed form
};

/// Throws AllStatesMarked when M == N (nothing would survive) and
/// IndexOutOfRange when M > N.
SuppressionPlan plan_suppression(std::uint64_t marked, std::uint64_t total);

/// Sign convention switch for the conditional phase, kept for auditability:
/// either sign deletes exactly (the two evolutions are complex conjugates).
/// Negative is the closed form above and the default everywhere.
enum class PhiSign : std::uint8_t { Negative, Positive };

inline double signed_phi(const SuppressionPlan& plan, PhiSign sign) {
    return sign == PhiSign::Negative ? plan.phi : -plan.phi;
}

/// Marking oracle on (T+1)*n qubits: evolution, phase -phi on the states of
/// `attractor_states` read from register T, inverse evolution. Basis action
/// on register 0 (ancillas restored): |x> picks up e^{-i phi} exactly when
/// succ^T(x) lies in the marked set.
/// Throws NotClosedUnderTransition unless the set is a union of full cycles
/// (i.e. closed under the transition map).
Circuit build_basin_phase_oracle(const NetworkSpec& spec,
                                 std::span<const StateIndex> attractor_states, int T,
                                 double phi);

/// e^{i phi} on |0...0>, the core the Hadamard sandwich turns into a
/// reflection-like update about the mean. Plain n-qubit circuit.
Circuit build_zero_phase(int n, double phi);

/// Full deletion circuit on (T+1)*n qubits: H layer on register 0, then
/// plan.rounds repetitions of [basin oracle; H layer; zero phase; H layer].
/// From |0...0> the register-0 state becomes (up to global phase) the
/// uniform superposition over the unmarked basins.
Circuit build_suppression_circuit(const NetworkSpec& spec,
                                  std::span<const StateIndex> known_attractor_states,
                                  const SuppressionPlan& plan, int T,
                                  PhiSign sign = PhiSign::Negative);

/// Transition-table shortcut with the same operator algebra as the circuit:
/// phase e^{-i phi} on the marked basins (membership via the table), then
/// a += (e^{i phi} - 1) * mean(a), repeated plan.rounds times on the uniform
/// 2^n vector. Returns register-0 amplitudes indexed by StateIndex; agrees
/// with the circuit path up to global phase.
std::vector<cplx> apply_effective_suppression(const TransitionTable& table,
                                              std::span<const StateIndex> known_attractor_states,
                                              const SuppressionPlan& plan,
                                              PhiSign sign = PhiSign::Negative);

// ---------------------------------------------------------------------------
// Quantum counting: phase estimation over the Grover iterate
// ---------------------------------------------------------------------------

/// Quantum Fourier transform over qubits[0..t) *without* the final swap
/// layer, so the unitary is (bit reversal) * QFT where qubits[k] carries bit
/// k of the input index. Phase estimation composes its inverse and reads the
/// output bits in reversed qubit order instead of swapping.
Circuit qft_no_swap(int num_qubits, std::span<const int> qubits);

/// Counting circuit built once, measured as often as needed: t counting
/// qubits above the (T+1)*n work register, controlled powers of the
/// pi-phase Grover iterate, inverse Fourier transform. An estimate is
/// round(N * sin^2(pi * y / 2^t)) for a sampled counting outcome y.
class QuantumCounting {
public:
    QuantumCounting(const NetworkSpec& spec, std::span<const StateIndex> attractor_states,
                    int T, int counting_qubits, const SimOptions& opt = {});

    int counting_qubits() const { return t_; }
    std::uint64_t total_states() const { return total_; }

    /// One seeded measurement of the counting register.
    std::uint64_t estimate(std::uint64_t seed) const;
    /// Exact outcome distribution of the estimator (for tests / analysis).
    std::vector<std::pair<std::uint64_t, double>> estimate_distribution() const;

private:
    int t_ = 0;
    std::uint64_t total_ = 0;
    StateVector state_;             // simulated once, sampled many times
    std::vector<int> counting_reg_; // qubit carrying bit k of y at position k
};

std::uint64_t quantum_count(const NetworkSpec& spec,
                            std::span<const StateIndex> attractor_states, int T,
                            int counting_qubits, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Search driver
// ---------------------------------------------------------------------------

enum class CountingMode : std::uint8_t {
    ClassicalExact, // basin mass of the known set from the transition table
    Quantum,        // phase-estimation estimate
};

enum class SearchBackend : std::uint8_t {
    Effective,       // transition-table amplitudes; same distribution, fast
    CircuitFaithful, // gate-by-gate statevector simulation
};

struct SearchConfig {
    std::uint64_t shots = 10000;
    std::uint64_t seed = 0;
    /// Evolution steps T; defaults to the network's transient horizon.
    /// A value below the horizon makes suppression approximate (warned).
    std::optional<int> steps;
    CountingMode counting = CountingMode::ClassicalExact;
    /// Counting-register width t; 0 picks n + 3.
    int counting_qubits = 0;
    SearchBackend backend = SearchBackend::Effective;
    std::optional<NoiseConfig> noise; // forces CircuitFaithful
    int noise_trajectories = 100;
    /// Rejected measurements tolerated per run before NonConvergence.
    int retry_budget = 32;
    PhiSign phi_sign = PhiSign::Negative;
    SimOptions sim;
};

/// One suppression + measurement round.
struct RunRecord {
    int run = 0;                      // 1-based
    std::uint64_t counted_marked = 0; // M entering this round (mode-dependent)
    SuppressionPlan plan;
    MeasurementHistogram histogram;
    std::string accepted;              // verified new-attractor outcome
    std::vector<std::string> rejected; // "state: reason" entries, in order
};

struct AttractorRecord {
    std::vector<std::string> cycle; // display strings, measured state first
    std::uint64_t basin_size = 0;
    int period() const { return static_cast<int>(cycle.size()); }
};

struct SearchReport {
    std::vector<std::string> genes;
    int steps = 0; // evolution depth used
    std::uint64_t total_states = 0;
    std::vector<AttractorRecord> attractors; // discovery order
    std::vector<RunRecord> runs;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

/// Iterated deletion search: each round suppresses every basin found so far,
/// measures the evolved register, classically verifies the outcome, and
/// stops once the marked mass reaches N. Noiseless runs find one new
/// attractor per round. Throws NonConvergence when a round rejects more
/// outcomes than the retry budget allows.
SearchReport run_search(const NetworkSpec& spec, const SearchConfig& cfg = {});

} // namespace qbn
