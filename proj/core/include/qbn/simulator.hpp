#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbn/circuit.hpp"
#include "qbn/rng.hpp"

namespace qbn {

using cplx = std::complex<double>;

enum class Backend : std::uint8_t {
    Auto,   // dense when 2^q fits the dense budget, sparse otherwise
    Dense,
    Sparse,
};

struct SimOptions {
    Backend backend = Backend::Auto;
    /// Dense allocation above this many amplitudes throws CapacityExceeded
    /// (and Auto falls back to sparse). 2^24 amplitudes = 256 MiB.
    std::uint64_t max_dense_amplitudes = std::uint64_t{1} << 24;
    /// Sparse support above this many entries throws CapacityExceeded.
    std::uint64_t max_sparse_entries = std::uint64_t{1} << 22;
};

/// Normalized pure state over `num_qubits` qubits, stored either as the full
/// dense amplitude array or as an index->amplitude map holding only
/// nonzeros. Qubit 0 is the least significant bit of the basis index.
/// Both representations are exact; gates produce identical states.
class StateVector {
public:
    /// Empty placeholder with zero qubits; assign a real state before use.
    StateVector() = default;

    /// |0...0>.
    static StateVector zero_state(int num_qubits, const SimOptions& opt = {});
    static StateVector basis_state(int num_qubits, BasisIndex index, const SimOptions& opt = {});

    int num_qubits() const { return q_; }
    bool is_dense() const { return dense_; }
    std::uint64_t support_size() const;

    cplx amplitude(BasisIndex index) const;
    double norm_squared() const;
    /// All nonzero (index, amplitude) pairs, sorted by index.
    std::vector<std::pair<BasisIndex, cplx>> nonzeros() const;

    void apply(const Gate& g);
    void apply(const Circuit& c);
    /// Single Pauli, used by the noise channel ('X', 'Y' or 'Z').
    void apply_pauli(char pauli, int qubit);

private:
    void apply_dense(const Gate& g);
    void apply_sparse(const Gate& g);
    void check_qubit(int qubit) const;
    /// Sparse-to-dense spill when the support outgrows the sparse budget.
    void to_dense();

    int q_ = 0;
    bool dense_ = true;
    SimOptions opt_;
    std::vector<cplx> amps_;                      // dense
    std::vector<std::pair<BasisIndex, cplx>> sp_; // sparse; unique indices
};

/// Runs the circuit on |0...0>.
StateVector run(const Circuit& c, const SimOptions& opt = {});
/// Runs the circuit on the given initial state (consumed).
StateVector run(const Circuit& c, StateVector initial);

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// Shot counts keyed by outcome bit string. Character k of the string is
/// the measured value of the k-th declared qubit, so a register listed in
/// gene order renders in StateIndex display order.
struct MeasurementHistogram {
    std::uint64_t shots = 0;
    std::map<std::string, std::uint64_t> counts;

    std::string to_json() const;
};

/// Outcome of qubits[k] packed into bit k.
std::string outcome_string(BasisIndex outcome, int num_bits);

/// Exact marginal distribution over the declared qubits, sorted by packed
/// outcome index; probabilities sum to 1 within numerical tolerance.
std::vector<std::pair<BasisIndex, double>> outcome_distribution(const StateVector& s,
                                                                std::span<const int> qubits);

/// Seeded inverse-CDF sampler over a fixed state. Outcomes are i.i.d. from
/// the marginal distribution of the declared qubits; the same seed always
/// reproduces the same sequence.
class MeasurementSampler {
public:
    MeasurementSampler(const StateVector& s, std::span<const int> qubits);
    BasisIndex draw(Rng& rng) const;
    std::vector<BasisIndex> draw_many(std::uint64_t shots, Rng& rng) const;

private:
    std::vector<double> cdf_;          // over stored order
    std::vector<BasisIndex> outcomes_; // packed subset outcome per entry
    double total_ = 1.0;
};

MeasurementHistogram sample(const StateVector& s, std::span<const int> qubits,
                            std::uint64_t shots, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pauli noise
// ---------------------------------------------------------------------------

/// Per-gate depolarizing-style channel: after every gate, each touched qubit
/// independently suffers X, Y or Z with the given probabilities.
struct NoiseConfig {
    double p_x = 0.0;
    double p_y = 0.0;
    double p_z = 0.0;
    std::uint64_t seed = 0;

    bool valid() const {
        return p_x >= 0 && p_y >= 0 && p_z >= 0 && p_x + p_y + p_z <= 1.0;
    }
    bool enabled() const { return p_x > 0 || p_y > 0 || p_z > 0; }
};

/// RNG stream seed for one trajectory; exposed so callers can reproduce a
/// single trajectory of a Monte Carlo run.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index);

/// Monte Carlo Pauli-noise run: each trajectory replays the circuit from
/// `initial`, independently inserting errors, then contributes
/// `shots_per_trajectory` measured outcomes. Deterministic in (noise.seed,
/// trajectory count); outcome order is trajectory-major.
std::vector<BasisIndex> run_noisy_outcomes(const Circuit& c, const StateVector& initial,
                                           const NoiseConfig& noise, int trajectories,
                                           std::span<const int> measured_qubits,
                                           std::uint64_t shots_per_trajectory);

MeasurementHistogram run_noisy(const Circuit& c, const StateVector& initial,
                               const NoiseConfig& noise, int trajectories,
                               std::span<const int> measured_qubits,
                               std::uint64_t shots_per_trajectory);

} // namespace qbn
