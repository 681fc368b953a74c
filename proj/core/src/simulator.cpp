#include "qbn/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "qbn/errors.hpp"

namespace qbn {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_zero(const cplx& v) { return v.real() == 0.0 && v.imag() == 0.0; }

} // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

StateVector StateVector::zero_state(int num_qubits, const SimOptions& opt) {
    return basis_state(num_qubits, 0, opt);
}

StateVector StateVector::basis_state(int num_qubits, BasisIndex index, const SimOptions& opt) {
    if (num_qubits < 1 || num_qubits > 62)
        throw CapacityExceeded("qubit count " + std::to_string(num_qubits) +
                               " outside the supported range [1, 62]");
    if (index >> num_qubits)
        throw IndexOutOfRange("basis index " + std::to_string(index) + " out of range for " +
                              std::to_string(num_qubits) + " qubits");

    StateVector s;
    s.q_ = num_qubits;
    s.opt_ = opt;
    std::uint64_t dim = std::uint64_t{1} << num_qubits;
    bool dense = opt.backend == Backend::Dense ||
                 (opt.backend == Backend::Auto && dim <= opt.max_dense_amplitudes);
    if (opt.backend == Backend::Dense && dim > opt.max_dense_amplitudes)
        throw CapacityExceeded("dense state of " + std::to_string(dim) +
                               " amplitudes exceeds the configured budget");
    s.dense_ = dense;
    if (dense) {
        s.amps_.assign(dim, cplx{});
        s.amps_[index] = 1.0;
    } else {
        s.sp_.emplace_back(index, cplx{1.0, 0.0});
    }
    return s;
}

std::uint64_t StateVector::support_size() const {
    if (!dense_) return sp_.size();
    std::uint64_t count = 0;
    for (const cplx& a : amps_)
        if (!is_zero(a)) ++count;
    return count;
}

cplx StateVector::amplitude(BasisIndex index) const {
    if (index >> q_)
        throw IndexOutOfRange("basis index " + std::to_string(index) + " out of range");
    if (dense_) return amps_[index];
    for (const auto& [k, a] : sp_)
        if (k == index) return a;
    return cplx{};
}

double StateVector::norm_squared() const {
    double total = 0.0;
    if (dense_)
        for (const cplx& a : amps_) total += std::norm(a);
    else
        for (const auto& [k, a] : sp_) total += std::norm(a);
    return total;
}

std::vector<std::pair<BasisIndex, cplx>> StateVector::nonzeros() const {
    std::vector<std::pair<BasisIndex, cplx>> out;
    if (dense_) {
        for (std::uint64_t i = 0; i < amps_.size(); ++i)
            if (!is_zero(amps_[i])) out.emplace_back(i, amps_[i]);
    } else {
        out = sp_;
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return out;
}

void StateVector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= q_)
        throw IndexOutOfRange("qubit " + std::to_string(qubit) + " outside state of " +
                              std::to_string(q_) + " qubits");
}

void StateVector::to_dense() {
    std::uint64_t dim = std::uint64_t{1} << q_;
    if (dim > opt_.max_dense_amplitudes)
        throw CapacityExceeded("sparse support exceeded " +
                               std::to_string(opt_.max_sparse_entries) +
                               " entries and the state is too wide for the dense backend");
    amps_.assign(dim, cplx{});
    for (const auto& [k, a] : sp_) amps_[k] = a;
    sp_.clear();
    sp_.shrink_to_fit();
    dense_ = true;
}

// ---------------------------------------------------------------------------
// Gate application
// ---------------------------------------------------------------------------

void StateVector::apply(const Gate& g) {
    check_qubit(g.target);
    for (const ControlBit& c : g.controls) check_qubit(c.qubit);
    if (dense_)
        apply_dense(g);
    else
        apply_sparse(g);
}

void StateVector::apply_dense(const Gate& g) {
    const std::uint64_t dim = amps_.size();
    const std::uint64_t tbit = std::uint64_t{1} << g.target;
    switch (g.kind) {
    case Gate::Kind::X:
        for (std::uint64_t i = 0; i < dim; ++i)
            if (!(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
        return;
    case Gate::Kind::H:
        for (std::uint64_t i = 0; i < dim; ++i) {
            if (i & tbit) continue;
            cplx a0 = amps_[i], a1 = amps_[i | tbit];
            amps_[i] = (a0 + a1) * kInvSqrt2;
            amps_[i | tbit] = (a0 - a1) * kInvSqrt2;
        }
        return;
    case Gate::Kind::MCX:
        for (std::uint64_t i = 0; i < dim; ++i)
            if (!(i & tbit) && g.controls_satisfied(i)) std::swap(amps_[i], amps_[i | tbit]);
        return;
    case Gate::Kind::MCPhase: {
        const cplx phase = std::polar(1.0, g.phi);
        for (std::uint64_t i = 0; i < dim; ++i)
            if ((i & tbit) && g.controls_satisfied(i)) amps_[i] *= phase;
        return;
    }
    }
}

void StateVector::apply_sparse(const Gate& g) {
    const std::uint64_t tbit = std::uint64_t{1} << g.target;
    switch (g.kind) {
    case Gate::Kind::X:
        for (auto& [k, a] : sp_) k ^= tbit;
        return;
    case Gate::Kind::MCX:
        // Flipping the target never touches control bits, so this is a
        // bijection on basis indices and keys stay unique.
        for (auto& [k, a] : sp_)
            if (g.controls_satisfied(k)) k ^= tbit;
        return;
    case Gate::Kind::MCPhase: {
        const cplx phase = std::polar(1.0, g.phi);
        for (auto& [k, a] : sp_)
            if ((k & tbit) && g.controls_satisfied(k)) a *= phase;
        return;
    }
    case Gate::Kind::H: {
        std::unordered_map<BasisIndex, cplx> acc;
        acc.reserve(sp_.size() * 2);
        for (const auto& [k, a] : sp_) {
            cplx h = a * kInvSqrt2;
            if (k & tbit) {
                acc[k & ~tbit] += h;
                acc[k] -= h;
            } else {
                acc[k] += h;
                acc[k | tbit] += h;
            }
        }
        sp_.clear();
        for (const auto& [k, a] : acc)
            if (!is_zero(a)) sp_.emplace_back(k, a);
        if (sp_.size() > opt_.max_sparse_entries) to_dense();
        return;
    }
    }
}

void StateVector::apply_pauli(char pauli, int qubit) {
    check_qubit(qubit);
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    switch (pauli) {
    case 'X':
        apply(Gate::x(qubit));
        return;
    case 'Z':
        if (dense_) {
            for (std::uint64_t i = 0; i < amps_.size(); ++i)
                if (i & bit) amps_[i] = -amps_[i];
        } else {
            for (auto& [k, a] : sp_)
                if (k & bit) a = -a;
        }
        return;
    case 'Y':
        // Y = i X Z on basis states: |0> -> i|1>, |1> -> -i|0>.
        if (dense_) {
            for (std::uint64_t i = 0; i < amps_.size(); ++i) {
                if (i & bit) continue;
                cplx a0 = amps_[i], a1 = amps_[i | bit];
                amps_[i] = cplx{0.0, -1.0} * a1;
                amps_[i | bit] = cplx{0.0, 1.0} * a0;
            }
        } else {
            for (auto& [k, a] : sp_) {
                a *= (k & bit) ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
                k ^= bit;
            }
        }
        return;
    default:
        throw IndexOutOfRange(std::string("unknown Pauli '") + pauli + "'");
    }
}

void StateVector::apply(const Circuit& c) {
    if (c.num_qubits != q_)
        throw IndexOutOfRange("circuit of " + std::to_string(c.num_qubits) +
                              " qubits applied to a state of " + std::to_string(q_));
    for (const Gate& g : c.gates) apply(g);
}

StateVector run(const Circuit& c, const SimOptions& opt) {
    StateVector s = StateVector::zero_state(c.num_qubits, opt);
    s.apply(c);
    return s;
}

StateVector run(const Circuit& c, StateVector initial) {
    initial.apply(c);
    return initial;
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

std::string outcome_string(BasisIndex outcome, int num_bits) {
    std::string s(static_cast<std::size_t>(num_bits), '0');
    for (int k = 0; k < num_bits; ++k)
        if (outcome >> k & 1) s[static_cast<std::size_t>(k)] = '1';
    return s;
}

std::string MeasurementHistogram::to_json() const {
    nlohmann::json j;
    j["shots"] = shots;
    j["counts"] = nlohmann::json::object();
    for (const auto& [bits, count] : counts) j["counts"][bits] = count;
    return j.dump(2) + "\n";
}

namespace {

BasisIndex pack_outcome(BasisIndex index, std::span<const int> qubits) {
    BasisIndex out = 0;
    for (std::size_t k = 0; k < qubits.size(); ++k)
        if (index >> qubits[k] & 1) out |= BasisIndex{1} << k;
    return out;
}

} // namespace

std::vector<std::pair<BasisIndex, double>> outcome_distribution(const StateVector& s,
                                                                std::span<const int> qubits) {
    std::unordered_map<BasisIndex, double> acc;
    for (const auto& [index, amp] : s.nonzeros()) acc[pack_outcome(index, qubits)] += std::norm(amp);
    std::vector<std::pair<BasisIndex, double>> out(acc.begin(), acc.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

MeasurementSampler::MeasurementSampler(const StateVector& s, std::span<const int> qubits) {
    auto dist = outcome_distribution(s, qubits);
    cdf_.reserve(dist.size());
    outcomes_.reserve(dist.size());
    double running = 0.0;
    for (const auto& [outcome, p] : dist) {
        running += p;
        cdf_.push_back(running);
        outcomes_.push_back(outcome);
    }
    total_ = running;
}

BasisIndex MeasurementSampler::draw(Rng& rng) const {
    double u = rng.uniform() * total_;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return outcomes_[static_cast<std::size_t>(it - cdf_.begin())];
}

std::vector<BasisIndex> MeasurementSampler::draw_many(std::uint64_t shots, Rng& rng) const {
    std::vector<BasisIndex> out;
    out.reserve(shots);
    for (std::uint64_t i = 0; i < shots; ++i) out.push_back(draw(rng));
    return out;
}

MeasurementHistogram sample(const StateVector& s, std::span<const int> qubits,
                            std::uint64_t shots, std::uint64_t seed) {
    MeasurementSampler sampler(s, qubits);
    Rng rng(seed);
    MeasurementHistogram h;
    h.shots = shots;
    int m = static_cast<int>(qubits.size());
    for (std::uint64_t i = 0; i < shots; ++i)
        ++h.counts[outcome_string(sampler.draw(rng), m)];
    return h;
}

// ---------------------------------------------------------------------------
// Pauli noise
// ---------------------------------------------------------------------------

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    return derive_seed(master_seed, trajectory_index, 0);
}

namespace {

void apply_noisy_gate(StateVector& s, const Gate& g, const NoiseConfig& noise, Rng& rng) {
    s.apply(g);
    auto kick = [&](int qubit) {
        double u = rng.uniform();
        if (u < noise.p_x)
            s.apply_pauli('X', qubit);
        else if (u < noise.p_x + noise.p_y)
            s.apply_pauli('Y', qubit);
        else if (u < noise.p_x + noise.p_y + noise.p_z)
            s.apply_pauli('Z', qubit);
    };
    for (const ControlBit& c : g.controls) kick(c.qubit);
    kick(g.target);
}

StateVector run_one_trajectory(const Circuit& c, const StateVector& initial,
                               const NoiseConfig& noise, std::uint64_t trajectory_index) {
    StateVector s = initial;
    Rng rng(trajectory_seed(noise.seed, trajectory_index));
    for (const Gate& g : c.gates) apply_noisy_gate(s, g, noise, rng);
    return s;
}

} // namespace

std::vector<BasisIndex> run_noisy_outcomes(const Circuit& c, const StateVector& initial,
                                           const NoiseConfig& noise, int trajectories,
                                           std::span<const int> measured_qubits,
                                           std::uint64_t shots_per_trajectory) {
    if (!noise.valid())
        throw Error("invalid noise configuration: probabilities must be "
                    "nonnegative with p_x + p_y + p_z <= 1");
    std::vector<BasisIndex> outcomes;
    outcomes.reserve(static_cast<std::size_t>(trajectories) * shots_per_trajectory);
    for (int i = 0; i < trajectories; ++i) {
        StateVector s = run_one_trajectory(c, initial, noise, static_cast<std::uint64_t>(i));
        MeasurementSampler sampler(s, measured_qubits);
        Rng rng(derive_seed(noise.seed, static_cast<std::uint64_t>(i), 1));
        for (std::uint64_t k = 0; k < shots_per_trajectory; ++k)
            outcomes.push_back(sampler.draw(rng));
    }
    return outcomes;
}

MeasurementHistogram run_noisy(const Circuit& c, const StateVector& initial,
                               const NoiseConfig& noise, int trajectories,
                               std::span<const int> measured_qubits,
                               std::uint64_t shots_per_trajectory) {
    MeasurementHistogram h;
    h.shots = static_cast<std::uint64_t>(trajectories) * shots_per_trajectory;
    int m = static_cast<int>(measured_qubits.size());
    for (BasisIndex o : run_noisy_outcomes(c, initial, noise, trajectories, measured_qubits,
                                           shots_per_trajectory))
        ++h.counts[outcome_string(o, m)];
    return h;
}

} // namespace qbn
