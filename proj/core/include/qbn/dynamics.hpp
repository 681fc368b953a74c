#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qbn/bnet.hpp"

namespace qbn {

/// Index of one network state in [0, 2^n).
///
/// Encoding convention, used everywhere in the library: gene i (0-based,
/// file order) occupies bit (n-1-i), so the display string b0 b1 ... b(n-1)
/// read left to right in gene order is the binary numeral of the index,
/// most significant bit first.
using StateIndex = std::uint32_t;

inline int gene_bit(StateIndex x, int gene, int n) {
    return static_cast<int>((x >> (n - 1 - gene)) & 1u);
}
inline StateIndex with_gene_bit(StateIndex x, int gene, int n, int bit) {
    StateIndex mask = StateIndex{1} << (n - 1 - gene);
    return bit ? (x | mask) : (x & ~mask);
}

std::string display_state(StateIndex x, int n);
StateIndex parse_display_state(std::string_view bits); // inverse of display_state

/// Reverses the low `n` bits of `x` (bits >= n must be clear). Converts
/// between a StateIndex and the equivalent register-local simulator index,
/// where qubit k holds gene k.
std::uint64_t reverse_bits(std::uint64_t x, int n);

// ---------------------------------------------------------------------------
// Synchronous dynamics
// ---------------------------------------------------------------------------

/// Dense map from every state to its unique synchronous successor.
/// Immutable after construction; all queries are read-only.
struct TransitionTable {
    int n = 0;
    std::vector<StateIndex> succ;

    std::uint64_t size() const { return succ.size(); }
    StateIndex step(StateIndex x) const { return succ[x]; }
    /// x after `t` synchronous steps.
    StateIndex step_many(StateIndex x, std::uint64_t t) const;
    /// The full map x -> succ^t(x).
    std::vector<StateIndex> power_map(std::uint64_t t) const;
};

/// Boolean evaluation of a validated rule, gene bits read from `x` under the
/// encoding convention.
bool eval_expr(const BoolExpr& e, StateIndex x, const NetworkSpec& spec);

/// Builds the full 2^n synchronous transition table.
/// Throws CapacityExceeded past kMaxGenes.
TransitionTable build_transition_table(const NetworkSpec& spec);

struct AttractorInfo {
    /// The cycle in successor order, starting at its smallest state;
    /// succ maps each entry to the next and the last back to the first.
    std::vector<StateIndex> cycle_states;
    std::uint64_t basin_size = 0;
    /// Longest transient path into this attractor.
    int max_transient = 0;

    int period() const { return static_cast<int>(cycle_states.size()); }
};

/// Full partition of the state space: every state is assigned to exactly
/// one attractor. Attractors are ordered by smallest cycle state.
struct AttractorAnalysis {
    std::vector<AttractorInfo> attractors;
    std::vector<int> attractor_of; // state -> index into attractors
};

AttractorAnalysis analyze_attractors(const TransitionTable& table);

/// All attractors of the table, ordered by smallest cycle state.
std::vector<AttractorInfo> find_attractors(const TransitionTable& table);

/// The sorted set of states whose orbit enters `attractor`; contains the
/// cycle itself, and its size equals attractor.basin_size.
std::vector<StateIndex> basin_of(const TransitionTable& table, const AttractorInfo& attractor);

/// Smallest T such that succ^T(x) lies on an attractor cycle for every x.
int transient_horizon(const TransitionTable& table);

/// The full cycle through `s`, starting at s. Throws NotOnAttractor if the
/// orbit from s never returns to s.
std::vector<StateIndex> unfold_cycle(const TransitionTable& table, StateIndex s);

/// Writes the state transition graph as one "from to" edge per line, either
/// as raw indices or as display strings.
void write_stg(const TransitionTable& table, std::ostream& os, bool as_display_strings = false);

} // namespace qbn
