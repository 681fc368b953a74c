#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qbn/bnet.hpp"
#include "qbn/circuit.hpp"

namespace qbn {

/// One AND term of a positive-polarity Reed-Muller form: bit i set means
/// gene i participates. The empty mask is the constant-1 term. A PPRM form
/// is a set of distinct monomials whose XOR equals the function.
using Monomial = std::uint32_t;

/// Canonical XOR-of-AND expansion of a validated rule, computed from its
/// truth table over the support variables. Monomials come back sorted
/// ascending; structurally different but equivalent expressions yield the
/// same set.
std::vector<Monomial> pprm_expansion(const BoolExpr& e, const NetworkSpec& spec);

/// Qubit layout for T synchronous steps of an n-gene network:
/// register r occupies qubits [r*n, (r+1)*n), r = 0..T, and gene i of
/// register r sits at qubit r*n + i.
struct RegisterLayout {
    int T = 0;
    int n = 0;

    int num_qubits() const { return (T + 1) * n; }
    int qubit(int reg, int gene) const { return reg * n + gene; }
    std::vector<int> register_qubits(int reg) const;
};

/// XOR-update fragment for one rule: one MCX per monomial (the constant
/// monomial becomes a plain X). input_qubits[g] holds gene g; the net basis
/// action is |x>|b> -> |x>|b xor f(x)> with the inputs unchanged.
/// Throws QubitCollision if the target is among the inputs.
Circuit synthesize_update(const BoolExpr& e, const NetworkSpec& spec,
                          std::span<const int> input_qubits, int target_qubit);

/// Full T-step time evolution on (T+1)*n qubits: step r writes every gene
/// update of register r-1 into register r, so basis input |x>|0...0> maps to
/// |x>|f(x)>|f^2(x)>...|f^T(x)>.
Circuit synthesize_evolution(const NetworkSpec& spec, int T);

} // namespace qbn
