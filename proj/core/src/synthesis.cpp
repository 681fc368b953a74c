#include "qbn/synthesis.hpp"

#include <algorithm>

namespace qbn {

namespace {

void collect_support(const BoolExpr& e, const NetworkSpec& spec, std::vector<int>& vars) {
    switch (e.kind) {
    case NodeKind::Variable: {
        int g = e.var >= 0 ? e.var : spec.gene_index(e.name);
        if (g < 0) throw UndefinedVariable("undefined variable '" + e.name + "'");
        vars.push_back(g);
        return;
    }
    case NodeKind::Constant: return;
    case NodeKind::Not: collect_support(*e.lhs, spec, vars); return;
    case NodeKind::And:
    case NodeKind::Or:
        collect_support(*e.lhs, spec, vars);
        collect_support(*e.rhs, spec, vars);
        return;
    }
}

// Evaluation under an assignment of the support variables: bit i of `m`
// holds the value of gene support[i].
bool eval_assignment(const BoolExpr& e, const NetworkSpec& spec,
                     const std::vector<int>& support, std::uint32_t m) {
    switch (e.kind) {
    case NodeKind::Variable: {
        int g = e.var >= 0 ? e.var : spec.gene_index(e.name);
        auto it = std::lower_bound(support.begin(), support.end(), g);
        return m >> (it - support.begin()) & 1;
    }
    case NodeKind::Constant: return e.value;
    case NodeKind::Not: return !eval_assignment(*e.lhs, spec, support, m);
    case NodeKind::And:
        return eval_assignment(*e.lhs, spec, support, m) &&
               eval_assignment(*e.rhs, spec, support, m);
    case NodeKind::Or:
        return eval_assignment(*e.lhs, spec, support, m) ||
               eval_assignment(*e.rhs, spec, support, m);
    }
    return false;
}

} // namespace

std::vector<Monomial> pprm_expansion(const BoolExpr& e, const NetworkSpec& spec) {
    std::vector<int> support;
    collect_support(e, spec, support);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    const int k = static_cast<int>(support.size());

    std::vector<std::uint8_t> t(std::size_t{1} << k);
    for (std::uint32_t m = 0; m < t.size(); ++m)
        t[m] = eval_assignment(e, spec, support, m) ? 1 : 0;

    // Binary Moebius transform: after the butterfly, t[m] is the ANF
    // coefficient of the monomial whose variables are the set bits of m.
    for (int j = 0; j < k; ++j)
        for (std::uint32_t m = 0; m < t.size(); ++m)
            if (m >> j & 1) t[m] ^= t[m ^ (1u << j)];

    std::vector<Monomial> monomials;
    for (std::uint32_t m = 0; m < t.size(); ++m) {
        if (!t[m]) continue;
        Monomial mono = 0;
        for (int i = 0; i < k; ++i)
            if (m >> i & 1) mono |= Monomial{1} << support[static_cast<std::size_t>(i)];
        monomials.push_back(mono);
    }
    std::sort(monomials.begin(), monomials.end());
    return monomials;
}

std::vector<int> RegisterLayout::register_qubits(int reg) const {
    std::vector<int> qs(static_cast<std::size_t>(n));
    for (int g = 0; g < n; ++g) qs[static_cast<std::size_t>(g)] = qubit(reg, g);
    return qs;
}

Circuit synthesize_update(const BoolExpr& e, const NetworkSpec& spec,
                          std::span<const int> input_qubits, int target_qubit) {
    for (int q : input_qubits)
        if (q == target_qubit)
            throw QubitCollision("update target qubit " + std::to_string(target_qubit) +
                                 " is one of its own inputs");

    int max_q = target_qubit;
    for (int q : input_qubits) max_q = std::max(max_q, q);
    Circuit c(max_q + 1);

    for (Monomial mono : pprm_expansion(e, spec)) {
        if (mono == 0) {
            c.x(target_qubit);
            continue;
        }
        std::vector<ControlBit> controls;
        for (int g = 0; g < static_cast<int>(input_qubits.size()); ++g)
            if (mono >> g & 1)
                controls.push_back({input_qubits[static_cast<std::size_t>(g)], Polarity::Positive});
        c.mcx(std::move(controls), target_qubit);
    }
    return c;
}

Circuit synthesize_evolution(const NetworkSpec& spec, int T) {
    const int n = spec.n();
    if (T < 0) throw IndexOutOfRange("negative step count");
    RegisterLayout layout{T, n};
    if (layout.num_qubits() > 62)
        throw CapacityExceeded("evolution over " + std::to_string(layout.num_qubits()) +
                               " qubits exceeds the 62-qubit simulator index budget");

    Circuit c(layout.num_qubits());
    for (int r = 1; r <= T; ++r) {
        std::vector<int> inputs = layout.register_qubits(r - 1);
        for (int g = 0; g < n; ++g)
            c.append(synthesize_update(*spec.rules[static_cast<std::size_t>(g)], spec, inputs,
                                       layout.qubit(r, g)));
    }
    return c;
}

} // namespace qbn
