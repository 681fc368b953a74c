// Shared test utilities: random expression/network generators and a
// circuit-to-matrix extractor used by the gate-level correctness suites.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qbn/bnet.hpp"
#include "qbn/circuit.hpp"
#include "qbn/rng.hpp"
#include "qbn/simulator.hpp"

namespace qbn_test {

// Full 2^q x 2^q unitary induced by a circuit, column by column.
inline std::vector<std::vector<qbn::cplx>> circuit_matrix(const qbn::Circuit& c) {
    const std::size_t dim = std::size_t{1} << c.num_qubits;
    std::vector<std::vector<qbn::cplx>> m(dim, std::vector<qbn::cplx>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        qbn::StateVector st = qbn::StateVector::basis_state(c.num_qubits, col);
        st.apply(c);
        for (std::size_t row = 0; row < dim; ++row) m[row][col] = st.amplitude(row);
    }
    return m;
}

inline double max_abs_diff(const std::vector<std::vector<qbn::cplx>>& a,
                           const std::vector<std::vector<qbn::cplx>>& b) {
    double worst = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < a[r].size(); ++c)
            worst = std::max(worst, std::abs(a[r][c] - b[r][c]));
    return worst;
}

inline qbn::ExprPtr random_expr(qbn::Rng& rng, const std::vector<std::string>& names,
                                int depth) {
    const auto leaf = [&]() -> qbn::ExprPtr {
        if (rng.uniform() < 0.12) return qbn::BoolExpr::constant(rng.uniform() < 0.5);
        std::size_t k = static_cast<std::size_t>(rng.uniform() * names.size());
        if (k >= names.size()) k = names.size() - 1;
        return qbn::BoolExpr::variable(names[k]);
    };
    if (depth <= 0) return leaf();
    const double r = rng.uniform();
    if (r < 0.25) return leaf();
    if (r < 0.45) return qbn::BoolExpr::negate(random_expr(rng, names, depth - 1));
    qbn::ExprPtr lhs = random_expr(rng, names, depth - 1);
    qbn::ExprPtr rhs = random_expr(rng, names, depth - 1);
    if (r < 0.725) return qbn::BoolExpr::conjunction(std::move(lhs), std::move(rhs));
    return qbn::BoolExpr::disjunction(std::move(lhs), std::move(rhs));
}

// Random network rendered as file text and re-parsed, so generated specs go
// through the same front door as user input.
inline qbn::NetworkSpec random_network(qbn::Rng& rng, int n, int max_depth = 3) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("g" + std::to_string(i));
    std::string text = "targets, factors\n";
    for (int i = 0; i < n; ++i) {
        qbn::ExprPtr e = random_expr(rng, names, max_depth);
        text += names[i] + ", " + qbn::to_string(*e, /*full_parens=*/true) + "\n";
    }
    return qbn::parse_network(text);
}

// n-gene network where every gene copies itself: succ(x) = x, so every
// state is a fixed point and any subset of states is a union of basins.
inline qbn::NetworkSpec identity_network(int n) {
    std::string text = "targets, factors\n";
    for (int i = 0; i < n; ++i) {
        const std::string g = "g" + std::to_string(i);
        text += g + ", " + g + "\n";
    }
    return qbn::parse_network(text);
}

} // namespace qbn_test
