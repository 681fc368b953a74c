#include "qbn/circuit.hpp"

#include <algorithm>
#include <cstdio>

namespace qbn {

Gate Gate::x(int target) { return Gate{Kind::X, target, {}, 0.0}; }

Gate Gate::h(int target) { return Gate{Kind::H, target, {}, 0.0}; }

Gate Gate::mcx(std::vector<ControlBit> controls, int target) {
    return Gate{Kind::MCX, target, std::move(controls), 0.0};
}

Gate Gate::mcphase(std::vector<ControlBit> controls, int target, double phi) {
    return Gate{Kind::MCPhase, target, std::move(controls), phi};
}

bool Gate::controls_satisfied(BasisIndex b) const {
    for (const ControlBit& c : controls) {
        bool set = (b >> c.qubit) & 1;
        if (set != (c.polarity == Polarity::Positive)) return false;
    }
    return true;
}

void Circuit::push(Gate g) {
    auto check = [this](int q) {
        if (q < 0 || q >= num_qubits)
            throw IndexOutOfRange("gate qubit " + std::to_string(q) +
                                  " outside circuit of " + std::to_string(num_qubits) +
                                  " qubits");
    };
    check(g.target);
    for (const ControlBit& c : g.controls) {
        check(c.qubit);
        if (c.qubit == g.target)
            throw QubitCollision("control qubit " + std::to_string(c.qubit) +
                                 " collides with the gate target");
    }
    for (std::size_t i = 0; i < g.controls.size(); ++i)
        for (std::size_t j = i + 1; j < g.controls.size(); ++j)
            if (g.controls[i].qubit == g.controls[j].qubit)
                throw QubitCollision("duplicate control qubit " +
                                     std::to_string(g.controls[i].qubit));
    gates.push_back(std::move(g));
}

void Circuit::append(const Circuit& other) {
    if (other.num_qubits > num_qubits)
        throw IndexOutOfRange("cannot append a " + std::to_string(other.num_qubits) +
                              "-qubit circuit to a " + std::to_string(num_qubits) +
                              "-qubit one");
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Circuit inverse(const Circuit& c) {
    Circuit inv(c.num_qubits);
    inv.gates.reserve(c.gates.size());
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        Gate g = *it;
        if (g.kind == Gate::Kind::MCPhase) g.phi = -g.phi;
        inv.gates.push_back(std::move(g));
    }
    return inv;
}

void append_phase_on(Circuit& c, std::span<const int> qubits, BasisIndex j, double phi) {
    if (qubits.empty()) throw IndexOutOfRange("phase shifter needs at least one qubit");
    if (qubits.size() < 64 && j >> qubits.size())
        throw IndexOutOfRange("basis index " + std::to_string(j) + " needs more than " +
                              std::to_string(qubits.size()) + " qubits");

    // X-conjugation turns the all-ones condition into "bits of j": flip
    // every qubit whose bit of j is zero, phase the all-ones pattern, flip
    // back.
    std::vector<int> flipped;
    for (std::size_t k = 0; k < qubits.size(); ++k)
        if (!(j >> k & 1)) flipped.push_back(qubits[k]);

    for (int q : flipped) c.x(q);
    std::vector<ControlBit> controls;
    for (std::size_t k = 0; k + 1 < qubits.size(); ++k)
        controls.push_back({qubits[k], Polarity::Positive});
    c.mcphase(std::move(controls), qubits.back(), phi);
    for (int q : flipped) c.x(q);
}

Circuit conditional_phase_shifter(int n, BasisIndex j, double phi) {
    if (n < 1) throw IndexOutOfRange("phase shifter needs at least one qubit");
    if (n < 64 && j >> n)
        throw IndexOutOfRange("basis index " + std::to_string(j) +
                              " out of range for " + std::to_string(n) + " qubits");
    Circuit c(n);
    std::vector<int> qubits(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) qubits[static_cast<std::size_t>(q)] = q;
    append_phase_on(c, qubits, j, phi);
    return c;
}

Circuit multi_phase_on_set(int n, std::span<const BasisIndex> S, double phi) {
    std::vector<BasisIndex> sorted(S.begin(), S.end());
    std::sort(sorted.begin(), sorted.end());
    Circuit c(n);
    std::vector<int> qubits(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) qubits[static_cast<std::size_t>(q)] = q;
    for (BasisIndex j : sorted) append_phase_on(c, qubits, j, phi);
    return c;
}

std::string dump(const Circuit& c) {
    std::string out = "qubits " + std::to_string(c.num_qubits) + "\n";
    char buf[64];
    for (const Gate& g : c.gates) {
        switch (g.kind) {
        case Gate::Kind::X: out += "x"; break;
        case Gate::Kind::H: out += "h"; break;
        case Gate::Kind::MCX: out += "mcx"; break;
        case Gate::Kind::MCPhase: out += "mcphase"; break;
        }
        for (const ControlBit& cb : g.controls) {
            std::snprintf(buf, sizeof buf, " %c%d",
                          cb.polarity == Polarity::Positive ? '+' : '-', cb.qubit);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, " t%d", g.target);
        out += buf;
        if (g.kind == Gate::Kind::MCPhase) {
            std::snprintf(buf, sizeof buf, " phi=%.17g", g.phi);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::size_t lowered_gate_count(const Circuit& c) {
    std::size_t count = 0;
    for (const Gate& g : c.gates) {
        ++count;
        for (const ControlBit& cb : g.controls)
            if (cb.polarity == Polarity::Negative) count += 2;
    }
    return count;
}

} // namespace qbn
