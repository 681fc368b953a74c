#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qbn/errors.hpp"

namespace qbn {

/// Basis index in the simulator convention: qubit 0 is the least
/// significant bit.
using BasisIndex = std::uint64_t;

enum class Polarity : std::uint8_t {
    Positive, // fires on |1>
    Negative, // fires on |0>
};

struct ControlBit {
    int qubit;
    Polarity polarity = Polarity::Positive;

    friend bool operator==(const ControlBit&, const ControlBit&) = default;
};

struct Gate {
    enum class Kind : std::uint8_t { X, H, MCX, MCPhase };

    Kind kind;
    int target = 0;
    std::vector<ControlBit> controls; // empty for X and H
    double phi = 0.0;                 // MCPhase only

    static Gate x(int target);
    static Gate h(int target);
    static Gate mcx(std::vector<ControlBit> controls, int target);
    /// MCPhase with no controls is the plain single-qubit phase diag(1, e^{i phi}).
    static Gate mcphase(std::vector<ControlBit> controls, int target, double phi);

    /// True when every control fires on basis state `b` (target not examined).
    bool controls_satisfied(BasisIndex b) const;
};

/// Ordered gate list; the circuit unitary is the product of the gate
/// unitaries with the first gate applied first.
struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;

    explicit Circuit(int num_qubits = 0) : num_qubits(num_qubits) {}

    /// Validates qubit bounds and in-gate distinctness, then appends.
    void push(Gate g);
    void x(int target) { push(Gate::x(target)); }
    void h(int target) { push(Gate::h(target)); }
    void mcx(std::vector<ControlBit> controls, int target) { push(Gate::mcx(std::move(controls), target)); }
    void mcphase(std::vector<ControlBit> controls, int target, double phi) {
        push(Gate::mcphase(std::move(controls), target, phi));
    }
    /// Appends all gates of `other` (other.num_qubits must not exceed ours).
    void append(const Circuit& other);

    std::size_t gate_count() const { return gates.size(); }
};

/// Reversed gate list with every MCPhase angle negated; X, H and MCX are
/// self-inverse.
Circuit inverse(const Circuit& c);

/// Appends a phase shifter acting on an arbitrary ordered qubit subset:
/// e^{i phi} exactly on basis states whose bit at qubits[k] equals bit k of
/// `j`, for all k. Construction: X on every qubits[k] with bit k of j clear,
/// one MCPhase with positive controls on all listed qubits but the last,
/// then the same X layer again.
void append_phase_on(Circuit& c, std::span<const int> qubits, BasisIndex j, double phi);

/// The n-qubit unitary equal to identity except entry (j, j) = e^{i phi}.
/// Gate count is 2 * zeros(j) + 1.
Circuit conditional_phase_shifter(int n, BasisIndex j, double phi);

/// Concatenation of conditional phase shifters for every j in S (applied in
/// ascending j order); diagonal with e^{i phi} exactly on S.
Circuit multi_phase_on_set(int n, std::span<const BasisIndex> S, double phi);

/// One gate per line, stable across runs; used in golden tests.
std::string dump(const Circuit& c);

/// Gate count with negative-polarity controls lowered to X conjugation
/// (each negative control costs two extra X gates).
std::size_t lowered_gate_count(const Circuit& c);

} // namespace qbn
