#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qobf/errors.hpp"

namespace qobf {

/// Flat qubit index across all quantum registers (registers are flattened
/// in declaration order at parse time).
using QubitId = std::uint32_t;

enum class GateKind : std::uint8_t { X, H, CX, CCX, Swap, Measure, Barrier };

inline const char* gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::X: return "x";
        case GateKind::H: return "h";
        case GateKind::CX: return "cx";
        case GateKind::CCX: return "ccx";
        case GateKind::Swap: return "swap";
        case GateKind::Measure: return "measure";
        case GateKind::Barrier: return "barrier";
    }
    return "?";
}

inline bool is_unitary(GateKind kind) {
    return kind == GateKind::X || kind == GateKind::H || kind == GateKind::CX ||
           kind == GateKind::CCX || kind == GateKind::Swap;
}

/// A single circuit statement. X/H act on 1 qubit, CX/Swap on 2, CCX on 3.
/// For CX, qubits[0] is the control and qubits[1] the target; for CCX,
/// qubits[0..1] are controls and qubits[2] the target. Barriers list every
/// qubit they span. dummy_marker is set only on inserted dummy SWAPs.
struct Gate {
    GateKind kind = GateKind::X;
    std::vector<QubitId> qubits;
    std::optional<std::uint32_t> classical_target;  // Measure only
    std::optional<std::string> dummy_marker;        // Swap only

    static Gate x(QubitId q) { return {GateKind::X, {q}, {}, {}}; }
    static Gate h(QubitId q) { return {GateKind::H, {q}, {}, {}}; }
    static Gate cx(QubitId control, QubitId target) {
        return {GateKind::CX, {control, target}, {}, {}};
    }
    static Gate ccx(QubitId control0, QubitId control1, QubitId target) {
        return {GateKind::CCX, {control0, control1, target}, {}, {}};
    }
    static Gate swap(QubitId a, QubitId b) { return {GateKind::Swap, {a, b}, {}, {}}; }
    static Gate measure(QubitId q, std::uint32_t clbit) {
        return {GateKind::Measure, {q}, clbit, {}};
    }
    static Gate barrier(std::vector<QubitId> spanned) {
        return {GateKind::Barrier, std::move(spanned), {}, {}};
    }

    /// Control qubits (CX: one, CCX: two, otherwise empty).
    std::span<const QubitId> controls() const {
        switch (kind) {
            case GateKind::CX: return {qubits.data(), 1};
            case GateKind::CCX: return {qubits.data(), 2};
            default: return {};
        }
    }

    /// The qubit this gate writes along a single wire: the flipped qubit of
    /// X/CX/CCX and the rotated qubit of H. Swap/Measure/Barrier have none.
    std::optional<QubitId> target() const {
        switch (kind) {
            case GateKind::X:
            case GateKind::H: return qubits[0];
            case GateKind::CX: return qubits[1];
            case GateKind::CCX: return qubits[2];
            default: return std::nullopt;
        }
    }

    bool operator==(const Gate&) const = default;
};

/// An ordered gate list over flattened qubit/classical registers.
/// Circuits are immutable by convention: every transform in this library
/// returns a new Circuit, so values are safe to share across threads.
struct Circuit {
    std::uint32_t num_qubits = 0;
    std::uint32_t num_clbits = 0;
    std::vector<Gate> gates;

    /// Declared constant wires (qubit -> initial 0/1), from `// CONST` pragmas.
    /// Constants are never inferred.
    std::map<QubitId, int> constant_qubits;

    bool operator==(const Circuit&) const = default;

    /// Checks every structural invariant; throws ValidationError on the
    /// first violation.
    void validate() const {
        std::set<std::pair<QubitId, std::uint32_t>> seen_measures;
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const Gate& g = gates[i];
            const std::string where = "gate " + std::to_string(i) + " (" +
                                      gate_name(g.kind) + ")";
            std::size_t arity = 0;
            switch (g.kind) {
                case GateKind::X:
                case GateKind::H:
                case GateKind::Measure: arity = 1; break;
                case GateKind::CX:
                case GateKind::Swap: arity = 2; break;
                case GateKind::CCX: arity = 3; break;
                case GateKind::Barrier: arity = g.qubits.size(); break;
            }
            if (g.qubits.size() != arity || (g.kind == GateKind::Barrier && g.qubits.empty())) {
                throw ValidationError(where + ": wrong operand count");
            }
            std::set<QubitId> distinct(g.qubits.begin(), g.qubits.end());
            if (distinct.size() != g.qubits.size()) {
                throw ValidationError(where + ": repeated qubit operand");
            }
            for (QubitId q : g.qubits) {
                if (q >= num_qubits) {
                    throw ValidationError(where + ": qubit " + std::to_string(q) +
                                          " out of range (num_qubits = " +
                                          std::to_string(num_qubits) + ")");
                }
            }
            if (g.kind == GateKind::Measure) {
                if (!g.classical_target) {
                    throw ValidationError(where + ": measure without classical target");
                }
                if (*g.classical_target >= num_clbits) {
                    throw ValidationError(where + ": classical bit " +
                                          std::to_string(*g.classical_target) +
                                          " out of range");
                }
                if (!seen_measures.insert({g.qubits[0], *g.classical_target}).second) {
                    throw ValidationError(where + ": duplicate measure of qubit " +
                                          std::to_string(g.qubits[0]) + " into bit " +
                                          std::to_string(*g.classical_target));
                }
            } else if (g.classical_target) {
                throw ValidationError(where + ": classical target on non-measure gate");
            }
            if (g.dummy_marker && g.kind != GateKind::Swap) {
                throw ValidationError(where + ": dummy marker on non-swap gate");
            }
        }
        for (const auto& [q, value] : constant_qubits) {
            if (q >= num_qubits) {
                throw ValidationError("constant qubit " + std::to_string(q) +
                                      " out of range");
            }
            if (value != 0 && value != 1) {
                throw ValidationError("constant qubit " + std::to_string(q) +
                                      " must be 0 or 1");
            }
        }
    }
};

/// Copy with all dummy markers removed; used for marker-insensitive
/// structural comparison.
inline Circuit strip_markers(const Circuit& circuit) {
    Circuit out = circuit;
    for (Gate& g : out.gates) {
        g.dummy_marker.reset();
    }
    return out;
}

}  // namespace qobf
