#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/errors.hpp"

namespace qobf {

/// One parallel time-step: a maximal group of gates acting on pairwise
/// disjoint qubits. Barriers delimit slices but are never members.
struct Slice {
    std::size_t index = 0;
    std::vector<std::size_t> gate_indices;  // into Circuit::gates, program order
    std::set<QubitId> occupied;
    std::set<QubitId> free;  // complement of occupied
};

/// A legal dummy-SWAP insertion point: slice plus an unordered free-qubit
/// pair (qubit_a < qubit_b). position_id is 1-based and dense in
/// enumeration order.
struct CandidatePosition {
    std::size_t position_id = 0;
    std::size_t slice_index = 0;
    QubitId qubit_a = 0;
    QubitId qubit_b = 0;

    bool operator==(const CandidatePosition&) const = default;
};

inline bool is_full_barrier(const Gate& g, std::uint32_t num_qubits) {
    return g.kind == GateKind::Barrier && g.qubits.size() == num_qubits;
}

namespace detail {

inline Slice make_slice(const Circuit& circuit, std::size_t index,
                        std::vector<std::size_t> gate_indices) {
    Slice s;
    s.index = index;
    s.gate_indices = std::move(gate_indices);
    for (std::size_t gi : s.gate_indices) {
        for (QubitId q : circuit.gates[gi].qubits) {
            s.occupied.insert(q);
        }
    }
    for (QubitId q = 0; q < circuit.num_qubits; ++q) {
        if (!s.occupied.count(q)) {
            s.free.insert(q);
        }
    }
    return s;
}

}  // namespace detail

/// Partitions a circuit into slices.
///
/// If the circuit contains full-width barriers, slice boundaries are
/// exactly the barrier positions: the gates between consecutive barriers
/// form one slice, and overlapping qubit use within a region is an error.
/// Empty regions (adjacent barriers, or barriers at the circuit edges) do
/// not produce slices. Without barriers, gates are layered ASAP: each gate,
/// in program order, lands in the earliest slice after the last slice that
/// occupies any of its qubits. MEASURE occupies its qubit like any gate.
inline std::vector<Slice> slice_circuit(const Circuit& circuit) {
    circuit.validate();
    bool has_barrier = false;
    for (const Gate& g : circuit.gates) {
        if (is_full_barrier(g, circuit.num_qubits)) {
            has_barrier = true;
            break;
        }
    }

    std::vector<Slice> slices;
    if (has_barrier) {
        std::vector<std::size_t> region;
        std::size_t region_ordinal = 0;
        auto flush = [&]() {
            if (region.empty()) {
                ++region_ordinal;
                return;
            }
            std::set<QubitId> used;
            for (std::size_t gi : region) {
                for (QubitId q : circuit.gates[gi].qubits) {
                    if (!used.insert(q).second) {
                        throw SliceError("barrier region " + std::to_string(region_ordinal) +
                                         ": qubit " + std::to_string(q) +
                                         " used by more than one gate");
                    }
                }
            }
            slices.push_back(detail::make_slice(circuit, slices.size(), std::move(region)));
            region.clear();
            ++region_ordinal;
        };
        for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
            const Gate& g = circuit.gates[i];
            if (g.kind == GateKind::Barrier) {
                if (is_full_barrier(g, circuit.num_qubits)) {
                    flush();
                }
                continue;  // partial barriers are not members and not boundaries
            }
            region.push_back(i);
        }
        flush();
    } else {
        // ASAP layering. last[q] is the slice index of q's latest use.
        std::vector<long> last(circuit.num_qubits, -1);
        std::vector<std::vector<std::size_t>> layers;
        for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
            const Gate& g = circuit.gates[i];
            if (g.kind == GateKind::Barrier) {
                continue;
            }
            long at = 0;
            for (QubitId q : g.qubits) {
                at = std::max(at, last[q] + 1);
            }
            if (static_cast<std::size_t>(at) == layers.size()) {
                layers.emplace_back();
            }
            layers[at].push_back(i);
            for (QubitId q : g.qubits) {
                last[q] = at;
            }
        }
        slices.reserve(layers.size());
        for (auto& layer : layers) {
            slices.push_back(detail::make_slice(circuit, slices.size(), std::move(layer)));
        }
    }
    return slices;
}

/// All legal dummy-SWAP positions: for every slice with n >= 2 free qubits,
/// the C(n,2) unordered pairs, slice-major then lexicographic. Insertion at
/// any returned candidate leaves the slice count unchanged by construction.
inline std::vector<CandidatePosition> enumerate_candidates(const std::vector<Slice>& slices) {
    std::vector<CandidatePosition> out;
    std::size_t next_id = 1;
    for (const Slice& s : slices) {
        std::vector<QubitId> free(s.free.begin(), s.free.end());
        for (std::size_t i = 0; i < free.size(); ++i) {
            for (std::size_t j = i + 1; j < free.size(); ++j) {
                out.push_back({next_id++, s.index, free[i], free[j]});
            }
        }
    }
    return out;
}

/// Number of slices strictly after the candidate's slice.
inline std::size_t depth_from_output(const std::vector<Slice>& slices,
                                     const CandidatePosition& candidate) {
    if (candidate.slice_index >= slices.size()) {
        throw CandidateError("candidate slice " + std::to_string(candidate.slice_index) +
                             " out of range");
    }
    return slices.size() - 1 - candidate.slice_index;
}

/// Maps each barrier statement to the slice boundary it sits on. Boundary b
/// lies before slice b, so b ranges over [0, slices.size()]; boundary
/// slices.size() is the end of the circuit. Returns boundary -> gate
/// indices of the barrier statements there, preserving statement order.
inline std::map<std::size_t, std::vector<std::size_t>> barrier_statements_by_boundary(
    const Circuit& circuit, const std::vector<Slice>& slices) {
    std::map<std::size_t, std::size_t> slice_of_gate;
    for (const Slice& s : slices) {
        for (std::size_t gi : s.gate_indices) {
            slice_of_gate[gi] = s.index;
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        if (circuit.gates[i].kind != GateKind::Barrier) {
            continue;
        }
        std::size_t boundary = slices.size();
        for (std::size_t j = i + 1; j < circuit.gates.size(); ++j) {
            if (circuit.gates[j].kind != GateKind::Barrier) {
                boundary = slice_of_gate.at(j);
                break;
            }
        }
        out[boundary].push_back(i);
    }
    return out;
}

}  // namespace qobf
