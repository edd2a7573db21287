#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/slicing.hpp"

namespace qobf {

/// The five positional features of a dummy-SWAP candidate.
struct FeatureVector {
    std::size_t depth = 0;             // slices between candidate and output
    unsigned measured_qubits = 0;      // of the pair, how many are measured (0..2)
    std::size_t control_usage = 0;     // control-slot incidences over the whole circuit
    std::size_t controls_in_paths = 0; // controls on measurement-reaching forward paths
    bool involves_constant = false;

    bool operator==(const FeatureVector&) const = default;
};

/// score = depth + control_usage (raw, unweighted).
inline std::size_t score(const FeatureVector& features) {
    return features.depth + features.control_usage;
}

struct ScoredCandidate {
    CandidatePosition candidate;
    FeatureVector features;
    std::size_t score = 0;

    bool operator==(const ScoredCandidate&) const = default;
};

/// How many of the candidate's two qubits are measured anywhere in the
/// circuit.
inline unsigned feature_measured(const Circuit& circuit,
                                 const CandidatePosition& candidate) {
    bool a = false, b = false;
    for (const Gate& g : circuit.gates) {
        if (g.kind != GateKind::Measure) continue;
        if (g.qubits[0] == candidate.qubit_a) a = true;
        if (g.qubits[0] == candidate.qubit_b) b = true;
    }
    return static_cast<unsigned>(a) + static_cast<unsigned>(b);
}

/// Control-slot incidences over the whole circuit where the control is one
/// of the candidate's qubits. A CCX with both controls in the pair counts
/// twice.
inline std::size_t feature_control_usage(const Circuit& circuit,
                                         const CandidatePosition& candidate) {
    std::size_t count = 0;
    for (const Gate& g : circuit.gates) {
        for (QubitId c : g.controls()) {
            if (c == candidate.qubit_a || c == candidate.qubit_b) ++count;
        }
    }
    return count;
}

inline bool feature_constant(const Circuit& circuit, const CandidatePosition& candidate) {
    return circuit.constant_qubits.count(candidate.qubit_a) > 0 ||
           circuit.constant_qubits.count(candidate.qubit_b) > 0;
}

namespace detail {

/// Per-wire time-ordered gate occurrences: wire q -> [(slice, gate index)].
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> wire_timeline(
    const Circuit& circuit, const std::vector<Slice>& slices) {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> wires(
        circuit.num_qubits);
    for (const Slice& s : slices) {
        for (std::size_t gi : s.gate_indices) {
            for (QubitId q : circuit.gates[gi].qubits) {
                wires[q].push_back({s.index, gi});
            }
        }
    }
    return wires;
}

}  // namespace detail

/// Distinct (gate instance, control qubit) incidences on forward walks from
/// the candidate's two qubits that eventually reach a measured wire.
///
/// A walk moves slice by slice along its wire starting at the candidate's
/// slice. At a gate where the wire is a control, the path splits: one branch
/// stays on the wire, the other bends to the gate's target and continues
/// forward from the next slice. At a gate where the wire is the target (or
/// a swap), the walk stays on the wire. A walk ends at a MEASURE on its
/// wire (counted) or at the end of the circuit (its incidences are
/// discarded). Empty time-steps are skipped. Incidences shared between the
/// two source walks count once.
inline std::size_t feature_controls_in_paths(const Circuit& circuit,
                                             const std::vector<Slice>& slices,
                                             const CandidatePosition& candidate) {
    auto wires = detail::wire_timeline(circuit, slices);

    // First gate on wire q at slice >= from, if any.
    auto next_on_wire = [&](QubitId q, std::size_t from)
        -> std::optional<std::pair<std::size_t, std::size_t>> {
        for (const auto& [slice, gi] : wires[q]) {
            if (slice >= from) return std::make_pair(slice, gi);
        }
        return std::nullopt;
    };

    // reaches[(slice, q)]: does some walk from here hit a MEASURE?
    std::map<std::pair<std::size_t, QubitId>, bool> reach_memo;
    auto reaches = [&](auto&& self, std::size_t from, QubitId q) -> bool {
        auto key = std::make_pair(from, q);
        auto it = reach_memo.find(key);
        if (it != reach_memo.end()) return it->second;
        reach_memo[key] = false;  // walks only move forward; no cycles
        bool result = false;
        if (auto hit = next_on_wire(q, from)) {
            auto [slice, gi] = *hit;
            const Gate& g = circuit.gates[gi];
            if (g.kind == GateKind::Measure) {
                result = true;
            } else {
                bool is_control = false;
                for (QubitId c : g.controls()) {
                    if (c == q) is_control = true;
                }
                result = self(self, slice + 1, q);
                if (is_control && !result) {
                    result = self(self, slice + 1, *g.target());
                }
            }
        }
        reach_memo[key] = result;
        return result;
    };

    std::set<std::pair<std::size_t, QubitId>> incidences;  // (gate index, control)
    std::set<std::pair<std::size_t, QubitId>> visited;     // (slice, wire)
    std::deque<std::pair<std::size_t, QubitId>> frontier;
    frontier.push_back({candidate.slice_index, candidate.qubit_a});
    frontier.push_back({candidate.slice_index, candidate.qubit_b});
    while (!frontier.empty()) {
        auto [from, q] = frontier.front();
        frontier.pop_front();
        if (!visited.insert({from, q}).second) continue;
        auto hit = next_on_wire(q, from);
        if (!hit) continue;
        auto [slice, gi] = *hit;
        const Gate& g = circuit.gates[gi];
        if (g.kind == GateKind::Measure) continue;
        bool is_control = false;
        for (QubitId c : g.controls()) {
            if (c == q) is_control = true;
        }
        if (is_control) {
            QubitId target = *g.target();
            if (reaches(reaches, slice + 1, q) || reaches(reaches, slice + 1, target)) {
                incidences.insert({gi, q});
            }
            frontier.push_back({slice + 1, q});
            frontier.push_back({slice + 1, target});
        } else {
            frontier.push_back({slice + 1, q});
        }
    }
    return incidences.size();
}

inline FeatureVector extract_features(const Circuit& circuit,
                                      const std::vector<Slice>& slices,
                                      const CandidatePosition& candidate) {
    FeatureVector f;
    f.depth = depth_from_output(slices, candidate);
    f.measured_qubits = feature_measured(circuit, candidate);
    f.control_usage = feature_control_usage(circuit, candidate);
    f.controls_in_paths = feature_controls_in_paths(circuit, slices, candidate);
    f.involves_constant = feature_constant(circuit, candidate);
    return f;
}

inline std::vector<ScoredCandidate> score_candidates(
    const Circuit& circuit, const std::vector<Slice>& slices,
    const std::vector<CandidatePosition>& candidates) {
    std::vector<ScoredCandidate> out;
    out.reserve(candidates.size());
    for (const CandidatePosition& c : candidates) {
        FeatureVector f = extract_features(circuit, slices, c);
        out.push_back({c, f, score(f)});
    }
    return out;
}

}  // namespace qobf
