#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qobf/circuit.hpp"
#include "qobf/digest.hpp"
#include "qobf/errors.hpp"
#include "qobf/metrics.hpp"
#include "qobf/qasm.hpp"
#include "qobf/slicing.hpp"
#include "qobf/stats.hpp"

namespace qobf {

/// One recorded dummy-SWAP insertion. added_boundaries lists the slice
/// boundaries whose barriers were introduced by the insertion (as opposed
/// to barriers the circuit already had), so restore removes exactly those.
struct SwapInsertion {
    std::string marker_id;
    std::size_t slice_index = 0;
    QubitId qubit_a = 0;
    QubitId qubit_b = 0;
    std::vector<std::size_t> added_boundaries;

    bool operator==(const SwapInsertion&) const = default;
};

/// Secret restoration key. original_digest is the SHA-256 of the canonical
/// serialization of the pre-insertion circuit; restore verifies against it.
struct ObfuscationKey {
    int version = 1;
    std::string hash_alg = "sha256";
    std::string original_digest;
    std::vector<SwapInsertion> insertions;
    MetricId metric_used = 0;  // 0 = direct insertion without the metric pipeline

    bool operator==(const ObfuscationKey&) const = default;
};

inline nlohmann::json key_to_json(const ObfuscationKey& key) {
    nlohmann::json insertions = nlohmann::json::array();
    for (const SwapInsertion& ins : key.insertions) {
        insertions.push_back({{"marker_id", ins.marker_id},
                              {"slice_index", ins.slice_index},
                              {"qubit_a", ins.qubit_a},
                              {"qubit_b", ins.qubit_b},
                              {"added_boundaries", ins.added_boundaries}});
    }
    return {{"version", key.version},
            {"hash_alg", key.hash_alg},
            {"original_digest", key.original_digest},
            {"metric_used", key.metric_used},
            {"insertions", insertions}};
}

inline ObfuscationKey key_from_json(const nlohmann::json& j) {
    ObfuscationKey key;
    key.version = j.at("version").get<int>();
    key.hash_alg = j.at("hash_alg").get<std::string>();
    key.original_digest = j.at("original_digest").get<std::string>();
    key.metric_used = j.at("metric_used").get<MetricId>();
    for (const auto& ins : j.at("insertions")) {
        SwapInsertion si;
        si.marker_id = ins.at("marker_id").get<std::string>();
        si.slice_index = ins.at("slice_index").get<std::size_t>();
        si.qubit_a = ins.at("qubit_a").get<QubitId>();
        si.qubit_b = ins.at("qubit_b").get<QubitId>();
        si.added_boundaries = ins.at("added_boundaries").get<std::vector<std::size_t>>();
        key.insertions.push_back(std::move(si));
    }
    return key;
}

/// Inserts a dummy SWAP at the candidate position, enclosed in barriers.
///
/// The result is fully barrier-delimited: the slice structure of the input
/// becomes explicit, the SWAP joins the candidate slice, and barriers the
/// input already had are reused. Slice count is unchanged. The returned key
/// records the insertion and which boundary barriers were added.
inline std::pair<Circuit, ObfuscationKey> insert_swap(const Circuit& circuit,
                                                      const CandidatePosition& candidate) {
    std::vector<Slice> slices = slice_circuit(circuit);
    if (candidate.slice_index >= slices.size()) {
        throw CandidateError("candidate slice " + std::to_string(candidate.slice_index) +
                             " does not exist in this circuit");
    }
    const Slice& target = slices[candidate.slice_index];
    for (QubitId q : {candidate.qubit_a, candidate.qubit_b}) {
        if (!target.free.count(q)) {
            throw CandidateError("qubit " + std::to_string(q) + " is occupied in slice " +
                                 std::to_string(candidate.slice_index));
        }
    }

    std::string digest = sha256_hex(canonical_qasm(circuit));
    std::size_t marker_ordinal = 0;
    for (const Gate& g : circuit.gates) {
        if (g.dummy_marker) ++marker_ordinal;
    }
    std::string marker =
        "dummy-" + digest.substr(0, 12) + "-" + std::to_string(marker_ordinal);

    auto existing = barrier_statements_by_boundary(circuit, slices);
    std::vector<QubitId> all;
    for (QubitId q = 0; q < circuit.num_qubits; ++q) all.push_back(q);

    const std::size_t num_slices = slices.size();
    SwapInsertion insertion{marker, candidate.slice_index, candidate.qubit_a,
                            candidate.qubit_b, {}};
    Circuit out;
    out.num_qubits = circuit.num_qubits;
    out.num_clbits = circuit.num_clbits;
    out.constant_qubits = circuit.constant_qubits;
    for (std::size_t b = 0; b <= num_slices; ++b) {
        auto it = existing.find(b);
        if (it != existing.end()) {
            for (std::size_t gi : it->second) {
                out.gates.push_back(circuit.gates[gi]);
            }
        } else {
            // Interior boundaries always get a barrier (keeps the layer
            // structure explicit for the slicer); edge boundaries only when
            // they enclose the insertion slice.
            bool interior = b >= 1 && b < num_slices;
            bool encloses = b == candidate.slice_index || b == candidate.slice_index + 1;
            if (interior || encloses) {
                out.gates.push_back(Gate::barrier(all));
                insertion.added_boundaries.push_back(b);
            }
        }
        if (b < num_slices) {
            for (std::size_t gi : slices[b].gate_indices) {
                out.gates.push_back(circuit.gates[gi]);
            }
            if (b == candidate.slice_index) {
                Gate dummy = Gate::swap(candidate.qubit_a, candidate.qubit_b);
                dummy.dummy_marker = marker;
                out.gates.push_back(std::move(dummy));
            }
        }
    }
    out.validate();

    ObfuscationKey key;
    key.original_digest = digest;
    key.insertions.push_back(std::move(insertion));
    return {std::move(out), std::move(key)};
}

/// Removes the recorded dummy SWAPs and the barriers their insertion added,
/// then verifies the canonical digest. Throws KeyMismatchError when a
/// recorded SWAP is missing (e.g. a compiler optimized it away or moved it)
/// or when the digest check fails.
inline Circuit restore(const Circuit& obfuscated, const ObfuscationKey& key) {
    if (key.hash_alg != "sha256") {
        throw KeyMismatchError("unsupported hash algorithm '" + key.hash_alg + "'");
    }
    if (key.insertions.empty()) {
        throw KeyMismatchError("key contains no insertions");
    }
    Circuit current = obfuscated;
    for (auto it = key.insertions.rbegin(); it != key.insertions.rend(); ++it) {
        const SwapInsertion& ins = *it;
        std::vector<Slice> slices;
        try {
            slices = slice_circuit(current);
        } catch (const Error& e) {
            throw KeyMismatchError(std::string("obfuscated circuit no longer slices: ") +
                                   e.what());
        }
        if (ins.slice_index >= slices.size()) {
            throw KeyMismatchError("recorded slice " + std::to_string(ins.slice_index) +
                                   " missing (marker " + ins.marker_id + ")");
        }

        // Locate the dummy SWAP inside the recorded slice via qubit pair,
        // preferring an exact marker match when markers survived.
        std::vector<std::size_t> matches;
        for (std::size_t gi : slices[ins.slice_index].gate_indices) {
            const Gate& g = current.gates[gi];
            if (g.kind != GateKind::Swap) continue;
            std::set<QubitId> pair(g.qubits.begin(), g.qubits.end());
            if (pair != std::set<QubitId>{ins.qubit_a, ins.qubit_b}) continue;
            if (g.dummy_marker && *g.dummy_marker == ins.marker_id) {
                matches.assign(1, gi);
                break;
            }
            if (!g.dummy_marker) matches.push_back(gi);
        }
        if (matches.size() != 1) {
            throw KeyMismatchError("dummy SWAP " + ins.marker_id + " on qubits (" +
                                   std::to_string(ins.qubit_a) + "," +
                                   std::to_string(ins.qubit_b) + ") not found in slice " +
                                   std::to_string(ins.slice_index));
        }

        std::set<std::size_t> to_remove{matches.front()};
        auto barrier_stmts = barrier_statements_by_boundary(current, slices);
        for (std::size_t b : ins.added_boundaries) {
            auto bit = barrier_stmts.find(b);
            if (bit == barrier_stmts.end() || bit->second.empty()) {
                throw KeyMismatchError("added barrier at boundary " + std::to_string(b) +
                                       " missing (marker " + ins.marker_id + ")");
            }
            // Remove one statement per recorded boundary; pre-existing ones
            // at the same boundary stay.
            for (std::size_t gi : bit->second) {
                if (!to_remove.count(gi)) {
                    to_remove.insert(gi);
                    break;
                }
            }
        }

        Circuit next;
        next.num_qubits = current.num_qubits;
        next.num_clbits = current.num_clbits;
        next.constant_qubits = current.constant_qubits;
        for (std::size_t gi = 0; gi < current.gates.size(); ++gi) {
            if (!to_remove.count(gi)) {
                next.gates.push_back(current.gates[gi]);
            }
        }
        current = std::move(next);
    }

    std::string digest = sha256_hex(canonical_qasm(current));
    if (digest != key.original_digest) {
        throw KeyMismatchError("digest mismatch after restoration: got " + digest +
                               ", key records " + key.original_digest);
    }
    return current;
}

struct OverheadReport {
    double depth_delta_pct = 0.0;
    double gate_delta_pct = 0.0;
    std::map<std::string, long long> per_kind_delta;
};

inline OverheadReport overhead_report(const Circuit& original, const Circuit& obfuscated) {
    CircuitStats before = circuit_stats(original);
    CircuitStats after = circuit_stats(obfuscated);
    auto pct = [](std::size_t a, std::size_t b) {
        if (a == 0) return b == 0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
        return 100.0 * (static_cast<double>(b) - static_cast<double>(a)) /
               static_cast<double>(a);
    };
    OverheadReport report;
    report.depth_delta_pct = pct(before.depth, after.depth);
    report.gate_delta_pct = pct(before.gate_count, after.gate_count);
    std::set<std::string> kinds;
    for (const auto& [k, _] : before.per_kind) kinds.insert(k);
    for (const auto& [k, _] : after.per_kind) kinds.insert(k);
    for (const std::string& k : kinds) {
        long long b = before.per_kind.count(k) ? static_cast<long long>(before.per_kind.at(k)) : 0;
        long long a = after.per_kind.count(k) ? static_cast<long long>(after.per_kind.at(k)) : 0;
        report.per_kind_delta[k] = a - b;
    }
    return report;
}

inline nlohmann::json overhead_to_json(const OverheadReport& report) {
    nlohmann::json per_kind = nlohmann::json::object();
    for (const auto& [k, d] : report.per_kind_delta) per_kind[k] = d;
    auto num = [](double v) {
        return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
    };
    return {{"depth_delta_pct", num(report.depth_delta_pct)},
            {"gate_delta_pct", num(report.gate_delta_pct)},
            {"per_kind_delta", per_kind}};
}

/// Metric-guided obfuscation: select a position with the given metric,
/// insert the dummy SWAP, record the metric in the key.
struct ObfuscationResult {
    Circuit obfuscated;
    ObfuscationKey key;
    MetricOutcome outcome;
};

inline ObfuscationResult obfuscate_with_metric(const Circuit& circuit, MetricId metric) {
    MetricOutcome outcome = select(circuit, metric);
    auto [obfuscated, key] = insert_swap(circuit, outcome.chosen.candidate);
    key.metric_used = metric;
    return {std::move(obfuscated), std::move(key), std::move(outcome)};
}

}  // namespace qobf
