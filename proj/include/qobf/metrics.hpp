#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/errors.hpp"
#include "qobf/features.hpp"
#include "qobf/slicing.hpp"

namespace qobf {

/// Selection metric 1..6. Odd ids pick the highest score among survivors,
/// even ids the lowest. Metrics 1/2 apply pass 1 only, 3/4 add pass 2,
/// 5/6 add pass 3.
using MetricId = int;

inline bool metric_valid(MetricId id) { return id >= 1 && id <= 6; }
inline bool metric_selects_highest(MetricId id) { return id % 2 == 1; }

/// Pass 1: drop candidates at the primary output whose qubits are not
/// measured (depth == 0 and measured_qubits == 0).
inline std::vector<ScoredCandidate> prune_pass1(const std::vector<ScoredCandidate>& in) {
    std::vector<ScoredCandidate> out;
    for (const ScoredCandidate& c : in) {
        if (!(c.features.depth == 0 && c.features.measured_qubits == 0)) {
            out.push_back(c);
        }
    }
    return out;
}

/// Pass 2: keep only candidates involving a constant qubit.
inline std::vector<ScoredCandidate> prune_pass2(const std::vector<ScoredCandidate>& in) {
    std::vector<ScoredCandidate> out;
    for (const ScoredCandidate& c : in) {
        if (c.features.involves_constant) {
            out.push_back(c);
        }
    }
    return out;
}

/// Pass 3: keep only candidates with at least one control gate on a path
/// to a measured qubit.
inline std::vector<ScoredCandidate> prune_pass3(const std::vector<ScoredCandidate>& in) {
    std::vector<ScoredCandidate> out;
    for (const ScoredCandidate& c : in) {
        if (c.features.controls_in_paths >= 1) {
            out.push_back(c);
        }
    }
    return out;
}

struct PrunePassTrace {
    int pass = 0;
    std::size_t before = 0;
    std::size_t after = 0;
    bool skipped = false;  // pass would have emptied the set and was skipped
};

struct MetricOutcome {
    MetricId metric = 0;
    ScoredCandidate chosen;
    std::vector<ScoredCandidate> surviving_set;
    std::vector<PrunePassTrace> pruning_trace;
};

namespace detail {

inline auto tiebreak_key(const ScoredCandidate& c) {
    return std::make_tuple(c.candidate.slice_index, c.candidate.qubit_a,
                           c.candidate.qubit_b);
}

}  // namespace detail

/// Selects the metric's candidate from an already-scored list.
inline MetricOutcome select_from_scored(const std::vector<ScoredCandidate>& scored,
                                        MetricId metric) {
    if (!metric_valid(metric)) {
        throw Error("metric id must be in 1..6, got " + std::to_string(metric));
    }
    if (scored.empty()) {
        throw CandidateError("circuit has no legal dummy-SWAP insertion point");
    }

    MetricOutcome outcome;
    outcome.metric = metric;
    std::vector<ScoredCandidate> survivors = scored;
    int passes = metric <= 2 ? 1 : metric <= 4 ? 2 : 3;
    for (int pass = 1; pass <= passes; ++pass) {
        std::vector<ScoredCandidate> next = pass == 1   ? prune_pass1(survivors)
                                            : pass == 2 ? prune_pass2(survivors)
                                                        : prune_pass3(survivors);
        PrunePassTrace trace{pass, survivors.size(), next.size(), false};
        if (next.empty()) {
            // A pass that would leave nothing is skipped so that selection
            // never fails while at least one candidate exists.
            trace.after = trace.before;
            trace.skipped = true;
        } else {
            survivors = std::move(next);
        }
        outcome.pruning_trace.push_back(trace);
    }

    const bool want_highest = metric_selects_highest(metric);
    const ScoredCandidate* best = &survivors.front();
    for (const ScoredCandidate& c : survivors) {
        if (c.score != best->score) {
            if (want_highest ? c.score > best->score : c.score < best->score) {
                best = &c;
            }
        } else if (detail::tiebreak_key(c) < detail::tiebreak_key(*best)) {
            best = &c;
        }
    }
    outcome.chosen = *best;
    outcome.surviving_set = std::move(survivors);
    return outcome;
}

/// Full pipeline: slice, enumerate, score, prune, select.
inline MetricOutcome select(const Circuit& circuit, MetricId metric) {
    std::vector<Slice> slices = slice_circuit(circuit);
    std::vector<CandidatePosition> candidates = enumerate_candidates(slices);
    return select_from_scored(score_candidates(circuit, slices, candidates), metric);
}

}  // namespace qobf
