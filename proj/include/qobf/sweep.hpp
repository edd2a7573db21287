#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qobf/circuit.hpp"
#include "qobf/errors.hpp"
#include "qobf/features.hpp"
#include "qobf/metrics.hpp"
#include "qobf/obfuscate.hpp"
#include "qobf/qasm.hpp"
#include "qobf/simulate.hpp"
#include "qobf/slicing.hpp"

namespace qobf {

struct CandidateRow {
    CandidatePosition candidate;
    FeatureVector features;
    std::size_t score = 0;
    double tvd = 0.0;
    bool failed = false;
    std::string error;
};

struct MetricRow {
    MetricId metric_id = 0;
    std::size_t chosen_position = 0;
    double tvd = 0.0;
    double delta_vs_best_pct = 0.0;     // (tvd - best) / 2 * 100
    double delta_vs_average_pct = 0.0;  // (tvd - average) / 2 * 100
};

struct SweepConfig {
    InputPolicy policy = InputPolicy::all_basis();
    SimMode mode = SimMode::exact();
    unsigned threads = 1;  // candidate evaluations to run concurrently
};

/// Exhaustive per-candidate analysis of one circuit: TVD for every legal
/// dummy-SWAP position, Best/Worst/Average aggregates, and each metric's
/// pick scored against them.
struct SweepReport {
    std::string circuit_name;
    std::vector<CandidateRow> candidate_rows;
    double best_tvd = 0.0;     // max over rows
    double worst_tvd = 0.0;    // min over rows
    double average_tvd = 0.0;  // arithmetic mean
    std::vector<MetricRow> metric_rows;
    nlohmann::json sim_config;
    bool complete = true;  // false when any candidate evaluation failed
    bool obfuscation_resistant = false;  // no candidate produced TVD > 0
};

namespace detail {

inline nlohmann::json sim_config_json(const SweepConfig& config) {
    nlohmann::json policy;
    switch (config.policy.kind) {
        case InputPolicy::Kind::AllBasisInputs:
            policy = {{"inputs", "all"},
                      {"aggregate", config.policy.aggregate_max ? "max" : "mean"}};
            break;
        case InputPolicy::Kind::Fixed:
            policy = {{"inputs", config.policy.bits}};
            break;
        case InputPolicy::Kind::Superposition:
            policy = {{"inputs", "superposition"}};
            break;
    }
    nlohmann::json mode;
    switch (config.mode.kind) {
        case SimMode::Kind::Exact: mode = {{"sim", "exact"}}; break;
        case SimMode::Kind::Shots:
            mode = {{"sim", "shots"},
                    {"shots", config.mode.shots},
                    {"seed", config.mode.seed}};
            break;
        case SimMode::Kind::Noisy:
            mode = {{"sim", "noisy"},
                    {"p1", config.mode.noise.p1},
                    {"p2", config.mode.noise.p2},
                    {"trajectories", config.mode.noise.trajectories},
                    {"seed", config.mode.noise.seed}};
            break;
    }
    // Thread count is execution detail, not configuration: serial and
    // parallel sweeps must emit identical reports.
    mode.update(policy);
    return mode;
}

inline CandidateRow evaluate_candidate(const Circuit& circuit,
                                       const ScoredCandidate& scored,
                                       const SweepConfig& config) {
    CandidateRow row;
    row.candidate = scored.candidate;
    row.features = scored.features;
    row.score = scored.score;
    try {
        auto [obfuscated, key] = insert_swap(circuit, scored.candidate);
        row.tvd = circuit_tvd(circuit, obfuscated, config.policy, config.mode);
        Circuit restored = restore(obfuscated, key);
        if (canonical_qasm(restored) != canonical_qasm(circuit)) {
            throw KeyMismatchError("restoration did not reproduce the original");
        }
    } catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
        row.tvd = 0.0;
    }
    return row;
}

}  // namespace detail

/// Inserts one dummy SWAP at every candidate position, simulates, restores,
/// and aggregates. Candidate evaluations are independent; with
/// config.threads > 1 they run concurrently and are folded back in
/// position order, so the report does not depend on the thread count.
inline SweepReport run_sweep(const Circuit& circuit, const std::string& circuit_name,
                             const SweepConfig& config) {
    std::vector<Slice> slices = slice_circuit(circuit);
    std::vector<CandidatePosition> candidates = enumerate_candidates(slices);
    if (candidates.empty()) {
        throw CandidateError("circuit has no legal dummy-SWAP insertion point");
    }
    std::vector<ScoredCandidate> scored = score_candidates(circuit, slices, candidates);

    SweepReport report;
    report.circuit_name = circuit_name;
    report.sim_config = detail::sim_config_json(config);
    report.candidate_rows.resize(scored.size());

    if (config.threads <= 1) {
        for (std::size_t i = 0; i < scored.size(); ++i) {
            report.candidate_rows[i] = detail::evaluate_candidate(circuit, scored[i], config);
        }
    } else {
        // Work-stealing over candidate indices; rows land at their index so
        // the fold order is independent of scheduling.
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < scored.size();
                 i = next.fetch_add(1)) {
                report.candidate_rows[i] =
                    detail::evaluate_candidate(circuit, scored[i], config);
            }
        };
        std::vector<std::thread> pool;
        unsigned n = std::min<unsigned>(config.threads,
                                        static_cast<unsigned>(scored.size()));
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    double sum = 0.0;
    std::size_t ok = 0;
    bool first = true;
    for (const CandidateRow& row : report.candidate_rows) {
        if (row.failed) {
            report.complete = false;
            continue;
        }
        if (first) {
            report.best_tvd = report.worst_tvd = row.tvd;
            first = false;
        } else {
            report.best_tvd = std::max(report.best_tvd, row.tvd);
            report.worst_tvd = std::min(report.worst_tvd, row.tvd);
        }
        sum += row.tvd;
        ++ok;
    }
    report.average_tvd = ok ? sum / static_cast<double>(ok) : 0.0;
    report.obfuscation_resistant = report.best_tvd <= 0.0;

    for (MetricId m = 1; m <= 6; ++m) {
        MetricOutcome outcome = select_from_scored(scored, m);
        MetricRow row;
        row.metric_id = m;
        row.chosen_position = outcome.chosen.candidate.position_id;
        const CandidateRow& chosen_row =
            report.candidate_rows[row.chosen_position - 1];
        row.tvd = chosen_row.tvd;
        row.delta_vs_best_pct = (row.tvd - report.best_tvd) / 2.0 * 100.0;
        row.delta_vs_average_pct = (row.tvd - report.average_tvd) / 2.0 * 100.0;
        report.metric_rows.push_back(row);
    }
    return report;
}

inline nlohmann::json features_to_json(const FeatureVector& f) {
    return {{"depth", f.depth},
            {"measured_qubits", f.measured_qubits},
            {"control_usage", f.control_usage},
            {"controls_in_paths", f.controls_in_paths},
            {"involves_constant", f.involves_constant}};
}

inline FeatureVector features_from_json(const nlohmann::json& j) {
    FeatureVector f;
    f.depth = j.at("depth").get<std::size_t>();
    f.measured_qubits = j.at("measured_qubits").get<unsigned>();
    f.control_usage = j.at("control_usage").get<std::size_t>();
    f.controls_in_paths = j.at("controls_in_paths").get<std::size_t>();
    f.involves_constant = j.at("involves_constant").get<bool>();
    return f;
}

inline nlohmann::json scored_candidate_to_json(const ScoredCandidate& c) {
    return {{"position_id", c.candidate.position_id},
            {"slice_index", c.candidate.slice_index},
            {"qubit_a", c.candidate.qubit_a},
            {"qubit_b", c.candidate.qubit_b},
            {"features", features_to_json(c.features)},
            {"score", c.score}};
}

/// Metric selection report: metric id, chosen position, surviving set,
/// per-pass pruning trace.
inline nlohmann::json outcome_to_json(const MetricOutcome& outcome) {
    nlohmann::json survivors = nlohmann::json::array();
    for (const ScoredCandidate& c : outcome.surviving_set) {
        survivors.push_back(scored_candidate_to_json(c));
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const PrunePassTrace& t : outcome.pruning_trace) {
        trace.push_back({{"pass", t.pass},
                         {"before", t.before},
                         {"after", t.after},
                         {"skipped", t.skipped}});
    }
    return {{"metric_id", outcome.metric},
            {"chosen", scored_candidate_to_json(outcome.chosen)},
            {"surviving_set", survivors},
            {"pruning_trace", trace}};
}

/// Distribution JSON: {"shots": number, "counts": {bitstring: number}}.
inline nlohmann::json distribution_to_json(const Distribution& d) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [key, value] : d.counts) counts[key] = value;
    return {{"shots", d.shots}, {"counts", counts}};
}

inline Distribution distribution_from_json(const nlohmann::json& j) {
    Distribution d;
    d.shots = j.at("shots").get<double>();
    for (const auto& [key, value] : j.at("counts").items()) {
        d.counts[key] = value.get<double>();
    }
    return d;
}

inline nlohmann::json sweep_report_to_json(const SweepReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const CandidateRow& row : report.candidate_rows) {
        nlohmann::json r = {{"position_id", row.candidate.position_id},
                            {"slice_index", row.candidate.slice_index},
                            {"qubit_a", row.candidate.qubit_a},
                            {"qubit_b", row.candidate.qubit_b},
                            {"features", features_to_json(row.features)},
                            {"score", row.score},
                            {"tvd", row.tvd}};
        if (row.failed) {
            r["failed"] = true;
            r["error"] = row.error;
        }
        rows.push_back(r);
    }
    nlohmann::json metrics = nlohmann::json::array();
    for (const MetricRow& row : report.metric_rows) {
        metrics.push_back({{"metric_id", row.metric_id},
                           {"chosen_position", row.chosen_position},
                           {"tvd", row.tvd},
                           {"delta_vs_best_pct", row.delta_vs_best_pct},
                           {"delta_vs_average_pct", row.delta_vs_average_pct}});
    }
    return {{"circuit_name", report.circuit_name},
            {"candidate_rows", rows},
            {"best_tvd", report.best_tvd},
            {"worst_tvd", report.worst_tvd},
            {"average_tvd", report.average_tvd},
            {"metric_rows", metrics},
            {"sim_config", report.sim_config},
            {"complete", report.complete},
            {"obfuscation_resistant", report.obfuscation_resistant}};
}

inline SweepReport sweep_report_from_json(const nlohmann::json& j) {
    SweepReport report;
    report.circuit_name = j.at("circuit_name").get<std::string>();
    for (const auto& r : j.at("candidate_rows")) {
        CandidateRow row;
        row.candidate.position_id = r.at("position_id").get<std::size_t>();
        row.candidate.slice_index = r.at("slice_index").get<std::size_t>();
        row.candidate.qubit_a = r.at("qubit_a").get<QubitId>();
        row.candidate.qubit_b = r.at("qubit_b").get<QubitId>();
        row.features = features_from_json(r.at("features"));
        row.score = r.at("score").get<std::size_t>();
        row.tvd = r.at("tvd").get<double>();
        if (r.contains("failed")) {
            row.failed = r.at("failed").get<bool>();
            row.error = r.value("error", "");
        }
        report.candidate_rows.push_back(std::move(row));
    }
    report.best_tvd = j.at("best_tvd").get<double>();
    report.worst_tvd = j.at("worst_tvd").get<double>();
    report.average_tvd = j.at("average_tvd").get<double>();
    for (const auto& r : j.at("metric_rows")) {
        MetricRow row;
        row.metric_id = r.at("metric_id").get<MetricId>();
        row.chosen_position = r.at("chosen_position").get<std::size_t>();
        row.tvd = r.at("tvd").get<double>();
        row.delta_vs_best_pct = r.at("delta_vs_best_pct").get<double>();
        row.delta_vs_average_pct = r.at("delta_vs_average_pct").get<double>();
        report.metric_rows.push_back(row);
    }
    report.sim_config = j.at("sim_config");
    report.complete = j.at("complete").get<bool>();
    report.obfuscation_resistant = j.at("obfuscation_resistant").get<bool>();
    return report;
}

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

}  // namespace detail

/// One CSV row per candidate: the `features` CLI columns plus tvd.
inline std::string sweep_report_to_csv(const SweepReport& report) {
    std::ostringstream out;
    out << "position_id,slice_index,qubit_a,qubit_b,depth,measured,control_usage,"
           "controls_in_paths,constant,score,tvd\n";
    for (const CandidateRow& row : report.candidate_rows) {
        out << row.candidate.position_id << ',' << row.candidate.slice_index << ','
            << row.candidate.qubit_a << ',' << row.candidate.qubit_b << ','
            << row.features.depth << ',' << row.features.measured_qubits << ','
            << row.features.control_usage << ',' << row.features.controls_in_paths << ','
            << (row.features.involves_constant ? 1 : 0) << ',' << row.score << ','
            << detail::format_double(row.tvd) << '\n';
    }
    return out.str();
}

/// Candidate feature table without simulation, for the `features` CLI.
inline std::string features_csv(const Circuit& circuit) {
    std::vector<Slice> slices = slice_circuit(circuit);
    std::vector<ScoredCandidate> scored =
        score_candidates(circuit, slices, enumerate_candidates(slices));
    std::ostringstream out;
    out << "position_id,slice_index,qubit_a,qubit_b,depth,measured,control_usage,"
           "controls_in_paths,constant,score\n";
    for (const ScoredCandidate& c : scored) {
        out << c.candidate.position_id << ',' << c.candidate.slice_index << ','
            << c.candidate.qubit_a << ',' << c.candidate.qubit_b << ','
            << c.features.depth << ',' << c.features.measured_qubits << ','
            << c.features.control_usage << ',' << c.features.controls_in_paths << ','
            << (c.features.involves_constant ? 1 : 0) << ',' << c.score << '\n';
    }
    return out.str();
}

/// Cross-circuit metric summary: per-metric mean deltas against Best and
/// Average, and in how many circuits the metric strictly beats Average.
struct MetricSummary {
    MetricId metric_id = 0;
    double mean_delta_vs_best_pct = 0.0;
    double mean_delta_vs_average_pct = 0.0;
    std::size_t beats_average_count = 0;
    std::size_t circuits = 0;
};

inline std::vector<MetricSummary> compare_metrics(const std::vector<SweepReport>& reports) {
    if (reports.empty()) {
        throw Error("compare_metrics needs at least one report");
    }
    std::vector<MetricSummary> summaries;
    for (MetricId m = 1; m <= 6; ++m) {
        MetricSummary s;
        s.metric_id = m;
        for (const SweepReport& report : reports) {
            auto it = std::find_if(report.metric_rows.begin(), report.metric_rows.end(),
                                   [m](const MetricRow& r) { return r.metric_id == m; });
            if (it == report.metric_rows.end()) continue;
            s.mean_delta_vs_best_pct += it->delta_vs_best_pct;
            s.mean_delta_vs_average_pct += it->delta_vs_average_pct;
            if (it->tvd > report.average_tvd) ++s.beats_average_count;
            ++s.circuits;
        }
        if (s.circuits > 0) {
            s.mean_delta_vs_best_pct /= static_cast<double>(s.circuits);
            s.mean_delta_vs_average_pct /= static_cast<double>(s.circuits);
        }
        summaries.push_back(s);
    }
    return summaries;
}

inline nlohmann::json metric_summary_to_json(const std::vector<MetricSummary>& summaries) {
    nlohmann::json metrics = nlohmann::json::array();
    for (const MetricSummary& s : summaries) {
        metrics.push_back({{"metric_id", s.metric_id},
                           {"mean_delta_vs_best_pct", s.mean_delta_vs_best_pct},
                           {"mean_delta_vs_average_pct", s.mean_delta_vs_average_pct},
                           {"beats_average_count", s.beats_average_count},
                           {"circuits", s.circuits}});
    }
    return {{"metrics", metrics}};
}

inline std::string metric_summary_to_csv(const std::vector<MetricSummary>& summaries) {
    std::ostringstream out;
    out << "metric_id,mean_delta_vs_best_pct,mean_delta_vs_average_pct,"
           "beats_average_count,circuits\n";
    for (const MetricSummary& s : summaries) {
        out << s.metric_id << ',' << detail::format_double(s.mean_delta_vs_best_pct)
            << ',' << detail::format_double(s.mean_delta_vs_average_pct) << ','
            << s.beats_average_count << ',' << s.circuits << '\n';
    }
    return out.str();
}

}  // namespace qobf
