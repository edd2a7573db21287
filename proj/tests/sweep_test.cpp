#include "qobf/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qobf/qasm.hpp"
#include "test_support.hpp"

using namespace qobf;
using qobf::testing::bundled_fixtures;
using qobf::testing::load_fixture;

namespace {

SweepConfig exact_config(unsigned threads = 1) {
    SweepConfig cfg;
    cfg.policy = InputPolicy::all_basis();
    cfg.mode = SimMode::exact();
    cfg.threads = threads;
    return cfg;
}

}  // namespace

TEST(Sweep, SingleCandidateDegenerates) {
    Circuit c = parse_qasm(
        "qreg q[4]; creg c[4]; x q[0]; x q[1]; barrier q; measure q[0] -> c[0]; "
        "measure q[1] -> c[1]; measure q[2] -> c[2]; measure q[3] -> c[3];");
    SweepReport report = run_sweep(c, "single", exact_config());
    ASSERT_EQ(report.candidate_rows.size(), 1u);
    EXPECT_DOUBLE_EQ(report.best_tvd, report.worst_tvd);
    EXPECT_DOUBLE_EQ(report.best_tvd, report.average_tvd);
    for (const MetricRow& row : report.metric_rows) {
        EXPECT_EQ(row.chosen_position, 1u);
        EXPECT_DOUBLE_EQ(row.tvd, report.best_tvd);
    }
}

TEST(Sweep, AggregateInvariantsOnFixtures) {
    for (const std::string& name : bundled_fixtures()) {
        Circuit c = load_fixture(name);
        SweepReport report = run_sweep(c, name, exact_config());
        EXPECT_TRUE(report.complete) << name;
        ASSERT_FALSE(report.candidate_rows.empty());
        double best = report.candidate_rows[0].tvd;
        double worst = best;
        double sum = 0.0;
        for (const CandidateRow& row : report.candidate_rows) {
            best = std::max(best, row.tvd);
            worst = std::min(worst, row.tvd);
            sum += row.tvd;
        }
        EXPECT_DOUBLE_EQ(report.best_tvd, best) << name;
        EXPECT_DOUBLE_EQ(report.worst_tvd, worst) << name;
        EXPECT_NEAR(report.average_tvd,
                    sum / static_cast<double>(report.candidate_rows.size()), 1e-12)
            << name;
        for (const MetricRow& row : report.metric_rows) {
            EXPECT_GE(row.tvd, report.worst_tvd) << name;
            EXPECT_LE(row.tvd, report.best_tvd) << name;
            EXPECT_NEAR(row.delta_vs_best_pct, (row.tvd - report.best_tvd) * 50.0, 1e-12);
            EXPECT_NEAR(row.delta_vs_average_pct, (row.tvd - report.average_tvd) * 50.0,
                        1e-12);
        }
        EXPECT_FALSE(report.obfuscation_resistant) << name;
    }
}

TEST(Sweep, RowByRowAgainstStandaloneBruteForce) {
    // Fully independent pipeline: its own enumeration, its own swap
    // insertion by gate-list surgery, dense-matrix simulation of every
    // basis input, and extended-precision averaging. Covers the unbarriered
    // chain, the single-output voter, and the superposition benchmark.
    for (const std::string& name :
         {std::string("ref3.qasm"), std::string("majority5.qasm"),
          std::string("ghz_mix5.qasm")}) {
        Circuit c = load_fixture(name);
        SweepReport report = run_sweep(c, name, exact_config());

        auto pairs = oracle::enumerate_pairs(c);
        ASSERT_EQ(report.candidate_rows.size(), pairs.size()) << name;

        std::vector<QubitId> variable;
        for (QubitId q = 0; q < c.num_qubits; ++q) {
            if (!c.constant_qubits.count(q)) variable.push_back(q);
        }
        auto slice_of = oracle::gate_slices(c);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            // Insert the swap right after the last gate of its slice
            // (equivalent placement: the pair is free there).
            Circuit mutated = c;
            std::size_t insert_at = 0;
            for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
                if (slice_of[gi] >= 0 &&
                    static_cast<std::size_t>(slice_of[gi]) <= pairs[i].slice) {
                    insert_at = gi + 1;
                }
            }
            mutated.gates.insert(mutated.gates.begin() + static_cast<long>(insert_at),
                                 Gate::swap(pairs[i].a, pairs[i].b));

            long double sum = 0.0L;
            std::uint64_t total = std::uint64_t{1} << variable.size();
            for (std::uint64_t v = 0; v < total; ++v) {
                std::string bits(c.num_qubits, '0');
                for (std::size_t j = 0; j < variable.size(); ++j) {
                    if ((v >> j) & 1) bits[c.num_qubits - 1 - variable[j]] = '1';
                }
                auto a = oracle::dense_distribution(c, oracle::input_value(c, bits));
                auto b = oracle::dense_distribution(mutated,
                                                    oracle::input_value(mutated, bits));
                sum += oracle::tvd_counts(a, b, 1.0);
            }
            double expected = static_cast<double>(sum / static_cast<long double>(total));
            EXPECT_NEAR(report.candidate_rows[i].tvd, expected, 1e-9)
                << name << " position " << i + 1;
        }
    }
}

TEST(Sweep, SerialAndParallelReportsAreByteIdentical) {
    Circuit c = load_fixture("counter123.qasm");
    SweepReport serial = run_sweep(c, "counter123", exact_config(1));
    SweepReport parallel = run_sweep(c, "counter123", exact_config(4));
    EXPECT_EQ(sweep_report_to_json(serial).dump(2),
              sweep_report_to_json(parallel).dump(2));
    EXPECT_EQ(sweep_report_to_csv(serial), sweep_report_to_csv(parallel));
}

TEST(Sweep, InputCircuitUntouched) {
    Circuit c = load_fixture("mod5_mix.qasm");
    Circuit copy = c;
    run_sweep(c, "mod5", exact_config(2));
    EXPECT_EQ(c, copy);
}

TEST(Sweep, ReportJsonRoundTrip) {
    Circuit c = load_fixture("majority5.qasm");
    SweepReport report = run_sweep(c, "majority5", exact_config());
    nlohmann::json j = sweep_report_to_json(report);
    SweepReport back = sweep_report_from_json(j);
    EXPECT_EQ(sweep_report_to_json(back).dump(), j.dump());
}

TEST(Sweep, CsvHasHeaderAndOneRowPerCandidate) {
    Circuit c = load_fixture("counter123.qasm");
    SweepReport report = run_sweep(c, "counter123", exact_config());
    std::string csv = sweep_report_to_csv(report);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    EXPECT_EQ(lines, report.candidate_rows.size() + 1);
    EXPECT_EQ(csv.rfind("position_id,slice_index,qubit_a,qubit_b,depth,measured,"
                        "control_usage,controls_in_paths,constant,score,tvd\n",
                        0),
              0u);
}

TEST(Sweep, FeaturesCsvColumns) {
    Circuit c = load_fixture("counter123.qasm");
    std::string csv = features_csv(c);
    EXPECT_EQ(csv.rfind("position_id,slice_index,qubit_a,qubit_b,depth,measured,"
                        "control_usage,controls_in_paths,constant,score\n",
                        0),
              0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);  // header + 16
}

TEST(Sweep, ShotsModeIsDeterministic) {
    Circuit c = load_fixture("majority5.qasm");
    SweepConfig cfg;
    cfg.mode = SimMode::with_shots(2000, 11);
    SweepReport a = run_sweep(c, "majority5", cfg);
    SweepReport b = run_sweep(c, "majority5", cfg);
    EXPECT_EQ(sweep_report_to_json(a).dump(), sweep_report_to_json(b).dump());
}

TEST(Compare, SingleReportEqualsItsRows) {
    Circuit c = load_fixture("counter123.qasm");
    SweepReport report = run_sweep(c, "counter123", exact_config());
    auto summaries = compare_metrics({report});
    ASSERT_EQ(summaries.size(), 6u);
    for (const MetricSummary& s : summaries) {
        const MetricRow& row = report.metric_rows[static_cast<std::size_t>(s.metric_id - 1)];
        EXPECT_DOUBLE_EQ(s.mean_delta_vs_best_pct, row.delta_vs_best_pct);
        EXPECT_DOUBLE_EQ(s.mean_delta_vs_average_pct, row.delta_vs_average_pct);
        EXPECT_EQ(s.circuits, 1u);
    }
}

TEST(Compare, BeatsAverageUsesStrictInequality) {
    SweepReport tie;
    tie.circuit_name = "tie";
    tie.average_tvd = 0.5;
    tie.best_tvd = 1.0;
    tie.worst_tvd = 0.1;
    for (MetricId m = 1; m <= 6; ++m) {
        tie.metric_rows.push_back({m, 1, 0.5, 0.0, 0.0});
    }
    SweepReport win = tie;
    win.circuit_name = "win";
    for (MetricRow& row : win.metric_rows) row.tvd = 0.75;

    auto summaries = compare_metrics({tie, win});
    for (const MetricSummary& s : summaries) {
        EXPECT_EQ(s.beats_average_count, 1u) << "metric " << s.metric_id;
        EXPECT_EQ(s.circuits, 2u);
    }
}

TEST(Compare, MatchesIndependentRecomputationOnFixtureSet) {
    std::vector<SweepReport> reports;
    for (const std::string& name : bundled_fixtures()) {
        reports.push_back(run_sweep(load_fixture(name), name, exact_config()));
    }
    auto summaries = compare_metrics(reports);
    for (MetricId m = 1; m <= 6; ++m) {
        long double best_sum = 0.0L;
        long double avg_sum = 0.0L;
        std::size_t beats = 0;
        for (const SweepReport& report : reports) {
            const MetricRow& row = report.metric_rows[static_cast<std::size_t>(m - 1)];
            best_sum += (row.tvd - report.best_tvd) / 2.0L * 100.0L;
            avg_sum += (row.tvd - report.average_tvd) / 2.0L * 100.0L;
            if (row.tvd > report.average_tvd) ++beats;
        }
        const MetricSummary& s = summaries[static_cast<std::size_t>(m - 1)];
        EXPECT_NEAR(s.mean_delta_vs_best_pct,
                    static_cast<double>(best_sum / static_cast<long double>(reports.size())),
                    1e-9);
        EXPECT_NEAR(s.mean_delta_vs_average_pct,
                    static_cast<double>(avg_sum / static_cast<long double>(reports.size())),
                    1e-9);
        EXPECT_EQ(s.beats_average_count, beats);
    }
}

TEST(Sweep, FailedCandidatesFlagReportIncomplete) {
    // Over the simulator cap: every candidate evaluation fails, rows carry
    // the error, and aggregates exclude them.
    Circuit c;
    c.num_qubits = kMaxSimQubits + 2;
    c.num_clbits = 1;
    c.gates.push_back(Gate::x(0));
    c.gates.push_back(Gate::measure(0, 0));
    SweepReport report = run_sweep(c, "too_big", exact_config());
    EXPECT_FALSE(report.complete);
    ASSERT_FALSE(report.candidate_rows.empty());
    for (const CandidateRow& row : report.candidate_rows) {
        EXPECT_TRUE(row.failed);
        EXPECT_FALSE(row.error.empty());
    }
    EXPECT_DOUBLE_EQ(report.average_tvd, 0.0);
}

TEST(Compare, EmptyInputRejected) {
    EXPECT_THROW(compare_metrics({}), Error);
}

TEST(Distribution, JsonRoundTrip) {
    Distribution d{{{"01", 25.0}, {"10", 75.0}}, 100.0};
    Distribution back = distribution_from_json(distribution_to_json(d));
    EXPECT_EQ(back, d);
}
