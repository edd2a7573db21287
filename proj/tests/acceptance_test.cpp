// Acceptance suite: one test per criterion, each printing a [criterion N]
// PASS/FAIL line. Tolerances are pinned in code.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <iostream>

#include "oracles.hpp"
#include "qobf/qobf.hpp"
#include "test_support.hpp"

using namespace qobf;
using qobf::testing::all_fixtures;
using qobf::testing::bundled_fixtures;
using qobf::testing::load_fixture;

namespace {

class CriterionPrinter {
public:
    CriterionPrinter(int number, std::string label)
        : number_(number), label_(std::move(label)) {}
    ~CriterionPrinter() {
        bool failed = ::testing::Test::HasFailure();
        std::cout << "[criterion " << number_ << "] " << (failed ? "FAIL" : "PASS")
                  << " - " << label_ << std::endl;
    }

private:
    int number_;
    std::string label_;
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

TEST(Acceptance, Criterion01RoundTripLaw) {
    CriterionPrinter p(1, "restore(insert_swap(c)) is canonically c with exact TVD 0");
    auto start = std::chrono::steady_clock::now();
    for (const std::string& name : all_fixtures()) {
        Circuit c = load_fixture(name);
        std::string canon = canonical_qasm(c);
        for (const CandidatePosition& cand : enumerate_candidates(slice_circuit(c))) {
            auto [obfuscated, key] = insert_swap(c, cand);
            Circuit restored = restore(obfuscated, key);
            ASSERT_EQ(canonical_qasm(restored), canon)
                << name << " position " << cand.position_id;
            ASSERT_EQ(
                circuit_tvd(c, restored, InputPolicy::all_basis(), SimMode::exact()),
                0.0)
                << name << " position " << cand.position_id;
        }
    }
    EXPECT_LT(seconds_since(start), 10.0);
}

TEST(Acceptance, Criterion02DepthPreservation) {
    CriterionPrinter p(2, "slice count unchanged by every insertion");
    for (const std::string& name : all_fixtures()) {
        Circuit c = load_fixture(name);
        std::size_t depth = slice_circuit(c).size();
        for (const CandidatePosition& cand : enumerate_candidates(slice_circuit(c))) {
            auto [obfuscated, key] = insert_swap(c, cand);
            EXPECT_EQ(slice_circuit(obfuscated).size(), depth)
                << name << " position " << cand.position_id;
        }
    }
}

TEST(Acceptance, Criterion03EnumerationOracle) {
    CriterionPrinter p(3, "candidate enumeration matches independent C(n,2) generator");
    for (const std::string& name : all_fixtures()) {
        Circuit c = load_fixture(name);
        auto candidates = enumerate_candidates(slice_circuit(c));
        EXPECT_EQ(candidates.size(), oracle::binomial2_sum(c)) << name;
        auto expected = oracle::enumerate_pairs(c);
        ASSERT_EQ(candidates.size(), expected.size()) << name;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            EXPECT_EQ(candidates[i].position_id, i + 1) << name;
            EXPECT_EQ(candidates[i].slice_index, expected[i].slice) << name;
            EXPECT_EQ(candidates[i].qubit_a, expected[i].a) << name;
            EXPECT_EQ(candidates[i].qubit_b, expected[i].b) << name;
        }
    }
    Circuit counter = load_fixture("counter123.qasm");
    EXPECT_EQ(slice_circuit(counter).size(), 8u);
    EXPECT_EQ(enumerate_candidates(slice_circuit(counter)).size(), 16u);
}

TEST(Acceptance, Criterion04TvdFormula) {
    CriterionPrinter p(4, "paper distribution pair gives 1.11474; identity 0; disjoint 2");
    auto start = std::chrono::steady_clock::now();
    Distribution original{{{"00000", 10212},
                           {"10000", 7889},
                           {"10100", 5084},
                           {"11000", 10057},
                           {"11100", 5227},
                           {"00100", 7186},
                           {"01000", 46956},
                           {"01100", 7389}},
                          100000.0};
    Distribution obfuscated{{{"00000", 14672},
                             {"10000", 3969},
                             {"10100", 6662},
                             {"11000", 2319},
                             {"11100", 1646},
                             {"00100", 53046},
                             {"01000", 6458},
                             {"01100", 11228}},
                            100000.0};
    double independent =
        oracle::tvd_counts(original.counts, obfuscated.counts, 100000.0);
    EXPECT_NEAR(tvd(original, obfuscated), independent, 1e-12);
    EXPECT_NEAR(tvd(original, obfuscated), 1.11474, 1e-9);
    EXPECT_DOUBLE_EQ(tvd(original, original), 0.0);
    Distribution left{{{"00", 5.0}}, 5.0};
    Distribution right{{{"11", 5.0}}, 5.0};
    EXPECT_DOUBLE_EQ(tvd(left, right), 2.0);
    EXPECT_LT(seconds_since(start), 1.0);
}

TEST(Acceptance, Criterion05SimulatorOracleEquivalence) {
    CriterionPrinter p(5, "statevector equals dense unitary-product oracle at 1e-9");
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20260810);
    for (const std::string& name : all_fixtures()) {
        Circuit c = load_fixture(name);
        ASSERT_LE(c.num_qubits, 6u);
        std::vector<std::string> inputs = {std::string(c.num_qubits, '0')};
        for (int extra = 0; extra < 3; ++extra) {
            std::string bits;
            for (std::uint32_t i = 0; i < c.num_qubits; ++i) {
                bits += rng() % 2 ? '1' : '0';
            }
            inputs.push_back(bits);
        }
        for (const std::string& bits : inputs) {
            Distribution got = simulate_exact(c, bits);
            auto want = oracle::dense_distribution(c, oracle::input_value(c, bits));
            for (const auto& [key, prob] : want) {
                auto it = got.counts.find(key);
                ASSERT_TRUE(it != got.counts.end()) << name << " key " << key;
                EXPECT_NEAR(it->second, prob, 1e-9) << name << " key " << key;
            }
            for (const auto& [key, prob] : got.counts) {
                EXPECT_TRUE(want.count(key) || prob <= 1e-9) << name << " key " << key;
            }
        }
    }

    // Analytic cases are exact.
    Circuit bell = parse_qasm(
        "qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q[0] -> c[0]; "
        "measure q[1] -> c[1];");
    Distribution bd = simulate_exact(bell, "00");
    EXPECT_NEAR(bd.counts.at("00"), 0.5, 1e-12);
    EXPECT_NEAR(bd.counts.at("11"), 0.5, 1e-12);
    Circuit toffoli = parse_qasm(
        "qreg q[3]; creg c[1]; ccx q[0],q[1],q[2]; measure q[2] -> c[0];");
    EXPECT_DOUBLE_EQ(simulate_exact(toffoli, "110").counts.at("1"), 1.0);
    EXPECT_LT(seconds_since(start), 30.0);
}

TEST(Acceptance, Criterion06MetricPipelineOracle) {
    CriterionPrinter p(6, "metric selection equals independent pipeline reimplementation");
    for (const std::string& name : all_fixtures()) {
        Circuit c = load_fixture(name);
        auto slices = slice_circuit(c);
        auto scored = score_candidates(c, slices, enumerate_candidates(slices));
        bool fallback_anywhere = false;
        std::vector<MetricOutcome> outcomes;
        for (MetricId m = 1; m <= 6; ++m) {
            MetricOutcome got = select(c, m);
            oracle::OracleSelection want = oracle::select(scored, m);
            EXPECT_EQ(got.chosen, want.chosen) << name << " metric " << m;
            EXPECT_EQ(got.surviving_set, want.survivors) << name << " metric " << m;
            for (const PrunePassTrace& t : got.pruning_trace) {
                fallback_anywhere |= t.skipped;
            }
            outcomes.push_back(std::move(got));
        }
        if (!fallback_anywhere) {
            auto subset_of = [](const std::vector<ScoredCandidate>& small,
                                const std::vector<ScoredCandidate>& large) {
                for (const ScoredCandidate& s : small) {
                    bool found = false;
                    for (const ScoredCandidate& l : large) {
                        found |= l.candidate == s.candidate;
                    }
                    if (!found) return false;
                }
                return true;
            };
            EXPECT_TRUE(subset_of(outcomes[4].surviving_set, outcomes[2].surviving_set))
                << name;
            EXPECT_TRUE(subset_of(outcomes[2].surviving_set, outcomes[0].surviving_set))
                << name;
        }
    }
}

TEST(Acceptance, Criterion07SweepSelfConsistency) {
    CriterionPrinter p(7, "sweep aggregates consistent; serial == parallel bytes");
    for (const std::string& name : all_fixtures()) {
        Circuit c = load_fixture(name);
        SweepConfig cfg;
        SweepReport report = run_sweep(c, name, cfg);
        EXPECT_TRUE(report.complete) << name;
        double sum = 0.0;
        for (const CandidateRow& row : report.candidate_rows) {
            EXPECT_GE(row.tvd, report.worst_tvd) << name;
            EXPECT_LE(row.tvd, report.best_tvd) << name;
            sum += row.tvd;
        }
        EXPECT_NEAR(report.average_tvd,
                    sum / static_cast<double>(report.candidate_rows.size()), 1e-9)
            << name;
        for (const MetricRow& row : report.metric_rows) {
            EXPECT_GE(row.tvd, report.worst_tvd) << name;
            EXPECT_LE(row.tvd, report.best_tvd) << name;
        }
        SweepConfig parallel = cfg;
        parallel.threads = 4;
        SweepReport threaded = run_sweep(c, name, parallel);
        EXPECT_EQ(sweep_report_to_json(report).dump(),
                  sweep_report_to_json(threaded).dump())
            << name;
    }
}

TEST(Acceptance, Criterion08ObfuscationEffectiveness) {
    CriterionPrinter p(8, "best exact TVD >= 0.3 on at least 3 of 5 bundled fixtures");
    int strong = 0;
    for (const std::string& name : bundled_fixtures()) {
        Circuit c = load_fixture(name);
        SweepReport report = run_sweep(c, name, SweepConfig{});
        if (report.best_tvd >= 0.3) ++strong;
        EXPECT_FALSE(report.obfuscation_resistant) << name;
    }
    EXPECT_GE(strong, 3);
}

TEST(Acceptance, Criterion09OverheadBound) {
    CriterionPrinter p(9, "one SWAP on >=20-gate fixtures: gates <= 5%, depth == 0%");
    bool saw_large_fixture = false;
    for (const std::string& name : all_fixtures()) {
        Circuit c = load_fixture(name);
        if (circuit_stats(c).gate_count < 20) continue;
        saw_large_fixture = true;
        for (const CandidatePosition& cand : enumerate_candidates(slice_circuit(c))) {
            auto [obfuscated, key] = insert_swap(c, cand);
            OverheadReport report = overhead_report(c, obfuscated);
            EXPECT_LE(report.gate_delta_pct, 5.0) << name;
            EXPECT_EQ(report.depth_delta_pct, 0.0) << name;
        }
    }
    EXPECT_TRUE(saw_large_fixture) << "fixture set must include a >=20-gate circuit";
}

TEST(Acceptance, Criterion10SeededDeterminism) {
    CriterionPrinter p(10, "shots/noisy bit-reproducible; zero noise equals exact");
    auto start = std::chrono::steady_clock::now();
    Circuit c = load_fixture("ghz_mix5.qasm");
    std::string zeros(c.num_qubits, '0');

    Distribution shots_a = simulate_shots(c, zeros, 200000, 9001);
    Distribution shots_b = simulate_shots(c, zeros, 200000, 9001);
    EXPECT_EQ(shots_a, shots_b);

    NoiseSpec noise{0.02, 0.04, 4242, 500};
    Distribution noisy_a = simulate_noisy(c, zeros, noise);
    Distribution noisy_b = simulate_noisy(c, zeros, noise);
    EXPECT_EQ(noisy_a, noisy_b);

    Distribution exact = simulate_exact(c, zeros);
    Distribution silent = simulate_noisy(c, zeros, {0.0, 0.0, 7, 5});
    ASSERT_EQ(silent.counts.size(), exact.counts.size());
    for (const auto& [key, prob] : exact.counts) {
        EXPECT_NEAR(silent.counts.at(key), prob, 1e-12) << key;
    }
    EXPECT_LT(seconds_since(start), 30.0);
}
