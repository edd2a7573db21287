// qobf: obfuscate gate-level QASM circuits with metric-selected dummy SWAPs,
// restore them with the secret key, and run the exhaustive analysis harness.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qobf/qobf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw qobf::Error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw qobf::Error("cannot write " + path);
    }
    out << content;
}

qobf::Circuit load_circuit(const std::string& path) {
    return qobf::parse_qasm(read_file(path));
}

qobf::NoiseSpec parse_noise(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) {
        throw qobf::Error("--noise expects p1,p2,trajectories,seed");
    }
    qobf::NoiseSpec noise;
    noise.p1 = std::stod(parts[0]);
    noise.p2 = std::stod(parts[1]);
    noise.trajectories = std::stoull(parts[2]);
    noise.seed = std::stoull(parts[3]);
    return noise;
}

// Expands a '*' wildcard in the filename component; literal paths pass
// through.
std::vector<std::string> expand_glob(const std::string& pattern) {
    if (pattern.find('*') == std::string::npos) {
        return {pattern};
    }
    fs::path p(pattern);
    fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
    std::string name = p.filename().string();
    std::size_t star = name.find('*');
    std::string prefix = name.substr(0, star);
    std::string suffix = name.substr(star + 1);
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string file = entry.path().filename().string();
        if (file.size() < prefix.size() + suffix.size()) continue;
        if (file.rfind(prefix, 0) != 0) continue;
        if (file.substr(file.size() - suffix.size()) != suffix) continue;
        out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct SimFlags {
    bool exact = false;
    std::optional<std::uint64_t> shots;
    std::uint64_t seed = 0;
    std::string noise;

    qobf::SimMode mode() const {
        int chosen = (exact ? 1 : 0) + (shots.has_value() ? 1 : 0) + (!noise.empty() ? 1 : 0);
        if (chosen > 1) {
            throw qobf::Error("choose one of --exact, --shots, --noise");
        }
        if (shots) {
            return qobf::SimMode::with_shots(*shots, seed);
        }
        if (!noise.empty()) {
            return qobf::SimMode::noisy(parse_noise(noise));
        }
        return qobf::SimMode::exact();
    }

    void attach(CLI::App* cmd) {
        cmd->add_flag("--exact", exact, "exact statevector distribution (default)");
        cmd->add_option("--shots", shots, "sample N shots from the exact distribution");
        cmd->add_option("--seed", seed, "RNG seed for --shots");
        cmd->add_option("--noise", noise,
                        "stochastic Pauli noise as p1,p2,trajectories,seed");
    }
};

qobf::InputPolicy parse_inputs(const std::string& inputs, bool aggregate_max) {
    qobf::InputPolicy policy;
    if (inputs == "all") {
        policy = qobf::InputPolicy::all_basis();
        policy.aggregate_max = aggregate_max;
    } else if (inputs == "superposition") {
        policy = qobf::InputPolicy::superposition();
    } else {
        policy = qobf::InputPolicy::fixed(inputs);
    }
    return policy;
}

void emit(const json& j, const std::string& out_path) {
    std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gate-level quantum circuit obfuscation toolkit"};
    app.require_subcommand(1);

    // obfuscate
    std::string obf_in, obf_out, obf_key, obf_outcome;
    int obf_metric = 5;
    bool obf_markers = false;
    auto* obfuscate = app.add_subcommand(
        "obfuscate", "insert a metric-selected dummy SWAP and write the key");
    obfuscate->add_option("--in", obf_in, "input QASM")->required();
    obfuscate->add_option("--metric", obf_metric, "selection metric 1-6")
        ->check(CLI::Range(1, 6))
        ->required();
    obfuscate->add_option("--out", obf_out, "obfuscated QASM path")->required();
    obfuscate->add_option("--key", obf_key, "restoration key JSON path")->required();
    obfuscate->add_option("--outcome", obf_outcome,
                          "write the selection report here instead of stdout");
    obfuscate->add_flag("--include-markers", obf_markers,
                        "emit // DUMMY marker comments (debugging only)");

    // restore
    std::string res_in, res_key, res_out;
    auto* restore_cmd =
        app.add_subcommand("restore", "remove the dummy SWAP recorded in the key");
    restore_cmd->add_option("--in", res_in, "obfuscated QASM")->required();
    restore_cmd->add_option("--key", res_key, "key JSON")->required();
    restore_cmd->add_option("--out", res_out, "restored QASM path")->required();

    // overhead
    std::string ovh_orig, ovh_obf;
    auto* overhead_cmd =
        app.add_subcommand("overhead", "depth/gate-count deltas between two circuits");
    overhead_cmd->add_option("--orig", ovh_orig, "original QASM")->required();
    overhead_cmd->add_option("--obf", ovh_obf, "obfuscated QASM")->required();

    // features
    std::string feat_in, feat_out;
    auto* features_cmd = app.add_subcommand(
        "features", "per-candidate feature/score table as CSV");
    features_cmd->add_option("--in", feat_in, "input QASM")->required();
    features_cmd->add_option("--out", feat_out, "CSV path (default: stdout)");

    // simulate
    std::string sim_in, sim_input, sim_out;
    SimFlags sim_flags;
    auto* simulate_cmd = app.add_subcommand("simulate", "measured output distribution");
    simulate_cmd->add_option("--in", sim_in, "input QASM")->required();
    simulate_cmd
        ->add_option("--input", sim_input,
                     "basis input bits (MSB-first) or 'all' for every basis input "
                     "over non-constant qubits")
        ->required();
    simulate_cmd->add_option("--out", sim_out, "distribution JSON path (default: stdout)");
    sim_flags.attach(simulate_cmd);

    // tvd
    std::string tvd_a, tvd_b;
    auto* tvd_cmd = app.add_subcommand("tvd", "total variation distance of two "
                                              "distribution JSON files");
    tvd_cmd->add_option("a", tvd_a, "first distribution JSON")->required();
    tvd_cmd->add_option("b", tvd_b, "second distribution JSON")->required();

    // sweep
    std::string swp_in, swp_inputs = "all", swp_report, swp_csv;
    bool swp_max = false;
    unsigned swp_threads = 1;
    SimFlags swp_flags;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "exhaustive TVD analysis over every candidate position");
    sweep_cmd->add_option("--in", swp_in, "input QASM")->required();
    sweep_cmd->add_option("--inputs", swp_inputs,
                          "all | superposition | fixed bits (default: all)");
    sweep_cmd->add_flag("--max-aggregate", swp_max,
                        "aggregate all-basis TVDs by max instead of mean");
    sweep_cmd->add_option("--threads", swp_threads, "parallel candidate evaluations");
    sweep_cmd->add_option("--report", swp_report, "report JSON path")->required();
    sweep_cmd->add_option("--csv", swp_csv, "also write per-candidate CSV here");
    swp_flags.attach(sweep_cmd);

    // compare
    std::vector<std::string> cmp_reports;
    std::string cmp_out, cmp_csv;
    auto* compare_cmd = app.add_subcommand(
        "compare", "summarize metric performance across sweep reports");
    compare_cmd
        ->add_option("--reports", cmp_reports, "report JSON files (glob with '*' ok)")
        ->required()
        ->expected(-1);
    compare_cmd->add_option("--out", cmp_out, "summary JSON path")->required();
    compare_cmd->add_option("--csv", cmp_csv, "also write summary CSV here");

    // stats
    std::string stats_in;
    auto* stats_cmd = app.add_subcommand("stats", "gate count, depth, per-kind counts");
    stats_cmd->add_option("--in", stats_in, "input QASM")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*obfuscate) {
            qobf::Circuit circuit = load_circuit(obf_in);
            qobf::ObfuscationResult result =
                qobf::obfuscate_with_metric(circuit, obf_metric);
            write_file(obf_out, qobf::serialize_qasm(
                                    result.obfuscated,
                                    {.include_markers = obf_markers}));
            write_file(obf_key, qobf::key_to_json(result.key).dump(2) + "\n");
            emit(qobf::outcome_to_json(result.outcome), obf_outcome);
        } else if (*restore_cmd) {
            qobf::Circuit circuit = load_circuit(res_in);
            qobf::ObfuscationKey key =
                qobf::key_from_json(json::parse(read_file(res_key)));
            qobf::Circuit restored = qobf::restore(circuit, key);
            write_file(res_out, qobf::serialize_qasm(restored));
        } else if (*overhead_cmd) {
            qobf::OverheadReport report =
                qobf::overhead_report(load_circuit(ovh_orig), load_circuit(ovh_obf));
            emit(qobf::overhead_to_json(report), "");
        } else if (*features_cmd) {
            std::string csv = qobf::features_csv(load_circuit(feat_in));
            if (feat_out.empty()) {
                std::cout << csv;
            } else {
                write_file(feat_out, csv);
            }
        } else if (*simulate_cmd) {
            qobf::Circuit circuit = load_circuit(sim_in);
            qobf::SimMode mode = sim_flags.mode();
            auto run_one = [&](const std::string& bits) {
                switch (mode.kind) {
                    case qobf::SimMode::Kind::Shots:
                        return qobf::simulate_shots(circuit, bits, mode.shots, mode.seed);
                    case qobf::SimMode::Kind::Noisy:
                        return qobf::simulate_noisy(circuit, bits, mode.noise);
                    default: return qobf::simulate_exact(circuit, bits);
                }
            };
            if (sim_input == "all") {
                std::vector<qobf::QubitId> variable;
                for (qobf::QubitId q = 0; q < circuit.num_qubits; ++q) {
                    if (!circuit.constant_qubits.count(q)) variable.push_back(q);
                }
                json inputs = json::object();
                for (std::uint64_t v = 0; v < (std::uint64_t{1} << variable.size());
                     ++v) {
                    std::string bits(circuit.num_qubits, '0');
                    for (std::size_t j = 0; j < variable.size(); ++j) {
                        if ((v >> j) & 1) {
                            bits[circuit.num_qubits - 1 - variable[j]] = '1';
                        }
                    }
                    inputs[bits] = qobf::distribution_to_json(run_one(bits));
                }
                emit(json{{"policy", "all_basis_inputs"}, {"inputs", inputs}}, sim_out);
            } else {
                emit(qobf::distribution_to_json(run_one(sim_input)), sim_out);
            }
        } else if (*tvd_cmd) {
            qobf::Distribution a =
                qobf::distribution_from_json(json::parse(read_file(tvd_a)));
            qobf::Distribution b =
                qobf::distribution_from_json(json::parse(read_file(tvd_b)));
            double value = qobf::tvd(a, b);
            emit(json{{"tvd", value}, {"pct", value / 2.0 * 100.0}}, "");
        } else if (*sweep_cmd) {
            qobf::Circuit circuit = load_circuit(swp_in);
            qobf::SweepConfig config;
            config.policy = parse_inputs(swp_inputs, swp_max);
            config.mode = swp_flags.mode();
            config.threads = swp_threads;
            std::string name = fs::path(swp_in).stem().string();
            qobf::SweepReport report = qobf::run_sweep(circuit, name, config);
            write_file(swp_report, qobf::sweep_report_to_json(report).dump(2) + "\n");
            if (!swp_csv.empty()) {
                write_file(swp_csv, qobf::sweep_report_to_csv(report));
            }
            if (!report.complete) {
                std::cerr << "warning: report incomplete (some candidates failed)\n";
            }
            if (report.obfuscation_resistant) {
                std::cerr << "warning: no candidate corrupted the output "
                             "(obfuscation-resistant circuit)\n";
            }
        } else if (*compare_cmd) {
            std::vector<qobf::SweepReport> reports;
            for (const std::string& pattern : cmp_reports) {
                for (const std::string& path : expand_glob(pattern)) {
                    reports.push_back(
                        qobf::sweep_report_from_json(json::parse(read_file(path))));
                }
            }
            auto summaries = qobf::compare_metrics(reports);
            write_file(cmp_out, qobf::metric_summary_to_json(summaries).dump(2) + "\n");
            if (!cmp_csv.empty()) {
                write_file(cmp_csv, qobf::metric_summary_to_csv(summaries));
            }
        } else if (*stats_cmd) {
            qobf::CircuitStats stats = qobf::circuit_stats(load_circuit(stats_in));
            json per_kind = json::object();
            for (const auto& [kind, count] : stats.per_kind) per_kind[kind] = count;
            emit(json{{"gate_count", stats.gate_count},
                      {"depth", stats.depth},
                      {"per_kind", per_kind}},
                 "");
        }
    } catch (const qobf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
