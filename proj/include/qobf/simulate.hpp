#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/errors.hpp"
#include "qobf/slicing.hpp"

namespace qobf {

/// Largest circuit the statevector simulator accepts.
inline constexpr std::uint32_t kMaxSimQubits = 20;

/// Measurement outcome weights: bitstring over the measured classical bits
/// (most significant bit first) -> probability or shot count. shots is the
/// total weight.
struct Distribution {
    std::map<std::string, double> counts;
    double shots = 0.0;

    bool operator==(const Distribution&) const = default;

    Distribution normalized() const {
        if (counts.empty() || shots <= 0.0) {
            throw SimError("cannot normalize an empty distribution");
        }
        Distribution out;
        out.shots = 1.0;
        for (const auto& [key, value] : counts) {
            out.counts[key] = value / shots;
        }
        return out;
    }
};

/// Full statevector over num_qubits qubits; qubit 0 is the least
/// significant bit of the amplitude index.
class StateVector {
public:
    explicit StateVector(std::uint32_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits > kMaxSimQubits) {
            throw SimError("circuit has " + std::to_string(num_qubits) +
                           " qubits, simulator cap is " + std::to_string(kMaxSimQubits));
        }
        amplitudes_.assign(std::size_t{1} << num_qubits, {0.0, 0.0});
        amplitudes_[0] = {1.0, 0.0};
    }

    static StateVector basis(std::uint32_t num_qubits, std::uint64_t bits) {
        StateVector sv(num_qubits);
        sv.amplitudes_[0] = {0.0, 0.0};
        sv.amplitudes_[bits] = {1.0, 0.0};
        return sv;
    }

    std::uint32_t num_qubits() const { return num_qubits_; }
    const std::vector<std::complex<double>>& amplitudes() const { return amplitudes_; }

    void apply(const Gate& gate) {
        switch (gate.kind) {
            case GateKind::X: apply_x(gate.qubits[0]); break;
            case GateKind::H: apply_h(gate.qubits[0]); break;
            case GateKind::CX: apply_cx(gate.qubits[0], gate.qubits[1]); break;
            case GateKind::CCX:
                apply_ccx(gate.qubits[0], gate.qubits[1], gate.qubits[2]);
                break;
            case GateKind::Swap: apply_swap(gate.qubits[0], gate.qubits[1]); break;
            case GateKind::Barrier: break;
            case GateKind::Measure:
                throw SimError("measure is not a unitary; use measured_distribution");
        }
    }

    void apply_x(QubitId q) {
        const std::uint64_t mask = std::uint64_t{1} << q;
        for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
            if (!(i & mask)) std::swap(amplitudes_[i], amplitudes_[i | mask]);
        }
    }

    void apply_h(QubitId q) {
        static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const std::uint64_t mask = std::uint64_t{1} << q;
        for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
            if (i & mask) continue;
            auto a = amplitudes_[i];
            auto b = amplitudes_[i | mask];
            amplitudes_[i] = (a + b) * inv_sqrt2;
            amplitudes_[i | mask] = (a - b) * inv_sqrt2;
        }
    }

    void apply_cx(QubitId control, QubitId target) {
        const std::uint64_t c = std::uint64_t{1} << control;
        const std::uint64_t t = std::uint64_t{1} << target;
        for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & c) && !(i & t)) std::swap(amplitudes_[i], amplitudes_[i | t]);
        }
    }

    void apply_ccx(QubitId control0, QubitId control1, QubitId target) {
        const std::uint64_t c0 = std::uint64_t{1} << control0;
        const std::uint64_t c1 = std::uint64_t{1} << control1;
        const std::uint64_t t = std::uint64_t{1} << target;
        for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & c0) && (i & c1) && !(i & t)) {
                std::swap(amplitudes_[i], amplitudes_[i | t]);
            }
        }
    }

    void apply_swap(QubitId a, QubitId b) {
        const std::uint64_t ma = std::uint64_t{1} << a;
        const std::uint64_t mb = std::uint64_t{1} << b;
        for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & ma) && !(i & mb)) {
                std::swap(amplitudes_[i], amplitudes_[(i & ~ma) | mb]);
            }
        }
    }

    void apply_pauli(char pauli, QubitId q) {
        const std::uint64_t mask = std::uint64_t{1} << q;
        switch (pauli) {
            case 'X': apply_x(q); break;
            case 'Y':
                for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
                    if (i & mask) continue;
                    auto a0 = amplitudes_[i];
                    auto a1 = amplitudes_[i | mask];
                    amplitudes_[i] = std::complex<double>(0.0, -1.0) * a1;
                    amplitudes_[i | mask] = std::complex<double>(0.0, 1.0) * a0;
                }
                break;
            case 'Z':
                for (std::uint64_t i = 0; i < amplitudes_.size(); ++i) {
                    if (i & mask) amplitudes_[i] = -amplitudes_[i];
                }
                break;
            default: throw SimError("unknown Pauli");
        }
    }

    double norm() const {
        double sum = 0.0;
        for (const auto& a : amplitudes_) sum += std::norm(a);
        return std::sqrt(sum);
    }

private:
    std::uint32_t num_qubits_;
    std::vector<std::complex<double>> amplitudes_;
};

namespace detail {

/// Measured classical bits in descending order with their source qubits;
/// when a classical bit is written more than once, the last measure in
/// program order wins.
inline std::vector<std::pair<std::uint32_t, QubitId>> measurement_layout(
    const Circuit& circuit) {
    std::map<std::uint32_t, QubitId> by_clbit;
    for (const Gate& g : circuit.gates) {
        if (g.kind == GateKind::Measure) {
            by_clbit[*g.classical_target] = g.qubits[0];
        }
    }
    return {by_clbit.rbegin(), by_clbit.rend()};
}

/// Marginal distribution over the measured classical bits, tracing out
/// unmeasured qubits. Entries below 1e-12 are dropped.
inline Distribution measured_distribution(const StateVector& sv, const Circuit& circuit) {
    auto layout = measurement_layout(circuit);
    if (layout.empty()) {
        throw SimError("circuit measures nothing");
    }
    Distribution dist;
    dist.shots = 1.0;
    const auto& amps = sv.amplitudes();
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        double p = std::norm(amps[i]);
        if (p <= 1e-12) continue;
        std::string key;
        key.reserve(layout.size());
        for (const auto& [clbit, qubit] : layout) {
            key += (i >> qubit) & 1 ? '1' : '0';
        }
        dist.counts[key] += p;
    }
    return dist;
}

inline std::uint64_t parse_input_bits(const Circuit& circuit, const std::string& bits) {
    if (bits.size() != circuit.num_qubits) {
        throw SimError("input bits length " + std::to_string(bits.size()) +
                       " does not match qubit count " +
                       std::to_string(circuit.num_qubits));
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        char c = bits[i];
        if (c != '0' && c != '1') {
            throw SimError("input bits must be 0/1");
        }
        // Most significant qubit first, matching output bitstrings.
        QubitId q = static_cast<QubitId>(bits.size() - 1 - i);
        if (c == '1') value |= std::uint64_t{1} << q;
    }
    // Declared constants override the supplied bits at their positions.
    for (const auto& [q, v] : circuit.constant_qubits) {
        std::uint64_t mask = std::uint64_t{1} << q;
        value = v ? (value | mask) : (value & ~mask);
    }
    return value;
}

inline double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

/// Runs the unitary part of the circuit in slice order from the given basis
/// state, optionally preparing a uniform superposition over non-constant
/// qubits first.
inline StateVector run_unitaries(const Circuit& circuit, std::uint64_t input,
                                 bool superpose) {
    StateVector sv = StateVector::basis(circuit.num_qubits, input);
    if (superpose) {
        for (QubitId q = 0; q < circuit.num_qubits; ++q) {
            if (!circuit.constant_qubits.count(q)) sv.apply_h(q);
        }
    }
    for (const Slice& slice : slice_circuit(circuit)) {
        for (std::size_t gi : slice.gate_indices) {
            const Gate& g = circuit.gates[gi];
            if (is_unitary(g.kind)) sv.apply(g);
        }
    }
    return sv;
}

inline Distribution sample_counts(const Distribution& exact, std::uint64_t shots,
                                  std::uint64_t seed) {
    if (shots < 1) {
        throw SimError("shots must be >= 1");
    }
    std::vector<std::pair<std::string, double>> cdf;
    double acc = 0.0;
    for (const auto& [key, p] : exact.counts) {
        acc += p;
        cdf.push_back({key, acc});
    }
    std::mt19937_64 rng(mix_seed(seed, 0));
    Distribution out;
    out.shots = static_cast<double>(shots);
    for (std::uint64_t s = 0; s < shots; ++s) {
        double u = next_uniform(rng) * acc;
        auto it = std::lower_bound(
            cdf.begin(), cdf.end(), u,
            [](const auto& entry, double v) { return entry.second <= v; });
        if (it == cdf.end()) --it;
        out.counts[it->first] += 1.0;
    }
    return out;
}

}  // namespace detail

/// Exact output distribution of the circuit on the given basis input
/// (bitstring, most significant qubit first; declared constants override
/// their positions). Qubits without a MEASURE are traced out.
inline Distribution simulate_exact(const Circuit& circuit, const std::string& input_bits) {
    std::uint64_t input = detail::parse_input_bits(circuit, input_bits);
    StateVector sv = detail::run_unitaries(circuit, input, false);
    return detail::measured_distribution(sv, circuit);
}

/// Samples `shots` outcomes from the exact distribution with a seeded
/// generator. Deterministic given the seed.
inline Distribution simulate_shots(const Circuit& circuit, const std::string& input_bits,
                                   std::uint64_t shots, std::uint64_t seed) {
    return detail::sample_counts(simulate_exact(circuit, input_bits), shots, seed);
}

/// Stochastic Pauli noise: after each gate, with probability p1 (1-qubit
/// gates) or p2 (multi-qubit gates), a uniformly random non-identity Pauli
/// hits a uniformly random qubit of that gate.
struct NoiseSpec {
    double p1 = 0.0;
    double p2 = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t trajectories = 1;
};

namespace detail {

inline Distribution run_noisy(const Circuit& circuit, std::uint64_t input, bool superpose,
                              const NoiseSpec& noise) {
    if (noise.p1 < 0 || noise.p1 > 1 || noise.p2 < 0 || noise.p2 > 1) {
        throw SimError("noise probabilities must be in [0, 1]");
    }
    if (noise.trajectories < 1) {
        throw SimError("trajectories must be >= 1");
    }
    std::vector<Slice> slices = slice_circuit(circuit);
    if (measurement_layout(circuit).empty()) {
        throw SimError("circuit measures nothing");
    }
    Distribution sum;
    sum.shots = 1.0;
    const double weight = 1.0 / static_cast<double>(noise.trajectories);
    static const char paulis[3] = {'X', 'Y', 'Z'};
    for (std::uint64_t t = 0; t < noise.trajectories; ++t) {
        std::mt19937_64 rng(mix_seed(noise.seed, t + 1));
        StateVector sv = StateVector::basis(circuit.num_qubits, input);
        if (superpose) {
            for (QubitId q = 0; q < circuit.num_qubits; ++q) {
                if (!circuit.constant_qubits.count(q)) sv.apply_h(q);
            }
        }
        for (const Slice& slice : slices) {
            for (std::size_t gi : slice.gate_indices) {
                const Gate& g = circuit.gates[gi];
                if (!is_unitary(g.kind)) continue;
                sv.apply(g);
                double p = g.qubits.size() == 1 ? noise.p1 : noise.p2;
                if (p > 0.0 && next_uniform(rng) < p) {
                    QubitId q = g.qubits[rng() % g.qubits.size()];
                    sv.apply_pauli(paulis[rng() % 3], q);
                }
            }
        }
        for (const auto& [key, p] : measured_distribution(sv, circuit).counts) {
            sum.counts[key] += p * weight;
        }
    }
    return sum;
}

}  // namespace detail

/// Monte Carlo trajectory average of the exact per-trajectory
/// distributions. Deterministic given the seed; with p1 = p2 = 0 the result
/// equals simulate_exact.
inline Distribution simulate_noisy(const Circuit& circuit, const std::string& input_bits,
                                   const NoiseSpec& noise) {
    std::uint64_t input = detail::parse_input_bits(circuit, input_bits);
    return detail::run_noisy(circuit, input, false, noise);
}

/// Total Variation Distance: both distributions are normalized, missing
/// keys count as zero, and the result is sum_i |a_i - b_i| without the
/// textbook 1/2 factor, so the range is [0, 2].
inline double tvd(const Distribution& a, const Distribution& b) {
    if (a.counts.empty() || b.counts.empty()) {
        throw SimError("tvd of an empty distribution");
    }
    for (const Distribution* d : {&a, &b}) {
        double sum = 0.0;
        std::size_t width = d->counts.begin()->first.size();
        for (const auto& [key, value] : d->counts) {
            if (value < 0) throw SimError("negative count in distribution");
            if (key.size() != width) {
                throw SimError("inconsistent bitstring lengths in distribution");
            }
            sum += value;
        }
        if (d->shots <= 0 || std::abs(sum - d->shots) > 1e-9 * std::max(1.0, d->shots)) {
            throw SimError("distribution counts do not sum to shots");
        }
    }
    if (a.counts.begin()->first.size() != b.counts.begin()->first.size()) {
        throw SimError("bitstring length mismatch between distributions");
    }
    Distribution na = a.normalized();
    Distribution nb = b.normalized();
    double total = 0.0;
    for (const auto& [key, pa] : na.counts) {
        auto it = nb.counts.find(key);
        total += std::abs(pa - (it == nb.counts.end() ? 0.0 : it->second));
    }
    for (const auto& [key, pb] : nb.counts) {
        if (!na.counts.count(key)) total += pb;
    }
    return total;
}

/// How the input state is prepared for circuit-level TVD evaluation.
struct InputPolicy {
    enum class Kind {
        AllBasisInputs,  // every basis input over non-constant qubits
        Fixed,           // one given bitstring
        Superposition,   // uniform superposition over non-constant qubits
    };
    Kind kind = Kind::AllBasisInputs;
    std::string bits;            // Fixed only
    bool aggregate_max = false;  // AllBasisInputs: max instead of mean

    static InputPolicy all_basis() { return {Kind::AllBasisInputs, "", false}; }
    static InputPolicy fixed(std::string bits) {
        return {Kind::Fixed, std::move(bits), false};
    }
    static InputPolicy superposition() { return {Kind::Superposition, "", false}; }
};

struct SimMode {
    enum class Kind { Exact, Shots, Noisy };
    Kind kind = Kind::Exact;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    NoiseSpec noise;

    static SimMode exact() { return {}; }
    static SimMode with_shots(std::uint64_t shots, std::uint64_t seed) {
        return {Kind::Shots, shots, seed, {}};
    }
    static SimMode noisy(const NoiseSpec& spec) { return {Kind::Noisy, 0, 0, spec}; }
};

namespace detail {

inline Distribution simulate_mode(const Circuit& circuit, const std::string& bits,
                                  bool superpose, const SimMode& mode) {
    std::uint64_t input = parse_input_bits(circuit, bits);
    switch (mode.kind) {
        case SimMode::Kind::Exact:
            return measured_distribution(run_unitaries(circuit, input, superpose),
                                         circuit);
        case SimMode::Kind::Shots:
            return sample_counts(
                measured_distribution(run_unitaries(circuit, input, superpose), circuit),
                mode.shots, mode.seed);
        case SimMode::Kind::Noisy:
            return run_noisy(circuit, input, superpose, mode.noise);
    }
    throw SimError("unreachable");
}

}  // namespace detail

/// Circuit-level TVD between an original and an obfuscated circuit under an
/// input policy and simulation mode. For all-basis inputs this is the
/// arithmetic mean (or max, on request) of per-input TVDs.
inline double circuit_tvd(const Circuit& original, const Circuit& obfuscated,
                          const InputPolicy& policy, const SimMode& mode) {
    if (original.num_qubits != obfuscated.num_qubits ||
        original.num_clbits != obfuscated.num_clbits ||
        detail::measurement_layout(original) != detail::measurement_layout(obfuscated) ||
        original.constant_qubits != obfuscated.constant_qubits) {
        throw SimError("circuit layouts do not match (qubits/measures/constants)");
    }

    auto zeros = std::string(original.num_qubits, '0');
    switch (policy.kind) {
        case InputPolicy::Kind::Fixed:
            return tvd(detail::simulate_mode(original, policy.bits, false, mode),
                       detail::simulate_mode(obfuscated, policy.bits, false, mode));
        case InputPolicy::Kind::Superposition:
            return tvd(detail::simulate_mode(original, zeros, true, mode),
                       detail::simulate_mode(obfuscated, zeros, true, mode));
        case InputPolicy::Kind::AllBasisInputs: {
            std::vector<QubitId> variable;
            for (QubitId q = 0; q < original.num_qubits; ++q) {
                if (!original.constant_qubits.count(q)) variable.push_back(q);
            }
            if (variable.size() > 16) {
                throw SimError("too many non-constant qubits for basis enumeration");
            }
            double sum = 0.0;
            double max_value = 0.0;
            std::uint64_t total = std::uint64_t{1} << variable.size();
            for (std::uint64_t v = 0; v < total; ++v) {
                std::string bits = zeros;
                for (std::size_t j = 0; j < variable.size(); ++j) {
                    if ((v >> j) & 1) {
                        bits[original.num_qubits - 1 - variable[j]] = '1';
                    }
                }
                double value = tvd(detail::simulate_mode(original, bits, false, mode),
                                   detail::simulate_mode(obfuscated, bits, false, mode));
                sum += value;
                max_value = std::max(max_value, value);
            }
            return policy.aggregate_max ? max_value : sum / static_cast<double>(total);
        }
    }
    throw SimError("unreachable");
}

}  // namespace qobf
