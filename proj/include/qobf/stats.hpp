#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "qobf/circuit.hpp"
#include "qobf/slicing.hpp"

namespace qobf {

struct CircuitStats {
    std::size_t gate_count = 0;  // X/H/CX/CCX/SWAP only
    std::size_t depth = 0;       // slice count
    std::map<std::string, std::size_t> per_kind;
};

inline CircuitStats circuit_stats(const Circuit& circuit) {
    CircuitStats stats;
    stats.depth = slice_circuit(circuit).size();
    for (const Gate& g : circuit.gates) {
        if (is_unitary(g.kind)) {
            ++stats.gate_count;
            ++stats.per_kind[gate_name(g.kind)];
        }
    }
    return stats;
}

}  // namespace qobf
