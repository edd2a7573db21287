#pragma once

// Umbrella header: gate-level quantum circuit obfuscation via metric-guided
// dummy SWAP insertion, key-based restoration, and a simulator-backed
// exhaustive analysis harness.

#include "qobf/circuit.hpp"
#include "qobf/digest.hpp"
#include "qobf/errors.hpp"
#include "qobf/features.hpp"
#include "qobf/metrics.hpp"
#include "qobf/obfuscate.hpp"
#include "qobf/qasm.hpp"
#include "qobf/simulate.hpp"
#include "qobf/slicing.hpp"
#include "qobf/stats.hpp"
#include "qobf/sweep.hpp"
