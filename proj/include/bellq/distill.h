// Copyright 2026 The bellq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BELLQ_DISTILL_H
#define BELLQ_DISTILL_H

#include <cstdint>
#include <vector>

#include "bellq/circuit.h"
#include "bellq/codes.h"
#include "bellq/noise.h"
#include "bellq/pauli_engine.h"

namespace bellq {

/// Checks and logical Bell stabilizers of n Bell pairs after both nodes
/// measure the checks of `base`. Qubit i is Alice's half of pair i and
/// qubit n + i is Bob's.
struct JointCode {
    const CssCode *base = nullptr;
    size_t n = 0;  // physical qubits, 2 * base->n
    BinMatrix hx;  // rows s (x) s for every X check s
    BinMatrix hz;
    BinMatrix bell_logicals_x;  // X-bar (x) X-bar per logical pair
    BinMatrix bell_logicals_z;
};

JointCode joint_code(const CssCode &code);

/// Single-sided depolarizing strength giving the same Bell-state
/// distribution as independent depolarizing p_bell on both halves.
double fold_bell_noise(double p_bell);

/// Gate noise moved entirely to one node: 2 p_gate.
double fold_gate_noise(double p_gate);

/// One QEC cycle on both nodes of n noisy Bell pairs. Detectors compare
/// Alice's and Bob's outcome of the same check and are laid out like
/// build_memory_experiment(code, basis, 1, 1, ...); the observables are the
/// Bell stabilizers of `basis` read from the final data measurements.
NoisyCircuit build_two_sided_experiment(const CssCode &code, Basis basis, double p_bell, double p_gate);

/// Maximum-likelihood decoding by exhaustive tabulation: the probability of
/// every (syndrome, observable flip) pair is accumulated over all mechanism
/// subsets, and each syndrome maps to its most likely flip.
/// Needs n_detectors + n_observables <= kMaxLookupBits.
class LookupDecoder {
   public:
    static constexpr size_t kMaxLookupBits = 26;

    explicit LookupDecoder(const DetectorModel &model);

    /// Predicted observable flips as a bit mask.
    uint32_t decode(uint64_t syndrome) const { return best_[syndrome]; }
    /// Probability that the returned prediction is wrong, summed over
    /// syndromes; the failure rate an ideal sampler would measure.
    double expected_failure_rate() const { return expected_failure_; }

   private:
    size_t n_detectors_ = 0;
    std::vector<uint8_t> best_;
    double expected_failure_ = 0;
};

struct OracleResult {
    size_t shots = 0;
    size_t failures = 0;
    double rate() const { return shots ? static_cast<double>(failures) / static_cast<double>(shots) : 0.0; }
    double standard_error() const;
};

/// Full two-node simulation (Bell noise and gate noise on both sides,
/// exact depolarizing channels), decoded with a LookupDecoder.
OracleResult two_sided_oracle(
    const CssCode &code, const FoldedNoise &noise, Basis basis, size_t shots, uint64_t seed);

/// The folded single-sided counterpart: one memory cycle at the effective
/// parameters, sampled and decoded the same way.
OracleResult folded_oracle(const CssCode &code, const FoldedNoise &noise, Basis basis, size_t shots, uint64_t seed);

}  // namespace bellq

#endif
