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

#ifndef BELLQ_PAULI_ENGINE_H
#define BELLQ_PAULI_ENGINE_H

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bellq/circuit.h"

namespace bellq {

inline constexpr size_t kShotBlock = 64;

/// Independent fault mechanisms with their detector / observable signatures.
/// Mechanism signatures are stored in CSR form.
class DetectorModel {
   public:
    size_t n_detectors = 0;
    size_t n_observables = 0;
    std::vector<DetectorInfo> detector_info;

    size_t n_mechanisms() const { return priors_.size(); }
    double prior(size_t m) const { return priors_[m]; }
    const std::vector<double> &priors() const { return priors_; }
    std::span<const uint32_t> detectors(size_t m) const {
        return {det_flat_.data() + det_off_[m], det_off_[m + 1] - det_off_[m]};
    }
    std::span<const uint32_t> observables(size_t m) const {
        return {obs_flat_.data() + obs_off_[m], obs_off_[m + 1] - obs_off_[m]};
    }

    /// Appends a mechanism (sorted, duplicate-free index lists).
    void add(double p, std::span<const uint32_t> dets, std::span<const uint32_t> obs);
    void set_prior(size_t m, double p) { priors_[m] = p; }

    /// detectors x mechanisms
    BinMatrix check_matrix() const;
    /// observables x mechanisms
    BinMatrix obs_matrix() const;

    /// "error(p) D3 D17 L0" per mechanism, preceded by a "detectors D
    /// observables K" header.
    std::string to_text() const;
    static DetectorModel from_text(std::istream &in);

   private:
    std::vector<double> priors_;
    std::vector<uint32_t> det_off_{0};
    std::vector<uint32_t> det_flat_;
    std::vector<uint32_t> obs_off_{0};
    std::vector<uint32_t> obs_flat_;
};

/// A single Pauli injected right after instruction `site` (or before the
/// first instruction when site == -1).
struct PauliFault {
    int64_t site = -1;
    PauliSupport pauli;
};

struct Signature {
    std::vector<uint32_t> detectors;
    std::vector<uint32_t> observables;
    bool operator==(const Signature &) const = default;
};

/// Forward propagation of one Pauli through the rest of the circuit.
Signature propagate_pauli(const NoisyCircuit &circuit, const PauliFault &fault);

/// Backward sensitivity analysis. Each DEPOL2 site contributes its 15 Pauli
/// terms with prior p/15, each DEPOL1 its 3 terms with p/3, X_ERROR/Z_ERROR
/// one term. Equal signatures merge by XOR probability; empty ones vanish.
/// Throws std::runtime_error if a detector or observable is not deterministic
/// in the noiseless circuit.
DetectorModel build_detector_model(const NoisyCircuit &circuit);

/// Every raw (site, Pauli) mechanism with its forward-propagated signature,
/// merged the same way as build_detector_model. Used for cross-validation.
DetectorModel build_detector_model_forward(const NoisyCircuit &circuit);

/// Bit-packed shot data. Rows are shots; each row holds
/// ceil(n/64) words for detectors and for observables.
struct ShotBatch {
    size_t shots = 0;
    size_t n_detectors = 0;
    size_t n_observables = 0;
    uint64_t seed = 0;
    std::vector<uint64_t> det;
    std::vector<uint64_t> obs;

    ShotBatch() = default;
    ShotBatch(size_t shots, size_t n_det, size_t n_obs, uint64_t seed);
    size_t det_words() const { return (n_detectors + 63) / 64; }
    size_t obs_words() const { return (n_observables + 63) / 64; }
    bool detector(size_t shot, size_t d) const { return (det[shot * det_words() + d / 64] >> (d % 64)) & 1; }
    bool observable(size_t shot, size_t k) const { return (obs[shot * obs_words() + k / 64] >> (k % 64)) & 1; }
    BitVec syndrome(size_t shot) const;
    BitVec observable_bits(size_t shot) const;
    /// Fired detector indices of one shot.
    std::vector<uint32_t> fired(size_t shot) const;
    bool operator==(const ShotBatch &) const = default;

    /// Raw little-endian words (det then obs) plus a JSON sidecar at
    /// path + ".json".
    void save(const std::string &path) const;
    static ShotBatch load(const std::string &path);
};

/// Independent Bernoulli draw of every mechanism. Shot block b uses the
/// Philox stream (seed, b), so serial and parallel runs agree bit for bit.
ShotBatch sample_model(const DetectorModel &model, size_t shots, uint64_t seed);
ShotBatch sample_model_serial(const DetectorModel &model, size_t shots, uint64_t seed);

enum class NoiseMode {
    /// Each Pauli term of a depolarizing site drawn independently (p/15, p/3),
    /// matching the detector model.
    Independent,
    /// Exact channel: one categorical draw per site.
    Categorical,
};

/// Bit-parallel Pauli-frame simulation of the circuit itself.
ShotBatch sample_circuit(const NoisyCircuit &circuit, size_t shots, uint64_t seed, NoiseMode mode);
ShotBatch sample_circuit_serial(const NoisyCircuit &circuit, size_t shots, uint64_t seed, NoiseMode mode);

}  // namespace bellq

#endif
