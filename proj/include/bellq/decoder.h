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

#ifndef BELLQ_DECODER_H
#define BELLQ_DECODER_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellq/pauli_engine.h"

namespace bellq {

enum class BpVariant { ProductSum, MinSum };

struct BpConfig {
    BpVariant variant = BpVariant::ProductSum;
    size_t max_iterations = 30;
    double damping = 0.5;
    double min_sum_scale = 0.625;
    /// Stop as soon as the hard decision reproduces the syndrome.
    bool stop_on_syndrome = true;
};

struct OsdConfig {
    /// Number of least reliable non-pivot columns tried as single flips;
    /// 0 means plain OSD-0.
    size_t order = 0;
    /// Pairs of flips are tried among the first `sweep` non-pivot columns.
    size_t sweep = 0;
};

struct BpResult {
    std::vector<double> posteriors;
    BitVec hard;
    bool converged = false;
    size_t iterations = 0;
};

struct DecodeOutcome {
    BitVec correction;
    BitVec predicted_observables;
    bool converged = false;
    size_t iterations_used = 0;
    bool osd_used = false;
};

/// Thrown when a syndrome is outside the column space of the check matrix.
class InfeasibleSyndrome : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Tanner graph of a check matrix plus priors, reusable across shots.
class BpDecoder {
   public:
    BpDecoder() = default;
    BpDecoder(const BinMatrix &checks, std::vector<double> priors, BpConfig cfg);

    size_t n_checks() const { return n_checks_; }
    size_t n_vars() const { return priors_.size(); }
    const std::vector<double> &priors() const { return priors_; }
    const BinMatrix &checks() const { return checks_; }

    BpResult decode(const BitVec &syndrome) const;

   private:
    size_t n_checks_ = 0;
    BinMatrix checks_;
    std::vector<double> priors_;
    std::vector<double> prior_llr_;
    BpConfig cfg_;
    // Edges grouped by check (CSR); edge_var[e] is the variable of edge e.
    std::vector<uint32_t> check_off_;
    std::vector<uint32_t> edge_var_;
    // For each variable, its edge ids.
    std::vector<uint32_t> var_off_;
    std::vector<uint32_t> var_edges_;
};

/// Ordered statistics post-processing. The returned correction always
/// satisfies checks * correction = syndrome; throws InfeasibleSyndrome
/// otherwise.
BitVec osd_solve(
    const BinMatrix &checks, const BitVec &syndrome, const std::vector<double> &posteriors,
    const std::vector<double> &priors, const OsdConfig &cfg);

BpResult bp_decode(const DetectorModel &model, const BitVec &syndrome, const BpConfig &cfg);

DecodeOutcome osd_postprocess(
    const DetectorModel &model, const BitVec &syndrome, const std::vector<double> &posteriors, const OsdConfig &cfg);

/// BP, falling back to OSD when BP does not reproduce the syndrome.
DecodeOutcome bp_osd_decode(const DetectorModel &model, const BitVec &syndrome, const BpConfig &bp, const OsdConfig &osd);

/// Round-by-round decoder over a memory-experiment detector model.
///
/// Window w owns the detectors of cycles [w c, (w + 1) c) (the last window
/// also owns the final-measurement detectors) and the mechanisms whose
/// earliest detector it owns. BP additionally sees the detectors of the
/// next `lookahead` cycles and the mechanisms starting there, so a fault
/// straddling the boundary is judged on its whole signature; only owned
/// mechanisms are committed. The committed correction is fed forward, and
/// any owned detector left unexplained is moved onto the same check in the
/// next window's first cycle. Windows before the last use BP only; the
/// last falls back to OSD when BP does not converge. lookahead = 0 gives
/// disjoint windows.
class WindowedDecoder {
   public:
    WindowedDecoder(
        const DetectorModel &model, size_t rounds, size_t cycles_per_round, BpConfig bp, OsdConfig osd,
        size_t lookahead = 1);

    size_t windows() const { return windows_.size(); }
    DecodeOutcome decode(const BitVec &syndrome) const;

   private:
    struct Window {
        std::vector<uint32_t> detectors;   // visible detectors, local order
        std::vector<uint32_t> own;         // owned subset
        std::vector<uint32_t> mechanisms;  // representative of each local column
        std::vector<uint8_t> commit;       // column owned by this window
        BpDecoder bp;
    };
    const DetectorModel *model_;
    std::vector<Window> windows_;
    // Detector of (next window's first cycle, type, check), or -1.
    std::vector<int32_t> carry_target_;
    OsdConfig osd_;
};

struct DecodeStats {
    size_t shots = 0;
    size_t failures = 0;
};

/// Decodes every shot with the windowed decoder and counts shots whose
/// predicted observables differ from the sampled ones.
DecodeStats decode_batch(const WindowedDecoder &decoder, const DetectorModel &model, const ShotBatch &batch);
DecodeStats decode_batch_serial(const WindowedDecoder &decoder, const DetectorModel &model, const ShotBatch &batch);

/// Observable flips implied by a correction.
BitVec predicted_observables(const DetectorModel &model, const BitVec &correction);

}  // namespace bellq

#endif
