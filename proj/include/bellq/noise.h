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

#ifndef BELLQ_NOISE_H
#define BELLQ_NOISE_H

namespace bellq {

/// Noise parameters of one distillation experiment.
///
/// `p_bell` / `p_gate` describe symmetric two-sided noise (both halves of
/// every Bell pair, both nodes' gates). The `_eff` fields are the single-sided
/// strengths that the memory-experiment circuits actually use.
struct FoldedNoise {
    double p_bell = 0;
    double p_gate = 0;
    double p_bell_eff = 0;
    double p_gate_eff = 0;
    /// Ancilla measurement flip probability; not part of the folded model.
    double p_meas = 0;

    /// Two-sided parameters, folded to single-sided ones.
    static FoldedNoise from_two_sided(double p_bell, double p_gate);
    /// Effective parameters given directly (two-sided fields left at zero).
    static FoldedNoise effective(double p_bell_eff, double p_gate_eff);
};

}  // namespace bellq

#endif
