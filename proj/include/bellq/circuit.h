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

#ifndef BELLQ_CIRCUIT_H
#define BELLQ_CIRCUIT_H

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bellq/codes.h"
#include "bellq/noise.h"

namespace bellq {

enum class Basis : uint8_t { Z, X };

char basis_char(Basis b);

enum class Op : uint8_t {
    PrepZ,
    PrepX,
    CX,
    MeasZ,
    MeasX,
    Depol1,
    Depol2,
    XError,
    ZError,
    Tick,
};

struct Instruction {
    Op op = Op::Tick;
    uint32_t a = 0;
    uint32_t b = 0;  // target of CX / second qubit of DEPOL2
    double p = 0;
};

/// Where a detector comes from: the check it compares and the cycle in
/// which its later measurement happens. Final-measurement detectors carry
/// cycle == number of cycles.
struct DetectorInfo {
    uint32_t cycle = 0;
    Basis type = Basis::Z;
    uint32_t check = 0;
};

/// A Pauli on the circuit's qubits given by X and Z supports.
struct PauliSupport {
    std::vector<uint32_t> x;
    std::vector<uint32_t> z;
};

struct NoisyCircuit {
    size_t n_qubits = 0;
    size_t n_data = 0;
    size_t n_ancilla = 0;
    size_t cycles = 0;
    std::vector<Instruction> instructions;
    size_t n_measurements = 0;
    std::vector<std::vector<uint32_t>> detectors;
    std::vector<DetectorInfo> detector_info;
    std::vector<std::vector<uint32_t>> observables;
    /// Generators of the stabilizer group of the (implicit) initial state.
    /// Detectors and observables must back-propagate into their span.
    std::vector<PauliSupport> initial_stabilizers;

    void append(Op op, uint32_t a, uint32_t b = 0, double p = 0);
    /// Appends a measurement and returns its index.
    uint32_t measure(Basis basis, uint32_t q);
    size_t count(Op op) const;
    /// Number of DEPOL1/DEPOL2/X_ERROR/Z_ERROR instructions.
    size_t noise_sites() const;

    /// Text form, one instruction per line (PREP_Z q, CX a b, DEPOL2 p a b,
    /// DEPOL1 p q, X_ERROR p q, M_Z q, DETECTOR m..., OBSERVABLE k m..., TICK).
    std::string to_text() const;
};

NoisyCircuit read_circuit(std::istream &in);

/// Partition of the check/data incidence into matchings; each entry is a
/// (check row, data qubit) pair.
using GateLayer = std::vector<std::pair<uint32_t, uint32_t>>;

/// Edge colouring of the bipartite graph of `checks` with exactly
/// max(row weight, column weight) colours, by alternating-path recolouring.
std::vector<GateLayer> edge_coloring(const BinMatrix &checks);

struct Schedule {
    std::vector<GateLayer> z_layers;
    std::vector<GateLayer> x_layers;
    size_t colors_z() const { return z_layers.size(); }
    size_t colors_x() const { return x_layers.size(); }
};

Schedule make_schedule(const CssCode &code);

/// Qubit offsets of one code block and its ancillas.
struct SideLayout {
    uint32_t data0 = 0;
    uint32_t zanc0 = 0;
    uint32_t xanc0 = 0;
};

/// Measurement indices of one cycle, per check row.
struct CycleRecord {
    std::vector<uint32_t> z;
    std::vector<uint32_t> x;
};

/// Appends one extraction cycle: Z checks (data controls, ancilla targets),
/// then X checks (ancilla controls). Each CX is followed by DEPOL2(p_gate);
/// p_meas > 0 flips ancillas just before measurement.
CycleRecord append_cycle(
    NoisyCircuit &circuit, const CssCode &code, const Schedule &schedule, const SideLayout &layout,
    double p_gate, double p_meas = 0);

/// Stand-alone cycle on the standard layout (data, then Z, then X ancillas),
/// without detectors.
NoisyCircuit build_cycle(const CssCode &code, const Schedule &schedule, double p_gate_eff, double p_meas = 0);

/// Memory experiment: noiseless encoded start, DEPOL1(p_bell_eff) on every
/// data qubit, rounds * cycles_per_round noisy cycles, final noiseless
/// transversal measurement in `basis`.
NoisyCircuit build_memory_experiment(
    const CssCode &code, Basis basis, size_t rounds, size_t cycles_per_round, const FoldedNoise &noise);

/// Human-readable description of the CX ordering, for manifests.
std::string gate_ordering_description();

}  // namespace bellq

#endif
