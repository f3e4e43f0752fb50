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

#include "bellq/distill.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bellq {

double fold_bell_noise(double p_bell) {
    if (!(p_bell >= 0 && p_bell <= 1)) {
        throw std::invalid_argument("fold_bell_noise: p_bell must lie in [0, 1]");
    }
    return 2 * p_bell - 4.0 / 3.0 * p_bell * p_bell;
}

double fold_gate_noise(double p_gate) {
    if (!(p_gate >= 0 && p_gate <= 0.5)) {
        throw std::invalid_argument("fold_gate_noise: p_gate must lie in [0, 0.5]");
    }
    return 2 * p_gate;
}

FoldedNoise FoldedNoise::from_two_sided(double p_bell, double p_gate) {
    FoldedNoise n;
    n.p_bell = p_bell;
    n.p_gate = p_gate;
    n.p_bell_eff = fold_bell_noise(p_bell);
    n.p_gate_eff = fold_gate_noise(p_gate);
    return n;
}

FoldedNoise FoldedNoise::effective(double p_bell_eff, double p_gate_eff) {
    if (!(p_bell_eff >= 0 && p_bell_eff <= 1) || !(p_gate_eff >= 0 && p_gate_eff <= 1)) {
        throw std::invalid_argument("effective noise must lie in [0, 1]");
    }
    FoldedNoise n;
    n.p_bell_eff = p_bell_eff;
    n.p_gate_eff = p_gate_eff;
    return n;
}

namespace {

BinMatrix doubled(const BinMatrix &m) {
    return BinMatrix::hstack(m, m);
}

}  // namespace

JointCode joint_code(const CssCode &code) {
    JointCode j;
    j.base = &code;
    j.n = 2 * code.n;
    j.hx = doubled(code.hx);
    j.hz = doubled(code.hz);
    j.bell_logicals_x = doubled(code.lx);
    j.bell_logicals_z = doubled(code.lz);
    return j;
}

NoisyCircuit build_two_sided_experiment(const CssCode &code, Basis basis, double p_bell, double p_gate) {
    if (!(p_bell >= 0 && p_bell <= 1) || !(p_gate >= 0 && p_gate <= 1)) {
        throw std::invalid_argument("two-sided experiment: probabilities must lie in [0, 1]");
    }
    uint32_t n = static_cast<uint32_t>(code.n);
    uint32_t mz = static_cast<uint32_t>(code.hz.rows());
    uint32_t mx = static_cast<uint32_t>(code.hx.rows());
    NoisyCircuit c;
    c.n_data = 2 * code.n;
    c.n_ancilla = 2 * (mz + mx);
    c.n_qubits = c.n_data + c.n_ancilla;
    SideLayout alice{0, 2 * n, 2 * n + mz};
    SideLayout bob{n, 2 * n + mz + mx, 2 * n + 2 * mz + mx};
    for (uint32_t q = 0; q < n; q++) {
        c.initial_stabilizers.push_back({{q, n + q}, {}});
        c.initial_stabilizers.push_back({{}, {q, n + q}});
    }
    if (p_bell > 0) {
        for (uint32_t q = 0; q < 2 * n; q++) {
            c.append(Op::Depol1, q, 0, p_bell);
        }
        c.append(Op::Tick, 0);
    }
    Schedule schedule = make_schedule(code);
    CycleRecord ra = append_cycle(c, code, schedule, alice, p_gate);
    CycleRecord rb = append_cycle(c, code, schedule, bob, p_gate);
    for (int side = 0; side < 2; side++) {
        const auto &ma = side == 0 ? ra.z : ra.x;
        const auto &mb = side == 0 ? rb.z : rb.x;
        for (size_t k = 0; k < ma.size(); k++) {
            c.detectors.push_back({ma[k], mb[k]});
            c.detector_info.push_back({0, side == 0 ? Basis::Z : Basis::X, static_cast<uint32_t>(k)});
        }
    }
    std::vector<uint32_t> data_meas(2 * n);
    for (uint32_t q = 0; q < 2 * n; q++) {
        data_meas[q] = c.measure(basis, q);
    }
    const BinMatrix &same = basis == Basis::Z ? code.hz : code.hx;
    const auto &last_a = basis == Basis::Z ? ra.z : ra.x;
    const auto &last_b = basis == Basis::Z ? rb.z : rb.x;
    for (size_t k = 0; k < same.rows(); k++) {
        std::vector<uint32_t> det;
        for (uint32_t q : same.row(k)) {
            det.push_back(data_meas[q]);
            det.push_back(data_meas[n + q]);
        }
        det.push_back(last_a[k]);
        det.push_back(last_b[k]);
        c.detectors.push_back(std::move(det));
        c.detector_info.push_back({1, basis, static_cast<uint32_t>(k)});
    }
    const BinMatrix &logicals = basis == Basis::Z ? code.lz : code.lx;
    for (size_t r = 0; r < logicals.rows(); r++) {
        std::vector<uint32_t> obs;
        for (uint32_t q : logicals.row(r)) {
            obs.push_back(data_meas[q]);
            obs.push_back(data_meas[n + q]);
        }
        c.observables.push_back(std::move(obs));
    }
    c.cycles = 1;
    return c;
}

LookupDecoder::LookupDecoder(const DetectorModel &model) : n_detectors_(model.n_detectors) {
    size_t bits = model.n_detectors + model.n_observables;
    if (bits > kMaxLookupBits || model.n_observables > 8) {
        throw std::invalid_argument(
            "lookup decoder: " + std::to_string(bits) + " detector and observable bits exceed the table limit");
    }
    std::vector<double> prob(size_t{1} << bits, 0.0);
    prob[0] = 1.0;
    for (size_t m = 0; m < model.n_mechanisms(); m++) {
        uint64_t sig = 0;
        for (uint32_t d : model.detectors(m)) sig ^= uint64_t{1} << d;
        for (uint32_t k : model.observables(m)) sig ^= uint64_t{1} << (model.n_detectors + k);
        if (sig == 0) continue;
        double p = model.prior(m);
        for (uint64_t x = 0; x < prob.size(); x++) {
            uint64_t y = x ^ sig;
            if (y < x) continue;
            double a = prob[x], b = prob[y];
            prob[x] = (1 - p) * a + p * b;
            prob[y] = (1 - p) * b + p * a;
        }
    }
    size_t syndromes = size_t{1} << model.n_detectors;
    size_t classes = size_t{1} << model.n_observables;
    best_.assign(syndromes, 0);
    double correct = 0;
    for (size_t s = 0; s < syndromes; s++) {
        size_t arg = 0;
        for (size_t l = 1; l < classes; l++) {
            if (prob[s | (l << model.n_detectors)] > prob[s | (arg << model.n_detectors)]) arg = l;
        }
        best_[s] = static_cast<uint8_t>(arg);
        correct += prob[s | (arg << model.n_detectors)];
    }
    expected_failure_ = std::max(0.0, 1.0 - correct);
}

double OracleResult::standard_error() const {
    if (shots == 0) return 0;
    double p = rate();
    return std::sqrt(p * (1 - p) / static_cast<double>(shots));
}

namespace {

OracleResult run_lookup(const NoisyCircuit &circuit, size_t shots, uint64_t seed) {
    DetectorModel model = build_detector_model(circuit);
    LookupDecoder decoder(model);
    ShotBatch batch = sample_circuit(circuit, shots, seed, NoiseMode::Categorical);
    OracleResult res;
    res.shots = shots;
    for (size_t s = 0; s < shots; s++) {
        // Tables are limited to 26 bits, so one word holds a whole row.
        uint64_t syndrome = batch.det_words() ? batch.det[s * batch.det_words()] : 0;
        uint64_t obs = batch.obs_words() ? batch.obs[s * batch.obs_words()] : 0;
        if (decoder.decode(syndrome) != obs) res.failures++;
    }
    return res;
}

}  // namespace

OracleResult two_sided_oracle(
    const CssCode &code, const FoldedNoise &noise, Basis basis, size_t shots, uint64_t seed) {
    return run_lookup(build_two_sided_experiment(code, basis, noise.p_bell, noise.p_gate), shots, seed);
}

OracleResult folded_oracle(const CssCode &code, const FoldedNoise &noise, Basis basis, size_t shots, uint64_t seed) {
    return run_lookup(build_memory_experiment(code, basis, 1, 1, noise), shots, seed);
}

}  // namespace bellq
