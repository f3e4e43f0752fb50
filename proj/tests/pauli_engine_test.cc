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


#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bellq/pauli_engine.h"

using namespace bellq;

namespace {

CssCode surface13() { return hgp(repetition_code(3), repetition_code(3)); }

// Instruction index of the m-th measurement.
int64_t measurement_site(const NoisyCircuit &c, size_t m) {
    size_t seen = 0;
    for (size_t i = 0; i < c.instructions.size(); i++) {
        Op op = c.instructions[i].op;
        if (op == Op::MeasZ || op == Op::MeasX) {
            if (seen == m) return static_cast<int64_t>(i);
            seen++;
        }
    }
    return -1;
}

// Two Bell pairs (0,2) and (1,3); DEPOL2 on 0 and 1; Bell measurements
// afterwards resolve every two-qubit Pauli.
NoisyCircuit bell_probe(double p) {
    NoisyCircuit c;
    c.n_qubits = 4;
    c.n_data = 4;
    for (uint32_t a : {0u, 1u}) {
        c.append(Op::PrepX, a);
        c.append(Op::PrepZ, a + 2);
        c.append(Op::CX, a, a + 2);
    }
    c.append(Op::Depol2, 0, 1, p);
    for (uint32_t a : {0u, 1u}) {
        c.append(Op::CX, a, a + 2);
        c.detectors.push_back({c.measure(Basis::X, a)});
        c.detectors.push_back({c.measure(Basis::Z, a + 2)});
    }
    return c;
}

DetectorModel single_mechanism(double p) {
    DetectorModel m;
    m.n_detectors = 3;
    m.n_observables = 1;
    std::vector<uint32_t> d{1}, o{0};
    m.add(p, d, o);
    return m;
}

}  // namespace

TEST(Propagate, Identity) {
    auto c = build_memory_experiment(surface13(), Basis::Z, 1, 2, FoldedNoise::effective(0, 0));
    EXPECT_EQ(propagate_pauli(c, {10, {}}), Signature{});
}

TEST(Propagate, DataXBetweenCycles) {
    auto q = surface13();
    auto c = build_memory_experiment(q, Basis::Z, 1, 4, FoldedNoise::effective(0, 0));
    const uint32_t qubit = 4;
    const size_t t = 1;
    int64_t site = measurement_site(c, 12 * (t + 1) - 1);
    Signature sig = propagate_pauli(c, {site, {{qubit}, {}}});
    std::vector<uint32_t> want;
    for (size_t d = 0; d < c.detectors.size(); d++) {
        const auto &info = c.detector_info[d];
        if (info.cycle == t + 1 && info.type == Basis::Z && q.hz.get(info.check, qubit)) want.push_back(d);
    }
    ASSERT_FALSE(want.empty());
    EXPECT_EQ(sig.detectors, want);
}

TEST(Propagate, ZBeforeFinalZMeasurement) {
    auto c = build_memory_experiment(surface13(), Basis::Z, 1, 1, FoldedNoise::effective(0, 0));
    int64_t site = measurement_site(c, 12) - 1;
    for (uint32_t qubit = 0; qubit < 13; qubit++) EXPECT_EQ(propagate_pauli(c, {site, {{}, {qubit}}}), Signature{});
}

TEST(Model, FifteenTerms) {
    auto c = bell_probe(0.03);
    auto m = build_detector_model(c);
    ASSERT_EQ(m.n_mechanisms(), 15u);
    for (size_t i = 0; i < 15; i++) EXPECT_DOUBLE_EQ(m.prior(i), 0.002);
    auto f = build_detector_model_forward(c);
    EXPECT_EQ(f.to_text(), m.to_text());
}

TEST(Model, Noiseless) {
    auto c = build_memory_experiment(surface13(), Basis::X, 1, 3, FoldedNoise::effective(0, 0));
    EXPECT_EQ(build_detector_model(c).n_mechanisms(), 0u);
}

TEST(Model, MergeRule) {
    NoisyCircuit c;
    c.n_qubits = c.n_data = 1;
    c.append(Op::PrepZ, 0);
    c.append(Op::XError, 0, 0, 0.1);
    c.append(Op::XError, 0, 0, 0.1);
    c.detectors.push_back({c.measure(Basis::Z, 0)});
    auto m = build_detector_model(c);
    ASSERT_EQ(m.n_mechanisms(), 1u);
    EXPECT_NEAR(m.prior(0), 0.18, 1e-15);
}

TEST(Model, NonDeterministicDetector) {
    NoisyCircuit c;
    c.n_qubits = c.n_data = 1;
    c.append(Op::PrepX, 0);
    c.detectors.push_back({c.measure(Basis::Z, 0)});
    EXPECT_THROW(build_detector_model(c), std::runtime_error);
}

TEST(Model, ForwardMatchesBackward) {
    auto c = build_memory_experiment(surface13(), Basis::Z, 2, 2, FoldedNoise::effective(0.05, 0.002));
    EXPECT_EQ(build_detector_model(c).to_text(), build_detector_model_forward(c).to_text());
}

TEST(Model, TextRoundTrip) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::X, 1, 2, FoldedNoise::effective(0.05, 0.002)));
    std::istringstream in(m.to_text());
    auto back = DetectorModel::from_text(in);
    EXPECT_EQ(back.n_mechanisms(), m.n_mechanisms());
    EXPECT_EQ(back.to_text(), m.to_text());
    EXPECT_EQ(back.priors(), m.priors());
}

TEST(Sample, ZeroNoise) {
    DetectorModel m = single_mechanism(0.0);
    auto b = sample_model(m, 1000, 1);
    for (auto w : b.det) EXPECT_EQ(w, 0u);
    for (auto w : b.obs) EXPECT_EQ(w, 0u);
}

TEST(Sample, HalfFrequency) {
    const size_t shots = 100000;
    auto b = sample_model(single_mechanism(0.5), shots, 9);
    size_t hits = 0;
    for (size_t s = 0; s < shots; s++) {
        hits += b.detector(s, 1);
        EXPECT_EQ(b.detector(s, 1), b.observable(s, 0));
        EXPECT_FALSE(b.detector(s, 0));
    }
    EXPECT_NEAR(static_cast<double>(hits) / shots, 0.5, 3 * std::sqrt(0.25 / shots));
}

TEST(Sample, Deterministic) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::Z, 2, 3, FoldedNoise::effective(0.05, 0.002)));
    auto a = sample_model(m, 700, 42);
    EXPECT_EQ(a, sample_model(m, 700, 42));
    EXPECT_EQ(a, sample_model_serial(m, 700, 42));
    EXPECT_NE(a, sample_model(m, 700, 43));
}

TEST(Sample, CircuitSerialMatchesParallel) {
    auto c = build_memory_experiment(surface13(), Basis::X, 1, 3, FoldedNoise::effective(0.05, 0.002));
    for (NoiseMode mode : {NoiseMode::Independent, NoiseMode::Categorical}) {
        auto a = sample_circuit(c, 500, 5, mode);
        EXPECT_EQ(a, sample_circuit_serial(c, 500, 5, mode));
    }
}

TEST(Sample, NoiselessCircuit) {
    auto c = build_memory_experiment(surface13(), Basis::Z, 2, 3, FoldedNoise::effective(0, 0));
    auto b = sample_circuit(c, 10000, 1, NoiseMode::Categorical);
    for (auto w : b.det) EXPECT_EQ(w, 0u);
    for (auto w : b.obs) EXPECT_EQ(w, 0u);
}

// Both samplers draw from the same distribution in Independent mode.
TEST(Sample, CircuitMatchesModelRates) {
    auto c = build_memory_experiment(surface13(), Basis::Z, 1, 2, FoldedNoise::effective(0.05, 0.01));
    auto m = build_detector_model(c);
    const size_t shots = 40000;
    auto a = sample_circuit(c, shots, 1, NoiseMode::Independent);
    auto b = sample_model(m, shots, 2);
    for (size_t d = 0; d < m.n_detectors; d++) {
        double fa = 0, fb = 0;
        for (size_t s = 0; s < shots; s++) {
            fa += a.detector(s, d);
            fb += b.detector(s, d);
        }
        fa /= shots;
        fb /= shots;
        double se = std::sqrt((fa * (1 - fa) + fb * (1 - fb)) / shots) + 1e-12;
        EXPECT_LE(std::abs(fa - fb), 5 * se) << "detector " << d;
    }
}

TEST(ShotBatch, SaveLoad) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::Z, 1, 1, FoldedNoise::effective(0.05, 0.002)));
    auto a = sample_model(m, 130, 3);
    std::string path = testing::TempDir() + "/batch.shots";
    a.save(path);
    EXPECT_EQ(ShotBatch::load(path), a);
}
