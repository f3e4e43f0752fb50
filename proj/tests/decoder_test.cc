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

#include "bellq/decoder.h"
#include "bellq/rng.h"

using namespace bellq;

namespace {

CssCode surface13() { return hgp(repetition_code(3), repetition_code(3)); }

DetectorModel from_columns(size_t n_det, const std::vector<std::vector<uint32_t>> &cols, double p,
                           const std::vector<std::vector<uint32_t>> &obs = {}) {
    DetectorModel m;
    m.n_detectors = n_det;
    m.n_observables = obs.empty() ? 0 : 1;
    for (size_t i = 0; i < cols.size(); i++) {
        std::vector<uint32_t> o = obs.empty() ? std::vector<uint32_t>{} : obs[i];
        m.add(p, cols[i], o);
    }
    return m;
}

BitVec syndrome_of(const DetectorModel &m, std::initializer_list<size_t> mechanisms) {
    BitVec s(m.n_detectors, 0);
    for (size_t k : mechanisms)
        for (uint32_t d : m.detectors(k)) s[d] ^= 1;
    return s;
}

BitVec obs_of(const DetectorModel &m, size_t k) {
    BitVec o(m.n_observables, 0);
    for (uint32_t j : m.observables(k)) o[j] ^= 1;
    return o;
}

}  // namespace

TEST(Bp, ZeroSyndrome) {
    auto m = from_columns(2, {{0}, {0, 1}, {1}}, 0.05);
    auto r = bp_decode(m, BitVec(2, 0), BpConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(weight(r.hard), 0u);
}

// Bits of a length-7 repetition code with its chain of parity checks.
TEST(Bp, RepetitionSingleFaults) {
    std::vector<std::vector<uint32_t>> cols;
    for (uint32_t i = 0; i < 7; i++) {
        std::vector<uint32_t> c;
        if (i > 0) c.push_back(i - 1);
        if (i < 6) c.push_back(i);
        cols.push_back(c);
    }
    auto m = from_columns(6, cols, 0.05);
    for (size_t k = 0; k < 7; k++) {
        auto r = bp_decode(m, syndrome_of(m, {k}), BpConfig{});
        EXPECT_TRUE(r.converged);
        BitVec want(7, 0);
        want[k] = 1;
        EXPECT_EQ(r.hard, want);
    }
}

TEST(Bp, SymmetricTie) {
    auto m = from_columns(1, {{0}, {0}}, 0.1);
    BitVec s{1};
    auto r = bp_decode(m, s, BpConfig{});
    EXPECT_FALSE(r.converged);
    auto out = osd_postprocess(m, s, r.posteriors, OsdConfig{});
    EXPECT_EQ(m.check_matrix().mul(out.correction), s);
    EXPECT_EQ(weight(out.correction), 1u);
}

// Four mechanisms around a cycle of four detectors: syndrome {0, 2} has two
// equally likely weight-2 explanations.
TEST(Osd, FourCycle) {
    auto m = from_columns(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 0.1);
    BitVec s{1, 0, 1, 0};
    BpConfig cfg;
    cfg.damping = 0;
    auto r = bp_decode(m, s, cfg);
    EXPECT_FALSE(r.converged);
    for (size_t order : {0, 2}) {
        OsdConfig o;
        o.order = order;
        auto out = osd_postprocess(m, s, r.posteriors, o);
        EXPECT_EQ(m.check_matrix().mul(out.correction), s);
        EXPECT_EQ(weight(out.correction), 2u);
    }
}

TEST(Osd, Infeasible) {
    auto m = from_columns(3, {{0, 1}, {1}}, 0.1);
    EXPECT_THROW(osd_solve(m.check_matrix(), BitVec{0, 0, 1}, {0.1, 0.1}, m.priors(), OsdConfig{}), InfeasibleSyndrome);
}

TEST(Osd, RandomSyndromesAreSatisfied) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::Z, 1, 3, FoldedNoise::effective(0.05, 0.002)));
    auto h = m.check_matrix();
    auto batch = sample_model(m, 2000, 3);
    OsdConfig o;
    o.order = 4;
    for (size_t s = 0; s < batch.shots; s++) {
        BitVec syn = batch.syndrome(s);
        auto bp = bp_decode(m, syn, BpConfig{});
        EXPECT_EQ(h.mul(osd_solve(h, syn, bp.posteriors, m.priors(), o)), syn);
    }
}

// One cycle with distinct single-fault signatures at low noise: every
// single fault is identified exactly.
TEST(BpOsd, SingleFaultsOneCycle) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::X, 1, 1, FoldedNoise::effective(0.001, 0.001)));
    auto h = m.check_matrix();
    for (size_t k = 0; k < m.n_mechanisms(); k++) {
        BitVec syn = syndrome_of(m, {k});
        auto out = bp_osd_decode(m, syn, BpConfig{}, OsdConfig{});
        EXPECT_EQ(h.mul(out.correction), syn);
        EXPECT_EQ(out.predicted_observables, obs_of(m, k)) << "mechanism " << k;
    }
}

TEST(Windowed, SingleWindowIsBpOsd) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::Z, 1, 3, FoldedNoise::effective(0.05, 0.002)));
    WindowedDecoder w(m, 1, 3, BpConfig{}, OsdConfig{});
    EXPECT_EQ(w.windows(), 1u);
    auto batch = sample_model(m, 500, 8);
    for (size_t s = 0; s < batch.shots; s++) {
        BitVec syn = batch.syndrome(s);
        EXPECT_EQ(w.decode(syn).predicted_observables, bp_osd_decode(m, syn, BpConfig{}, OsdConfig{}).predicted_observables);
    }
}

TEST(Windowed, ZeroSyndrome) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::Z, 3, 3, FoldedNoise::effective(0.05, 0.002)));
    WindowedDecoder w(m, 3, 3, BpConfig{}, OsdConfig{});
    auto out = w.decode(BitVec(m.n_detectors, 0));
    EXPECT_EQ(weight(out.correction), 0u);
    EXPECT_EQ(weight(out.predicted_observables), 0u);
}

TEST(Windowed, SingleFaultsFewRounds) {
    for (Basis b : {Basis::Z, Basis::X}) {
        auto m = build_detector_model(build_memory_experiment(surface13(), b, 3, 3, FoldedNoise::effective(0.001, 0.001)));
        WindowedDecoder w(m, 3, 3, BpConfig{}, OsdConfig{});
        size_t bad = 0;
        for (size_t k = 0; k < m.n_mechanisms(); k++) {
            if (w.decode(syndrome_of(m, {k})).predicted_observables != obs_of(m, k)) bad++;
        }
        EXPECT_EQ(bad, 0u);
    }
}

TEST(Windowed, BatchSerialMatchesParallel) {
    auto m = build_detector_model(build_memory_experiment(surface13(), Basis::Z, 2, 3, FoldedNoise::effective(0.08, 0.002)));
    WindowedDecoder w(m, 2, 3, BpConfig{}, OsdConfig{});
    auto batch = sample_model(m, 300, 4);
    auto a = decode_batch(w, m, batch), b = decode_batch_serial(w, m, batch);
    EXPECT_EQ(a.shots, 300u);
    EXPECT_EQ(a.failures, b.failures);
    EXPECT_GT(a.failures, 0u);
}

// Code capacity on the 225-qubit product code: X errors on data, Z checks
// as detectors. Every weight-1 error must be corrected.
TEST(BpOsd, Hgp225CodeCapacity) {
    auto c = sample_tanner_graph(12, 3, 4, 1000, 2);
    auto q = hgp(c.h, c.h);
    DetectorModel m;
    m.n_detectors = q.hz.rows();
    m.n_observables = q.k;
    auto hzt = q.hz.transpose(), lzt = q.lz.transpose();
    for (size_t i = 0; i < q.n; i++) {
        std::vector<uint32_t> d(hzt.row(i).begin(), hzt.row(i).end()), o(lzt.row(i).begin(), lzt.row(i).end());
        m.add(0.01, d, o);
    }
    for (size_t k = 0; k < q.n; k++) {
        auto out = bp_osd_decode(m, syndrome_of(m, {k}), BpConfig{}, OsdConfig{});
        EXPECT_EQ(out.predicted_observables, obs_of(m, k)) << "qubit " << k;
    }
}
