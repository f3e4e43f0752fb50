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

#include "bellq/distill.h"

using namespace bellq;

namespace {

CssCode surface13() { return hgp(repetition_code(3), repetition_code(3)); }

// Symplectic product of two Paulis given as X and Z supports over n qubits.
int symplectic(const BitVec &ax, const BitVec &az, const BitVec &bx, const BitVec &bz) {
    int s = 0;
    for (size_t i = 0; i < ax.size(); i++) s ^= (ax[i] & bz[i]) ^ (az[i] & bx[i]);
    return s;
}

BitVec row_bits(const BinMatrix &m, size_t r) {
    BitVec v(m.cols(), 0);
    for (uint32_t c : m.row(r)) v[c] = 1;
    return v;
}

}  // namespace

// Depolarizing p on both halves of a Bell pair. P (x) Q acts on the pair
// like (P Q^T) (x) I, so the pair leaves |Phi+> unless P Q^T != I up to
// phase; enumerate the 16 (P, Q) combinations.
TEST(Fold, SixteenConfigurations) {
    for (double p : {0.0, 0.01, 0.05, 0.2, 0.75}) {
        const double pr[4] = {1 - p, p / 3, p / 3, p / 3};  // I X Y Z
        double flipped[4] = {0, 0, 0, 0};
        for (int a = 0; a < 4; a++)
            for (int b = 0; b < 4; b++) flipped[a ^ b] += pr[a] * pr[b];  // XOR on {I,X,Z,Y}-like labels
        // Labels 1, 2, 3 are the three non-identity classes; each must be
        // equally likely so a single-sided depolarizing channel matches.
        EXPECT_NEAR(flipped[1], flipped[2], 1e-15);
        EXPECT_NEAR(flipped[2], flipped[3], 1e-15);
        double p_eff = 1 - flipped[0];
        EXPECT_NEAR(fold_bell_noise(p), p_eff, 1e-15);
    }
    EXPECT_NEAR(fold_bell_noise(0.05), 0.0966667, 1e-7);
    EXPECT_DOUBLE_EQ(fold_bell_noise(0.75), 0.75);
}

TEST(Fold, Gate) {
    EXPECT_EQ(fold_gate_noise(0), 0);
    EXPECT_DOUBLE_EQ(fold_gate_noise(0.001), 0.002);
    EXPECT_DOUBLE_EQ(fold_gate_noise(0.005), 0.010);
    auto n = FoldedNoise::from_two_sided(0.05, 0.001);
    EXPECT_DOUBLE_EQ(n.p_bell_eff, fold_bell_noise(0.05));
    EXPECT_DOUBLE_EQ(n.p_gate_eff, 0.002);
}

TEST(JointCode, Surface13) {
    CssCode base = surface13();
    JointCode j = joint_code(base);
    EXPECT_EQ(j.n, 26u);
    EXPECT_EQ(rank(j.hx) + rank(j.hz), 12u);
    for (size_t r = 0; r < j.hx.rows(); r++) EXPECT_EQ(j.hx.row(r).size(), 2 * base.hx.row(r).size());
    for (size_t r = 0; r < j.hz.rows(); r++) EXPECT_EQ(j.hz.row(r).size(), 2 * base.hz.row(r).size());
    EXPECT_TRUE((j.hx * j.hz.transpose()).is_zero());

    ASSERT_EQ(j.bell_logicals_x.rows(), 1u);
    ASSERT_EQ(j.bell_logicals_z.rows(), 1u);
    BitVec zero(26, 0), lx = row_bits(j.bell_logicals_x, 0), lz = row_bits(j.bell_logicals_z, 0);
    for (size_t r = 0; r < j.hz.rows(); r++) EXPECT_EQ(symplectic(lx, zero, zero, row_bits(j.hz, r)), 0);
    for (size_t r = 0; r < j.hx.rows(); r++) EXPECT_EQ(symplectic(zero, lz, row_bits(j.hx, r), zero), 0);
    // Both are stabilizers of the logical Bell pair, so they commute; a
    // one-sided logical anticommutes with the opposite Bell stabilizer.
    EXPECT_EQ(symplectic(lx, zero, zero, lz), 0);
    BitVec alice_x = lx;
    for (size_t i = 13; i < 26; i++) alice_x[i] = 0;
    EXPECT_EQ(symplectic(alice_x, zero, zero, lz), 1);
    EXPECT_FALSE(in_row_space(j.hx, lx));
    EXPECT_FALSE(in_row_space(j.hz, lz));
}

// The map s -> s (x) s is a homomorphism, and it is injective: a product
// of base checks is trivial iff its image is.
TEST(JointCode, Isomorphism) {
    CssCode base = surface13();
    JointCode j = joint_code(base);
    size_t m = base.hx.rows();
    for (uint32_t mask = 0; mask < (1u << m); mask++) {
        BitVec s(base.n, 0), t(j.n, 0);
        for (size_t r = 0; r < m; r++) {
            if (!((mask >> r) & 1)) continue;
            for (uint32_t c : base.hx.row(r)) s[c] ^= 1;
            for (uint32_t c : j.hx.row(r)) t[c] ^= 1;
        }
        for (size_t i = 0; i < base.n; i++) {
            EXPECT_EQ(t[i], s[i]);
            EXPECT_EQ(t[base.n + i], s[i]);
        }
    }
}

TEST(Oracle, Noiseless) {
    auto noise = FoldedNoise::from_two_sided(0, 0);
    for (Basis b : {Basis::Z, Basis::X}) {
        EXPECT_EQ(two_sided_oracle(surface13(), noise, b, 2000, 1).failures, 0u);
        EXPECT_EQ(folded_oracle(surface13(), noise, b, 2000, 1).failures, 0u);
    }
}

// Fully mixed input: the logical class is uniform and independent of the
// syndrome, so every decoder fails half the time.
TEST(Oracle, MaximallyMixed) {
    auto noise = FoldedNoise::from_two_sided(0.75, 0);
    auto r = two_sided_oracle(surface13(), noise, Basis::Z, 20000, 3);
    EXPECT_NEAR(r.rate(), 0.5, 4 * std::sqrt(0.25 / 20000));
    auto one = folded_oracle(surface13(), noise, Basis::X, 20000, 4);
    EXPECT_NEAR(one.rate(), 0.5, 4 * std::sqrt(0.25 / 20000));
}

TEST(Oracle, TwoSidedMatchesFolded) {
    auto noise = FoldedNoise::from_two_sided(0.05, 0.001);
    for (Basis b : {Basis::Z, Basis::X}) {
        auto two = two_sided_oracle(surface13(), noise, b, 20000, 10);
        auto one = folded_oracle(surface13(), noise, b, 20000, 11);
        double se = std::hypot(two.standard_error(), one.standard_error());
        EXPECT_LE(std::abs(two.rate() - one.rate()), 3 * se);
    }
}

TEST(Lookup, ExpectedFailureMatchesSampling) {
    auto noise = FoldedNoise::effective(0.05, 0.002);
    auto model = build_detector_model(build_memory_experiment(surface13(), Basis::X, 1, 1, noise));
    LookupDecoder dec(model);
    auto r = folded_oracle(surface13(), noise, Basis::X, 40000, 4);
    EXPECT_NEAR(r.rate(), dec.expected_failure_rate(), 4 * r.standard_error());
}
