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

#include <set>
#include <sstream>

#include "bellq/circuit.h"

using namespace bellq;

namespace {

CssCode surface13() { return hgp(repetition_code(3), repetition_code(3)); }

// Each layer is a matching and the layers cover every Tanner edge once.
void audit_layers(const BinMatrix &checks, const std::vector<GateLayer> &layers) {
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (const auto &layer : layers) {
        std::set<uint32_t> rows, cols;
        for (auto [r, c] : layer) {
            EXPECT_TRUE(rows.insert(r).second);
            EXPECT_TRUE(cols.insert(c).second);
            EXPECT_TRUE(checks.get(r, c));
            EXPECT_TRUE(seen.insert({r, c}).second);
        }
    }
    EXPECT_EQ(seen.size(), checks.nnz());
}

}  // namespace

TEST(EdgeColoring, WeightFourChecks) {
    auto h = BinMatrix::from_dense({{1, 1, 1, 1, 0, 0}, {0, 1, 1, 1, 1, 0}, {1, 0, 1, 0, 1, 1}, {1, 1, 0, 1, 0, 1}});
    auto layers = edge_coloring(h);
    EXPECT_EQ(layers.size(), 4u);
    audit_layers(h, layers);
}

TEST(EdgeColoring, SingleEdge) {
    auto layers = edge_coloring(BinMatrix::from_dense({{0, 1}}));
    ASSERT_EQ(layers.size(), 1u);
    EXPECT_EQ(layers[0], (GateLayer{{0, 1}}));
}

TEST(EdgeColoring, HgpInstance) {
    auto c = sample_tanner_graph(12, 3, 4, 1000, 2);
    auto q = hgp(c.h, c.h);
    auto s = make_schedule(q);
    EXPECT_EQ(s.colors_z(), std::max(q.hz.max_row_weight(), q.hz.max_col_weight()));
    EXPECT_EQ(s.colors_x(), std::max(q.hx.max_row_weight(), q.hx.max_col_weight()));
    audit_layers(q.hz, s.z_layers);
    audit_layers(q.hx, s.x_layers);
}

TEST(Cycle, Counts) {
    auto q = surface13();
    auto s = make_schedule(q);
    auto cyc = build_cycle(q, s, 0.0);
    EXPECT_EQ(cyc.noise_sites(), 0u);
    EXPECT_EQ(cyc.count(Op::CX), q.hx.nnz() + q.hz.nnz());
    EXPECT_EQ(cyc.n_measurements, 12u);
    auto noisy = build_cycle(q, s, 0.01);
    EXPECT_EQ(noisy.count(Op::Depol2), noisy.count(Op::CX));
}

TEST(Memory, Layout) {
    auto q = surface13();
    auto c = build_memory_experiment(q, Basis::Z, 14, 3, FoldedNoise::effective(0.05, 0.002));
    EXPECT_EQ(c.cycles, 42u);
    // Every check row is measured; all 12 rows are independent here.
    EXPECT_EQ(c.detectors.size(), 12u * 42 + 6);
    EXPECT_EQ(c.observables.size(), q.k);
    EXPECT_EQ(c.count(Op::Depol1), q.n);
    EXPECT_EQ(c.detector_info.size(), c.detectors.size());
    for (size_t d = 0; d < c.detectors.size(); d++) {
        const auto &info = c.detector_info[d];
        EXPECT_LE(info.cycle, 42u);
        if (info.cycle == 42) {
            EXPECT_EQ(info.type, Basis::Z);
        }
    }
}

TEST(Circuit, TextRoundTrip) {
    auto c = build_memory_experiment(surface13(), Basis::X, 1, 2, FoldedNoise::effective(0.05, 0.002));
    std::string text = c.to_text();
    std::istringstream in(text);
    NoisyCircuit back = read_circuit(in);
    EXPECT_EQ(back.to_text(), text);
    EXPECT_EQ(back.n_measurements, c.n_measurements);
    EXPECT_EQ(back.detectors, c.detectors);
    EXPECT_EQ(back.observables, c.observables);
    EXPECT_EQ(back.noise_sites(), c.noise_sites());
}

TEST(Circuit, BadText) {
    std::istringstream in("CX 0\n");
    EXPECT_THROW(read_circuit(in), std::exception);
}
