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

#include <Eigen/Dense>
#include <deque>
#include <limits>

#include "bellq/codes.h"
#include "bellq/rng.h"

using namespace bellq;

namespace {

// Shortest cycle by BFS from every node of the Tanner graph.
size_t bfs_girth(const BinMatrix &h) {
    size_t n = h.cols(), m = h.rows(), nodes = n + m;
    std::vector<std::vector<size_t>> adj(nodes);
    for (size_t r = 0; r < m; r++)
        for (uint32_t c : h.row(r)) {
            adj[c].push_back(n + r);
            adj[n + r].push_back(c);
        }
    size_t best = std::numeric_limits<size_t>::max();
    for (size_t s = 0; s < nodes; s++) {
        std::vector<long> dist(nodes, -1), parent(nodes, -1);
        std::deque<size_t> q{s};
        dist[s] = 0;
        while (!q.empty()) {
            size_t u = q.front();
            q.pop_front();
            for (size_t v : adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    parent[v] = static_cast<long>(u);
                    q.push_back(v);
                } else if (parent[u] != static_cast<long>(v)) {
                    best = std::min(best, static_cast<size_t>(dist[u] + dist[v] + 1));
                }
            }
        }
    }
    return best;
}

double eigen_gap(const BinMatrix &h) {
    size_t n = h.cols(), m = h.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + m, n + m);
    for (size_t r = 0; r < m; r++)
        for (uint32_t c : h.row(r)) a(c, n + r) = a(n + r, c) = 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    auto ev = es.eigenvalues();
    return ev(ev.size() - 1) - ev(ev.size() - 2);
}

size_t brute_distance(const BinMatrix &h) {
    size_t n = h.cols(), best = n + 1;
    for (uint64_t v = 1; v < (uint64_t{1} << n); v++) {
        BitVec x(n);
        for (size_t i = 0; i < n; i++) x[i] = (v >> i) & 1;
        if (weight(h.mul(x)) == 0) best = std::min(best, weight(x));
    }
    return best;
}

BinMatrix hamming() { return BinMatrix::from_dense({{1, 0, 1, 0, 1, 0, 1}, {0, 1, 1, 0, 0, 1, 1}, {0, 0, 0, 1, 1, 1, 1}}); }

void expect_css(const CssCode &q) {
    EXPECT_TRUE((q.hx * q.hz.transpose()).is_zero());
    EXPECT_EQ(q.n, q.hx.cols());
    EXPECT_EQ(q.k, q.n - rank(q.hx) - rank(q.hz));
    EXPECT_EQ(q.lx * q.lz.transpose(), BinMatrix::identity(q.k));
    EXPECT_TRUE((q.hx * q.lz.transpose()).is_zero());
    EXPECT_TRUE((q.hz * q.lx.transpose()).is_zero());
}

CssCode toric_sc(int d) {
    GroupOrders g{{d, d, 1}};
    ScSpec s;
    s.a = PolyMatrix(1, 1, g);
    s.a.at(0, 0) = parse_poly("1+U", g);
    s.b = PolyMatrix(1, 1, g);
    s.b.at(0, 0) = parse_poly("1+V", g);
    s.m1 = s.m2 = 1;
    s.coupling1 = s.coupling2 = d;
    return sc_hgp(s);
}

}  // namespace

TEST(Classical, Distances) {
    EXPECT_EQ(brute_distance(hamming()), 3u);
    auto d = classical_min_distance(hamming(), 1 << 20);
    EXPECT_TRUE(d.exact);
    EXPECT_EQ(d.distance, 3u);
    EXPECT_EQ(classical_min_distance(repetition_code(5), 1 << 20).distance, 5u);
    EXPECT_EQ(classical_min_distance(BinMatrix(1, 3), 1 << 20).distance, 1u);
}

TEST(Girth, Small) {
    EXPECT_FALSE(girth(BinMatrix::from_dense({{1, 1, 0}, {0, 1, 1}})));
    EXPECT_EQ(girth(BinMatrix::from_dense({{1, 1, 0}, {1, 1, 1}})), 4u);
    EXPECT_EQ(girth(hamming()), bfs_girth(hamming()));
}

TEST(SpectralGap, AgainstEigen) {
    EXPECT_NEAR(spectral_gap(BinMatrix::from_dense({{1, 1}, {1, 1}})), 2.0, 1e-9);
    EXPECT_NEAR(spectral_gap(BinMatrix::from_dense({{1}})), 2.0, 1e-9);
    EXPECT_NEAR(spectral_gap(hamming()), eigen_gap(hamming()), 1e-9);
    EXPECT_THROW(spectral_gap(BinMatrix::identity(2)), std::exception);
}

TEST(TannerGraph, Matching) {
    auto c = sample_tanner_graph(4, 1, 1, 10, 1);
    EXPECT_EQ(c.n_checks, 4u);
    EXPECT_FALSE(c.girth);
}

TEST(TannerGraph, Biregular) {
    for (size_t bits : {12, 20}) {
        auto c = sample_tanner_graph(bits, 3, 4, 1000, 2);
        EXPECT_EQ(c.n_checks, bits * 3 / 4);
        EXPECT_EQ(c.h.max_row_weight(), 4u);
        EXPECT_EQ(c.h.max_col_weight(), 3u);
        EXPECT_EQ(c.h.nnz(), bits * 3);
        EXPECT_GE(bfs_girth(c.h), 6u);
        EXPECT_EQ(*c.girth, bfs_girth(c.h));
        EXPECT_EQ(rank(c.h), c.n_checks);
        EXPECT_NEAR(eigen_gap(c.h), c.spectral_gap, 1e-9);
    }
    auto c12 = sample_tanner_graph(12, 3, 4, 1000, 2);
    EXPECT_EQ(brute_distance(c12.h), 6u);
}

TEST(Hgp, SurfaceCode) {
    auto q = hgp(repetition_code(3), repetition_code(3));
    expect_css(q);
    EXPECT_EQ(q.n, 13u);
    EXPECT_EQ(q.k, 1u);
    auto d = estimate_min_distance(q, 20, 1);
    EXPECT_TRUE(d.exact);
    EXPECT_EQ(d.distance, 3u);
}

// Girth >= 6 at 12 bits leaves only the affine-plane code, whose
// product has distance 6.
TEST(Hgp, FamilyInstances) {
    struct Want {
        size_t bits, n, k, d;
    };
    for (auto w : {Want{12, 225, 9, 6}, Want{20, 625, 25, 6}, Want{28, 1225, 49, 8}}) {
        auto c = sample_tanner_graph(w.bits, 3, 4, 1000, 2);
        auto q = hgp(c.h, c.h);
        expect_css(q);
        EXPECT_EQ(q.n, w.n);
        EXPECT_EQ(q.k, w.k);
        EXPECT_GE(static_cast<double>(q.k) / q.n, 0.04);
        auto d = estimate_min_distance(q, 20, 1);
        EXPECT_TRUE(d.exact);
        EXPECT_EQ(d.distance, w.d);
    }
}

TEST(LogicalBasis, Empty) {
    auto b = logical_basis(BinMatrix::from_dense({{1, 1}}), BinMatrix::from_dense({{1, 1}}));
    EXPECT_EQ(b.lx.rows(), 0u);
    EXPECT_EQ(b.lz.rows(), 0u);
}

TEST(Lp, FamilyParameters) {
    struct Want {
        int idx;
        size_t n, k, d;
    };
    for (auto w : {Want{1, 544, 80, 12}, Want{2, 714, 100, 16}, Want{3, 1020, 136, 20}, Want{4, 1428, 184, 24}}) {
        auto base = load_poly_matrix(std::string(BELLQ_DATA_DIR) + "/lp_b" + std::to_string(w.idx) + ".txt");
        auto q = lp(base);
        expect_css(q);
        EXPECT_EQ(q.n, w.n);
        EXPECT_EQ(q.k, w.k);
        EXPECT_GE(17 * q.k, 2 * q.n);
    }
}

TEST(Lp, TrivialLiftIsHgp) {
    GroupOrders g{{1, 1, 1}};
    Philox rng(11, 0);
    for (int t = 0; t < 5; t++) {
        PolyMatrix b1(2, 4, g), b2(3, 5, g);
        BinMatrix h1(2, 4), h2(3, 5);
        for (size_t r = 0; r < 2; r++)
            for (size_t c = 0; c < 4; c++)
                if (rng.below(2)) {
                    b1.at(r, c) = Poly::one();
                    h1.set(r, c, true);
                }
        for (size_t r = 0; r < 3; r++)
            for (size_t c = 0; c < 5; c++)
                if (rng.below(2)) {
                    b2.at(r, c) = Poly::one();
                    h2.set(r, c, true);
                }
        auto a = lp(b1, b2), b = hgp(h1, h2);
        EXPECT_EQ(a.hx, b.hx);
        EXPECT_EQ(a.hz, b.hz);
    }
}

TEST(Sc, ToricBothRoutes) {
    for (int d : {2, 3, 4}) {
        for (const auto &q : {toric_sc(d), sc_from_components(toric_components(), d, d)}) {
            expect_css(q);
            EXPECT_EQ(q.n, static_cast<size_t>(2 * d * d));
            EXPECT_EQ(q.k, 2u);
            auto dist = estimate_min_distance(q, 20, 1);
            EXPECT_TRUE(dist.exact);
            EXPECT_EQ(dist.distance, static_cast<size_t>(d));
        }
    }
}

TEST(Sc, KLowerBound) {
    Philox rng(5, 0);
    for (int t = 0; t < 30; t++) {
        int m1 = 1 + rng.below(2), m2 = 1 + rng.below(2);
        int l1 = m1 + 1 + rng.below(2), l2 = m2 + 1 + rng.below(2), lift = 1 + rng.below(3);
        GroupOrders g{{l1, l2, lift}};
        size_t r1 = 1 + rng.below(2), n1 = r1 + 1 + rng.below(2), r2 = 1 + rng.below(2), n2 = r2 + 1 + rng.below(2);
        auto random_part = [&](size_t r, size_t n, int var, int m) {
            BinMatrix base(r, n);
            std::vector<std::vector<int>> part(r, std::vector<int>(n)), lx(r, std::vector<int>(n));
            for (size_t i = 0; i < r; i++)
                for (size_t j = 0; j < n; j++) {
                    if (rng.below(3) != 0) base.set(i, j, true);
                    part[i][j] = rng.below(m + 1);
                    lx[i][j] = rng.below(lift);
                }
            return ScSpec::from_partition(base, part, var, lx, g);
        };
        ScSpec s;
        s.a = random_part(r1, n1, 0, m1);
        s.b = random_part(r2, n2, 1, m2);
        s.m1 = m1;
        s.m2 = m2;
        s.coupling1 = l1;
        s.coupling2 = l2;
        s.lift = lift;
        auto q = sc_hgp(s);
        expect_css(q);
        EXPECT_EQ(q.n, s.n_physical());
        EXPECT_GE(q.k, s.k_lower_bound());
    }
}

TEST(Distance, RandomSearchBounds) {
    auto base = load_poly_matrix(std::string(BELLQ_DATA_DIR) + "/lp_b1.txt");
    auto q = lp(base);
    size_t l = base.group().size();
    std::vector<size_t> zs, xs;
    for (size_t a = 0; a < 5; a++)
        for (size_t t = 0; t < l; t++) {
            zs.push_back(a * 5 * l + t);
            xs.push_back(a * l + t);
        }
    EXPECT_LE(random_logical_weight_on(q.hx, q.lx, zs, 100, 1), 12u);
    EXPECT_LE(random_logical_weight_on(q.hz, q.lz, xs, 100, 2), 12u);
    EXPECT_GE(random_logical_weight(q.hx, q.lx, 20, 3), 12u);
}
