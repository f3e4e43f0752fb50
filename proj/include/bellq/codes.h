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

#ifndef BELLQ_CODES_H
#define BELLQ_CODES_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellq/gf2.h"
#include "bellq/ring.h"

namespace bellq {

/// Minimum-distance result. `distance` is empty when the code has no
/// nonzero codeword / logical operator.
struct DistanceEstimate {
    std::optional<size_t> distance;
    bool exact = false;
};

struct ClassicalCode {
    BinMatrix h;
    size_t n_bits = 0;
    size_t n_checks = 0;
    std::optional<size_t> girth;  // empty: acyclic Tanner graph
    double spectral_gap = 0;
    DistanceEstimate distance;

    static ClassicalCode from_matrix(BinMatrix h);
};

struct CssCode {
    BinMatrix hx;
    BinMatrix hz;
    BinMatrix lx;  // k rows, X-type logicals
    BinMatrix lz;  // k rows, Z-type logicals; lx * lz^T = I
    size_t n = 0;
    size_t k = 0;
    DistanceEstimate distance;
    std::string family;
    uint64_t seed = 0;

    /// Validates hx hz^T = 0 and fills n, k and symplectic logical bases.
    static CssCode from_checks(BinMatrix hx, BinMatrix hz, std::string family = "custom");
    /// Short identifier such as "hgp-225-9-4" (distance omitted when unknown).
    std::string id() const;
};

/// Random (bit_degree, check_degree)-biregular Tanner graph.
///
/// Candidates must have girth >= 6 and a full-rank check matrix; among the
/// survivors the largest spectral gap wins, ties broken by classical
/// distance then candidate index.
ClassicalCode sample_tanner_graph(
    size_t n_bits, size_t bit_degree, size_t check_degree, size_t trials, uint64_t seed);

/// Shortest cycle length of the Tanner graph; empty when acyclic.
std::optional<size_t> girth(const BinMatrix &h);

/// lambda_1 - lambda_2 of the bipartite adjacency matrix. For a single edge
/// the spectrum is {1, -1} and the gap is 2. Throws on disconnected graphs.
double spectral_gap(const BinMatrix &h);

/// Exact when 2^k <= budget, otherwise an information-set upper bound.
DistanceEstimate classical_min_distance(const BinMatrix &h, size_t budget, uint64_t seed = 1);

BinMatrix repetition_code(size_t n);

CssCode hgp(const BinMatrix &h1, const BinMatrix &h2);

/// Lifted product over F2[x]/(x^l - 1). Base entries must already live in
/// the group of order l (see PolyMatrix::with_group).
/// Block layout: HX = [B1^T (x) I | I (x) B2], HZ = [I (x) B2^* | conj(B1) (x) I].
CssCode lp(const PolyMatrix &b1, const PolyMatrix &b2);
/// Family code from one protograph B: lp(B^T, B^*), i.e. HX = [B (x) I | I (x) B^*].
CssCode lp(const PolyMatrix &base);

/// Two-dimensional spatially coupled hypergraph product.
///
/// `a` (r1 x n1) and `b` (r2 x n2) carry the coupling variables U (memory
/// m1) and V (memory m2), and optionally an inner circulant lift x of order
/// `lift`. With tail biting, the group is Z_L1 x Z_L2 x Z_lift and
///   HX = [I_n2 (x) A | B^* (x) I_r1],  HZ = [B (x) I_n1 | I_r2 (x) A^*]
/// is lifted with replicas laid out block-circulantly.
struct ScSpec {
    PolyMatrix a;
    PolyMatrix b;
    int m1 = 0;
    int m2 = 0;
    int coupling1 = 1;  // L1
    int coupling2 = 1;  // L2
    int lift = 1;
    bool tail_biting = true;

    /// Builds A (or B) from a binary protograph and an integer partition
    /// matrix: entry (i, j) becomes var^partition(i, j) * x^lift_exps(i, j).
    /// `var` is 0 for U, 1 for V. Empty lift_exps means no inner lift.
    static PolyMatrix from_partition(
        const BinMatrix &base,
        const std::vector<std::vector<int>> &partition,
        int var,
        const std::vector<std::vector<int>> &lift_exps,
        GroupOrders g);

    GroupOrders group() const { return GroupOrders{{coupling1, coupling2, lift}}; }
    /// (n1 - r1)(n2 - r2) L1 L2
    size_t k_lower_bound() const;
    size_t n_physical() const;
};

CssCode sc_hgp(const ScSpec &spec);

/// Pauli-valued component matrix H_ij of a characteristic function
/// F(U, V) = sum_ij H_ij U^i V^j. Entries are 'I', 'X', 'Y' or 'Z'.
struct ScComponent {
    int i = 0;
    int j = 0;
    std::vector<std::string> rows;
};

/// Tail-biting 2D coupled code assembled directly from component matrices.
/// Component rows must each be X-only or Z-only.
CssCode sc_from_components(const std::vector<ScComponent> &components, int coupling1, int coupling2);

/// Component form of the toric code: (m1, m2) = (1, 1) with the blocks
/// A = [X I; I I], B = [X X; Z I], C = [I X; Z Z], D = [I I; I Z].
std::vector<ScComponent> toric_components();

/// Upper bound on the minimum weight of a nontrivial logical operator, from
/// randomized information-set search, tightened to the exact value by a
/// syndrome-guided branch search when that fits in `node_budget`.
DistanceEstimate estimate_min_distance(
    const CssCode &code, size_t trials, uint64_t seed, uint64_t node_budget = 200'000'000);

/// Randomized information-set search only.
size_t random_logical_weight(const BinMatrix &checks, const BinMatrix &dual_logicals, size_t trials, uint64_t seed);

/// Same search restricted to operators supported on `support`. Product
/// codes hide their lightest logicals inside one block, where the search
/// space is far smaller.
size_t random_logical_weight_on(
    const BinMatrix &checks, const BinMatrix &dual_logicals, std::span<const size_t> support, size_t trials,
    uint64_t seed);

/// Exact minimum weight of v with checks v = 0 and dual_logicals v != 0,
/// searched up to max_weight. Returns empty if none exists within the bound;
/// sets *complete = false if the node budget ran out first.
std::optional<size_t> exact_logical_weight(
    const BinMatrix &checks,
    const BinMatrix &dual_logicals,
    size_t max_weight,
    uint64_t node_budget,
    bool *complete,
    bool parallel = true);

struct LogicalBasis {
    BinMatrix lx;
    BinMatrix lz;
};

/// k X- and k Z-logicals with lx * lz^T = I_k.
LogicalBasis logical_basis(const BinMatrix &hx, const BinMatrix &hz);

/// Writes hx, hz, lx, lz (gf2 matrix format) and manifest.json into `dir`.
void export_code(const CssCode &code, const std::string &dir);

}  // namespace bellq

#endif
