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

#include "bellq/codes.h"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "bellq/rng.h"
#include "json.hpp"

namespace bellq {

namespace {

/// Echelon basis that accepts vectors one at a time.
class IncrementalBasis {
   public:
    explicit IncrementalBasis(size_t cols) : cols_(cols), words_((cols + 63) / 64) {}

    /// Returns true (and stores the reduced vector) when v is independent.
    bool add(std::vector<uint64_t> v) {
        reduce(v);
        for (size_t w = 0; w < words_; w++) {
            if (v[w]) {
                pivots_.push_back(w * 64 + __builtin_ctzll(v[w]));
                basis_.push_back(std::move(v));
                return true;
            }
        }
        return false;
    }

    void reduce(std::vector<uint64_t> &v) const {
        for (size_t i = 0; i < basis_.size(); i++) {
            size_t p = pivots_[i];
            if ((v[p >> 6] >> (p & 63)) & 1) {
                const auto &b = basis_[i];
                for (size_t w = p >> 6; w < words_; w++) {
                    v[w] ^= b[w];
                }
            }
        }
    }

    size_t size() const { return basis_.size(); }
    size_t words() const { return words_; }

   private:
    size_t cols_;
    size_t words_;
    std::vector<std::vector<uint64_t>> basis_;
    std::vector<size_t> pivots_;
};

std::vector<uint64_t> pack_row(std::span<const uint32_t> cols, size_t n) {
    std::vector<uint64_t> v((n + 63) / 64, 0);
    for (uint32_t c : cols) {
        v[c >> 6] |= uint64_t{1} << (c & 63);
    }
    return v;
}

/// Rows of `candidates` that extend the row space of `base`, in order.
BinMatrix independent_extension(const BinMatrix &base, const BinMatrix &candidates) {
    size_t n = base.cols();
    IncrementalBasis basis(n);
    for (size_t r = 0; r < base.rows(); r++) {
        basis.add(pack_row(base.row(r), n));
    }
    std::vector<std::vector<uint32_t>> kept;
    for (size_t r = 0; r < candidates.rows(); r++) {
        if (basis.add(pack_row(candidates.row(r), n))) {
            kept.emplace_back(candidates.row(r).begin(), candidates.row(r).end());
        }
    }
    return BinMatrix::from_rows(n, std::move(kept));
}

struct TannerCandidate {
    std::vector<std::vector<uint32_t>> bit_checks;
};

/// Randomized sequential construction of a simple biregular bipartite graph
/// without 4-cycles, with backtracking over bits.
class TannerBuilder {
   public:
    TannerBuilder(size_t n, size_t db, size_t dc, Philox &rng)
        : n_(n), db_(db), dc_(dc), r_(n * db / dc), rng_(rng), cap_(r_, dc), pair_used_(r_ * r_, 0), bit_checks_(n) {}

    std::optional<BinMatrix> build() {
        for (int attempt = 0; attempt < 20; attempt++) {
            std::fill(cap_.begin(), cap_.end(), dc_);
            std::fill(pair_used_.begin(), pair_used_.end(), 0);
            for (auto &b : bit_checks_) {
                b.clear();
            }
            nodes_ = 0;
            if (assign(0)) {
                std::vector<std::pair<size_t, size_t>> entries;
                for (size_t b = 0; b < n_; b++) {
                    for (uint32_t c : bit_checks_[b]) {
                        entries.emplace_back(c, b);
                    }
                }
                return BinMatrix::from_entries(r_, n_, entries);
            }
        }
        return std::nullopt;
    }

   private:
    bool assign(size_t bit) {
        if (bit == n_) {
            return true;
        }
        if (++nodes_ > kNodeBudget) {
            return false;
        }
        // Prefer checks with more remaining capacity; random among equals.
        std::vector<std::pair<uint64_t, uint32_t>> order;
        for (uint32_t c = 0; c < r_; c++) {
            if (cap_[c] > 0) {
                uint64_t key = (static_cast<uint64_t>(dc_ - cap_[c]) << 40) | (rng_() >> 24);
                order.emplace_back(key, c);
            }
        }
        std::sort(order.begin(), order.end());
        std::vector<uint32_t> candidates;
        for (auto [key, c] : order) {
            candidates.push_back(c);
        }
        std::vector<uint32_t> chosen;
        return choose(bit, candidates, 0, chosen);
    }

    bool choose(size_t bit, const std::vector<uint32_t> &candidates, size_t start, std::vector<uint32_t> &chosen) {
        if (chosen.size() == db_) {
            for (size_t i = 0; i < chosen.size(); i++) {
                cap_[chosen[i]]--;
                for (size_t j = 0; j < i; j++) {
                    mark(chosen[i], chosen[j], 1);
                }
            }
            bit_checks_[bit] = chosen;
            if (assign(bit + 1)) {
                return true;
            }
            for (size_t i = 0; i < chosen.size(); i++) {
                cap_[chosen[i]]++;
                for (size_t j = 0; j < i; j++) {
                    mark(chosen[i], chosen[j], 0);
                }
            }
            bit_checks_[bit].clear();
            return false;
        }
        size_t needed = db_ - chosen.size();
        for (size_t i = start; i + needed <= candidates.size(); i++) {
            if (nodes_ > kNodeBudget) {
                return false;
            }
            uint32_t c = candidates[i];
            bool ok = true;
            for (uint32_t prev : chosen) {
                if (pair_used_[prev * r_ + c]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                continue;
            }
            chosen.push_back(c);
            if (choose(bit, candidates, i + 1, chosen)) {
                return true;
            }
            chosen.pop_back();
        }
        return false;
    }

    void mark(uint32_t a, uint32_t b, uint8_t v) {
        pair_used_[a * r_ + b] = v;
        pair_used_[b * r_ + a] = v;
    }

    static constexpr uint64_t kNodeBudget = 200000;
    size_t n_, db_, dc_, r_;
    Philox &rng_;
    std::vector<size_t> cap_;
    std::vector<uint8_t> pair_used_;
    std::vector<std::vector<uint32_t>> bit_checks_;
    uint64_t nodes_ = 0;
};

/// Adjacency of the Tanner graph: bits are nodes [0, n), checks [n, n + r).
std::vector<std::vector<uint32_t>> tanner_adjacency(const BinMatrix &h) {
    size_t n = h.cols();
    std::vector<std::vector<uint32_t>> adj(n + h.rows());
    for (size_t r = 0; r < h.rows(); r++) {
        for (uint32_t c : h.row(r)) {
            adj[n + r].push_back(c);
            adj[c].push_back(static_cast<uint32_t>(n + r));
        }
    }
    return adj;
}

bool is_connected(const std::vector<std::vector<uint32_t>> &adj) {
    if (adj.empty()) {
        return true;
    }
    std::vector<uint8_t> seen(adj.size(), 0);
    std::vector<uint32_t> stack{0};
    seen[0] = 1;
    size_t count = 1;
    while (!stack.empty()) {
        uint32_t u = stack.back();
        stack.pop_back();
        for (uint32_t v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                count++;
                stack.push_back(v);
            }
        }
    }
    return count == adj.size();
}

/// Eigenvalues of h h^T in increasing order.
Eigen::VectorXd gram_spectrum(const BinMatrix &h) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h.rows()), static_cast<Eigen::Index>(h.cols()));
    for (size_t r = 0; r < h.rows(); r++) {
        for (uint32_t c : h.row(r)) {
            d(static_cast<Eigen::Index>(r), c) = 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d * d.transpose(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

ClassicalCode ClassicalCode::from_matrix(BinMatrix h) {
    ClassicalCode c;
    c.n_bits = h.cols();
    c.n_checks = h.rows();
    c.girth = bellq::girth(h);
    if (is_connected(tanner_adjacency(h))) {
        c.spectral_gap = bellq::spectral_gap(h);
    }
    c.distance = classical_min_distance(h, size_t{1} << 20);
    c.h = std::move(h);
    return c;
}

std::optional<size_t> girth(const BinMatrix &h) {
    auto adj = tanner_adjacency(h);
    size_t nodes = adj.size();
    size_t best = std::numeric_limits<size_t>::max();
    std::vector<int64_t> dist(nodes);
    std::vector<int64_t> parent(nodes);
    std::queue<uint32_t> q;
    for (size_t s = 0; s < nodes; s++) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        parent[s] = -1;
        q.push(static_cast<uint32_t>(s));
        while (!q.empty()) {
            uint32_t u = q.front();
            q.pop();
            if (static_cast<size_t>(2 * dist[u]) >= best) {
                break;
            }
            for (uint32_t v : adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    q.push(v);
                } else if (parent[u] != static_cast<int64_t>(v)) {
                    best = std::min(best, static_cast<size_t>(dist[u] + dist[v] + 1));
                }
            }
        }
        q = {};
    }
    if (best == std::numeric_limits<size_t>::max()) {
        return std::nullopt;
    }
    return best;
}

double spectral_gap(const BinMatrix &h) {
    if (h.rows() == 0 || h.cols() == 0) {
        throw std::invalid_argument("spectral_gap: empty graph");
    }
    if (!is_connected(tanner_adjacency(h))) {
        throw std::invalid_argument("spectral_gap: disconnected Tanner graph");
    }
    // Nonzero adjacency eigenvalues are +-sigma_i, the singular values of h.
    const BinMatrix g = h.rows() <= h.cols() ? h : h.transpose();
    Eigen::VectorXd mu = gram_spectrum(g);
    Eigen::Index top = mu.size() - 1;
    double sigma1 = std::sqrt(std::max(0.0, mu(top)));
    size_t nodes = h.rows() + h.cols();
    double lambda2;
    if (top >= 1) {
        lambda2 = std::sqrt(std::max(0.0, mu(top - 1)));
    } else if (nodes > 2) {
        lambda2 = 0.0;
    } else {
        lambda2 = -sigma1;
    }
    return sigma1 - lambda2;
}

DistanceEstimate classical_min_distance(const BinMatrix &h, size_t budget, uint64_t seed) {
    BinMatrix g = kernel_basis(h);
    size_t k = g.rows();
    size_t n = h.cols();
    if (k == 0) {
        return {std::nullopt, true};
    }
    if (k < 63 && (uint64_t{1} << k) <= budget) {
        std::vector<std::vector<uint64_t>> rows;
        for (size_t r = 0; r < k; r++) {
            rows.push_back(pack_row(g.row(r), n));
        }
        std::vector<uint64_t> cur((n + 63) / 64, 0);
        size_t best = n + 1;
        for (uint64_t i = 1; i < (uint64_t{1} << k); i++) {
            size_t flip = static_cast<size_t>(__builtin_ctzll(i));
            size_t w = 0;
            for (size_t j = 0; j < cur.size(); j++) {
                cur[j] ^= rows[flip][j];
                w += static_cast<size_t>(__builtin_popcountll(cur[j]));
            }
            best = std::min(best, w);
        }
        return {best, true};
    }
    size_t best = n + 1;
    Philox rng(seed, 0xc1a55);
    std::vector<size_t> perm(n);
    for (int t = 0; t < 2000; t++) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        PackedRows m(k, n);
        for (size_t r = 0; r < k; r++) {
            for (uint32_t c : g.row(r)) {
                m.set(r, perm[c]);
            }
        }
        Echelon e = row_echelon(m.to_matrix(), true);
        for (size_t r = 0; r < e.rank(); r++) {
            size_t w = 0;
            for (size_t j = 0; j < e.form.words(); j++) {
                w += static_cast<size_t>(__builtin_popcountll(e.form.row(r)[j]));
            }
            best = std::min(best, w);
        }
    }
    return {best, false};
}

ClassicalCode sample_tanner_graph(size_t n_bits, size_t bit_degree, size_t check_degree, size_t trials, uint64_t seed) {
    if (bit_degree == 0 || check_degree == 0 || (n_bits * bit_degree) % check_degree != 0) {
        throw std::invalid_argument("n_bits * bit_degree must be divisible by check_degree");
    }
    size_t n_checks = n_bits * bit_degree / check_degree;
    if (bit_degree > n_checks || check_degree > n_bits) {
        throw std::invalid_argument("degrees exceed the number of nodes");
    }
    struct Scored {
        bool valid = false;
        size_t distance = 0;
        double gap = 0;
        ClassicalCode code;
    };
    std::vector<Scored> scored(trials);
#pragma omp parallel for schedule(dynamic)
    for (int64_t t = 0; t < static_cast<int64_t>(trials); t++) {
        Philox rng(derive_seed(seed, static_cast<uint64_t>(t)), 0x7a22e4);
        TannerBuilder builder(n_bits, bit_degree, check_degree, rng);
        auto h = builder.build();
        if (!h) {
            continue;
        }
        auto g = girth(*h);
        if (g.has_value() && *g < 6) {
            continue;
        }
        if (rank(*h) != n_checks) {
            continue;
        }
        ClassicalCode code = ClassicalCode::from_matrix(std::move(*h));
        Scored &s = scored[t];
        s.valid = true;
        s.distance = code.distance.distance.value_or(0);
        s.gap = code.spectral_gap;
        s.code = std::move(code);
    }
    const Scored *best = nullptr;
    for (const auto &s : scored) {
        if (!s.valid) {
            continue;
        }
        if (best == nullptr || s.gap > best->gap + 1e-9 ||
            (s.gap > best->gap - 1e-9 && s.distance > best->distance)) {
            best = &s;
        }
    }
    if (best == nullptr) {
        throw std::runtime_error("sample_tanner_graph: no full-rank candidate with girth >= 6 found");
    }
    return best->code;
}

BinMatrix repetition_code(size_t n) {
    if (n < 2) {
        throw std::invalid_argument("repetition code needs n >= 2");
    }
    BinMatrix h(n - 1, n);
    for (size_t i = 0; i + 1 < n; i++) {
        h.set_row(i, {static_cast<uint32_t>(i), static_cast<uint32_t>(i + 1)});
    }
    return h;
}

LogicalBasis logical_basis(const BinMatrix &hx, const BinMatrix &hz) {
    if (!(hx * hz.transpose()).is_zero()) {
        throw std::invalid_argument("logical_basis: checks do not commute");
    }
    BinMatrix lx = independent_extension(hx, kernel_basis(hz));
    BinMatrix lz = independent_extension(hz, kernel_basis(hx));
    if (lx.rows() != lz.rows()) {
        throw std::logic_error("logical_basis: X and Z logical counts differ");
    }
    size_t k = lx.rows();
    if (k == 0) {
        return {lx, lz};
    }
    BinMatrix pairing = lx * lz.transpose();
    auto inv = inverse(pairing);
    if (!inv) {
        throw std::logic_error("logical_basis: singular pairing matrix");
    }
    BinMatrix lz_paired = inv->transpose() * lz;
    return {lx, lz_paired};
}

CssCode CssCode::from_checks(BinMatrix hx, BinMatrix hz, std::string family) {
    if (hx.cols() != hz.cols()) {
        throw std::invalid_argument("hx and hz have different qubit counts");
    }
    if (!(hx * hz.transpose()).is_zero()) {
        throw std::invalid_argument("CSS condition hx hz^T = 0 violated");
    }
    CssCode code;
    code.n = hx.cols();
    size_t rx = rank(hx);
    size_t rz = rank(hz);
    code.k = code.n - rx - rz;
    auto basis = logical_basis(hx, hz);
    if (basis.lx.rows() != code.k) {
        throw std::logic_error("logical count disagrees with rank formula");
    }
    code.lx = std::move(basis.lx);
    code.lz = std::move(basis.lz);
    code.hx = std::move(hx);
    code.hz = std::move(hz);
    code.family = std::move(family);
    return code;
}

std::string CssCode::id() const {
    std::string s = family + "-" + std::to_string(n) + "-" + std::to_string(k);
    if (distance.distance) {
        s += "-" + std::to_string(*distance.distance);
    }
    return s;
}

CssCode hgp(const BinMatrix &h1, const BinMatrix &h2) {
    size_t r1 = h1.rows(), n1 = h1.cols(), r2 = h2.rows(), n2 = h2.cols();
    BinMatrix hx = BinMatrix::hstack(kron(h1.transpose(), BinMatrix::identity(r2)), kron(BinMatrix::identity(n1), h2));
    BinMatrix hz = BinMatrix::hstack(kron(BinMatrix::identity(r1), h2.transpose()), kron(h1, BinMatrix::identity(n2)));
    return CssCode::from_checks(std::move(hx), std::move(hz), "hgp");
}

CssCode lp(const PolyMatrix &b1, const PolyMatrix &b2) {
    if (!(b1.group() == b2.group())) {
        throw std::invalid_argument("lp: base matrices use different lifts");
    }
    size_t m1 = b1.rows(), n1 = b1.cols(), m2 = b2.rows(), n2 = b2.cols();
    PolyMatrix bx = PolyMatrix::hstack(
        PolyMatrix::kron_right_identity(b1.transpose(), m2), PolyMatrix::kron_left_identity(n1, b2));
    // conj(B1) = (B1^*)^T; the conjugate makes lift(Bz)^T the adjoint of Bz.
    PolyMatrix bz = PolyMatrix::hstack(
        PolyMatrix::kron_left_identity(m1, b2.conj_transpose()),
        PolyMatrix::kron_right_identity(b1.conj_transpose().transpose(), n2));
    return CssCode::from_checks(bx.lift(LiftLayout::EntryMajor), bz.lift(LiftLayout::EntryMajor), "lp");
}

CssCode lp(const PolyMatrix &base) {
    // LP(B, B^*): B enters the X block directly and its adjoint pairs with it.
    return lp(base.transpose(), base.conj_transpose());
}

PolyMatrix ScSpec::from_partition(
    const BinMatrix &base,
    const std::vector<std::vector<int>> &partition,
    int var,
    const std::vector<std::vector<int>> &lift_exps,
    GroupOrders g) {
    if (var != 0 && var != 1) {
        throw std::invalid_argument("coupling variable must be U (0) or V (1)");
    }
    if (partition.size() != base.rows()) {
        throw std::invalid_argument("partition matrix shape mismatch");
    }
    PolyMatrix m(base.rows(), base.cols(), g);
    for (size_t r = 0; r < base.rows(); r++) {
        if (partition[r].size() != base.cols() || (!lift_exps.empty() && lift_exps[r].size() != base.cols())) {
            throw std::invalid_argument("partition matrix shape mismatch");
        }
        for (uint32_t c : base.row(r)) {
            Monomial mono{0, 0, 0};
            mono[var] = partition[r][c];
            if (!lift_exps.empty()) {
                mono[2] = lift_exps[r][c];
            }
            if (mono[var] < 0 || mono[2] < 0 || mono[2] >= g.order[2]) {
                throw std::invalid_argument("partition or lift entry out of range");
            }
            m.at(r, c).add(mono, g);
        }
    }
    return m;
}

size_t ScSpec::k_lower_bound() const {
    size_t r1 = a.rows(), n1 = a.cols(), r2 = b.rows(), n2 = b.cols();
    if (n1 < r1 || n2 < r2) {
        return 0;
    }
    return (n1 - r1) * (n2 - r2) * static_cast<size_t>(coupling1) * static_cast<size_t>(coupling2) *
           static_cast<size_t>(lift);
}

size_t ScSpec::n_physical() const {
    return (a.rows() * b.rows() + a.cols() * b.cols()) * static_cast<size_t>(group().size());
}

CssCode sc_hgp(const ScSpec &spec) {
    if (!spec.tail_biting) {
        throw std::invalid_argument("sc_hgp: only tail-biting coupling is supported");
    }
    if (spec.m1 < 0 || spec.m2 < 0 || spec.coupling1 < spec.m1 + 1 || spec.coupling2 < spec.m2 + 1 || spec.lift < 1) {
        throw std::invalid_argument("sc_hgp: need L1 >= m1 + 1, L2 >= m2 + 1 and lift >= 1");
    }
    GroupOrders g = spec.group();
    for (const PolyMatrix *m : {&spec.a, &spec.b}) {
        Monomial hi = m->max_exponents();
        if (hi[0] > spec.m1 || hi[1] > spec.m2) {
            throw std::invalid_argument("sc_hgp: component exponent exceeds memory");
        }
        if (hi[2] >= spec.lift) {
            throw std::invalid_argument("sc_hgp: lift exponent out of range");
        }
    }
    PolyMatrix a = spec.a.with_group(g);
    PolyMatrix b = spec.b.with_group(g);
    size_t r1 = a.rows(), n1 = a.cols(), r2 = b.rows(), n2 = b.cols();
    PolyMatrix fx = PolyMatrix::hstack(
        PolyMatrix::kron_left_identity(n2, a), PolyMatrix::kron_right_identity(b.conj_transpose(), r1));
    PolyMatrix fz = PolyMatrix::hstack(
        PolyMatrix::kron_right_identity(b, n1), PolyMatrix::kron_left_identity(r2, a.conj_transpose()));
    return CssCode::from_checks(fx.lift(LiftLayout::GroupMajor), fz.lift(LiftLayout::GroupMajor), "sc");
}

CssCode sc_from_components(const std::vector<ScComponent> &components, int coupling1, int coupling2) {
    if (components.empty()) {
        throw std::invalid_argument("sc_from_components: no components");
    }
    size_t rows = components[0].rows.size();
    size_t cols = rows ? components[0].rows[0].size() : 0;
    int m1 = 0, m2 = 0;
    for (const auto &comp : components) {
        if (comp.rows.size() != rows || comp.i < 0 || comp.j < 0) {
            throw std::invalid_argument("sc_from_components: inconsistent component");
        }
        m1 = std::max(m1, comp.i);
        m2 = std::max(m2, comp.j);
        for (const auto &row : comp.rows) {
            if (row.size() != cols) {
                throw std::invalid_argument("sc_from_components: ragged component row");
            }
        }
    }
    if (coupling1 < m1 + 1 || coupling2 < m2 + 1) {
        throw std::invalid_argument("sc_from_components: coupling length shorter than memory + 1");
    }
    GroupOrders g{{coupling1, coupling2, 1}};
    PolyMatrix fx(rows, cols, g), fz(rows, cols, g);
    for (const auto &comp : components) {
        for (size_t r = 0; r < rows; r++) {
            for (size_t c = 0; c < cols; c++) {
                char p = comp.rows[r][c];
                if (p != 'I' && p != 'X' && p != 'Y' && p != 'Z') {
                    throw std::invalid_argument("sc_from_components: bad Pauli symbol");
                }
                if (p == 'X' || p == 'Y') {
                    fx.at(r, c).add({comp.i, comp.j, 0}, g);
                }
                if (p == 'Z' || p == 'Y') {
                    fz.at(r, c).add({comp.i, comp.j, 0}, g);
                }
            }
        }
    }
    std::vector<size_t> x_rows, z_rows;
    for (size_t r = 0; r < rows; r++) {
        bool has_x = false, has_z = false;
        for (size_t c = 0; c < cols; c++) {
            has_x |= !fx.at(r, c).is_zero();
            has_z |= !fz.at(r, c).is_zero();
        }
        if (has_x && has_z) {
            throw std::invalid_argument("sc_from_components: mixed X/Z check row is not CSS");
        }
        if (has_x) {
            x_rows.push_back(r);
        } else if (has_z) {
            z_rows.push_back(r);
        }
    }
    BinMatrix lx = fx.lift(LiftLayout::GroupMajor);
    BinMatrix lzm = fz.lift(LiftLayout::GroupMajor);
    std::vector<size_t> sel_x, sel_z;
    for (int grp = 0; grp < g.size(); grp++) {
        for (size_t r : x_rows) {
            sel_x.push_back(static_cast<size_t>(grp) * rows + r);
        }
        for (size_t r : z_rows) {
            sel_z.push_back(static_cast<size_t>(grp) * rows + r);
        }
    }
    return CssCode::from_checks(lx.select_rows(sel_x), lzm.select_rows(sel_z), "sc");
}

std::vector<ScComponent> toric_components() {
    return {
        {0, 0, {"XI", "II"}},
        {0, 1, {"XX", "ZI"}},
        {1, 0, {"IX", "ZZ"}},
        {1, 1, {"II", "IZ"}},
    };
}

size_t random_logical_weight(const BinMatrix &checks, const BinMatrix &dual_logicals, size_t trials, uint64_t seed) {
    size_t n = checks.cols();
    BinMatrix g = kernel_basis(checks);
    size_t dim = g.rows();
    size_t best = std::numeric_limits<size_t>::max();
    if (dim == 0 || dual_logicals.rows() == 0) {
        return best;
    }
    size_t k = dual_logicals.rows();
    BinMatrix dual_t = dual_logicals.transpose();  // n x k
    Philox rng(seed, 0x15d);
    std::vector<size_t> perm(n), inv(n);
    PackedRows m(dim, n);
    std::vector<uint64_t> parity((k + 63) / 64);
    auto consider = [&](const uint64_t *row, size_t words) {
        size_t w = 0;
        for (size_t j = 0; j < words; j++) {
            w += static_cast<size_t>(__builtin_popcountll(row[j]));
        }
        if (w == 0 || w >= best) {
            return;
        }
        std::fill(parity.begin(), parity.end(), 0);
        for (size_t j = 0; j < words; j++) {
            uint64_t bits = row[j];
            while (bits) {
                size_t col = inv[j * 64 + __builtin_ctzll(bits)];
                for (uint32_t l : dual_t.row(col)) {
                    parity[l >> 6] ^= uint64_t{1} << (l & 63);
                }
                bits &= bits - 1;
            }
        }
        if (std::any_of(parity.begin(), parity.end(), [](uint64_t p) { return p != 0; })) {
            best = w;
        }
    };
    for (size_t t = 0; t < trials; t++) {
        std::iota(perm.begin(), perm.end(), 0);
        if (t > 0) {
            std::shuffle(perm.begin(), perm.end(), rng);
        }
        for (size_t i = 0; i < n; i++) {
            inv[perm[i]] = i;
        }
        m = PackedRows(dim, n);
        for (size_t r = 0; r < dim; r++) {
            for (uint32_t c : g.row(r)) {
                m.set(r, perm[c]);
            }
        }
        Echelon e = row_echelon(m.to_matrix(), true);
        for (size_t r = 0; r < e.rank(); r++) {
            consider(e.form.row(r), e.form.words());
        }
    }
    return best;
}

size_t random_logical_weight_on(
    const BinMatrix &checks, const BinMatrix &dual_logicals, std::span<const size_t> support, size_t trials,
    uint64_t seed) {
    BinMatrix c = checks.transpose().select_rows(support).transpose();
    BinMatrix d = dual_logicals.transpose().select_rows(support).transpose();
    return random_logical_weight(c, d, trials, seed);
}

namespace {

struct BranchSearch {
    const BinMatrix &checks;
    BinMatrix cols;  // transpose of checks
    std::vector<std::vector<uint64_t>> dual_masks;
    size_t dual_words;
    size_t max_col_weight;
    std::atomic<size_t> &best;
    std::atomic<uint64_t> &nodes;
    std::atomic<bool> &aborted;
    uint64_t budget;

    // Per-thread state.
    std::vector<uint8_t> synd;
    std::vector<uint8_t> in_set;
    std::vector<uint32_t> chosen;
    std::vector<uint64_t> parity;
    size_t unsat = 0;
    uint32_t start = 0;

    void toggle_qubit(uint32_t q) {
        for (uint32_t c : cols.row(q)) {
            synd[c] ^= 1;
            if (synd[c]) {
                unsat++;
            } else {
                unsat--;
            }
        }
        for (size_t w = 0; w < dual_words; w++) {
            parity[w] ^= dual_masks[q][w];
        }
        in_set[q] ^= 1;
    }

    bool nontrivial() const {
        return std::any_of(parity.begin(), parity.end(), [](uint64_t p) { return p != 0; });
    }

    void run_from(uint32_t q0) {
        start = q0;
        toggle_qubit(q0);
        chosen.push_back(q0);
        dfs();
        chosen.pop_back();
        toggle_qubit(q0);
    }

    void dfs() {
        if (aborted.load(std::memory_order_relaxed)) {
            return;
        }
        if (nodes.fetch_add(1, std::memory_order_relaxed) > budget) {
            aborted = true;
            return;
        }
        size_t size = chosen.size();
        if (unsat == 0) {
            if (nontrivial()) {
                size_t cur = best.load();
                while (size < cur && !best.compare_exchange_weak(cur, size)) {
                }
            }
            return;
        }
        size_t remaining_needed = (unsat + max_col_weight - 1) / max_col_weight;
        if (size + remaining_needed >= best.load(std::memory_order_relaxed)) {
            return;
        }
        // Branch on an unsatisfied check touching the most recent qubit.
        uint32_t target = UINT32_MAX;
        for (size_t i = chosen.size(); i-- > 0 && target == UINT32_MAX;) {
            for (uint32_t c : cols.row(chosen[i])) {
                if (synd[c]) {
                    target = c;
                    break;
                }
            }
        }
        for (uint32_t q : checks.row(target)) {
            if (q <= start || in_set[q]) {
                continue;
            }
            toggle_qubit(q);
            chosen.push_back(q);
            dfs();
            chosen.pop_back();
            toggle_qubit(q);
        }
    }
};

}  // namespace

std::optional<size_t> exact_logical_weight(
    const BinMatrix &checks,
    const BinMatrix &dual_logicals,
    size_t max_weight,
    uint64_t node_budget,
    bool *complete,
    bool parallel) {
    size_t n = checks.cols();
    size_t k = dual_logicals.rows();
    if (complete) {
        *complete = true;
    }
    if (k == 0 || max_weight == 0) {
        return std::nullopt;
    }
    BinMatrix cols = checks.transpose();
    BinMatrix dual_t = dual_logicals.transpose();
    size_t dual_words = (k + 63) / 64;
    std::vector<std::vector<uint64_t>> masks(n, std::vector<uint64_t>(dual_words, 0));
    for (size_t q = 0; q < n; q++) {
        for (uint32_t l : dual_t.row(q)) {
            masks[q][l >> 6] |= uint64_t{1} << (l & 63);
        }
    }
    std::atomic<size_t> best{max_weight + 1};
    std::atomic<uint64_t> nodes{0};
    std::atomic<bool> aborted{false};
    size_t mcw = std::max<size_t>(1, checks.max_col_weight());
    auto make = [&]() {
        BranchSearch s{checks, cols, masks, dual_words, mcw, best, nodes, aborted, node_budget, {}, {}, {}, {}, 0, 0};
        s.synd.assign(checks.rows(), 0);
        s.in_set.assign(n, 0);
        s.parity.assign(dual_words, 0);
        return s;
    };
    if (parallel) {
#pragma omp parallel
        {
            BranchSearch s = make();
#pragma omp for schedule(dynamic, 4)
            for (int64_t q = 0; q < static_cast<int64_t>(n); q++) {
                s.run_from(static_cast<uint32_t>(q));
            }
        }
    } else {
        BranchSearch s = make();
        for (size_t q = 0; q < n; q++) {
            s.run_from(static_cast<uint32_t>(q));
        }
    }
    if (complete) {
        *complete = !aborted.load();
    }
    size_t b = best.load();
    if (b > max_weight) {
        return std::nullopt;
    }
    return b;
}

DistanceEstimate estimate_min_distance(const CssCode &code, size_t trials, uint64_t seed, uint64_t node_budget) {
    if (code.k == 0) {
        return {std::nullopt, true};
    }
    size_t ub = std::min(
        random_logical_weight(code.hx, code.lx, trials, seed),
        random_logical_weight(code.hz, code.lz, trials, derive_seed(seed, 1)));
    if (ub == std::numeric_limits<size_t>::max()) {
        throw std::logic_error("estimate_min_distance: no logical operator found");
    }
    bool complete_z = false, complete_x = false;
    auto dz = exact_logical_weight(code.hx, code.lx, ub - 1, node_budget / 2, &complete_z);
    auto dx = exact_logical_weight(code.hz, code.lz, ub - 1, node_budget / 2, &complete_x);
    size_t d = ub;
    if (dz) {
        d = std::min(d, *dz);
    }
    if (dx) {
        d = std::min(d, *dx);
    }
    return {d, complete_z && complete_x};
}

void export_code(const CssCode &code, const std::string &dir) {
    std::filesystem::create_directories(dir);
    save_matrix(dir + "/hx.txt", code.hx);
    save_matrix(dir + "/hz.txt", code.hz);
    save_matrix(dir + "/lx.txt", code.lx);
    save_matrix(dir + "/lz.txt", code.lz);
    nlohmann::ordered_json j;
    j["family"] = code.family;
    j["n"] = code.n;
    j["k"] = code.k;
    if (code.distance.distance) {
        j["d_upper"] = *code.distance.distance;
    } else {
        j["d_upper"] = nullptr;
    }
    j["d_exact"] = code.distance.exact;
    j["seed"] = code.seed;
    std::ofstream out(dir + "/manifest.json");
    out << j.dump(2) << '\n';
}

}  // namespace bellq
