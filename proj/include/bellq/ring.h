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

#ifndef BELLQ_RING_H
#define BELLQ_RING_H

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "bellq/gf2.h"

namespace bellq {

/// Exponents of (U, V, x) in the group ring F2[Z_L1 x Z_L2 x Z_l].
using Monomial = std::array<int, 3>;

/// Orders of the three cyclic factors. LP codes use {1, 1, l}; spatially
/// coupled codes use {L1, L2, l}.
struct GroupOrders {
    std::array<int, 3> order{1, 1, 1};
    int size() const { return order[0] * order[1] * order[2]; }
    bool operator==(const GroupOrders &) const = default;
};

/// Element of the group ring: a sorted set of reduced monomials.
class Poly {
   public:
    Poly() = default;
    static Poly monomial(const Monomial &m, const GroupOrders &g);
    static Poly one() { return monomial({0, 0, 0}, GroupOrders{}); }

    const std::vector<Monomial> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add(const Monomial &m, const GroupOrders &g);
    Poly conj(const GroupOrders &g) const;
    Poly times(const Poly &other, const GroupOrders &g) const;
    Poly plus(const Poly &other, const GroupOrders &g) const;
    bool operator==(const Poly &) const = default;

   private:
    std::vector<Monomial> terms_;
};

enum class LiftLayout {
    /// Each ring entry becomes a contiguous |G| x |G| block.
    EntryMajor,
    /// Row index = group_index * rows + entry_row (replicas side by side,
    /// the tail-biting block-circulant picture).
    GroupMajor,
};

class PolyMatrix {
   public:
    PolyMatrix() = default;
    PolyMatrix(size_t rows, size_t cols, GroupOrders g);

    static PolyMatrix identity(size_t n, GroupOrders g);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const GroupOrders &group() const { return group_; }
    const Poly &at(size_t r, size_t c) const { return entries_[r * cols_ + c]; }
    Poly &at(size_t r, size_t c) { return entries_[r * cols_ + c]; }

    PolyMatrix transpose() const;
    /// Entrywise conjugation (g -> g^-1) followed by transposition.
    PolyMatrix conj_transpose() const;
    PolyMatrix times(const PolyMatrix &other) const;
    bool is_zero() const;
    /// Largest exponent of each variable over all entries.
    Monomial max_exponents() const;
    PolyMatrix with_group(GroupOrders g) const;

    /// Binary image of the matrix; each monomial becomes the permutation
    /// matrix of its group element.
    BinMatrix lift(LiftLayout layout) const;

    static PolyMatrix hstack(const PolyMatrix &a, const PolyMatrix &b);
    /// I_n (x) m
    static PolyMatrix kron_left_identity(size_t n, const PolyMatrix &m);
    /// m (x) I_n
    static PolyMatrix kron_right_identity(const PolyMatrix &m, size_t n);

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    GroupOrders group_;
    std::vector<Poly> entries_;
};

/// Parses tokens such as "1", "x^3", "U^2V", "U*x^4", "1+V", "." (zero).
Poly parse_poly(const std::string &token, const GroupOrders &g);
std::string format_poly(const Poly &p);

/// Grid of ring tokens with a header line "rows cols lift". The lift value
/// fixes the order of x; U and V orders come from `g` (x order overridden).
PolyMatrix read_poly_matrix(std::istream &in, GroupOrders g = {});
PolyMatrix load_poly_matrix(const std::string &path, GroupOrders g = {});
void write_poly_matrix(std::ostream &out, const PolyMatrix &m);

}  // namespace bellq

#endif
