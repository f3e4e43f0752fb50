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

#ifndef BELLQ_GF2_H
#define BELLQ_GF2_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bellq {

/// Binary vector, one byte per bit (values 0 or 1).
using BitVec = std::vector<uint8_t>;

/// Sparse matrix over GF(2), stored row-major as sorted column lists.
///
/// Instances are immutable in practice once built; every elimination routine
/// works on a private bit-packed copy (see PackedRows).
class BinMatrix {
   public:
    BinMatrix() = default;
    BinMatrix(size_t rows, size_t cols);

    static BinMatrix identity(size_t n);
    static BinMatrix from_dense(const std::vector<std::vector<int>> &dense);
    /// Throws std::invalid_argument on duplicate or out-of-range positions.
    static BinMatrix from_entries(size_t rows, size_t cols, const std::vector<std::pair<size_t, size_t>> &entries);
    static BinMatrix from_rows(size_t cols, std::vector<std::vector<uint32_t>> rows);
    static BinMatrix hstack(const BinMatrix &a, const BinMatrix &b);
    static BinMatrix vstack(const BinMatrix &a, const BinMatrix &b);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t nnz() const;
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    bool get(size_t r, size_t c) const;
    void set(size_t r, size_t c, bool value);
    void toggle(size_t r, size_t c);
    std::span<const uint32_t> row(size_t r) const { return rows_data_[r]; }
    /// Replaces row r with the given (unsorted, duplicate-free) column list.
    void set_row(size_t r, std::vector<uint32_t> cols);

    BinMatrix transpose() const;
    BinMatrix operator*(const BinMatrix &other) const;
    BitVec mul(const BitVec &v) const;
    bool is_zero() const;
    size_t max_row_weight() const;
    size_t max_col_weight() const;
    std::vector<std::vector<uint8_t>> to_dense() const;
    BinMatrix select_rows(std::span<const size_t> rows) const;

    bool operator==(const BinMatrix &other) const;
    bool operator!=(const BinMatrix &other) const { return !(*this == other); }

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<std::vector<uint32_t>> rows_data_;
};

/// Dense bit-packed rows used by elimination kernels.
class PackedRows {
   public:
    PackedRows() = default;
    PackedRows(size_t rows, size_t cols);
    explicit PackedRows(const BinMatrix &m);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t words() const { return words_; }

    bool get(size_t r, size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1; }
    void set(size_t r, size_t c) { row(r)[c >> 6] |= uint64_t{1} << (c & 63); }
    void flip(size_t r, size_t c) { row(r)[c >> 6] ^= uint64_t{1} << (c & 63); }
    uint64_t *row(size_t r) { return data_.data() + r * words_; }
    const uint64_t *row(size_t r) const { return data_.data() + r * words_; }
    void xor_row(size_t dst, size_t src);
    void swap_rows(size_t a, size_t b);
    bool row_is_zero(size_t r) const;
    BinMatrix to_matrix() const;

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t words_ = 0;
    std::vector<uint64_t> data_;
};

/// Result of Gaussian elimination: the (reduced) echelon form and pivot columns.
/// Pivots are chosen deterministically: columns left to right, lowest
/// available row first.
struct Echelon {
    PackedRows form;
    std::vector<size_t> pivot_cols;
    size_t rank() const { return pivot_cols.size(); }
};

Echelon row_echelon(const BinMatrix &m, bool reduced);

size_t rank(const BinMatrix &m);

/// Rows form a basis of the right null space {v : m v = 0}.
BinMatrix kernel_basis(const BinMatrix &m);

/// Kronecker product over GF(2).
BinMatrix kron(const BinMatrix &a, const BinMatrix &b);

/// l x l cyclic-shift permutation for the monomial x^exponent, or the zero
/// matrix when exponent is empty. Column i maps to row (i + exponent) mod l.
BinMatrix lift_circulant(std::optional<int> exponent, int l);

/// Any v with m v = s, or nullopt when s is outside the column space.
std::optional<BitVec> solve_linear(const BinMatrix &m, const BitVec &s);

/// Inverse of a square full-rank matrix; nullopt if singular.
std::optional<BinMatrix> inverse(const BinMatrix &m);

/// True when v lies in the row space of m.
bool in_row_space(const BinMatrix &m, const BitVec &v);

size_t weight(const BitVec &v);

/// "rows cols" header then one "r c" line per 1-entry. '#' starts a comment.
BinMatrix read_matrix(std::istream &in);
void write_matrix(std::ostream &out, const BinMatrix &m);
BinMatrix load_matrix(const std::string &path);
void save_matrix(const std::string &path, const BinMatrix &m);

}  // namespace bellq

#endif
