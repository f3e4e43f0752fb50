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

#include "bellq/gf2.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bellq {

BinMatrix::BinMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), rows_data_(rows) {
}

BinMatrix BinMatrix::identity(size_t n) {
    BinMatrix m(n, n);
    for (size_t i = 0; i < n; i++) {
        m.rows_data_[i].push_back(static_cast<uint32_t>(i));
    }
    return m;
}

BinMatrix BinMatrix::from_dense(const std::vector<std::vector<int>> &dense) {
    size_t cols = dense.empty() ? 0 : dense[0].size();
    BinMatrix m(dense.size(), cols);
    for (size_t r = 0; r < dense.size(); r++) {
        if (dense[r].size() != cols) {
            throw std::invalid_argument("ragged dense matrix");
        }
        for (size_t c = 0; c < cols; c++) {
            if (dense[r][c] & 1) {
                m.rows_data_[r].push_back(static_cast<uint32_t>(c));
            }
        }
    }
    return m;
}

BinMatrix BinMatrix::from_entries(
    size_t rows, size_t cols, const std::vector<std::pair<size_t, size_t>> &entries) {
    BinMatrix m(rows, cols);
    for (auto [r, c] : entries) {
        if (r >= rows || c >= cols) {
            throw std::invalid_argument("matrix entry out of range");
        }
        m.rows_data_[r].push_back(static_cast<uint32_t>(c));
    }
    for (auto &row : m.rows_data_) {
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw std::invalid_argument("duplicate matrix entry");
        }
    }
    return m;
}

BinMatrix BinMatrix::from_rows(size_t cols, std::vector<std::vector<uint32_t>> rows) {
    BinMatrix m(rows.size(), cols);
    for (size_t r = 0; r < rows.size(); r++) {
        m.set_row(r, std::move(rows[r]));
    }
    return m;
}

BinMatrix BinMatrix::hstack(const BinMatrix &a, const BinMatrix &b) {
    if (a.rows_ != b.rows_) {
        throw std::invalid_argument("hstack row mismatch");
    }
    BinMatrix m(a.rows_, a.cols_ + b.cols_);
    for (size_t r = 0; r < a.rows_; r++) {
        auto &row = m.rows_data_[r];
        row = a.rows_data_[r];
        for (uint32_t c : b.rows_data_[r]) {
            row.push_back(static_cast<uint32_t>(c + a.cols_));
        }
    }
    return m;
}

BinMatrix BinMatrix::vstack(const BinMatrix &a, const BinMatrix &b) {
    if (a.cols_ != b.cols_) {
        throw std::invalid_argument("vstack column mismatch");
    }
    BinMatrix m(a.rows_ + b.rows_, a.cols_);
    std::copy(a.rows_data_.begin(), a.rows_data_.end(), m.rows_data_.begin());
    std::copy(b.rows_data_.begin(), b.rows_data_.end(), m.rows_data_.begin() + a.rows_);
    return m;
}

size_t BinMatrix::nnz() const {
    size_t total = 0;
    for (const auto &row : rows_data_) {
        total += row.size();
    }
    return total;
}

bool BinMatrix::get(size_t r, size_t c) const {
    const auto &row = rows_data_[r];
    return std::binary_search(row.begin(), row.end(), static_cast<uint32_t>(c));
}

void BinMatrix::set(size_t r, size_t c, bool value) {
    if (get(r, c) != value) {
        toggle(r, c);
    }
}

void BinMatrix::toggle(size_t r, size_t c) {
    if (r >= rows_ || c >= cols_) {
        throw std::out_of_range("BinMatrix::toggle");
    }
    auto &row = rows_data_[r];
    auto it = std::lower_bound(row.begin(), row.end(), static_cast<uint32_t>(c));
    if (it != row.end() && *it == c) {
        row.erase(it);
    } else {
        row.insert(it, static_cast<uint32_t>(c));
    }
}

void BinMatrix::set_row(size_t r, std::vector<uint32_t> cols) {
    std::sort(cols.begin(), cols.end());
    if (!cols.empty() && cols.back() >= cols_) {
        throw std::invalid_argument("row entry out of range");
    }
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) {
        throw std::invalid_argument("duplicate matrix entry");
    }
    rows_data_[r] = std::move(cols);
}

BinMatrix BinMatrix::transpose() const {
    BinMatrix t(cols_, rows_);
    for (size_t r = 0; r < rows_; r++) {
        for (uint32_t c : rows_data_[r]) {
            t.rows_data_[c].push_back(static_cast<uint32_t>(r));
        }
    }
    return t;
}

BinMatrix BinMatrix::operator*(const BinMatrix &other) const {
    if (cols_ != other.rows_) {
        throw std::invalid_argument("matrix product dimension mismatch");
    }
    BinMatrix out(rows_, other.cols_);
    // bit 0: parity, bit 1: already recorded in `touched`.
    std::vector<uint8_t> acc(other.cols_, 0);
    std::vector<uint32_t> touched;
    for (size_t r = 0; r < rows_; r++) {
        touched.clear();
        for (uint32_t k : rows_data_[r]) {
            for (uint32_t c : other.rows_data_[k]) {
                if (!(acc[c] & 2)) {
                    touched.push_back(c);
                    acc[c] |= 2;
                }
                acc[c] ^= 1;
            }
        }
        auto &row = out.rows_data_[r];
        for (uint32_t c : touched) {
            if (acc[c] & 1) {
                row.push_back(c);
            }
            acc[c] = 0;
        }
        std::sort(row.begin(), row.end());
    }
    return out;
}

BitVec BinMatrix::mul(const BitVec &v) const {
    if (v.size() != cols_) {
        throw std::invalid_argument("matrix-vector dimension mismatch");
    }
    BitVec out(rows_, 0);
    for (size_t r = 0; r < rows_; r++) {
        uint8_t bit = 0;
        for (uint32_t c : rows_data_[r]) {
            bit ^= v[c];
        }
        out[r] = bit & 1;
    }
    return out;
}

bool BinMatrix::is_zero() const {
    return std::all_of(rows_data_.begin(), rows_data_.end(), [](const auto &r) { return r.empty(); });
}

size_t BinMatrix::max_row_weight() const {
    size_t w = 0;
    for (const auto &row : rows_data_) {
        w = std::max(w, row.size());
    }
    return w;
}

size_t BinMatrix::max_col_weight() const {
    std::vector<size_t> counts(cols_, 0);
    for (const auto &row : rows_data_) {
        for (uint32_t c : row) {
            counts[c]++;
        }
    }
    return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

std::vector<std::vector<uint8_t>> BinMatrix::to_dense() const {
    std::vector<std::vector<uint8_t>> dense(rows_, std::vector<uint8_t>(cols_, 0));
    for (size_t r = 0; r < rows_; r++) {
        for (uint32_t c : rows_data_[r]) {
            dense[r][c] = 1;
        }
    }
    return dense;
}

BinMatrix BinMatrix::select_rows(std::span<const size_t> rows) const {
    BinMatrix out(rows.size(), cols_);
    for (size_t i = 0; i < rows.size(); i++) {
        out.rows_data_[i] = rows_data_.at(rows[i]);
    }
    return out;
}

bool BinMatrix::operator==(const BinMatrix &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && rows_data_ == other.rows_data_;
}

PackedRows::PackedRows(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(rows * ((cols + 63) / 64), 0) {
}

PackedRows::PackedRows(const BinMatrix &m) : PackedRows(m.rows(), m.cols()) {
    for (size_t r = 0; r < m.rows(); r++) {
        for (uint32_t c : m.row(r)) {
            set(r, c);
        }
    }
}

void PackedRows::xor_row(size_t dst, size_t src) {
    uint64_t *d = row(dst);
    const uint64_t *s = row(src);
    for (size_t w = 0; w < words_; w++) {
        d[w] ^= s[w];
    }
}

void PackedRows::swap_rows(size_t a, size_t b) {
    if (a == b) {
        return;
    }
    std::swap_ranges(row(a), row(a) + words_, row(b));
}

bool PackedRows::row_is_zero(size_t r) const {
    const uint64_t *p = row(r);
    return std::all_of(p, p + words_, [](uint64_t w) { return w == 0; });
}

BinMatrix PackedRows::to_matrix() const {
    BinMatrix m(rows_, cols_);
    for (size_t r = 0; r < rows_; r++) {
        std::vector<uint32_t> cols;
        const uint64_t *p = row(r);
        for (size_t w = 0; w < words_; w++) {
            uint64_t bits = p[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                cols.push_back(static_cast<uint32_t>(w * 64 + b));
                bits &= bits - 1;
            }
        }
        m.set_row(r, std::move(cols));
    }
    return m;
}

namespace {

// Eliminates in place; returns pivot columns. When `reduced`, also clears
// entries above each pivot.
std::vector<size_t> eliminate(PackedRows &m, bool reduced, size_t col_limit) {
    std::vector<size_t> pivots;
    size_t next_row = 0;
    for (size_t c = 0; c < col_limit && next_row < m.rows(); c++) {
        size_t word = c >> 6;
        uint64_t mask = uint64_t{1} << (c & 63);
        size_t found = m.rows();
        for (size_t r = next_row; r < m.rows(); r++) {
            if (m.row(r)[word] & mask) {
                found = r;
                break;
            }
        }
        if (found == m.rows()) {
            continue;
        }
        m.swap_rows(found, next_row);
        const uint64_t *pivot = m.row(next_row);
        size_t start_word = word;
        size_t words = m.words();
        for (size_t r = reduced ? 0 : next_row + 1; r < m.rows(); r++) {
            if (r == next_row) {
                continue;
            }
            uint64_t *dst = m.row(r);
            if (dst[word] & mask) {
                for (size_t w = start_word; w < words; w++) {
                    dst[w] ^= pivot[w];
                }
            }
        }
        pivots.push_back(c);
        next_row++;
    }
    return pivots;
}

}  // namespace

Echelon row_echelon(const BinMatrix &m, bool reduced) {
    Echelon e{PackedRows(m), {}};
    e.pivot_cols = eliminate(e.form, reduced, m.cols());
    return e;
}

size_t rank(const BinMatrix &m) {
    if (m.rows() > m.cols()) {
        // Fewer pivots to search when eliminating the short side.
        return row_echelon(m.transpose(), false).rank();
    }
    return row_echelon(m, false).rank();
}

BinMatrix kernel_basis(const BinMatrix &m) {
    Echelon e = row_echelon(m, true);
    std::vector<uint8_t> is_pivot(m.cols(), 0);
    for (size_t c : e.pivot_cols) {
        is_pivot[c] = 1;
    }
    std::vector<std::vector<uint32_t>> rows;
    for (size_t f = 0; f < m.cols(); f++) {
        if (is_pivot[f]) {
            continue;
        }
        std::vector<uint32_t> v{static_cast<uint32_t>(f)};
        for (size_t i = 0; i < e.pivot_cols.size(); i++) {
            if (e.form.get(i, f)) {
                v.push_back(static_cast<uint32_t>(e.pivot_cols[i]));
            }
        }
        rows.push_back(std::move(v));
    }
    return BinMatrix::from_rows(m.cols(), std::move(rows));
}

BinMatrix kron(const BinMatrix &a, const BinMatrix &b) {
    BinMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (size_t ra = 0; ra < a.rows(); ra++) {
        for (size_t rb = 0; rb < b.rows(); rb++) {
            std::vector<uint32_t> row;
            row.reserve(a.row(ra).size() * b.row(rb).size());
            for (uint32_t ca : a.row(ra)) {
                for (uint32_t cb : b.row(rb)) {
                    row.push_back(static_cast<uint32_t>(ca * b.cols() + cb));
                }
            }
            out.set_row(ra * b.rows() + rb, std::move(row));
        }
    }
    return out;
}

BinMatrix lift_circulant(std::optional<int> exponent, int l) {
    if (l < 1) {
        throw std::invalid_argument("lift size must be positive");
    }
    BinMatrix m(l, l);
    if (!exponent.has_value()) {
        return m;
    }
    int e = *exponent;
    if (e < 0 || e >= l) {
        throw std::invalid_argument("circulant exponent out of range");
    }
    for (int i = 0; i < l; i++) {
        m.set_row((i + e) % l, {static_cast<uint32_t>(i)});
    }
    return m;
}

std::optional<BitVec> solve_linear(const BinMatrix &m, const BitVec &s) {
    if (s.size() != m.rows()) {
        throw std::invalid_argument("solve_linear: syndrome length mismatch");
    }
    PackedRows aug(m.rows(), m.cols() + 1);
    for (size_t r = 0; r < m.rows(); r++) {
        for (uint32_t c : m.row(r)) {
            aug.set(r, c);
        }
        if (s[r]) {
            aug.set(r, m.cols());
        }
    }
    std::vector<size_t> pivots = eliminate(aug, true, m.cols());
    for (size_t r = pivots.size(); r < m.rows(); r++) {
        if (aug.get(r, m.cols())) {
            return std::nullopt;
        }
    }
    BitVec v(m.cols(), 0);
    for (size_t i = 0; i < pivots.size(); i++) {
        v[pivots[i]] = aug.get(i, m.cols());
    }
    return v;
}

std::optional<BinMatrix> inverse(const BinMatrix &m) {
    size_t n = m.rows();
    if (m.cols() != n) {
        throw std::invalid_argument("inverse of non-square matrix");
    }
    PackedRows aug(n, 2 * n);
    for (size_t r = 0; r < n; r++) {
        for (uint32_t c : m.row(r)) {
            aug.set(r, c);
        }
        aug.set(r, n + r);
    }
    std::vector<size_t> pivots = eliminate(aug, true, n);
    if (pivots.size() != n) {
        return std::nullopt;
    }
    BinMatrix inv(n, n);
    for (size_t r = 0; r < n; r++) {
        std::vector<uint32_t> row;
        for (size_t c = 0; c < n; c++) {
            if (aug.get(r, n + c)) {
                row.push_back(static_cast<uint32_t>(c));
            }
        }
        inv.set_row(r, std::move(row));
    }
    return inv;
}

bool in_row_space(const BinMatrix &m, const BitVec &v) {
    if (v.size() != m.cols()) {
        throw std::invalid_argument("in_row_space: length mismatch");
    }
    return solve_linear(m.transpose(), v).has_value();
}

size_t weight(const BitVec &v) {
    size_t w = 0;
    for (uint8_t b : v) {
        w += b & 1;
    }
    return w;
}

BinMatrix read_matrix(std::istream &in) {
    std::string line;
    auto next_line = [&](std::string &out) {
        while (std::getline(in, out)) {
            auto hash = out.find('#');
            if (hash != std::string::npos) {
                out.resize(hash);
            }
            if (out.find_first_not_of(" \t\r") != std::string::npos) {
                return true;
            }
        }
        return false;
    };
    if (!next_line(line)) {
        throw std::runtime_error("matrix file: missing header");
    }
    std::istringstream header(line);
    long long rows = -1, cols = -1;
    if (!(header >> rows >> cols) || rows < 0 || cols < 0) {
        throw std::runtime_error("matrix file: bad header '" + line + "'");
    }
    std::vector<std::pair<size_t, size_t>> entries;
    while (next_line(line)) {
        std::istringstream ss(line);
        long long r, c;
        if (!(ss >> r >> c) || r < 0 || c < 0) {
            throw std::runtime_error("matrix file: bad entry '" + line + "'");
        }
        entries.emplace_back(static_cast<size_t>(r), static_cast<size_t>(c));
    }
    return BinMatrix::from_entries(static_cast<size_t>(rows), static_cast<size_t>(cols), entries);
}

void write_matrix(std::ostream &out, const BinMatrix &m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (size_t r = 0; r < m.rows(); r++) {
        for (uint32_t c : m.row(r)) {
            out << r << ' ' << c << '\n';
        }
    }
}

BinMatrix load_matrix(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open matrix file " + path);
    }
    return read_matrix(in);
}

void save_matrix(const std::string &path, const BinMatrix &m) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write matrix file " + path);
    }
    write_matrix(out, m);
}

}  // namespace bellq
