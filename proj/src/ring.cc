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

#include "bellq/ring.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bellq {

namespace {

int mod(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

Monomial reduce(const Monomial &m, const GroupOrders &g) {
    return {mod(m[0], g.order[0]), mod(m[1], g.order[1]), mod(m[2], g.order[2])};
}

int group_index(const Monomial &m, const GroupOrders &g) {
    return (m[0] * g.order[1] + m[1]) * g.order[2] + m[2];
}

}  // namespace

Poly Poly::monomial(const Monomial &m, const GroupOrders &g) {
    Poly p;
    p.terms_.push_back(reduce(m, g));
    return p;
}

void Poly::add(const Monomial &m, const GroupOrders &g) {
    Monomial r = reduce(m, g);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), r);
    if (it != terms_.end() && *it == r) {
        terms_.erase(it);
    } else {
        terms_.insert(it, r);
    }
}

Poly Poly::conj(const GroupOrders &g) const {
    Poly out;
    for (const auto &t : terms_) {
        out.add({-t[0], -t[1], -t[2]}, g);
    }
    return out;
}

Poly Poly::times(const Poly &other, const GroupOrders &g) const {
    Poly out;
    for (const auto &a : terms_) {
        for (const auto &b : other.terms_) {
            out.add({a[0] + b[0], a[1] + b[1], a[2] + b[2]}, g);
        }
    }
    return out;
}

Poly Poly::plus(const Poly &other, const GroupOrders &g) const {
    Poly out = *this;
    for (const auto &t : other.terms_) {
        out.add(t, g);
    }
    return out;
}

PolyMatrix::PolyMatrix(size_t rows, size_t cols, GroupOrders g)
    : rows_(rows), cols_(cols), group_(g), entries_(rows * cols) {
}

PolyMatrix PolyMatrix::identity(size_t n, GroupOrders g) {
    PolyMatrix m(n, n, g);
    for (size_t i = 0; i < n; i++) {
        m.at(i, i) = Poly::monomial({0, 0, 0}, g);
    }
    return m;
}

PolyMatrix PolyMatrix::transpose() const {
    PolyMatrix t(cols_, rows_, group_);
    for (size_t r = 0; r < rows_; r++) {
        for (size_t c = 0; c < cols_; c++) {
            t.at(c, r) = at(r, c);
        }
    }
    return t;
}

PolyMatrix PolyMatrix::conj_transpose() const {
    PolyMatrix t(cols_, rows_, group_);
    for (size_t r = 0; r < rows_; r++) {
        for (size_t c = 0; c < cols_; c++) {
            t.at(c, r) = at(r, c).conj(group_);
        }
    }
    return t;
}

PolyMatrix PolyMatrix::times(const PolyMatrix &other) const {
    if (cols_ != other.rows_ || !(group_ == other.group_)) {
        throw std::invalid_argument("PolyMatrix::times shape or group mismatch");
    }
    PolyMatrix out(rows_, other.cols_, group_);
    for (size_t r = 0; r < rows_; r++) {
        for (size_t c = 0; c < other.cols_; c++) {
            Poly acc;
            for (size_t k = 0; k < cols_; k++) {
                acc = acc.plus(at(r, k).times(other.at(k, c), group_), group_);
            }
            out.at(r, c) = std::move(acc);
        }
    }
    return out;
}

bool PolyMatrix::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Poly &p) { return p.is_zero(); });
}

Monomial PolyMatrix::max_exponents() const {
    Monomial m{0, 0, 0};
    for (const auto &p : entries_) {
        for (const auto &t : p.terms()) {
            for (int i = 0; i < 3; i++) {
                m[i] = std::max(m[i], t[i]);
            }
        }
    }
    return m;
}

PolyMatrix PolyMatrix::with_group(GroupOrders g) const {
    PolyMatrix out(rows_, cols_, g);
    for (size_t i = 0; i < entries_.size(); i++) {
        for (const auto &t : entries_[i].terms()) {
            out.entries_[i].add(t, g);
        }
    }
    return out;
}

BinMatrix PolyMatrix::lift(LiftLayout layout) const {
    int gsize = group_.size();
    std::vector<std::vector<uint32_t>> out_rows(rows_ * gsize);
    const auto &o = group_.order;
    for (size_t r = 0; r < rows_; r++) {
        for (size_t c = 0; c < cols_; c++) {
            for (const auto &t : at(r, c).terms()) {
                // Column group element h maps to row element h + t.
                for (int h0 = 0; h0 < o[0]; h0++) {
                    for (int h1 = 0; h1 < o[1]; h1++) {
                        for (int h2 = 0; h2 < o[2]; h2++) {
                            Monomial h{h0, h1, h2};
                            Monomial s = reduce({h0 + t[0], h1 + t[1], h2 + t[2]}, group_);
                            size_t hi = static_cast<size_t>(group_index(h, group_));
                            size_t si = static_cast<size_t>(group_index(s, group_));
                            size_t row, col;
                            if (layout == LiftLayout::EntryMajor) {
                                row = r * gsize + si;
                                col = c * gsize + hi;
                            } else {
                                row = si * rows_ + r;
                                col = hi * cols_ + c;
                            }
                            out_rows[row].push_back(static_cast<uint32_t>(col));
                        }
                    }
                }
            }
        }
    }
    // Distinct monomials in one entry never collide, and distinct entries
    // occupy distinct columns, so rows are duplicate free.
    return BinMatrix::from_rows(cols_ * gsize, std::move(out_rows));
}

PolyMatrix PolyMatrix::hstack(const PolyMatrix &a, const PolyMatrix &b) {
    if (a.rows_ != b.rows_ || !(a.group_ == b.group_)) {
        throw std::invalid_argument("PolyMatrix::hstack mismatch");
    }
    PolyMatrix out(a.rows_, a.cols_ + b.cols_, a.group_);
    for (size_t r = 0; r < a.rows_; r++) {
        for (size_t c = 0; c < a.cols_; c++) {
            out.at(r, c) = a.at(r, c);
        }
        for (size_t c = 0; c < b.cols_; c++) {
            out.at(r, a.cols_ + c) = b.at(r, c);
        }
    }
    return out;
}

PolyMatrix PolyMatrix::kron_left_identity(size_t n, const PolyMatrix &m) {
    PolyMatrix out(n * m.rows_, n * m.cols_, m.group_);
    for (size_t i = 0; i < n; i++) {
        for (size_t r = 0; r < m.rows_; r++) {
            for (size_t c = 0; c < m.cols_; c++) {
                out.at(i * m.rows_ + r, i * m.cols_ + c) = m.at(r, c);
            }
        }
    }
    return out;
}

PolyMatrix PolyMatrix::kron_right_identity(const PolyMatrix &m, size_t n) {
    PolyMatrix out(m.rows_ * n, m.cols_ * n, m.group_);
    for (size_t r = 0; r < m.rows_; r++) {
        for (size_t c = 0; c < m.cols_; c++) {
            for (size_t i = 0; i < n; i++) {
                out.at(r * n + i, c * n + i) = m.at(r, c);
            }
        }
    }
    return out;
}

namespace {

Monomial parse_monomial(const std::string &s) {
    Monomial m{0, 0, 0};
    size_t i = 0;
    bool any = false;
    while (i < s.size()) {
        char ch = s[i];
        if (ch == '*') {
            i++;
            continue;
        }
        if (ch == '1' && !any && s.size() == 1) {
            return m;
        }
        int var;
        if (ch == 'U' || ch == 'u') {
            var = 0;
        } else if (ch == 'V' || ch == 'v') {
            var = 1;
        } else if (ch == 'x' || ch == 'X') {
            var = 2;
        } else {
            throw std::invalid_argument("bad monomial '" + s + "'");
        }
        i++;
        int exponent = 1;
        if (i < s.size() && s[i] == '^') {
            i++;
            size_t start = i;
            if (i < s.size() && s[i] == '-') {
                i++;
            }
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                i++;
            }
            if (start == i) {
                throw std::invalid_argument("bad exponent in '" + s + "'");
            }
            exponent = std::stoi(s.substr(start, i - start));
        }
        m[var] += exponent;
        any = true;
    }
    if (!any) {
        throw std::invalid_argument("empty monomial");
    }
    return m;
}

}  // namespace

Poly parse_poly(const std::string &token, const GroupOrders &g) {
    Poly p;
    if (token == "." || token == "0") {
        return p;
    }
    std::stringstream ss(token);
    std::string part;
    while (std::getline(ss, part, '+')) {
        if (part.empty()) {
            throw std::invalid_argument("bad polynomial '" + token + "'");
        }
        Monomial m = parse_monomial(part);
        for (int i = 0; i < 3; i++) {
            if (m[i] < 0 || m[i] >= g.order[i]) {
                throw std::invalid_argument("exponent out of range in '" + token + "'");
            }
        }
        p.add(m, g);
    }
    return p;
}

std::string format_poly(const Poly &p) {
    if (p.is_zero()) {
        return ".";
    }
    std::string out;
    static const char names[3] = {'U', 'V', 'x'};
    for (const auto &t : p.terms()) {
        if (!out.empty()) {
            out += '+';
        }
        std::string mono;
        for (int i = 0; i < 3; i++) {
            if (t[i] == 0) {
                continue;
            }
            mono += names[i];
            if (t[i] != 1) {
                mono += '^' + std::to_string(t[i]);
            }
        }
        out += mono.empty() ? "1" : mono;
    }
    return out;
}

PolyMatrix read_poly_matrix(std::istream &in, GroupOrders g) {
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            tokens.push_back(tok);
        }
    }
    if (tokens.size() < 3) {
        throw std::runtime_error("ring matrix file: missing 'rows cols lift' header");
    }
    size_t rows = std::stoul(tokens[0]);
    size_t cols = std::stoul(tokens[1]);
    int lift = std::stoi(tokens[2]);
    if (lift < 1) {
        throw std::runtime_error("ring matrix file: lift must be positive");
    }
    if (tokens.size() != 3 + rows * cols) {
        throw std::runtime_error("ring matrix file: expected " + std::to_string(rows * cols) + " entries");
    }
    g.order[2] = lift;
    PolyMatrix m(rows, cols, g);
    for (size_t r = 0; r < rows; r++) {
        for (size_t c = 0; c < cols; c++) {
            m.at(r, c) = parse_poly(tokens[3 + r * cols + c], g);
        }
    }
    return m;
}

PolyMatrix load_poly_matrix(const std::string &path, GroupOrders g) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open ring matrix file " + path);
    }
    return read_poly_matrix(in, g);
}

void write_poly_matrix(std::ostream &out, const PolyMatrix &m) {
    out << m.rows() << ' ' << m.cols() << ' ' << m.group().order[2] << '\n';
    for (size_t r = 0; r < m.rows(); r++) {
        for (size_t c = 0; c < m.cols(); c++) {
            out << (c ? " " : "") << format_poly(m.at(r, c));
        }
        out << '\n';
    }
}

}  // namespace bellq
