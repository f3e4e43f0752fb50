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

#include "bellq/decoder.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace bellq {

namespace {

constexpr double kMaxLlr = 60.0;

double clamp_llr(double v) {
    return std::max(-kMaxLlr, std::min(kMaxLlr, v));
}

// tanh(v / 2) and 2 atanh(p) through exp and log, which are much cheaper
// than the library tanh / atanh on the hot path.
inline double half_tanh(double v) {
    double e = std::exp(-std::abs(v));
    double t = (1 - e) / (1 + e);
    return v < 0 ? -t : t;
}

inline double two_atanh(double p) {
    return std::log((1 + p) / (1 - p));
}

double llr_of(double p) {
    p = std::min(std::max(p, 1e-15), 1 - 1e-15);
    return std::log((1 - p) / p);
}

}  // namespace

BpDecoder::BpDecoder(const BinMatrix &checks, std::vector<double> priors, BpConfig cfg)
    : n_checks_(checks.rows()), checks_(checks), priors_(std::move(priors)), cfg_(cfg) {
    if (priors_.size() != checks.cols()) {
        throw std::invalid_argument("BpDecoder: prior count does not match columns");
    }
    if (cfg_.max_iterations < 1) {
        throw std::invalid_argument("BpDecoder: max_iterations must be >= 1");
    }
    if (cfg_.damping < 0 || cfg_.damping >= 1) {
        throw std::invalid_argument("BpDecoder: damping must lie in [0, 1)");
    }
    prior_llr_.resize(priors_.size());
    for (size_t v = 0; v < priors_.size(); v++) {
        prior_llr_[v] = llr_of(priors_[v]);
    }
    check_off_.push_back(0);
    std::vector<uint32_t> degree(priors_.size(), 0);
    for (size_t c = 0; c < n_checks_; c++) {
        for (uint32_t v : checks.row(c)) {
            edge_var_.push_back(v);
            degree[v]++;
        }
        check_off_.push_back(static_cast<uint32_t>(edge_var_.size()));
    }
    var_off_.assign(priors_.size() + 1, 0);
    for (size_t v = 0; v < priors_.size(); v++) {
        var_off_[v + 1] = var_off_[v] + degree[v];
    }
    var_edges_.resize(edge_var_.size());
    std::vector<uint32_t> fill(var_off_.begin(), var_off_.end() - 1);
    for (uint32_t e = 0; e < edge_var_.size(); e++) {
        var_edges_[fill[edge_var_[e]]++] = e;
    }
}

BpResult BpDecoder::decode(const BitVec &syndrome) const {
    if (syndrome.size() != n_checks_) {
        throw std::invalid_argument("bp: syndrome length mismatch");
    }
    size_t nv = priors_.size();
    size_t ne = edge_var_.size();
    BpResult res;
    res.hard.assign(nv, 0);
    std::vector<double> posterior_llr(prior_llr_);
    bool zero_syndrome = std::none_of(syndrome.begin(), syndrome.end(), [](uint8_t b) { return b != 0; });
    if (zero_syndrome && cfg_.stop_on_syndrome) {
        res.converged = true;
    } else {
        // th caches tanh(vc / 2) for the product-sum rule.
        std::vector<double> vc(ne), th(ne), cv(ne, 0.0), buf;
        for (uint32_t e = 0; e < ne; e++) {
            vc[e] = prior_llr_[edge_var_[e]];
            th[e] = half_tanh(vc[e]);
        }
        for (size_t iter = 1; iter <= cfg_.max_iterations; iter++) {
            res.iterations = iter;
            for (size_t c = 0; c < n_checks_; c++) {
                uint32_t b = check_off_[c], end = check_off_[c + 1];
                size_t deg = end - b;
                double sign = syndrome[c] ? -1.0 : 1.0;
                if (deg == 1) {
                    cv[b] = sign * kMaxLlr;
                    continue;
                }
                if (cfg_.variant == BpVariant::ProductSum) {
                    buf.resize(deg + 1);
                    // buf holds prefix products; suffix accumulated on the way back.
                    buf[0] = 1.0;
                    for (size_t i = 0; i < deg; i++) {
                        buf[i + 1] = buf[i] * th[b + i];
                    }
                    double suffix = 1.0;
                    for (size_t i = deg; i-- > 0;) {
                        double prod = buf[i] * suffix;
                        prod = std::max(-1 + 1e-16, std::min(1 - 1e-16, prod));
                        cv[b + i] = clamp_llr(sign * two_atanh(prod));
                        suffix *= th[b + i];
                    }
                } else {
                    double min1 = INFINITY, min2 = INFINITY;
                    size_t arg = 0;
                    double sgn = sign;
                    for (size_t i = 0; i < deg; i++) {
                        double v = vc[b + i];
                        if (v < 0) sgn = -sgn;
                        double a = std::abs(v);
                        if (a < min1) {
                            min2 = min1;
                            min1 = a;
                            arg = i;
                        } else if (a < min2) {
                            min2 = a;
                        }
                    }
                    for (size_t i = 0; i < deg; i++) {
                        double v = vc[b + i];
                        double s = v < 0 ? -sgn : sgn;
                        cv[b + i] = s * cfg_.min_sum_scale * (i == arg ? min2 : min1);
                    }
                }
            }
            for (size_t v = 0; v < nv; v++) {
                double total = prior_llr_[v];
                for (uint32_t k = var_off_[v]; k < var_off_[v + 1]; k++) {
                    total += cv[var_edges_[k]];
                }
                posterior_llr[v] = total;
                res.hard[v] = total <= 0 ? 1 : 0;
                for (uint32_t k = var_off_[v]; k < var_off_[v + 1]; k++) {
                    uint32_t e = var_edges_[k];
                    double next = clamp_llr(total - cv[e]);
                    vc[e] = cfg_.damping > 0 ? cfg_.damping * vc[e] + (1 - cfg_.damping) * next : next;
                    th[e] = half_tanh(vc[e]);
                }
            }
            bool ok = true;
            for (size_t c = 0; c < n_checks_ && ok; c++) {
                uint8_t parity = 0;
                for (uint32_t e = check_off_[c]; e < check_off_[c + 1]; e++) {
                    parity ^= res.hard[edge_var_[e]];
                }
                ok = parity == syndrome[c];
            }
            res.converged = ok;
            if (ok && cfg_.stop_on_syndrome) {
                break;
            }
        }
    }
    res.posteriors.resize(nv);
    for (size_t v = 0; v < nv; v++) {
        res.posteriors[v] = 1.0 / (1.0 + std::exp(posterior_llr[v]));
    }
    return res;
}

BitVec osd_solve(
    const BinMatrix &checks, const BitVec &syndrome, const std::vector<double> &posteriors,
    const std::vector<double> &priors, const OsdConfig &cfg) {
    size_t m = checks.rows();
    size_t n = checks.cols();
    if (syndrome.size() != m || posteriors.size() != n || priors.size() != n) {
        throw std::invalid_argument("osd: size mismatch");
    }
    BitVec correction(n, 0);
    if (std::none_of(syndrome.begin(), syndrome.end(), [](uint8_t b) { return b != 0; })) {
        return correction;
    }
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return posteriors[a] > posteriors[b]; });
    BinMatrix cols = checks.transpose();

    size_t vw = (m + 63) / 64;  // words of a column vector
    size_t cw = vw;             // words of a slot combination (rank <= m)
    std::vector<uint64_t> basis;  // rank x vw
    std::vector<uint64_t> combs;  // rank x cw
    std::vector<size_t> pivots;
    std::vector<uint32_t> slot_col;
    std::vector<uint64_t> sres(vw, 0), scomb(cw, 0);
    for (size_t r = 0; r < m; r++) {
        if (syndrome[r]) sres[r / 64] |= uint64_t{1} << (r % 64);
    }
    struct Dependent {
        uint32_t col;
        std::vector<uint64_t> comb;
    };
    std::vector<Dependent> dependents;
    size_t want_dependents = std::max(cfg.order, cfg.sweep);
    bool solved = false;
    std::vector<uint64_t> v(vw), comb(cw);
    auto is_zero = [](const std::vector<uint64_t> &x) {
        return std::all_of(x.begin(), x.end(), [](uint64_t w) { return w == 0; });
    };

    for (uint32_t col : order) {
        if (solved && dependents.size() >= want_dependents) break;
        std::fill(v.begin(), v.end(), 0);
        std::fill(comb.begin(), comb.end(), 0);
        for (uint32_t r : cols.row(col)) v[r / 64] |= uint64_t{1} << (r % 64);
        for (size_t i = 0; i < pivots.size(); i++) {
            size_t p = pivots[i];
            if ((v[p / 64] >> (p % 64)) & 1) {
                const uint64_t *b = basis.data() + i * vw;
                for (size_t w = p / 64; w < vw; w++) v[w] ^= b[w];
                const uint64_t *cb = combs.data() + i * cw;
                for (size_t w = 0; w < cw; w++) comb[w] ^= cb[w];
            }
        }
        if (is_zero(v)) {
            if (solved || want_dependents > 0) dependents.push_back({col, comb});
            continue;
        }
        size_t slot = pivots.size();
        size_t pivot = 0;
        for (size_t w = 0; w < vw; w++) {
            if (v[w]) {
                pivot = w * 64 + static_cast<size_t>(__builtin_ctzll(v[w]));
                break;
            }
        }
        comb[slot / 64] |= uint64_t{1} << (slot % 64);
        basis.insert(basis.end(), v.begin(), v.end());
        combs.insert(combs.end(), comb.begin(), comb.end());
        pivots.push_back(pivot);
        slot_col.push_back(col);
        if ((sres[pivot / 64] >> (pivot % 64)) & 1) {
            for (size_t w = 0; w < vw; w++) sres[w] ^= v[w];
            for (size_t w = 0; w < cw; w++) scomb[w] ^= comb[w];
        }
        if (!solved && is_zero(sres)) {
            solved = true;
            if (want_dependents == 0) break;
        }
    }
    if (!solved) {
        throw InfeasibleSyndrome("osd: syndrome is not in the column space of the check matrix");
    }

    std::vector<double> weight(n);
    for (size_t j = 0; j < n; j++) weight[j] = llr_of(priors[j]);
    auto slots_cost = [&](const std::vector<uint64_t> &slots) {
        double c = 0;
        for (size_t w = 0; w < cw; w++) {
            uint64_t bits = slots[w];
            while (bits) {
                size_t s = w * 64 + static_cast<size_t>(__builtin_ctzll(bits));
                c += weight[slot_col[s]];
                bits &= bits - 1;
            }
        }
        return c;
    };
    std::vector<uint64_t> best_slots = scomb;
    std::vector<uint32_t> best_flips;
    double best_cost = slots_cost(scomb);
    if (want_dependents > 0) {
        std::vector<uint64_t> trial(cw);
        size_t singles = std::min(cfg.order, dependents.size());
        for (size_t i = 0; i < singles; i++) {
            for (size_t w = 0; w < cw; w++) trial[w] = scomb[w] ^ dependents[i].comb[w];
            double cost = slots_cost(trial) + weight[dependents[i].col];
            if (cost < best_cost) {
                best_cost = cost;
                best_slots = trial;
                best_flips = {dependents[i].col};
            }
        }
        size_t pairs = std::min(cfg.sweep, dependents.size());
        for (size_t i = 0; i < pairs; i++) {
            for (size_t j = i + 1; j < pairs; j++) {
                for (size_t w = 0; w < cw; w++) trial[w] = scomb[w] ^ dependents[i].comb[w] ^ dependents[j].comb[w];
                double cost = slots_cost(trial) + weight[dependents[i].col] + weight[dependents[j].col];
                if (cost < best_cost) {
                    best_cost = cost;
                    best_slots = trial;
                    best_flips = {dependents[i].col, dependents[j].col};
                }
            }
        }
    }
    for (size_t w = 0; w < cw; w++) {
        uint64_t bits = best_slots[w];
        while (bits) {
            size_t s = w * 64 + static_cast<size_t>(__builtin_ctzll(bits));
            correction[slot_col[s]] ^= 1;
            bits &= bits - 1;
        }
    }
    for (uint32_t c : best_flips) correction[c] ^= 1;
    if (checks.mul(correction) != syndrome) {
        throw std::logic_error("osd: correction does not reproduce the syndrome");
    }
    return correction;
}

BitVec predicted_observables(const DetectorModel &model, const BitVec &correction) {
    BitVec obs(model.n_observables, 0);
    for (size_t m = 0; m < correction.size(); m++) {
        if (correction[m]) {
            for (uint32_t k : model.observables(m)) obs[k] ^= 1;
        }
    }
    return obs;
}

BpResult bp_decode(const DetectorModel &model, const BitVec &syndrome, const BpConfig &cfg) {
    BpDecoder dec(model.check_matrix(), model.priors(), cfg);
    return dec.decode(syndrome);
}

DecodeOutcome osd_postprocess(
    const DetectorModel &model, const BitVec &syndrome, const std::vector<double> &posteriors, const OsdConfig &cfg) {
    DecodeOutcome out;
    out.correction = osd_solve(model.check_matrix(), syndrome, posteriors, model.priors(), cfg);
    out.predicted_observables = predicted_observables(model, out.correction);
    out.osd_used = true;
    return out;
}

DecodeOutcome bp_osd_decode(const DetectorModel &model, const BitVec &syndrome, const BpConfig &bp, const OsdConfig &osd) {
    BpResult r = bp_decode(model, syndrome, bp);
    DecodeOutcome out;
    if (r.converged) {
        out.correction = r.hard;
        out.predicted_observables = predicted_observables(model, r.hard);
    } else {
        out = osd_postprocess(model, syndrome, r.posteriors, osd);
    }
    out.converged = r.converged;
    out.iterations_used = r.iterations;
    return out;
}

WindowedDecoder::WindowedDecoder(
    const DetectorModel &model, size_t rounds, size_t cycles_per_round, BpConfig bp, OsdConfig osd, size_t lookahead)
    : model_(&model), osd_(osd) {
    if (rounds < 1 || cycles_per_round < 1) {
        throw std::invalid_argument("windowed decoder: rounds and cycles_per_round must be >= 1");
    }
    size_t nd = model.n_detectors;
    if (model.detector_info.size() != nd) {
        throw std::invalid_argument("windowed decoder: model lacks detector layout");
    }
    size_t total = rounds * cycles_per_round;
    std::vector<uint32_t> window_of(nd);
    std::map<std::tuple<uint32_t, int, uint32_t>, uint32_t> by_key;
    for (size_t d = 0; d < nd; d++) {
        const DetectorInfo &info = model.detector_info[d];
        if (info.cycle > total) {
            throw std::invalid_argument("windowed decoder: detector cycle beyond the schedule");
        }
        window_of[d] = static_cast<uint32_t>(std::min<size_t>(info.cycle / cycles_per_round, rounds - 1));
        by_key[{info.cycle, static_cast<int>(info.type), info.check}] = static_cast<uint32_t>(d);
    }
    // Window w sees its own detectors plus those of the next `lookahead`
    // cycles; only its own are committed or carried.
    auto visible = [&](size_t w, uint32_t d) {
        return window_of[d] == w ||
               (window_of[d] > w && model.detector_info[d].cycle < (w + 1) * cycles_per_round + lookahead);
    };
    windows_.resize(rounds);
    std::vector<std::vector<int32_t>> local(rounds);
    for (size_t w = 0; w < rounds; w++) {
        local[w].assign(nd, -1);
        for (size_t d = 0; d < nd; d++) {
            if (!visible(w, static_cast<uint32_t>(d))) continue;
            local[w][d] = static_cast<int32_t>(windows_[w].detectors.size());
            windows_[w].detectors.push_back(static_cast<uint32_t>(d));
            if (window_of[d] == w) windows_[w].own.push_back(static_cast<uint32_t>(d));
        }
    }
    carry_target_.assign(nd, -1);
    for (size_t d = 0; d < nd; d++) {
        uint32_t w = window_of[d];
        if (w + 1 >= rounds) continue;
        const DetectorInfo &info = model.detector_info[d];
        auto it = by_key.find({static_cast<uint32_t>((w + 1) * cycles_per_round), static_cast<int>(info.type), info.check});
        if (it == by_key.end()) {
            throw std::invalid_argument("windowed decoder: no detector to carry a residual into");
        }
        carry_target_[d] = static_cast<int32_t>(it->second);
    }
    // A mechanism belongs to the window of its earliest detector and is
    // also offered to every earlier window that sees that detector.
    std::vector<std::vector<uint32_t>> offered(rounds);
    std::vector<uint32_t> home(model.n_mechanisms(), 0);
    for (size_t m = 0; m < model.n_mechanisms(); m++) {
        auto dets = model.detectors(m);
        if (dets.empty()) continue;
        uint32_t first = dets[0];
        for (uint32_t d : dets) {
            if (model.detector_info[d].cycle < model.detector_info[first].cycle) first = d;
        }
        home[m] = window_of[first];
        for (size_t w = 0; w <= home[m]; w++) {
            if (visible(w, first)) offered[w].push_back(static_cast<uint32_t>(m));
        }
    }
    // Mechanisms that look identical inside a window are one BP variable
    // there; the most likely of them stands for the group.
    for (size_t wi = 0; wi < rounds; wi++) {
        Window &w = windows_[wi];
        std::map<std::pair<std::vector<uint32_t>, bool>, uint32_t> column_of;
        std::vector<std::vector<uint32_t>> rows(w.detectors.size());
        std::vector<double> priors;
        for (uint32_t m : offered[wi]) {
            std::vector<uint32_t> sig;
            for (uint32_t d : model.detectors(m)) {
                if (local[wi][d] >= 0) sig.push_back(static_cast<uint32_t>(local[wi][d]));
            }
            std::sort(sig.begin(), sig.end());
            bool mine = home[m] == wi;
            auto [it, fresh] = column_of.try_emplace({sig, mine}, static_cast<uint32_t>(priors.size()));
            double p = model.prior(m);
            if (fresh) {
                w.mechanisms.push_back(m);
                w.commit.push_back(mine);
                priors.push_back(p);
                for (uint32_t r : sig) rows[r].push_back(it->second);
                continue;
            }
            uint32_t j = it->second;
            if (p > model.prior(w.mechanisms[j])) w.mechanisms[j] = m;
            priors[j] = priors[j] * (1 - p) + p * (1 - priors[j]);
        }
        BinMatrix checks = BinMatrix::from_rows(priors.size(), std::move(rows));
        w.bp = BpDecoder(checks, std::move(priors), bp);
    }
}

DecodeOutcome WindowedDecoder::decode(const BitVec &syndrome) const {
    const DetectorModel &model = *model_;
    if (syndrome.size() != model.n_detectors) {
        throw std::invalid_argument("windowed decoder: syndrome length mismatch");
    }
    BitVec s = syndrome;
    DecodeOutcome out;
    out.correction.assign(model.n_mechanisms(), 0);
    auto commit = [&](const Window &w, const BitVec &fix) {
        for (size_t j = 0; j < fix.size(); j++) {
            if (!fix[j] || !w.commit[j]) continue;
            uint32_t m = w.mechanisms[j];
            out.correction[m] ^= 1;
            for (uint32_t d : model.detectors(m)) s[d] ^= 1;
        }
    };
    for (size_t wi = 0; wi < windows_.size(); wi++) {
        const Window &w = windows_[wi];
        BitVec local(w.detectors.size());
        for (size_t i = 0; i < w.detectors.size(); i++) local[i] = s[w.detectors[i]];
        BpResult r = w.bp.decode(local);
        out.iterations_used += r.iterations;
        if (wi + 1 < windows_.size()) {
            commit(w, r.hard);
            for (uint32_t d : w.own) {
                if (s[d]) {
                    s[d] = 0;
                    s[carry_target_[d]] ^= 1;
                }
            }
            continue;
        }
        out.converged = r.converged;
        if (r.converged) {
            commit(w, r.hard);
        } else {
            commit(w, osd_solve(w.bp.checks(), local, r.posteriors, w.bp.priors(), osd_));
            out.osd_used = true;
        }
    }
    out.predicted_observables = predicted_observables(model, out.correction);
    return out;
}

namespace {

bool shot_fails(const WindowedDecoder &decoder, const DetectorModel &model, const ShotBatch &batch, size_t shot) {
    DecodeOutcome o = decoder.decode(batch.syndrome(shot));
    for (size_t k = 0; k < model.n_observables; k++) {
        if (o.predicted_observables[k] != static_cast<uint8_t>(batch.observable(shot, k))) return true;
    }
    return false;
}

}  // namespace

DecodeStats decode_batch(const WindowedDecoder &decoder, const DetectorModel &model, const ShotBatch &batch) {
    std::atomic<size_t> failures{0};
    std::atomic<bool> infeasible{false};
    std::string message;
    int64_t shots = static_cast<int64_t>(batch.shots);
#pragma omp parallel for schedule(dynamic)
    for (int64_t s = 0; s < shots; s++) {
        if (infeasible.load()) continue;
        try {
            if (shot_fails(decoder, model, batch, static_cast<size_t>(s))) failures++;
        } catch (const InfeasibleSyndrome &e) {
#pragma omp critical
            message = e.what();
            infeasible = true;
        }
    }
    if (infeasible) {
        throw InfeasibleSyndrome(message);
    }
    return {batch.shots, failures.load()};
}

DecodeStats decode_batch_serial(const WindowedDecoder &decoder, const DetectorModel &model, const ShotBatch &batch) {
    DecodeStats st{batch.shots, 0};
    for (size_t s = 0; s < batch.shots; s++) {
        if (shot_fails(decoder, model, batch, s)) st.failures++;
    }
    return st;
}

}  // namespace bellq
