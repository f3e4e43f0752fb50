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

#include "bellq/pauli_engine.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "bellq/rng.h"
#include "json.hpp"

namespace bellq {

void DetectorModel::add(double p, std::span<const uint32_t> dets, std::span<const uint32_t> obs) {
    priors_.push_back(p);
    det_flat_.insert(det_flat_.end(), dets.begin(), dets.end());
    det_off_.push_back(static_cast<uint32_t>(det_flat_.size()));
    obs_flat_.insert(obs_flat_.end(), obs.begin(), obs.end());
    obs_off_.push_back(static_cast<uint32_t>(obs_flat_.size()));
}

BinMatrix DetectorModel::check_matrix() const {
    std::vector<std::vector<uint32_t>> rows(n_detectors);
    for (size_t m = 0; m < n_mechanisms(); m++) {
        for (uint32_t d : detectors(m)) {
            rows[d].push_back(static_cast<uint32_t>(m));
        }
    }
    return BinMatrix::from_rows(n_mechanisms(), std::move(rows));
}

BinMatrix DetectorModel::obs_matrix() const {
    std::vector<std::vector<uint32_t>> rows(n_observables);
    for (size_t m = 0; m < n_mechanisms(); m++) {
        for (uint32_t k : observables(m)) {
            rows[k].push_back(static_cast<uint32_t>(m));
        }
    }
    return BinMatrix::from_rows(n_mechanisms(), std::move(rows));
}

std::string DetectorModel::to_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "detectors " << n_detectors << " observables " << n_observables << '\n';
    for (size_t m = 0; m < n_mechanisms(); m++) {
        out << "error(" << priors_[m] << ')';
        for (uint32_t d : detectors(m)) {
            out << " D" << d;
        }
        for (uint32_t k : observables(m)) {
            out << " L" << k;
        }
        out << '\n';
    }
    return out.str();
}

DetectorModel DetectorModel::from_text(std::istream &in) {
    DetectorModel model;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ss(line);
        if (!header) {
            std::string a, b;
            if (!(ss >> a >> model.n_detectors >> b >> model.n_observables) || a != "detectors" ||
                b != "observables") {
                throw std::runtime_error("detector model text: bad header");
            }
            header = true;
            continue;
        }
        std::string tok;
        ss >> tok;
        if (tok.rfind("error(", 0) != 0 || tok.back() != ')') {
            throw std::runtime_error("detector model text: bad line " + line);
        }
        double p = std::stod(tok.substr(6, tok.size() - 7));
        std::vector<uint32_t> dets, obs;
        while (ss >> tok) {
            uint32_t idx = static_cast<uint32_t>(std::stoul(tok.substr(1)));
            if (tok[0] == 'D' && idx < model.n_detectors) {
                dets.push_back(idx);
            } else if (tok[0] == 'L' && idx < model.n_observables) {
                obs.push_back(idx);
            } else {
                throw std::runtime_error("detector model text: bad target " + tok);
            }
        }
        std::sort(dets.begin(), dets.end());
        std::sort(obs.begin(), obs.end());
        model.add(p, dets, obs);
    }
    return model;
}

namespace {

using TargetSet = std::vector<uint32_t>;

void xor_into(TargetSet &dst, const TargetSet &src) {
    if (src.empty()) {
        return;
    }
    TargetSet out;
    out.reserve(dst.size() + src.size());
    std::set_symmetric_difference(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(out));
    dst.swap(out);
}

TargetSet sym_diff(const TargetSet &a, const TargetSet &b) {
    TargetSet out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// Targets (detectors, then observables offset by n_detectors) that include
/// each measurement.
std::vector<TargetSet> measurement_targets(const NoisyCircuit &c) {
    std::vector<TargetSet> mt(c.n_measurements);
    auto add = [&](const std::vector<uint32_t> &ms, uint32_t target) {
        for (uint32_t m : ms) {
            xor_into(mt[m], TargetSet{target});
        }
    };
    for (size_t d = 0; d < c.detectors.size(); d++) {
        add(c.detectors[d], static_cast<uint32_t>(d));
    }
    for (size_t k = 0; k < c.observables.size(); k++) {
        add(c.observables[k], static_cast<uint32_t>(c.detectors.size() + k));
    }
    return mt;
}

std::vector<int64_t> measurement_index_of(const NoisyCircuit &c) {
    std::vector<int64_t> idx(c.instructions.size(), -1);
    int64_t m = 0;
    for (size_t i = 0; i < c.instructions.size(); i++) {
        Op op = c.instructions[i].op;
        if (op == Op::MeasZ || op == Op::MeasX) {
            idx[i] = m++;
        }
    }
    return idx;
}

uint64_t hash_targets(const TargetSet &t) {
    uint64_t h = 0x84222325cbf29ce4ULL;
    for (uint32_t v : t) {
        h = (h ^ v) * 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return h ^ t.size();
}

/// Accumulates raw mechanisms, merging equal signatures.
class MechanismMerger {
   public:
    explicit MechanismMerger(size_t n_detectors) : n_det_(n_detectors) {}

    void add(double p, const TargetSet &targets) {
        if (targets.empty() || p <= 0) {
            return;
        }
        uint64_t key = hash_targets(targets);
        while (true) {
            auto it = index_.find(key);
            if (it == index_.end()) {
                index_.emplace(key, static_cast<uint32_t>(probs_.size()));
                probs_.push_back(p);
                offsets_.push_back(static_cast<uint32_t>(flat_.size() + targets.size()));
                flat_.insert(flat_.end(), targets.begin(), targets.end());
                return;
            }
            uint32_t m = it->second;
            if (std::equal(targets.begin(), targets.end(), flat_.begin() + offsets_[m], flat_.begin() + offsets_[m + 1])) {
                double q = probs_[m];
                probs_[m] = q * (1 - p) + p * (1 - q);
                return;
            }
            key = key * 0x9E3779B97F4A7C15ULL + 1;
        }
    }

    DetectorModel finish(const NoisyCircuit &c, bool reverse) const {
        DetectorModel model;
        model.n_detectors = c.detectors.size();
        model.n_observables = c.observables.size();
        model.detector_info = c.detector_info;
        size_t count = probs_.size();
        for (size_t i = 0; i < count; i++) {
            size_t m = reverse ? count - 1 - i : i;
            auto begin = flat_.begin() + offsets_[m];
            auto end = flat_.begin() + offsets_[m + 1];
            auto split = std::lower_bound(begin, end, static_cast<uint32_t>(n_det_));
            std::vector<uint32_t> dets(begin, split);
            std::vector<uint32_t> obs;
            for (auto it = split; it != end; ++it) {
                obs.push_back(*it - static_cast<uint32_t>(n_det_));
            }
            model.add(probs_[m], dets, obs);
        }
        return model;
    }

   private:
    size_t n_det_;
    std::unordered_map<uint64_t, uint32_t> index_;
    std::vector<double> probs_;
    std::vector<uint32_t> offsets_{0};
    std::vector<uint32_t> flat_;
};

/// Pauli terms of a site as (x, z) bit pairs per qubit: 1 = X, 2 = Z, 3 = Y.
struct Term {
    uint8_t a;
    uint8_t b;
};

std::vector<Term> site_terms(Op op) {
    std::vector<Term> terms;
    switch (op) {
        case Op::Depol1:
            terms = {{1, 0}, {3, 0}, {2, 0}};
            break;
        case Op::Depol2:
            for (uint8_t a = 0; a < 4; a++) {
                for (uint8_t b = 0; b < 4; b++) {
                    if (a || b) terms.push_back({a, b});
                }
            }
            break;
        case Op::XError:
            terms = {{1, 0}};
            break;
        case Op::ZError:
            terms = {{2, 0}};
            break;
        default:
            break;
    }
    return terms;
}

bool is_noise(Op op) {
    return op == Op::Depol1 || op == Op::Depol2 || op == Op::XError || op == Op::ZError;
}

double term_prob(const Instruction &ins) {
    switch (ins.op) {
        case Op::Depol1:
            return ins.p / 3;
        case Op::Depol2:
            return ins.p / 15;
        default:
            return ins.p;
    }
}

[[noreturn]] void nondeterministic(const NoisyCircuit &c, uint32_t target, size_t instruction) {
    std::string what = target < c.detectors.size() ? "detector " + std::to_string(target)
                                                   : "observable " + std::to_string(target - c.detectors.size());
    throw std::runtime_error(what + " is not deterministic (instruction " + std::to_string(instruction) + ")");
}

}  // namespace

DetectorModel build_detector_model(const NoisyCircuit &c) {
    size_t nq = c.n_qubits;
    std::vector<TargetSet> xs(nq), zs(nq);  // targets flipped by X (resp. Z) on q
    auto meas_targets = measurement_targets(c);
    auto meas_index = measurement_index_of(c);
    MechanismMerger merger(c.detectors.size());

    for (size_t i = c.instructions.size(); i-- > 0;) {
        const Instruction &ins = c.instructions[i];
        switch (ins.op) {
            case Op::MeasZ:
                if (!zs[ins.a].empty()) nondeterministic(c, zs[ins.a][0], i);
                xor_into(xs[ins.a], meas_targets[meas_index[i]]);
                break;
            case Op::MeasX:
                if (!xs[ins.a].empty()) nondeterministic(c, xs[ins.a][0], i);
                xor_into(zs[ins.a], meas_targets[meas_index[i]]);
                break;
            case Op::PrepZ:
                if (!zs[ins.a].empty()) nondeterministic(c, zs[ins.a][0], i);
                xs[ins.a].clear();
                break;
            case Op::PrepX:
                if (!xs[ins.a].empty()) nondeterministic(c, xs[ins.a][0], i);
                zs[ins.a].clear();
                break;
            case Op::CX:
                xor_into(xs[ins.a], xs[ins.b]);
                xor_into(zs[ins.b], zs[ins.a]);
                break;
            case Op::Tick:
                break;
            default: {
                double p = term_prob(ins);
                auto sig = [&](uint32_t q, uint8_t pauli) {
                    TargetSet t;
                    if (pauli & 1) t = xs[q];
                    if (pauli & 2) t = sym_diff(t, zs[q]);
                    return t;
                };
                for (const Term &term : site_terms(ins.op)) {
                    TargetSet t = sig(ins.a, term.a);
                    if (term.b) {
                        t = sym_diff(t, sig(ins.b, term.b));
                    }
                    merger.add(p, t);
                }
            }
        }
    }

    // What remains must be a stabilizer of the initial state.
    size_t n_targets = c.detectors.size() + c.observables.size();
    std::vector<std::vector<uint32_t>> target_support(n_targets);  // symplectic: x at q, z at nq + q
    for (size_t q = 0; q < nq; q++) {
        for (uint32_t t : zs[q]) target_support[t].push_back(static_cast<uint32_t>(q));
        for (uint32_t t : xs[q]) target_support[t].push_back(static_cast<uint32_t>(nq + q));
    }
    std::vector<std::vector<uint32_t>> gens;
    for (const auto &s : c.initial_stabilizers) {
        std::vector<uint32_t> row(s.x.begin(), s.x.end());
        for (uint32_t q : s.z) row.push_back(static_cast<uint32_t>(nq + q));
        std::sort(row.begin(), row.end());
        gens.push_back(std::move(row));
    }
    BinMatrix stab = BinMatrix::from_rows(2 * nq, std::move(gens));
    std::vector<std::vector<uint32_t>> pending;
    std::vector<uint32_t> pending_ids;
    for (size_t t = 0; t < n_targets; t++) {
        if (!target_support[t].empty()) {
            pending.push_back(target_support[t]);
            pending_ids.push_back(static_cast<uint32_t>(t));
        }
    }
    if (!pending.empty()) {
        // Reduce every pending row against the echelon form of the generators.
        Echelon e = row_echelon(stab, true);
        for (size_t i = 0; i < pending.size(); i++) {
            PackedRows v(1, 2 * nq);
            for (uint32_t col : pending[i]) v.set(0, col);
            for (size_t r = 0; r < e.rank(); r++) {
                if (v.get(0, e.pivot_cols[r])) {
                    for (size_t w = 0; w < v.words(); w++) v.row(0)[w] ^= e.form.row(r)[w];
                }
            }
            if (!v.row_is_zero(0)) nondeterministic(c, pending_ids[i], 0);
        }
    }
    return merger.finish(c, true);
}

namespace {

Signature propagate_impl(const NoisyCircuit &c, const PauliFault &fault, const std::vector<TargetSet> &meas_targets) {
    size_t nq = c.n_qubits;
    std::vector<uint8_t> x(nq, 0), z(nq, 0);
    for (uint32_t q : fault.pauli.x) x[q] ^= 1;
    for (uint32_t q : fault.pauli.z) z[q] ^= 1;
    TargetSet flipped;
    int64_t m = 0;
    for (size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction &ins = c.instructions[i];
        bool active = static_cast<int64_t>(i) > fault.site;
        switch (ins.op) {
            case Op::MeasZ:
                if (active && x[ins.a]) xor_into(flipped, meas_targets[m]);
                m++;
                break;
            case Op::MeasX:
                if (active && z[ins.a]) xor_into(flipped, meas_targets[m]);
                m++;
                break;
            case Op::PrepZ:
            case Op::PrepX:
                if (active) x[ins.a] = z[ins.a] = 0;
                break;
            case Op::CX:
                if (active) {
                    x[ins.b] ^= x[ins.a];
                    z[ins.a] ^= z[ins.b];
                }
                break;
            default:
                break;
        }
    }
    Signature s;
    for (uint32_t t : flipped) {
        if (t < c.detectors.size()) {
            s.detectors.push_back(t);
        } else {
            s.observables.push_back(static_cast<uint32_t>(t - c.detectors.size()));
        }
    }
    return s;
}

}  // namespace

Signature propagate_pauli(const NoisyCircuit &c, const PauliFault &fault) {
    return propagate_impl(c, fault, measurement_targets(c));
}

DetectorModel build_detector_model_forward(const NoisyCircuit &c) {
    MechanismMerger merger(c.detectors.size());
    auto meas_targets = measurement_targets(c);
    auto add_q = [](PauliSupport &p, uint32_t q, uint8_t pauli) {
        if (pauli & 1) p.x.push_back(q);
        if (pauli & 2) p.z.push_back(q);
    };
    // Raw mechanisms are visited back to front so merge order matches the
    // backward pass.
    for (size_t i = c.instructions.size(); i-- > 0;) {
        const Instruction &ins = c.instructions[i];
        if (!is_noise(ins.op)) {
            continue;
        }
        for (const Term &term : site_terms(ins.op)) {
            PauliFault f;
            f.site = static_cast<int64_t>(i);
            add_q(f.pauli, ins.a, term.a);
            if (term.b) add_q(f.pauli, ins.b, term.b);
            Signature s = propagate_impl(c, f, meas_targets);
            TargetSet t = s.detectors;
            for (uint32_t k : s.observables) t.push_back(static_cast<uint32_t>(c.detectors.size() + k));
            merger.add(term_prob(ins), t);
        }
    }
    return merger.finish(c, true);
}

ShotBatch::ShotBatch(size_t shots_, size_t n_det, size_t n_obs, uint64_t seed_)
    : shots(shots_), n_detectors(n_det), n_observables(n_obs), seed(seed_) {
    det.assign(shots * det_words(), 0);
    obs.assign(shots * obs_words(), 0);
}

BitVec ShotBatch::syndrome(size_t shot) const {
    BitVec s(n_detectors);
    for (size_t d = 0; d < n_detectors; d++) s[d] = detector(shot, d);
    return s;
}

BitVec ShotBatch::observable_bits(size_t shot) const {
    BitVec s(n_observables);
    for (size_t k = 0; k < n_observables; k++) s[k] = observable(shot, k);
    return s;
}

std::vector<uint32_t> ShotBatch::fired(size_t shot) const {
    std::vector<uint32_t> out;
    const uint64_t *row = det.data() + shot * det_words();
    for (size_t w = 0; w < det_words(); w++) {
        uint64_t bits = row[w];
        while (bits) {
            out.push_back(static_cast<uint32_t>(w * 64 + __builtin_ctzll(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

void ShotBatch::save(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char *>(det.data()), static_cast<std::streamsize>(det.size() * 8));
    out.write(reinterpret_cast<const char *>(obs.data()), static_cast<std::streamsize>(obs.size() * 8));
    nlohmann::ordered_json j;
    j["shots"] = shots;
    j["n_detectors"] = n_detectors;
    j["n_observables"] = n_observables;
    j["seed"] = seed;
    j["rng"] = kRngName;
    j["block_size"] = kShotBlock;
    j["layout"] = "shot-major rows of 64-bit little-endian words; detectors then observables";
    std::ofstream side(path + ".json");
    side << j.dump(2) << '\n';
}

ShotBatch ShotBatch::load(const std::string &path) {
    std::ifstream side(path + ".json");
    if (!side) throw std::runtime_error("missing sidecar " + path + ".json");
    auto j = nlohmann::json::parse(side);
    ShotBatch b(j.at("shots"), j.at("n_detectors"), j.at("n_observables"), j.at("seed"));
    std::ifstream in(path, std::ios::binary);
    in.read(reinterpret_cast<char *>(b.det.data()), static_cast<std::streamsize>(b.det.size() * 8));
    in.read(reinterpret_cast<char *>(b.obs.data()), static_cast<std::streamsize>(b.obs.size() * 8));
    if (!in) throw std::runtime_error("truncated shot file " + path);
    return b;
}

namespace {

/// Scatters detector-major 64-shot words into the batch's shot-major rows.
void scatter_block(ShotBatch &batch, size_t block, const std::vector<uint64_t> &detw, const std::vector<uint64_t> &obsw) {
    size_t base = block * kShotBlock;
    size_t dw = batch.det_words(), ow = batch.obs_words();
    for (size_t d = 0; d < detw.size(); d++) {
        uint64_t bits = detw[d];
        while (bits) {
            size_t s = base + static_cast<size_t>(__builtin_ctzll(bits));
            batch.det[s * dw + d / 64] |= uint64_t{1} << (d % 64);
            bits &= bits - 1;
        }
    }
    for (size_t k = 0; k < obsw.size(); k++) {
        uint64_t bits = obsw[k];
        while (bits) {
            size_t s = base + static_cast<size_t>(__builtin_ctzll(bits));
            batch.obs[s * ow + k / 64] |= uint64_t{1} << (k % 64);
            bits &= bits - 1;
        }
    }
}

uint64_t block_mask(size_t shots, size_t block) {
    size_t left = shots - block * kShotBlock;
    return left >= 64 ? ~uint64_t{0} : (uint64_t{1} << left) - 1;
}

void model_block(const DetectorModel &model, ShotBatch &batch, size_t block, uint64_t seed) {
    Philox rng(seed, block);
    uint64_t mask = block_mask(batch.shots, block);
    std::vector<uint64_t> detw(model.n_detectors, 0), obsw(model.n_observables, 0);
    for (size_t m = 0; m < model.n_mechanisms(); m++) {
        uint64_t w = bernoulli_word(rng, model.prior(m)) & mask;
        if (!w) continue;
        for (uint32_t d : model.detectors(m)) detw[d] ^= w;
        for (uint32_t k : model.observables(m)) obsw[k] ^= w;
    }
    scatter_block(batch, block, detw, obsw);
}

/// Uniform value in [0, n) for every set bit of `hits`, applied via `apply`.
template <typename F>
void for_each_hit(Philox &rng, uint64_t hits, uint64_t n, F apply) {
    while (hits) {
        int b = __builtin_ctzll(hits);
        apply(b, rng.below(n));
        hits &= hits - 1;
    }
}

void circuit_block(const NoisyCircuit &c, ShotBatch &batch, size_t block, uint64_t seed, NoiseMode mode) {
    Philox rng(seed, block);
    uint64_t mask = block_mask(batch.shots, block);
    std::vector<uint64_t> x(c.n_qubits, 0), z(c.n_qubits, 0), meas(c.n_measurements, 0);
    size_t m = 0;
    auto apply_pauli = [&](uint32_t q, uint8_t pauli, uint64_t w) {
        if (pauli & 1) x[q] ^= w;
        if (pauli & 2) z[q] ^= w;
    };
    for (const Instruction &ins : c.instructions) {
        switch (ins.op) {
            case Op::PrepZ:
            case Op::PrepX:
                x[ins.a] = z[ins.a] = 0;
                break;
            case Op::CX:
                x[ins.b] ^= x[ins.a];
                z[ins.a] ^= z[ins.b];
                break;
            case Op::MeasZ:
                meas[m++] = x[ins.a];
                break;
            case Op::MeasX:
                meas[m++] = z[ins.a];
                break;
            case Op::XError:
                x[ins.a] ^= bernoulli_word(rng, ins.p) & mask;
                break;
            case Op::ZError:
                z[ins.a] ^= bernoulli_word(rng, ins.p) & mask;
                break;
            case Op::Depol1:
                if (mode == NoiseMode::Independent) {
                    for (uint8_t pauli : {1, 3, 2}) apply_pauli(ins.a, pauli, bernoulli_word(rng, ins.p / 3) & mask);
                } else {
                    for_each_hit(rng, bernoulli_word(rng, ins.p) & mask, 3, [&](int b, uint64_t v) {
                        apply_pauli(ins.a, static_cast<uint8_t>(v + 1), uint64_t{1} << b);
                    });
                }
                break;
            case Op::Depol2:
                if (mode == NoiseMode::Independent) {
                    for (uint8_t k = 1; k < 16; k++) {
                        uint64_t w = bernoulli_word(rng, ins.p / 15) & mask;
                        apply_pauli(ins.a, k >> 2, w);
                        apply_pauli(ins.b, k & 3, w);
                    }
                } else {
                    for_each_hit(rng, bernoulli_word(rng, ins.p) & mask, 15, [&](int b, uint64_t v) {
                        uint8_t k = static_cast<uint8_t>(v + 1);
                        apply_pauli(ins.a, k >> 2, uint64_t{1} << b);
                        apply_pauli(ins.b, k & 3, uint64_t{1} << b);
                    });
                }
                break;
            case Op::Tick:
                break;
        }
    }
    std::vector<uint64_t> detw(c.detectors.size(), 0), obsw(c.observables.size(), 0);
    for (size_t d = 0; d < c.detectors.size(); d++) {
        for (uint32_t mi : c.detectors[d]) detw[d] ^= meas[mi];
    }
    for (size_t k = 0; k < c.observables.size(); k++) {
        for (uint32_t mi : c.observables[k]) obsw[k] ^= meas[mi];
    }
    scatter_block(batch, block, detw, obsw);
}

size_t block_count(size_t shots) {
    return (shots + kShotBlock - 1) / kShotBlock;
}

}  // namespace

ShotBatch sample_model(const DetectorModel &model, size_t shots, uint64_t seed) {
    ShotBatch batch(shots, model.n_detectors, model.n_observables, seed);
    int64_t blocks = static_cast<int64_t>(block_count(shots));
#pragma omp parallel for schedule(dynamic)
    for (int64_t b = 0; b < blocks; b++) {
        model_block(model, batch, static_cast<size_t>(b), seed);
    }
    return batch;
}

ShotBatch sample_model_serial(const DetectorModel &model, size_t shots, uint64_t seed) {
    ShotBatch batch(shots, model.n_detectors, model.n_observables, seed);
    for (size_t b = 0; b < block_count(shots); b++) {
        model_block(model, batch, b, seed);
    }
    return batch;
}

ShotBatch sample_circuit(const NoisyCircuit &circuit, size_t shots, uint64_t seed, NoiseMode mode) {
    ShotBatch batch(shots, circuit.detectors.size(), circuit.observables.size(), seed);
    int64_t blocks = static_cast<int64_t>(block_count(shots));
#pragma omp parallel for schedule(dynamic)
    for (int64_t b = 0; b < blocks; b++) {
        circuit_block(circuit, batch, static_cast<size_t>(b), seed, mode);
    }
    return batch;
}

ShotBatch sample_circuit_serial(const NoisyCircuit &circuit, size_t shots, uint64_t seed, NoiseMode mode) {
    ShotBatch batch(shots, circuit.detectors.size(), circuit.observables.size(), seed);
    for (size_t b = 0; b < block_count(shots); b++) {
        circuit_block(circuit, batch, b, seed, mode);
    }
    return batch;
}

}  // namespace bellq
