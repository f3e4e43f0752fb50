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

#include "bellq/circuit.h"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace bellq {

char basis_char(Basis b) {
    return b == Basis::Z ? 'Z' : 'X';
}

void NoisyCircuit::append(Op op, uint32_t a, uint32_t b, double p) {
    instructions.push_back({op, a, b, p});
}

uint32_t NoisyCircuit::measure(Basis basis, uint32_t q) {
    append(basis == Basis::Z ? Op::MeasZ : Op::MeasX, q);
    return static_cast<uint32_t>(n_measurements++);
}

size_t NoisyCircuit::count(Op op) const {
    return static_cast<size_t>(
        std::count_if(instructions.begin(), instructions.end(), [op](const Instruction &i) { return i.op == op; }));
}

size_t NoisyCircuit::noise_sites() const {
    return count(Op::Depol1) + count(Op::Depol2) + count(Op::XError) + count(Op::ZError);
}

std::string NoisyCircuit::to_text() const {
    std::ostringstream out;
    out.precision(17);
    for (const auto &ins : instructions) {
        switch (ins.op) {
            case Op::PrepZ:
                out << "PREP_Z " << ins.a << '\n';
                break;
            case Op::PrepX:
                out << "PREP_X " << ins.a << '\n';
                break;
            case Op::CX:
                out << "CX " << ins.a << ' ' << ins.b << '\n';
                break;
            case Op::MeasZ:
                out << "M_Z " << ins.a << '\n';
                break;
            case Op::MeasX:
                out << "M_X " << ins.a << '\n';
                break;
            case Op::Depol1:
                out << "DEPOL1 " << ins.p << ' ' << ins.a << '\n';
                break;
            case Op::Depol2:
                out << "DEPOL2 " << ins.p << ' ' << ins.a << ' ' << ins.b << '\n';
                break;
            case Op::XError:
                out << "X_ERROR " << ins.p << ' ' << ins.a << '\n';
                break;
            case Op::ZError:
                out << "Z_ERROR " << ins.p << ' ' << ins.a << '\n';
                break;
            case Op::Tick:
                out << "TICK\n";
                break;
        }
    }
    for (const auto &d : detectors) {
        out << "DETECTOR";
        for (uint32_t m : d) {
            out << ' ' << m;
        }
        out << '\n';
    }
    for (size_t k = 0; k < observables.size(); k++) {
        out << "OBSERVABLE " << k;
        for (uint32_t m : observables[k]) {
            out << ' ' << m;
        }
        out << '\n';
    }
    return out.str();
}

NoisyCircuit read_circuit(std::istream &in) {
    NoisyCircuit c;
    std::string line;
    uint32_t max_q = 0;
    bool any_q = false;
    auto touch = [&](uint32_t q) {
        max_q = std::max(max_q, q);
        any_q = true;
    };
    size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream ss(line);
        std::string name;
        if (!(ss >> name)) {
            continue;
        }
        auto fail = [&]() { throw std::runtime_error("circuit text line " + std::to_string(lineno) + ": " + line); };
        uint32_t a = 0, b = 0;
        double p = 0;
        if (name == "PREP_Z" || name == "PREP_X" || name == "M_Z" || name == "M_X") {
            if (!(ss >> a)) fail();
            touch(a);
            if (name == "PREP_Z") {
                c.append(Op::PrepZ, a);
            } else if (name == "PREP_X") {
                c.append(Op::PrepX, a);
            } else {
                c.measure(name == "M_Z" ? Basis::Z : Basis::X, a);
            }
        } else if (name == "CX") {
            if (!(ss >> a >> b) || a == b) fail();
            touch(a);
            touch(b);
            c.append(Op::CX, a, b);
        } else if (name == "DEPOL1" || name == "X_ERROR" || name == "Z_ERROR") {
            if (!(ss >> p >> a) || p < 0 || p > 1) fail();
            touch(a);
            Op op = name == "DEPOL1" ? Op::Depol1 : name == "X_ERROR" ? Op::XError : Op::ZError;
            c.append(op, a, 0, p);
        } else if (name == "DEPOL2") {
            if (!(ss >> p >> a >> b) || p < 0 || p > 1 || a == b) fail();
            touch(a);
            touch(b);
            c.append(Op::Depol2, a, b, p);
        } else if (name == "TICK") {
            c.append(Op::Tick, 0);
        } else if (name == "DETECTOR") {
            std::vector<uint32_t> ms;
            uint32_t m;
            while (ss >> m) {
                ms.push_back(m);
            }
            c.detectors.push_back(std::move(ms));
            c.detector_info.push_back({});
        } else if (name == "OBSERVABLE") {
            size_t k;
            if (!(ss >> k)) fail();
            if (c.observables.size() <= k) {
                c.observables.resize(k + 1);
            }
            uint32_t m;
            while (ss >> m) {
                c.observables[k].push_back(m);
            }
        } else {
            fail();
        }
    }
    for (const auto &d : c.detectors) {
        for (uint32_t m : d) {
            if (m >= c.n_measurements) {
                throw std::runtime_error("circuit text: detector references a missing measurement");
            }
        }
    }
    for (const auto &o : c.observables) {
        for (uint32_t m : o) {
            if (m >= c.n_measurements) {
                throw std::runtime_error("circuit text: observable references a missing measurement");
            }
        }
    }
    c.n_qubits = any_q ? max_q + 1 : 0;
    c.n_data = c.n_qubits;
    return c;
}

std::vector<GateLayer> edge_coloring(const BinMatrix &checks) {
    size_t rows = checks.rows();
    size_t cols = checks.cols();
    size_t delta = std::max(checks.max_row_weight(), checks.max_col_weight());
    if (delta == 0) {
        return {};
    }
    constexpr int32_t kFree = -1;
    // left_at[u * delta + c] = data qubit joined to check u by colour c.
    std::vector<int32_t> left_at(rows * delta, kFree);
    std::vector<int32_t> right_at(cols * delta, kFree);
    auto free_left = [&](size_t u) {
        for (size_t c = 0; c < delta; c++) {
            if (left_at[u * delta + c] == kFree) return c;
        }
        throw std::logic_error("edge_coloring: no free colour at check");
    };
    auto free_right = [&](size_t v) {
        for (size_t c = 0; c < delta; c++) {
            if (right_at[v * delta + c] == kFree) return c;
        }
        throw std::logic_error("edge_coloring: no free colour at qubit");
    };
    for (size_t u = 0; u < rows; u++) {
        for (uint32_t v : checks.row(u)) {
            size_t a = free_left(u);
            size_t b = free_right(v);
            if (right_at[v * delta + a] != kFree) {
                // Swap colours a and b along the alternating path from v. The
                // path cannot reach u because a is free there.
                std::vector<std::pair<bool, size_t>> path;  // (is_right, node)
                bool on_right = true;
                size_t node = v;
                size_t want = a;
                while (true) {
                    int32_t next = on_right ? right_at[node * delta + want] : left_at[node * delta + want];
                    if (next == kFree) break;
                    path.emplace_back(on_right, node);
                    node = static_cast<size_t>(next);
                    on_right = !on_right;
                    want = want == a ? b : a;
                }
                path.emplace_back(on_right, node);
                // Recolour edges along the path: edge i joins path[i] and
                // path[i + 1] with colour a for even i, b for odd i.
                std::vector<std::pair<size_t, size_t>> edges;  // (check, qubit)
                for (size_t i = 0; i + 1 < path.size(); i++) {
                    size_t x = path[i].second, y = path[i + 1].second;
                    edges.emplace_back(path[i].first ? y : x, path[i].first ? x : y);
                }
                for (size_t i = 0; i < edges.size(); i++) {
                    size_t col = i % 2 == 0 ? a : b;
                    left_at[edges[i].first * delta + col] = kFree;
                    right_at[edges[i].second * delta + col] = kFree;
                }
                for (size_t i = 0; i < edges.size(); i++) {
                    size_t col = i % 2 == 0 ? b : a;
                    left_at[edges[i].first * delta + col] = static_cast<int32_t>(edges[i].second);
                    right_at[edges[i].second * delta + col] = static_cast<int32_t>(edges[i].first);
                }
            }
            left_at[u * delta + a] = static_cast<int32_t>(v);
            right_at[v * delta + a] = static_cast<int32_t>(u);
        }
    }
    std::vector<GateLayer> layers(delta);
    for (size_t u = 0; u < rows; u++) {
        for (size_t c = 0; c < delta; c++) {
            int32_t v = left_at[u * delta + c];
            if (v != kFree) {
                layers[c].emplace_back(static_cast<uint32_t>(u), static_cast<uint32_t>(v));
            }
        }
    }
    layers.erase(
        std::remove_if(layers.begin(), layers.end(), [](const GateLayer &l) { return l.empty(); }), layers.end());
    return layers;
}

Schedule make_schedule(const CssCode &code) {
    return Schedule{edge_coloring(code.hz), edge_coloring(code.hx)};
}

CycleRecord append_cycle(
    NoisyCircuit &circuit, const CssCode &code, const Schedule &schedule, const SideLayout &layout,
    double p_gate, double p_meas) {
    CycleRecord rec;
    size_t mz = code.hz.rows();
    size_t mx = code.hx.rows();

    for (size_t c = 0; c < mz; c++) {
        circuit.append(Op::PrepZ, layout.zanc0 + static_cast<uint32_t>(c));
    }
    circuit.append(Op::Tick, 0);
    for (const auto &layer : schedule.z_layers) {
        for (auto [check, q] : layer) {
            circuit.append(Op::CX, layout.data0 + q, layout.zanc0 + check);
        }
        if (p_gate > 0) {
            for (auto [check, q] : layer) {
                circuit.append(Op::Depol2, layout.data0 + q, layout.zanc0 + check, p_gate);
            }
        }
        circuit.append(Op::Tick, 0);
    }
    for (size_t c = 0; c < mz; c++) {
        uint32_t anc = layout.zanc0 + static_cast<uint32_t>(c);
        if (p_meas > 0) {
            circuit.append(Op::XError, anc, 0, p_meas);
        }
        rec.z.push_back(circuit.measure(Basis::Z, anc));
    }
    circuit.append(Op::Tick, 0);

    for (size_t c = 0; c < mx; c++) {
        circuit.append(Op::PrepX, layout.xanc0 + static_cast<uint32_t>(c));
    }
    circuit.append(Op::Tick, 0);
    for (const auto &layer : schedule.x_layers) {
        for (auto [check, q] : layer) {
            circuit.append(Op::CX, layout.xanc0 + check, layout.data0 + q);
        }
        if (p_gate > 0) {
            for (auto [check, q] : layer) {
                circuit.append(Op::Depol2, layout.xanc0 + check, layout.data0 + q, p_gate);
            }
        }
        circuit.append(Op::Tick, 0);
    }
    for (size_t c = 0; c < mx; c++) {
        uint32_t anc = layout.xanc0 + static_cast<uint32_t>(c);
        if (p_meas > 0) {
            circuit.append(Op::ZError, anc, 0, p_meas);
        }
        rec.x.push_back(circuit.measure(Basis::X, anc));
    }
    circuit.append(Op::Tick, 0);
    return rec;
}

namespace {

SideLayout standard_layout(const CssCode &code) {
    uint32_t n = static_cast<uint32_t>(code.n);
    return {0, n, n + static_cast<uint32_t>(code.hz.rows())};
}

void size_standard(NoisyCircuit &c, const CssCode &code) {
    c.n_data = code.n;
    c.n_ancilla = code.hz.rows() + code.hx.rows();
    c.n_qubits = c.n_data + c.n_ancilla;
}

std::vector<uint32_t> to_u32(std::span<const uint32_t> s) {
    return {s.begin(), s.end()};
}

}  // namespace

NoisyCircuit build_cycle(const CssCode &code, const Schedule &schedule, double p_gate_eff, double p_meas) {
    NoisyCircuit c;
    size_standard(c, code);
    append_cycle(c, code, schedule, standard_layout(code), p_gate_eff, p_meas);
    c.cycles = 1;
    return c;
}

NoisyCircuit build_memory_experiment(
    const CssCode &code, Basis basis, size_t rounds, size_t cycles_per_round, const FoldedNoise &noise) {
    if (rounds < 1 || cycles_per_round < 1) {
        throw std::invalid_argument("memory experiment needs rounds >= 1 and cycles_per_round >= 1");
    }
    NoisyCircuit c;
    size_standard(c, code);
    SideLayout layout = standard_layout(code);
    for (size_t r = 0; r < code.hx.rows(); r++) {
        c.initial_stabilizers.push_back({to_u32(code.hx.row(r)), {}});
    }
    for (size_t r = 0; r < code.hz.rows(); r++) {
        c.initial_stabilizers.push_back({{}, to_u32(code.hz.row(r))});
    }
    const BinMatrix &logicals = basis == Basis::Z ? code.lz : code.lx;
    for (size_t r = 0; r < logicals.rows(); r++) {
        if (basis == Basis::Z) {
            c.initial_stabilizers.push_back({{}, to_u32(logicals.row(r))});
        } else {
            c.initial_stabilizers.push_back({to_u32(logicals.row(r)), {}});
        }
    }

    if (noise.p_bell_eff > 0) {
        for (uint32_t q = 0; q < code.n; q++) {
            c.append(Op::Depol1, q, 0, noise.p_bell_eff);
        }
        c.append(Op::Tick, 0);
    }

    size_t total = rounds * cycles_per_round;
    Schedule schedule = make_schedule(code);
    std::vector<CycleRecord> records;
    for (size_t t = 0; t < total; t++) {
        records.push_back(append_cycle(c, code, schedule, layout, noise.p_gate_eff, noise.p_meas));
        const CycleRecord &cur = records.back();
        for (int side = 0; side < 2; side++) {
            const auto &ms = side == 0 ? cur.z : cur.x;
            for (size_t k = 0; k < ms.size(); k++) {
                std::vector<uint32_t> det{ms[k]};
                if (t > 0) {
                    det.push_back(side == 0 ? records[t - 1].z[k] : records[t - 1].x[k]);
                }
                c.detectors.push_back(std::move(det));
                c.detector_info.push_back(
                    {static_cast<uint32_t>(t), side == 0 ? Basis::Z : Basis::X, static_cast<uint32_t>(k)});
            }
        }
    }

    std::vector<uint32_t> data_meas(code.n);
    for (uint32_t q = 0; q < code.n; q++) {
        data_meas[q] = c.measure(basis, q);
    }
    const BinMatrix &same = basis == Basis::Z ? code.hz : code.hx;
    const auto &last = basis == Basis::Z ? records.back().z : records.back().x;
    for (size_t k = 0; k < same.rows(); k++) {
        std::vector<uint32_t> det;
        for (uint32_t q : same.row(k)) {
            det.push_back(data_meas[q]);
        }
        det.push_back(last[k]);
        c.detectors.push_back(std::move(det));
        c.detector_info.push_back({static_cast<uint32_t>(total), basis, static_cast<uint32_t>(k)});
    }
    for (size_t r = 0; r < logicals.rows(); r++) {
        std::vector<uint32_t> obs;
        for (uint32_t q : logicals.row(r)) {
            obs.push_back(data_meas[q]);
        }
        c.observables.push_back(std::move(obs));
    }
    c.cycles = total;
    return c;
}

std::string gate_ordering_description() {
    return "per cycle: Z checks (PREP_Z ancillas; CX data->ancilla by edge-colour layer; M_Z) then X checks "
           "(PREP_X ancillas; CX ancilla->data by edge-colour layer; M_X); colours from alternating-path "
           "edge colouring over checks in row order, qubits ascending";
}

}  // namespace bellq
