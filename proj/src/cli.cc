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

#include "bellq/cli.h"

#include <omp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "bellq/distill.h"
#include "bellq/gf2.h"
#include "bellq/pauli_engine.h"
#include "bellq/ring.h"
#include "bellq/rng.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace bellq {

namespace {

using Json = nlohmann::ordered_json;

// Shortest text that reads back to the same double.
std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string quoted(const std::string &s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

Basis parse_basis(const std::string &s) {
    if (s == "z" || s == "Z") return Basis::Z;
    if (s == "x" || s == "X") return Basis::X;
    throw ConfigError("unknown basis '" + s + "' (expected z or x)");
}

// Reads the mapping `node`, rejecting keys outside `allowed`.
void check_keys(const YAML::Node &node, const std::string &where, std::initializer_list<const char *> allowed) {
    if (!node) return;
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto &kv : node) {
        std::string key = kv.first.as<std::string>();
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; });
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const YAML::Node &node, const char *key, T &out, const std::string &where) {
    if (!node || !node[key]) return;
    try {
        out = node[key].as<T>();
    } catch (const YAML::Exception &) {
        throw ConfigError(where + "." + key + ": bad value");
    }
}

bool in_unit(double p) { return p >= 0 && p <= 1; }

}  // namespace

std::string basis_name(Basis b) { return b == Basis::Z ? "z" : "x"; }

FoldedNoise NoiseSpec::point(size_t i) const {
    double bell = p_bell.at(i);
    double gate = mode == "unified" ? bell / ratio : p_gate;
    FoldedNoise n = folded ? FoldedNoise::effective(bell, gate) : FoldedNoise::from_two_sided(bell, gate);
    n.p_meas = p_meas;
    return n;
}

ExperimentConfig ExperimentConfig::from_yaml(const std::string &text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    if (!root || root.IsNull()) {
        c.validate();
        return c;
    }
    check_keys(root, "config", {"code", "noise", "schedule", "decoder", "shots", "sampler", "seed", "output"});

    const YAML::Node code = root["code"];
    check_keys(code, "code",
               {"family", "bits", "trials", "seed", "base", "components", "size", "hx", "hz", "distance"});
    read(code, "family", c.code.family, "code");
    read(code, "bits", c.code.bits, "code");
    read(code, "trials", c.code.trials, "code");
    read(code, "seed", c.code.seed, "code");
    read(code, "base", c.code.base, "code");
    read(code, "components", c.code.components, "code");
    read(code, "size", c.code.size, "code");
    read(code, "hx", c.code.hx, "code");
    read(code, "hz", c.code.hz, "code");
    read(code, "distance", c.code.distance, "code");

    const YAML::Node noise = root["noise"];
    check_keys(noise, "noise", {"mode", "folded", "p_bell", "p_gate", "ratio", "p_meas"});
    read(noise, "mode", c.noise.mode, "noise");
    read(noise, "folded", c.noise.folded, "noise");
    if (noise && noise["p_bell"]) {
        if (noise["p_bell"].IsScalar()) {
            c.noise.p_bell = {0};
            read(noise, "p_bell", c.noise.p_bell[0], "noise");
        } else {
            read(noise, "p_bell", c.noise.p_bell, "noise");
        }
    }
    read(noise, "p_gate", c.noise.p_gate, "noise");
    read(noise, "ratio", c.noise.ratio, "noise");
    read(noise, "p_meas", c.noise.p_meas, "noise");

    const YAML::Node sched = root["schedule"];
    check_keys(sched, "schedule", {"rounds", "cycles_per_round", "bases"});
    read(sched, "rounds", c.schedule.rounds, "schedule");
    read(sched, "cycles_per_round", c.schedule.cycles_per_round, "schedule");
    if (sched && sched["bases"]) {
        std::vector<std::string> names;
        read(sched, "bases", names, "schedule");
        c.schedule.bases.clear();
        for (const auto &b : names) c.schedule.bases.push_back(parse_basis(b));
    }

    const YAML::Node dec = root["decoder"];
    check_keys(dec, "decoder", {"bp", "osd", "lookahead"});
    if (dec) {
        const YAML::Node bp = dec["bp"];
        check_keys(bp, "decoder.bp", {"variant", "iterations", "damping", "min_sum_scale"});
        std::string variant = "product_sum";
        read(bp, "variant", variant, "decoder.bp");
        if (variant == "product_sum") {
            c.decoder.bp.variant = BpVariant::ProductSum;
        } else if (variant == "min_sum") {
            c.decoder.bp.variant = BpVariant::MinSum;
        } else {
            throw ConfigError("decoder.bp.variant: expected product_sum or min_sum");
        }
        read(bp, "iterations", c.decoder.bp.max_iterations, "decoder.bp");
        read(bp, "damping", c.decoder.bp.damping, "decoder.bp");
        read(bp, "min_sum_scale", c.decoder.bp.min_sum_scale, "decoder.bp");
        const YAML::Node osd = dec["osd"];
        check_keys(osd, "decoder.osd", {"order", "sweep"});
        read(osd, "order", c.decoder.osd.order, "decoder.osd");
        read(osd, "sweep", c.decoder.osd.sweep, "decoder.osd");
        read(dec, "lookahead", c.decoder.lookahead, "decoder");
    }

    const YAML::Node shots = root["shots"];
    check_keys(shots, "shots", {"max", "block", "target_rel_stderr"});
    read(shots, "max", c.shots.max, "shots");
    read(shots, "block", c.shots.block, "shots");
    read(shots, "target_rel_stderr", c.shots.target_rel_stderr, "shots");

    read(root, "sampler", c.sampler, "config");
    read(root, "seed", c.seed, "config");
    read(root, "output", c.output, "config");
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error &e) {
        throw ConfigError(e.what());
    }
    return from_yaml(text);
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> families{"hgp", "lp", "toric", "sc", "repetition", "files"};
    if (!families.count(code.family)) throw ConfigError("code.family: unknown family '" + code.family + "'");
    if (code.family == "hgp" && (code.bits < 4 || code.bits % 4 != 0 || code.trials == 0)) {
        throw ConfigError("code: hgp needs bits divisible by 4 and trials >= 1");
    }
    if (code.family == "lp" && code.base.empty()) throw ConfigError("code.base: required for lp");
    if (code.family == "sc" && code.components.empty()) throw ConfigError("code.components: required for sc");
    if (code.family == "files" && (code.hx.empty() || code.hz.empty())) {
        throw ConfigError("code.hx and code.hz: required for files");
    }
    if ((code.family == "toric" || code.family == "repetition" || code.family == "sc") && code.size < 2) {
        throw ConfigError("code.size: must be at least 2");
    }
    if (code.distance < 0) throw ConfigError("code.distance: must be >= 0");

    if (noise.mode != "fixed" && noise.mode != "unified") throw ConfigError("noise.mode: expected fixed or unified");
    if (noise.p_bell.empty()) throw ConfigError("noise.p_bell: at least one value");
    if (!(noise.ratio > 0)) throw ConfigError("noise.ratio: must be positive");
    if (!in_unit(noise.p_meas)) throw ConfigError("noise.p_meas: outside [0, 1]");
    if (!in_unit(noise.p_gate)) throw ConfigError("noise.p_gate: outside [0, 1]");
    for (size_t i = 0; i < noise.p_bell.size(); i++) {
        if (!in_unit(noise.p_bell[i])) throw ConfigError("noise.p_bell: " + num(noise.p_bell[i]) + " outside [0, 1]");
        try {
            noise.point(i);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(std::string("noise: ") + e.what());
        }
    }

    if (schedule.rounds == 0 || schedule.cycles_per_round == 0) {
        throw ConfigError("schedule: rounds and cycles_per_round must be >= 1");
    }
    if (schedule.bases.empty() || schedule.bases.size() > 2 ||
        (schedule.bases.size() == 2 && schedule.bases[0] == schedule.bases[1])) {
        throw ConfigError("schedule.bases: one or both of z, x");
    }
    if (decoder.bp.max_iterations == 0) throw ConfigError("decoder.bp.iterations: must be >= 1");
    if (!(decoder.bp.damping >= 0 && decoder.bp.damping < 1)) throw ConfigError("decoder.bp.damping: outside [0, 1)");
    if (!(decoder.bp.min_sum_scale > 0 && decoder.bp.min_sum_scale <= 1)) {
        throw ConfigError("decoder.bp.min_sum_scale: outside (0, 1]");
    }
    if (decoder.osd.sweep > 10) throw ConfigError("decoder.osd.sweep: at most 10");
    if (shots.max == 0 || shots.block == 0) throw ConfigError("shots: max and block must be >= 1");
    if (!(shots.target_rel_stderr >= 0)) throw ConfigError("shots.target_rel_stderr: must be >= 0");
    if (sampler != "model" && sampler != "circuit") throw ConfigError("sampler: expected model or circuit");
}

std::string ExperimentConfig::to_yaml() const {
    std::ostringstream o;
    o << "code:\n";
    o << "  family: " << code.family << "\n";
    o << "  bits: " << code.bits << "\n";
    o << "  trials: " << code.trials << "\n";
    o << "  seed: " << code.seed << "\n";
    o << "  base: " << quoted(code.base) << "\n";
    o << "  components: " << quoted(code.components) << "\n";
    o << "  size: " << code.size << "\n";
    o << "  hx: " << quoted(code.hx) << "\n";
    o << "  hz: " << quoted(code.hz) << "\n";
    o << "  distance: " << num(code.distance) << "\n";
    o << "noise:\n";
    o << "  mode: " << noise.mode << "\n";
    o << "  folded: " << (noise.folded ? "true" : "false") << "\n";
    o << "  p_bell: [";
    for (size_t i = 0; i < noise.p_bell.size(); i++) o << (i ? ", " : "") << num(noise.p_bell[i]);
    o << "]\n";
    o << "  p_gate: " << num(noise.p_gate) << "\n";
    o << "  ratio: " << num(noise.ratio) << "\n";
    o << "  p_meas: " << num(noise.p_meas) << "\n";
    o << "schedule:\n";
    o << "  rounds: " << schedule.rounds << "\n";
    o << "  cycles_per_round: " << schedule.cycles_per_round << "\n";
    o << "  bases: [";
    for (size_t i = 0; i < schedule.bases.size(); i++) o << (i ? ", " : "") << basis_name(schedule.bases[i]);
    o << "]\n";
    o << "decoder:\n";
    o << "  bp:\n";
    o << "    variant: " << (decoder.bp.variant == BpVariant::ProductSum ? "product_sum" : "min_sum") << "\n";
    o << "    iterations: " << decoder.bp.max_iterations << "\n";
    o << "    damping: " << num(decoder.bp.damping) << "\n";
    o << "    min_sum_scale: " << num(decoder.bp.min_sum_scale) << "\n";
    o << "  osd:\n";
    o << "    order: " << decoder.osd.order << "\n";
    o << "    sweep: " << decoder.osd.sweep << "\n";
    o << "  lookahead: " << decoder.lookahead << "\n";
    o << "shots:\n";
    o << "  max: " << shots.max << "\n";
    o << "  block: " << shots.block << "\n";
    o << "  target_rel_stderr: " << num(shots.target_rel_stderr) << "\n";
    o << "sampler: " << sampler << "\n";
    o << "seed: " << seed << "\n";
    o << "output: " << quoted(output) << "\n";
    return o.str();
}

std::string config_template() {
    return R"(# bellq experiment configuration. Every key is shown with its default.
code:
  family: hgp        # hgp | lp | toric | sc | repetition | files
  bits: 12           # hgp: classical length of the (3,4)-regular code
  trials: 1000       # hgp: Tanner graphs tried before selection
  seed: 2            # hgp: Tanner graph sampler seed
  base: ""           # lp: base matrix file with header "rows cols lift"
  components: ""     # sc: component file, see README
  size: 3            # toric: distance; repetition: length; sc: coupling length
  hx: ""             # files: X check matrix
  hz: ""             # files: Z check matrix
  distance: 0        # grouping distance for threshold fits; 0 uses the code's
noise:
  mode: fixed        # fixed: p_gate as given; unified: p_gate = p_bell / ratio
  folded: true       # true: single-sided effective rates; false: two-sided, folded here
  p_bell: [0.08, 0.1, 0.12]
  p_gate: 0.002
  ratio: 50
  p_meas: 0          # measurement flip probability, off by default
schedule:
  rounds: 14
  cycles_per_round: 3
  bases: [z, x]
decoder:
  bp:
    variant: product_sum   # product_sum | min_sum
    iterations: 30
    damping: 0.5
    min_sum_scale: 0.625
  osd:
    order: 0
    sweep: 0         # combination sweep depth, up to 10
  lookahead: 1       # cycles of the next window visible to BP
shots:
  max: 100000
  block: 1024        # shots per sampling block; early stop is checked per block
  target_rel_stderr: 0.1   # stop once stderr / p falls below this; 0 disables
sampler: model       # model: detector model; circuit: full circuit sampling
seed: 1
output: "results"
)";
}

std::string fnv1a_hex(const std::string &text) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

namespace {

std::vector<ScComponent> load_components(const std::string &path, int &l1, int &l2) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception &e) {
        throw ConfigError("code.components: " + std::string(e.what()));
    }
    std::vector<ScComponent> comps;
    try {
        if (root["coupling"]) {
            auto c = root["coupling"].as<std::vector<int>>();
            if (c.size() != 2) throw ConfigError("code.components: coupling needs two values");
            l1 = c[0];
            l2 = c[1];
        }
        for (const auto &node : root["components"]) {
            comps.push_back({node["i"].as<int>(), node["j"].as<int>(), node["rows"].as<std::vector<std::string>>()});
        }
    } catch (const YAML::Exception &e) {
        throw ConfigError("code.components: " + std::string(e.what()));
    }
    if (comps.empty()) throw ConfigError("code.components: no components");
    return comps;
}

}  // namespace

CssCode build_code(const CodeSpec &spec) {
    try {
        if (spec.family == "hgp") {
            ClassicalCode c = sample_tanner_graph(spec.bits, 3, 4, spec.trials, spec.seed);
            CssCode code = hgp(c.h, c.h);
            // H has full row rank, so H^T has no codewords and the product
            // inherits the classical distance.
            code.distance = c.distance;
            code.seed = spec.seed;
            return code;
        }
        if (spec.family == "lp") return lp(load_poly_matrix(spec.base));
        if (spec.family == "toric") {
            int d = static_cast<int>(spec.size);
            CssCode code = sc_from_components(toric_components(), d, d);
            code.family = "toric";
            return code;
        }
        if (spec.family == "sc") {
            int l1 = static_cast<int>(spec.size), l2 = static_cast<int>(spec.size);
            auto comps = load_components(spec.components, l1, l2);
            return sc_from_components(comps, l1, l2);
        }
        if (spec.family == "repetition") {
            BinMatrix r = repetition_code(spec.size);
            CssCode code = hgp(r, r);
            code.family = "rep";
            return code;
        }
        return CssCode::from_checks(load_matrix(spec.hx), load_matrix(spec.hz), "files");
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError("code: " + std::string(e.what()));
    }
}

double grouping_distance(const CodeSpec &spec, const CssCode &code) {
    if (spec.distance > 0) return spec.distance;
    if (code.distance.distance) return static_cast<double>(*code.distance.distance);
    if (spec.family == "toric" || spec.family == "repetition") return static_cast<double>(spec.size);
    return 0;
}

namespace {

std::string point_name(const CssCode &code) { return code.family + "-" + std::to_string(code.n) + "-" + std::to_string(code.k); }

Json code_json(const CssCode &code, double grouping) {
    Json j;
    j["name"] = point_name(code);
    j["family"] = code.family;
    j["n"] = code.n;
    j["k"] = code.k;
    if (code.distance.distance) {
        j["d_upper"] = *code.distance.distance;
    } else {
        j["d_upper"] = nullptr;
    }
    j["d_exact"] = code.distance.exact;
    j["grouping_distance"] = grouping;
    return j;
}

}  // namespace

std::vector<LerPoint> run_experiment(const ExperimentConfig &config, const std::string &out_dir,
                                     const RunOptions &opts) {
    config.validate();
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
    CssCode code = build_code(config.code);
    double grouping = grouping_distance(config.code, code);
    fs::create_directories(out_dir);
    std::string name = point_name(code);
    size_t cycles = config.schedule.cycles();

    std::vector<LerPoint> points;
    Json detail = Json::array();
    for (size_t i = 0; i < config.noise.p_bell.size(); i++) {
        FoldedNoise noise = config.noise.point(i);
        std::vector<LerPoint> per_basis;
        for (Basis basis : config.schedule.bases) {
            NoisyCircuit circuit = build_memory_experiment(
                code, basis, config.schedule.rounds, config.schedule.cycles_per_round, noise);
            DetectorModel model = build_detector_model(circuit);
            WindowedDecoder decoder(model, config.schedule.rounds, config.schedule.cycles_per_round,
                                    config.decoder.bp, config.decoder.osd, config.decoder.lookahead);
            uint64_t point_seed = derive_seed(derive_seed(config.seed, i), basis == Basis::Z ? 0 : 1);
            size_t shots = 0, failures = 0;
            for (size_t block = 0; shots < config.shots.max; block++) {
                size_t want = std::min(config.shots.block, config.shots.max - shots);
                uint64_t seed = derive_seed(point_seed, block);
                ShotBatch batch = config.sampler == "model"
                                      ? sample_model(model, want, seed)
                                      : sample_circuit(circuit, want, seed, NoiseMode::Categorical);
                DecodeStats st;
                try {
                    st = decode_batch(decoder, model, batch);
                } catch (const InfeasibleSyndrome &e) {
                    std::string dump = out_dir + "/infeasible_p" + std::to_string(i) + "_" + basis_name(basis) +
                                       "_block" + std::to_string(block) + ".shots";
                    batch.save(dump);
                    throw InfeasibleRun(e.what(), dump);
                }
                shots += st.shots;
                failures += st.failures;
                if (config.shots.target_rel_stderr > 0 && failures > 0) {
                    LerEstimate e = estimate_ler(shots, failures);
                    if (e.std_error < config.shots.target_rel_stderr * e.p) break;
                }
            }
            LerPoint pt = make_point(name, code.n, code.k, grouping, noise.p_bell_eff, noise.p_gate_eff,
                                     basis_name(basis), cycles, shots, failures);
            if (!opts.quiet) {
                std::cerr << name << " p=" << num(pt.p) << " basis=" << pt.basis << " " << failures << "/" << shots
                          << " p_cycle=" << pt.p_cycle() << "\n";
            }
            Json dj;
            dj["p"] = pt.p;
            dj["basis"] = pt.basis;
            dj["detectors"] = model.n_detectors;
            dj["mechanisms"] = model.n_mechanisms();
            dj["noise_sites"] = circuit.noise_sites();
            dj["windows"] = decoder.windows();
            detail.push_back(dj);
            per_basis.push_back(pt);
            points.push_back(pt);
        }
        if (per_basis.size() == 2) {
            const LerPoint &z = per_basis[0].basis == "z" ? per_basis[0] : per_basis[1];
            const LerPoint &x = per_basis[0].basis == "z" ? per_basis[1] : per_basis[0];
            points.push_back(combine_points(z, x));
        }
    }

    std::ostringstream csv;
    write_results_csv(csv, points);
    write_file(out_dir + "/results.csv", csv.str());

    std::string text = config.to_yaml();
    Json m;
    m["tool"] = "bellq";
    m["version"] = kVersion;
    m["config_hash"] = fnv1a_hex(text);
    m["config"] = text;
    m["generator"] = kRngName;
    m["sample_block_bits"] = kShotBlock;
    m["shot_block"] = config.shots.block;
    m["sampler"] = config.sampler;
    m["gate_ordering"] = gate_ordering_description();
    m["basis_combination"] = "p_zx = 1 - (1 - p_z)(1 - p_x), bases assumed independent";
    m["per_cycle"] = "p_cycle = 1 - (1 - p_tot)^(1 / cycles)";
    m["cycles"] = cycles;
    m["code"] = code_json(code, grouping);
    m["experiments"] = detail;
    write_file(out_dir + "/manifest.json", m.dump(2) + "\n");
    return points;
}

ResultsRecord load_record(const std::string &dir) {
    ResultsRecord r;
    r.dir = dir;
    Json m;
    try {
        m = Json::parse(read_file(dir + "/manifest.json"));
        r.config_text = m.at("config").get<std::string>();
        r.config_hash = m.at("config_hash").get<std::string>();
        r.cycles = m.at("cycles").get<size_t>();
    } catch (const std::exception &e) {
        throw ConfigError(dir + ": bad manifest: " + e.what());
    }
    std::ifstream in(dir + "/results.csv");
    if (!in) throw ConfigError(dir + ": missing results.csv");
    try {
        r.points = read_results_csv(in);
    } catch (const std::exception &e) {
        throw ConfigError(dir + ": " + e.what());
    }
    return r;
}

namespace {

Json fit_to_json(const FitResult &f) {
    Json j;
    j["status"] = "ok";
    Json params;
    Json errors;
    for (size_t i = 0; i < f.names.size(); i++) {
        params[f.names[i]] = f.params[i];
        errors[f.names[i]] = f.error(f.names[i]);
    }
    j["params"] = params;
    j["errors"] = errors;
    j["covariance"] = f.covariance;
    j["residual"] = f.residual;
    j["points"] = f.points;
    j["iterations"] = f.iterations;
    return j;
}

Json mask_json(const FitMask &mask, const std::vector<LerPoint> &pts, bool positive_only) {
    Json j;
    j["p_min"] = mask.p_min;
    j["p_max"] = mask.p_max;
    Json used = Json::array();
    for (const auto &pt : pts) {
        if (!mask.contains(pt.p)) continue;
        if (positive_only && pt.failures == 0) continue;
        used.push_back({{"code", pt.code}, {"p", pt.p}, {"basis", pt.basis}});
    }
    j["used"] = used;
    return j;
}

std::vector<LerPoint> select_basis(const std::vector<LerPoint> &points, const std::string &basis) {
    std::vector<LerPoint> out;
    for (const auto &pt : points) {
        if (pt.basis == basis) out.push_back(pt);
    }
    return out;
}

Json fits_object(const std::vector<LerPoint> &all, const FitRequest &req) {
    std::vector<LerPoint> pts = select_basis(all, req.basis);
    Json j;
    j["basis"] = req.basis;
    j["basis_note"] = "zx combines both bases assuming independence";
    Json th;
    try {
        th = fit_to_json(fit_threshold(pts, req.threshold));
    } catch (const FitError &e) {
        th = {{"status", "error"}, {"reason", e.what()}};
    }
    th["model"] = "p_cycle = A + B x + C x^2, x = (p - p_th) d^alpha";
    th["mask"] = mask_json(req.threshold, pts, false);
    j["threshold"] = th;
    Json sub;
    try {
        sub = fit_to_json(fit_subthreshold(pts, req.subthreshold));
    } catch (const FitError &e) {
        sub = {{"status", "error"}, {"reason", e.what()}};
    }
    sub["model"] = "p_cycle = A (p / p_th)^(B n^C)";
    sub["mask"] = mask_json(req.subthreshold, pts, true);
    j["subthreshold"] = sub;
    return j;
}

std::string sci(double v) {
    std::ostringstream o;
    o << std::scientific << std::setprecision(2) << v;
    return o.str();
}

}  // namespace

std::string fits_json(const std::vector<LerPoint> &points, const FitRequest &req) {
    return fits_object(points, req).dump(2) + "\n";
}

void write_report(const std::vector<ResultsRecord> &records, const std::string &out_dir, const ReportOptions &opts) {
    if (records.empty()) throw ConfigError("report: no records");
    for (const auto &r : records) {
        if (!r.hash_ok() && !opts.force) {
            throw ConfigError(r.dir + ": config hash does not match the embedded config (use --force)");
        }
    }
    std::set<size_t> schedules;
    for (const auto &r : records) schedules.insert(r.cycles);
    if (schedules.size() > 1 && !opts.force) {
        throw ConfigError("report: records use different cycle counts (use --force)");
    }
    fs::create_directories(out_dir + "/series");

    std::vector<LerPoint> all;
    for (const auto &r : records) all.insert(all.end(), r.points.begin(), r.points.end());

    std::ostringstream table;
    table << "code,n,k,p,p_gate,basis,cycles,shots,failures,p_tot,p_cycle,p_cycle_err\n";
    table.precision(10);
    for (const auto &pt : all) {
        table << pt.code << ',' << pt.n << ',' << pt.k << ',' << pt.p << ',' << pt.p_gate << ',' << pt.basis << ','
              << pt.cycles << ',' << pt.shots << ',' << pt.failures << ',' << pt.p_block_total << ','
              << pt.p_cycle() << ',' << pt.p_cycle_error() << '\n';
    }
    write_file(out_dir + "/per_cycle.csv", table.str());

    std::map<std::string, std::vector<LerPoint>> by_code;
    for (const auto &pt : select_basis(all, opts.fit.basis)) by_code[pt.code].push_back(pt);
    for (auto &[code, pts] : by_code) {
        std::sort(pts.begin(), pts.end(), [](const LerPoint &a, const LerPoint &b) { return a.p < b.p; });
        std::ostringstream s;
        s.precision(10);
        s << "# " << code << " basis " << opts.fit.basis << ": p p_cycle stderr\n";
        for (const auto &pt : pts) s << pt.p << ' ' << pt.p_cycle() << ' ' << pt.p_cycle_error() << '\n';
        write_file(out_dir + "/series/" + code + ".dat", s.str());
    }

    Json fits = fits_object(all, opts.fit);
    write_file(out_dir + "/fits.json", fits.dump(2) + "\n");

    std::ostringstream th;
    th << "status,p_th,p_th_err,alpha,alpha_err,A,B,C,residual,points\n";
    const Json &t = fits["threshold"];
    if (t["status"] == "ok") {
        th << "ok," << t["params"]["p_th"].get<double>() << ',' << t["errors"]["p_th"].get<double>() << ','
           << t["params"]["alpha"].get<double>() << ',' << t["errors"]["alpha"].get<double>() << ','
           << t["params"]["A"].get<double>() << ',' << t["params"]["B"].get<double>() << ','
           << t["params"]["C"].get<double>() << ',' << t["residual"].get<double>() << ','
           << t["points"].get<size_t>() << '\n';
    } else {
        th << "error: " << t["reason"].get<std::string>() << ",,,,,,,,,\n";
    }
    write_file(out_dir + "/threshold.csv", th.str());

    // Extrapolation table: simulated values plain, fitted values starred.
    std::optional<FitResult> fitted;
    if (fits["subthreshold"]["status"] == "ok") {
        const Json &p = fits["subthreshold"]["params"];
        fitted = subthreshold_params(p["A"].get<double>(), p["B"].get<double>(), p["C"].get<double>(),
                                     p["p_th"].get<double>());
    }
    std::ostringstream tab;
    tab << "code,overhead";
    for (double p : opts.table_p) tab << ',' << num(p);
    tab << '\n';
    auto cell = [&](const FitResult *fit, double n, const std::vector<LerPoint> *pts, double p) -> std::string {
        if (pts) {
            for (const auto &pt : *pts) {
                if (std::abs(pt.p - p) < 1e-12 && pt.failures > 0) return sci(pt.p_cycle());
            }
        }
        if (fit && p < fit->param("p_th")) return sci(extrapolate(*fit, p, n)) + "*";
        return "";
    };
    for (const auto &[code, pts] : by_code) {
        double n = static_cast<double>(pts.front().n), k = static_cast<double>(pts.front().k);
        tab << code << ',' << std::setprecision(3) << (k > 0 ? n / k : 0.0);
        for (double p : opts.table_p) tab << ',' << cell(fitted ? &*fitted : nullptr, n, &pts, p);
        tab << '\n';
    }
    for (const auto &pub : opts.published) {
        FitResult fit = subthreshold_params(pub.a, pub.b, pub.c, pub.p_th);
        tab << pub.code << ',' << std::setprecision(3) << (pub.k > 0 ? pub.n / pub.k : 0.0);
        for (double p : opts.table_p) tab << ',' << cell(&fit, pub.n, nullptr, p);
        tab << '\n';
    }
    write_file(out_dir + "/table.csv", tab.str());
}

std::vector<AuditResult> audit_single_faults(const ExperimentConfig &config, size_t point) {
    config.validate();
    CssCode code = build_code(config.code);
    FoldedNoise noise = config.noise.point(point);
    std::vector<AuditResult> out;
    for (Basis basis : config.schedule.bases) {
        NoisyCircuit circuit =
            build_memory_experiment(code, basis, config.schedule.rounds, config.schedule.cycles_per_round, noise);
        DetectorModel model = build_detector_model(circuit);
        WindowedDecoder decoder(model, config.schedule.rounds, config.schedule.cycles_per_round, config.decoder.bp,
                                config.decoder.osd, config.decoder.lookahead);
        AuditResult res;
        res.basis = basis;
        res.mechanisms = model.n_mechanisms();
        std::vector<uint8_t> bad(model.n_mechanisms(), 0);
        int64_t count = static_cast<int64_t>(model.n_mechanisms());
#pragma omp parallel for schedule(dynamic)
        for (int64_t m = 0; m < count; m++) {
            BitVec s(model.n_detectors, 0);
            for (uint32_t d : model.detectors(static_cast<size_t>(m))) s[d] = 1;
            BitVec o(model.n_observables, 0);
            for (uint32_t k : model.observables(static_cast<size_t>(m))) o[k] = 1;
            try {
                bad[static_cast<size_t>(m)] = decoder.decode(s).predicted_observables != o;
            } catch (const InfeasibleSyndrome &) {
                bad[static_cast<size_t>(m)] = 1;
            }
        }
        for (size_t m = 0; m < bad.size(); m++) {
            if (bad[m]) res.failing.push_back(m);
        }
        res.failures = res.failing.size();
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace bellq
