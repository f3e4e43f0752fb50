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

// bellq: command-line front end. Run `bellq --help` for subcommands.

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bellq/cli.h"
#include "bellq/distill.h"
#include "bellq/rng.h"
#include "json.hpp"

using namespace bellq;

namespace {

struct Common {
    std::string config;
    std::string out;
    int threads = 0;
};

ExperimentConfig load_config(const Common &c) {
    return c.config.empty() ? ExperimentConfig::from_yaml("") : ExperimentConfig::load(c.config);
}

void set_threads(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::vector<double> split_numbers(const std::string &s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"bellq: Bell-pair distillation with qLDPC codes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", common.config, "experiment config (YAML)");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "OpenMP threads (0: default)");
    };

    auto *tmpl = app.add_subcommand("template", "print the default config");
    add_common(tmpl);

    auto *build = app.add_subcommand("build-code", "construct a code and export its matrices");
    add_common(build);
    size_t dist_trials = 50;
    uint64_t dist_budget = 200'000'000;
    build->add_option("--distance-trials", dist_trials, "random restarts of the distance search");
    build->add_option("--budget", dist_budget, "node budget of the exact distance search");

    auto *sim = app.add_subcommand("simulate", "run the memory experiment sweep");
    add_common(sim);
    std::optional<uint64_t> seed;
    std::optional<size_t> shots;
    std::string basis = "";
    bool quiet = false;
    sim->add_option("--seed", seed, "override the master seed");
    sim->add_option("--shots", shots, "override the shot cap");
    sim->add_option("--basis", basis, "z, x or both")->check(CLI::IsMember({"z", "x", "both"}));
    sim->add_flag("--quiet", quiet, "no progress lines");

    auto *check = app.add_subcommand("decode-check", "decode every single-fault mechanism");
    add_common(check);
    size_t point = 0;
    check->add_option("--point", point, "index into noise.p_bell");
    check->add_option("--basis", basis, "z, x or both")->check(CLI::IsMember({"z", "x", "both"}));

    std::vector<std::string> inputs;
    FitRequest fit_req;
    auto add_fit_options = [&](CLI::App *sub) {
        sub->add_option("records", inputs, "result directories")->required();
        sub->add_option("--basis", fit_req.basis, "points to fit: z, x or zx")->check(CLI::IsMember({"z", "x", "zx"}));
        sub->add_option("--threshold-pmin", fit_req.threshold.p_min, "threshold fit mask");
        sub->add_option("--threshold-pmax", fit_req.threshold.p_max, "threshold fit mask");
        sub->add_option("--sub-pmin", fit_req.subthreshold.p_min, "subthreshold fit mask");
        sub->add_option("--sub-pmax", fit_req.subthreshold.p_max, "subthreshold fit mask");
    };
    auto *fit = app.add_subcommand("fit", "threshold and subthreshold fits");
    add_common(fit);
    bool force = false;
    add_fit_options(fit);
    fit->add_flag("--force", force, "accept records whose hash does not match");

    auto *report = app.add_subcommand("report", "tables, series and fits from result directories");
    add_common(report);
    add_fit_options(report);
    report->add_flag("--force", force, "accept mismatched hashes and schedules");
    std::vector<std::string> published;
    report->add_option("--published", published, "extra table row: name,n,k,A,B,C,p_th");

    auto *oracle = app.add_subcommand("oracle", "two-sided vs folded simulation of one QEC cycle");
    add_common(oracle);
    size_t oracle_shots = 100000;
    uint64_t oracle_seed = 1;
    std::vector<std::string> oracle_points{"0.05,0", "0.05,0.001", "0.10,0.001"};
    oracle->add_option("--shots", oracle_shots, "shots per point and side");
    oracle->add_option("--seed", oracle_seed, "master seed");
    oracle->add_option("--point", oracle_points, "two-sided p_bell,p_gate (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    set_threads(common.threads);

    try {
        if (*tmpl) {
            if (common.out.empty()) {
                std::cout << config_template();
            } else {
                write_text(common.out, config_template());
            }
            return kExitOk;
        }

        if (*build) {
            ExperimentConfig cfg = load_config(common);
            CssCode code = build_code(cfg.code);
            if (!code.distance.exact) {
                code.distance = estimate_min_distance(code, dist_trials, cfg.code.seed, dist_budget);
            }
            std::string dir = common.out.empty() ? cfg.output + "/code" : common.out;
            export_code(code, dir);
            std::cout << code.id() << (code.distance.exact ? " (exact distance)" : " (distance upper bound)") << "\n";
            return kExitOk;
        }

        if (*sim) {
            ExperimentConfig cfg = load_config(common);
            if (seed) cfg.seed = *seed;
            if (shots) cfg.shots.max = *shots;
            if (basis == "z") cfg.schedule.bases = {Basis::Z};
            if (basis == "x") cfg.schedule.bases = {Basis::X};
            if (basis == "both") cfg.schedule.bases = {Basis::Z, Basis::X};
            cfg.validate();
            std::string dir = common.out.empty() ? cfg.output : common.out;
            RunOptions opts;
            opts.quiet = quiet;
            auto points = run_experiment(cfg, dir, opts);
            std::cout << "wrote " << points.size() << " points to " << dir << "\n";
            return kExitOk;
        }

        if (*check) {
            ExperimentConfig cfg = load_config(common);
            if (basis == "z") cfg.schedule.bases = {Basis::Z};
            if (basis == "x") cfg.schedule.bases = {Basis::X};
            if (point >= cfg.noise.p_bell.size()) throw ConfigError("--point: out of range");
            auto results = audit_single_faults(cfg, point);
            nlohmann::ordered_json j = nlohmann::ordered_json::array();
            size_t total = 0;
            for (const auto &r : results) {
                std::cout << "basis " << basis_name(r.basis) << ": " << r.failures << " of " << r.mechanisms
                          << " single faults decode to a logical error\n";
                j.push_back({{"basis", basis_name(r.basis)},
                             {"mechanisms", r.mechanisms},
                             {"failures", r.failures},
                             {"failing", r.failing}});
                total += r.failures;
            }
            if (!common.out.empty()) {
                std::filesystem::create_directories(common.out);
                write_text(common.out + "/decode_check.json", j.dump(2) + "\n");
            }
            return total == 0 ? kExitOk : kExitFailure;
        }

        if (*fit || *report) {
            std::vector<ResultsRecord> records;
            for (const auto &dir : inputs) records.push_back(load_record(dir));
            std::string dir = common.out.empty() ? "report" : common.out;
            if (*fit) {
                std::vector<LerPoint> all;
                for (const auto &r : records) {
                    if (!r.hash_ok() && !force) throw ConfigError(r.dir + ": config hash mismatch (use --force)");
                    all.insert(all.end(), r.points.begin(), r.points.end());
                }
                std::filesystem::create_directories(dir);
                write_text(dir + "/fits.json", fits_json(all, fit_req));
                std::cout << "wrote " << dir << "/fits.json\n";
                return kExitOk;
            }
            ReportOptions opts;
            opts.force = force;
            opts.fit = fit_req;
            for (const auto &p : published) {
                auto comma = p.find(',');
                if (comma == std::string::npos) throw ConfigError("--published: expected name,n,k,A,B,C,p_th");
                auto v = split_numbers(p.substr(comma + 1));
                if (v.size() != 6) throw ConfigError("--published: expected name,n,k,A,B,C,p_th");
                opts.published.push_back({p.substr(0, comma), v[0], v[1], v[2], v[3], v[4], v[5]});
            }
            write_report(records, dir, opts);
            std::cout << "wrote report to " << dir << "\n";
            return kExitOk;
        }

        if (*oracle) {
            ExperimentConfig cfg = load_config(common);
            if (common.config.empty()) {
                cfg.code.family = "repetition";
                cfg.code.size = 3;
            }
            CssCode code = build_code(cfg.code);
            nlohmann::ordered_json out;
            out["code"] = code.id();
            out["shots"] = oracle_shots;
            out["seed"] = oracle_seed;
            out["points"] = nlohmann::ordered_json::array();
            bool all_ok = true;
            uint64_t stream = 0;
            for (const auto &spec : oracle_points) {
                auto v = split_numbers(spec);
                if (v.size() != 2) throw ConfigError("--point: expected p_bell,p_gate");
                FoldedNoise noise;
                try {
                    noise = FoldedNoise::from_two_sided(v[0], v[1]);
                } catch (const std::invalid_argument &e) {
                    throw ConfigError(e.what());
                }
                for (Basis b : cfg.schedule.bases) {
                    OracleResult two = two_sided_oracle(code, noise, b, oracle_shots, derive_seed(oracle_seed, stream++));
                    OracleResult one = folded_oracle(code, noise, b, oracle_shots, derive_seed(oracle_seed, stream++));
                    double se = std::hypot(two.standard_error(), one.standard_error());
                    double z = se > 0 ? (two.rate() - one.rate()) / se : 0.0;
                    bool ok = std::abs(z) <= 3;
                    all_ok = all_ok && ok;
                    std::cout << "p_bell=" << v[0] << " p_gate=" << v[1] << " basis " << basis_name(b)
                              << ": two-sided " << two.rate() << " folded " << one.rate() << " z=" << z
                              << (ok ? "" : "  DISAGREE") << "\n";
                    out["points"].push_back({{"p_bell", v[0]},
                                             {"p_gate", v[1]},
                                             {"p_bell_eff", noise.p_bell_eff},
                                             {"p_gate_eff", noise.p_gate_eff},
                                             {"basis", basis_name(b)},
                                             {"two_sided_failures", two.failures},
                                             {"folded_failures", one.failures},
                                             {"two_sided_rate", two.rate()},
                                             {"folded_rate", one.rate()},
                                             {"z", z},
                                             {"agree", ok}});
                }
            }
            if (!common.out.empty()) {
                std::filesystem::create_directories(common.out);
                write_text(common.out + "/oracle.json", out.dump(2) + "\n");
            }
            return all_ok ? kExitOk : kExitFailure;
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleRun &e) {
        std::cerr << "infeasible syndrome: " << e.what() << "\nbatch written to " << e.dump << "\n";
        return kExitInfeasible;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
