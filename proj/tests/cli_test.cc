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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bellq/cli.h"

using namespace bellq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Repetition-product code, one short round, small shot budget.
ExperimentConfig small_config() {
    return ExperimentConfig::from_yaml(R"(
code: {family: repetition, size: 3}
noise: {p_bell: [0.0, 0.05], p_gate: 0.002}
schedule: {rounds: 2, cycles_per_round: 3, bases: [z, x]}
shots: {max: 300, block: 100, target_rel_stderr: 0}
seed: 9
)");
}

fs::path fresh_dir(const std::string &name) {
    fs::path d = fs::path(testing::TempDir()) / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST(Config, TemplateIsDefault) {
    auto a = ExperimentConfig::from_yaml(config_template());
    auto b = ExperimentConfig::from_yaml("");
    EXPECT_EQ(a.to_yaml(), b.to_yaml());
}

TEST(Config, CanonicalRoundTrip) {
    auto c = small_config();
    std::string text = c.to_yaml();
    EXPECT_EQ(ExperimentConfig::from_yaml(text).to_yaml(), text);
    EXPECT_EQ(fnv1a_hex(text).size(), 16u);
    EXPECT_NE(fnv1a_hex(text), fnv1a_hex(ExperimentConfig::from_yaml("").to_yaml()));
}

TEST(Config, Fnv1a) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, Rejections) {
    const char *bad[] = {
        "code: {familly: hgp}",
        "noise: {p_bell: [1.5]}",
        "noise: {p_gate: -0.1}",
        "shots: {max: 0}",
        "schedule: {bases: [y]}",
        "noise: {mode: sometimes}",
        "code: {family: lp}",
        "decoder: {bp: {damping: 1.0}}",
        "schedule: [",
    };
    for (const char *text : bad) EXPECT_THROW(ExperimentConfig::from_yaml(text), ConfigError) << text;
}

TEST(Config, UnifiedSweep) {
    auto c = ExperimentConfig::from_yaml("noise: {mode: unified, folded: false, p_bell: [0.05], ratio: 50}");
    auto n = c.noise.point(0);
    EXPECT_DOUBLE_EQ(n.p_gate, 0.001);
    EXPECT_DOUBLE_EQ(n.p_gate_eff, 0.002);
    EXPECT_NEAR(n.p_bell_eff, 0.0966666666666667, 1e-15);
}

TEST(Run, ZeroNoise) {
    auto cfg = small_config();
    cfg.noise.p_bell = {0.0};
    cfg.noise.p_gate = 0;
    RunOptions quiet;
    quiet.quiet = true;
    auto pts = run_experiment(cfg, fresh_dir("zero").string(), quiet);
    ASSERT_EQ(pts.size(), 3u);
    for (const auto &p : pts) {
        EXPECT_EQ(p.shots, p.basis == "zx" ? 600u : 300u);
        EXPECT_EQ(p.failures, 0u);
        EXPECT_EQ(p.p_block_total, 0);
    }
}

TEST(Run, Determinism) {
    auto cfg = small_config();
    auto d1 = fresh_dir("run1"), d2 = fresh_dir("run2");
    RunOptions quiet;
    quiet.quiet = true;
    auto pts = run_experiment(cfg, d1.string(), quiet);
    run_experiment(cfg, d2.string(), quiet);
    ASSERT_EQ(pts.size(), 6u);  // 2 points x (z, x, zx)
    for (const auto &p : pts) EXPECT_EQ(p.cycles, 6u);
    EXPECT_EQ(slurp(d1 / "results.csv"), slurp(d2 / "results.csv"));
    EXPECT_EQ(slurp(d1 / "manifest.json"), slurp(d2 / "manifest.json"));

    auto rec = load_record(d1.string());
    EXPECT_TRUE(rec.hash_ok());
    EXPECT_EQ(rec.config_text, cfg.to_yaml());
    EXPECT_EQ(rec.points.size(), pts.size());
    EXPECT_EQ(rec.cycles, 6u);
}

TEST(Report, RefusesMismatchedHash) {
    auto cfg = small_config();
    auto d = fresh_dir("tampered");
    RunOptions quiet;
    quiet.quiet = true;
    run_experiment(cfg, d.string(), quiet);
    auto rec = load_record(d.string());
    rec.config_text += "# edited\n";
    EXPECT_FALSE(rec.hash_ok());
    auto out = fresh_dir("report");
    EXPECT_THROW(write_report({rec}, out.string(), ReportOptions{}), ConfigError);
    ReportOptions force;
    force.force = true;
    write_report({rec}, out.string(), force);
    EXPECT_TRUE(fs::exists(out / "per_cycle.csv"));
    EXPECT_TRUE(fs::exists(out / "fits.json"));
    EXPECT_TRUE(fs::exists(out / "table.csv"));
}

TEST(Report, RefusesMixedSchedules) {
    auto a = small_config();
    auto b = small_config();
    b.schedule.rounds = 1;
    auto da = fresh_dir("mix_a"), db = fresh_dir("mix_b");
    RunOptions quiet;
    quiet.quiet = true;
    run_experiment(a, da.string(), quiet);
    run_experiment(b, db.string(), quiet);
    EXPECT_THROW(write_report({load_record(da.string()), load_record(db.string())}, fresh_dir("mix").string(), ReportOptions{}),
                 ConfigError);
}

TEST(Report, PublishedRowsInTable) {
    auto d = fresh_dir("pub");
    RunOptions quiet;
    quiet.quiet = true;
    run_experiment(small_config(), d.string(), quiet);
    ReportOptions opts;
    opts.published.push_back({"sc-5800-1624", 5800, 1624, 0.26, 0.26, 0.44, 0.087});
    auto out = fresh_dir("pub_report");
    write_report({load_record(d.string())}, out.string(), opts);
    std::string table = slurp(out / "table.csv");
    EXPECT_NE(table.find("sc-5800-1624"), std::string::npos);
    EXPECT_NE(table.find("2.26e-12*"), std::string::npos) << table;
}

TEST(Audit, RepetitionSingleFaults) {
    auto cfg = small_config();
    cfg.noise.p_bell = {0.001};
    cfg.noise.p_gate = 0.001;
    for (const auto &r : audit_single_faults(cfg)) {
        EXPECT_GT(r.mechanisms, 0u);
        EXPECT_EQ(r.failures, 0u);
    }
}

TEST(BuildCode, Families) {
    CodeSpec s;
    s.family = "toric";
    s.size = 3;
    auto t = build_code(s);
    EXPECT_EQ(t.n, 18u);
    EXPECT_EQ(t.k, 2u);
    s.family = "repetition";
    EXPECT_EQ(build_code(s).n, 13u);
    s.family = "lp";
    s.base = std::string(BELLQ_DATA_DIR) + "/lp_b1.txt";
    auto l = build_code(s);
    EXPECT_EQ(l.n, 544u);
    EXPECT_EQ(l.k, 80u);
    s.base = "/nonexistent";
    EXPECT_THROW(build_code(s), std::exception);
    s.family = "sc";
    s.size = 4;
    s.components = std::string(BELLQ_DATA_DIR) + "/sc_toric.yaml";
    auto sc = build_code(s);
    EXPECT_EQ(sc.n, 32u);
    EXPECT_EQ(sc.k, 2u);
    s.components = "/nonexistent.yaml";
    EXPECT_THROW(build_code(s), std::exception);
}
