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

#ifndef BELLQ_CLI_H
#define BELLQ_CLI_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellq/analysis.h"
#include "bellq/circuit.h"
#include "bellq/codes.h"
#include "bellq/decoder.h"
#include "bellq/noise.h"

namespace bellq {

inline constexpr const char *kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitInfeasible = 3,
};

class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct CodeSpec {
    std::string family = "hgp";  // hgp, lp, toric, sc, repetition, files
    size_t bits = 12;            // hgp: classical length
    size_t trials = 1000;        // hgp: Tanner graphs tried
    uint64_t seed = 2;           // hgp: sampler seed
    std::string base;            // lp: base matrix file
    std::string components;      // sc: component file
    size_t size = 3;             // toric / repetition: d or L; sc: coupling length
    std::string hx;              // files
    std::string hz;
    double distance = 0;  // threshold grouping; 0 takes the construction's value
};

struct NoiseSpec {
    std::string mode = "fixed";  // fixed or unified
    bool folded = true;          // values are already single-sided
    std::vector<double> p_bell{0.08, 0.10, 0.12};
    double p_gate = 0.002;
    double ratio = 50;  // unified: p_gate = p / ratio
    double p_meas = 0;

    /// Effective noise of the i-th swept point.
    FoldedNoise point(size_t i) const;
};

struct ScheduleSpec {
    size_t rounds = 14;
    size_t cycles_per_round = 3;
    std::vector<Basis> bases{Basis::Z, Basis::X};
    size_t cycles() const { return rounds * cycles_per_round; }
};

struct DecoderSpec {
    BpConfig bp;
    OsdConfig osd;
    size_t lookahead = 1;
};

struct ShotSpec {
    size_t max = 100000;
    size_t block = 1024;
    double target_rel_stderr = 0.1;
};

struct ExperimentConfig {
    CodeSpec code;
    NoiseSpec noise;
    ScheduleSpec schedule;
    DecoderSpec decoder;
    ShotSpec shots;
    std::string sampler = "model";  // model or circuit
    uint64_t seed = 1;
    std::string output = "results";

    /// Parses and validates; throws ConfigError.
    static ExperimentConfig from_yaml(const std::string &text);
    static ExperimentConfig load(const std::string &path);
    /// Canonical text: every key, fixed order. Round-trips through from_yaml.
    std::string to_yaml() const;
    void validate() const;
};

/// The default configuration as commented YAML.
std::string config_template();

/// "z" or "x".
std::string basis_name(Basis b);

/// FNV-1a over the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string &text);

CssCode build_code(const CodeSpec &spec);

/// Grouping distance recorded with each point.
double grouping_distance(const CodeSpec &spec, const CssCode &code);

struct RunOptions {
    int threads = 0;  // 0 keeps the OpenMP default
    bool quiet = false;
};

/// Thrown when decoding hits an infeasible syndrome; `dump` names the
/// file holding the offending batch.
class InfeasibleRun : public std::runtime_error {
   public:
    InfeasibleRun(const std::string &what, std::string dump) : std::runtime_error(what), dump(std::move(dump)) {}
    std::string dump;
};

/// Builds the code, circuits and detector models, samples until the
/// error bar target or the shot cap, and writes results.csv and
/// manifest.json into `out_dir`. Points for both bases are followed by
/// their combination (basis "zx").
std::vector<LerPoint> run_experiment(const ExperimentConfig &config, const std::string &out_dir,
                                     const RunOptions &opts = {});

struct ResultsRecord {
    std::string dir;
    std::string config_text;
    std::string config_hash;
    std::vector<LerPoint> points;
    size_t cycles = 0;

    /// Whether config_hash matches the embedded config text.
    bool hash_ok() const { return fnv1a_hex(config_text) == config_hash; }
};

ResultsRecord load_record(const std::string &dir);

struct FitRequest {
    FitMask threshold;     // drops the error floor
    FitMask subthreshold;  // keeps points below threshold
    std::string basis = "zx";  // which points enter the fits
};

/// Threshold and subthreshold fits over the pooled points, as JSON text.
/// A fit that cannot run is reported with its reason.
std::string fits_json(const std::vector<LerPoint> &points, const FitRequest &req);

/// A subthreshold parameter set applied to one code, for the table.
struct PublishedFit {
    std::string code;
    double n = 0;
    double k = 0;
    double a = 0, b = 0, c = 0, p_th = 0;
};

struct ReportOptions {
    bool force = false;
    FitRequest fit;
    std::vector<double> table_p{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
    std::vector<PublishedFit> published;
};

/// Writes per_cycle.csv, series/<code>.dat, threshold.csv, table.csv and
/// fits.json. Throws ConfigError for hash mismatches or mixed schedules
/// unless forced.
void write_report(const std::vector<ResultsRecord> &records, const std::string &out_dir, const ReportOptions &opts);

/// Decodes every single-fault mechanism of both memory experiments and
/// counts logical failures.
struct AuditResult {
    Basis basis = Basis::Z;
    size_t mechanisms = 0;
    size_t failures = 0;
    std::vector<size_t> failing;
};
std::vector<AuditResult> audit_single_faults(const ExperimentConfig &config, size_t point = 0);

}  // namespace bellq

#endif
