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

#ifndef BELLQ_ANALYSIS_H
#define BELLQ_ANALYSIS_H

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellq {

/// One simulated point of a logical-error-rate curve.
struct LerPoint {
    std::string code;
    size_t n = 0;
    size_t k = 0;
    /// Grouping distance for threshold fits.
    double distance = 0;
    double p = 0;  // swept parameter
    double p_gate = 0;
    std::string basis;  // "z", "x" or "zx" (combined)
    size_t cycles = 1;
    size_t shots = 0;
    size_t failures = 0;
    double p_block_total = 0;
    double std_error = 0;

    double p_cycle() const;
    /// Standard error of p_cycle by first-order propagation.
    double p_cycle_error() const;
};

struct LerEstimate {
    double p = 0;
    double std_error = 0;
};

/// Binomial estimate failures / shots with sqrt(p (1 - p) / N).
LerEstimate estimate_ler(size_t shots, size_t failures);

/// 1 - (1 - p_total)^(1 / cycles).
double per_cycle(double p_total, size_t cycles);

/// 1 - (1 - p_z)(1 - p_x), treating the two bases as independent.
double combine_bases(double p_z, double p_x);

/// Combines a Z-basis and an X-basis point of the same code and p.
LerPoint combine_points(const LerPoint &z, const LerPoint &x);

LerPoint make_point(
    const std::string &code, size_t n, size_t k, double distance, double p, double p_gate, const std::string &basis,
    size_t cycles, size_t shots, size_t failures);

class FitError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> params;
    std::vector<std::vector<double>> covariance;
    /// Weighted sum of squared residuals at the optimum.
    double residual = 0;
    size_t points = 0;
    size_t iterations = 0;

    double param(const std::string &name) const;
    double error(const std::string &name) const;
};

/// Points outside [p_min, p_max] are ignored; used to drop the error floor.
struct FitMask {
    double p_min = 0;
    double p_max = 1;
    bool contains(double p) const { return p >= p_min && p <= p_max; }
};

/// Weighted least squares of p_cycle = A + B x + C x^2 with
/// x = (p - p_th) d^alpha over points grouped by `distance`.
/// Parameters: A, B, C, p_th, alpha.
FitResult fit_threshold(const std::vector<LerPoint> &points, const FitMask &mask = {});

/// Least squares in log space of p_cycle = A (p / p_th)^(B n^C).
/// Parameters: A, B, C, p_th.
FitResult fit_subthreshold(const std::vector<LerPoint> &points, const FitMask &mask = {});

/// Threshold ansatz at (p, d).
double threshold_model(const FitResult &fit, double p, double d);

/// A subthreshold fit holding given parameters, e.g. published ones.
FitResult subthreshold_params(double a, double b, double c, double p_th);

/// Subthreshold ansatz at (p, n); throws std::domain_error for p > p_th.
double extrapolate(const FitResult &fit, double p, double n);

/// Results table: one header line, then one point per line.
void write_results_csv(std::ostream &out, const std::vector<LerPoint> &points);
std::vector<LerPoint> read_results_csv(std::istream &in);

}  // namespace bellq

#endif
