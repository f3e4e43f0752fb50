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

#include <cmath>
#include <random>
#include <sstream>

#include "bellq/analysis.h"

using namespace bellq;

namespace {

LerPoint synthetic(double p, double d, double n, double y, double rel_err) {
    LerPoint pt;
    pt.code = "syn";
    pt.n = static_cast<size_t>(n);
    pt.distance = d;
    pt.p = p;
    pt.basis = "zx";
    pt.cycles = 1;
    pt.shots = 100000;
    pt.p_block_total = y;
    pt.std_error = rel_err * y;
    return pt;
}

std::vector<LerPoint> threshold_data(double noise, uint64_t seed) {
    const double a = 0.05, b = 0.1, c = 0.05, pth = 0.10, alpha = 1.5;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<LerPoint> pts;
    for (double d : {4.0, 6.0, 8.0})
        for (double p = 0.08; p <= 0.1201; p += 0.005) {
            double x = (p - pth) * std::pow(d, alpha);
            double y = a + b * x + c * x * x;
            pts.push_back(synthetic(p, d, 0, y * (1 + noise * gauss(rng)), std::max(noise, 1e-3)));
        }
    return pts;
}

std::vector<LerPoint> subthreshold_data(double noise, uint64_t seed) {
    const double a = 0.26, b = 0.26, c = 0.44, pth = 0.087;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<LerPoint> pts;
    for (double n : {400.0, 1000.0, 2000.0})
        for (double p : {0.03, 0.04, 0.05, 0.06, 0.07}) {
            double y = a * std::pow(p / pth, b * std::pow(n, c));
            pts.push_back(synthetic(p, 0, n, y * (1 + noise * gauss(rng)), std::max(noise, 1e-3)));
        }
    return pts;
}

}  // namespace

TEST(Estimate, Binomial) {
    auto e = estimate_ler(10000, 0);
    EXPECT_EQ(e.p, 0);
    EXPECT_EQ(e.std_error, 0);
    e = estimate_ler(100, 50);
    EXPECT_NEAR(e.p, 0.5, 1e-15);
    EXPECT_NEAR(e.std_error, 0.05, 1e-15);
    e = estimate_ler(10000, 42);
    EXPECT_NEAR(e.p, 0.0042, 1e-15);
    EXPECT_NEAR(e.std_error, 6.46711682281989e-4, 1e-15);
}

TEST(PerCycle, Values) {
    EXPECT_EQ(per_cycle(0, 42), 0);
    EXPECT_DOUBLE_EQ(per_cycle(0.3, 1), 0.3);
    // 1 - 0.58^(1/42) evaluated with 40-digit arithmetic.
    EXPECT_NEAR(per_cycle(0.42, 42), 0.0128859505995702, 1e-15);
}

TEST(PerCycle, InverseAndMonotone) {
    double prev = -1;
    for (double p = 0.0; p < 0.999; p += 0.0123) {
        double q = per_cycle(p, 42);
        EXPECT_GT(q, prev);
        prev = q;
        EXPECT_NEAR(1 - std::pow(1 - q, 42), p, 1e-12);
    }
}

TEST(Combine, Values) {
    EXPECT_EQ(combine_bases(0, 0), 0);
    EXPECT_DOUBLE_EQ(combine_bases(0.07, 0), 0.07);
    EXPECT_NEAR(combine_bases(0.01, 0.02), 0.0298, 1e-15);
}

TEST(Combine, Points) {
    auto z = make_point("c", 13, 1, 3, 0.1, 0.002, "z", 42, 1000, 100);
    auto x = make_point("c", 13, 1, 3, 0.1, 0.002, "x", 42, 1000, 200);
    auto zx = combine_points(z, x);
    EXPECT_EQ(zx.basis, "zx");
    EXPECT_NEAR(zx.p_block_total, combine_bases(0.1, 0.2), 1e-15);
    EXPECT_GT(zx.std_error, 0);
}

TEST(FitThreshold, NoiseFree) {
    auto fit = fit_threshold(threshold_data(0, 1));
    const double want[] = {0.05, 0.1, 0.05, 0.10, 1.5};
    const char *names[] = {"A", "B", "C", "p_th", "alpha"};
    for (int i = 0; i < 5; i++) EXPECT_NEAR(fit.param(names[i]), want[i], 1e-6 * std::abs(want[i])) << names[i];
}

TEST(FitThreshold, OnePercentNoise) {
    auto fit = fit_threshold(threshold_data(0.01, 2));
    EXPECT_NEAR(fit.param("p_th"), 0.10, 0.005);
    EXPECT_GT(fit.error("p_th"), 0);
}

TEST(FitThreshold, Deterministic) {
    auto pts = threshold_data(0.01, 3);
    auto a = fit_threshold(pts), b = fit_threshold(pts);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.residual, b.residual);
}

TEST(FitThreshold, Errors) {
    auto pts = threshold_data(0, 1);
    std::vector<LerPoint> two;
    for (const auto &p : pts)
        if (p.distance < 8) two.push_back(p);
    EXPECT_THROW(fit_threshold(two), FitError);
    FitMask narrow{0.099, 0.106};
    EXPECT_THROW(fit_threshold(pts, narrow), FitError);
}

TEST(FitSubthreshold, Recovers) {
    const double want[] = {0.26, 0.26, 0.44, 0.087};
    const char *names[] = {"A", "B", "C", "p_th"};
    auto exact = fit_subthreshold(subthreshold_data(0, 1));
    for (int i = 0; i < 4; i++) EXPECT_NEAR(exact.param(names[i]), want[i], 1e-6 * want[i]) << names[i];
    auto noisy = fit_subthreshold(subthreshold_data(0.01, 5));
    for (int i = 0; i < 4; i++) EXPECT_NEAR(noisy.param(names[i]), want[i], 0.1 * want[i]) << names[i];
}

TEST(Extrapolate, HandEvaluation) {
    auto fit = subthreshold_params(0.26, 0.26, 0.44, 0.087);
    double hand = 0.26 * std::pow(0.01 / 0.087, 0.26 * std::pow(5800.0, 0.44));
    EXPECT_NEAR(extrapolate(fit, 0.01, 5800), hand, 1e-12 * hand);
    EXPECT_DOUBLE_EQ(extrapolate(fit, 0.087, 5800), 0.26);
    EXPECT_THROW(extrapolate(fit, 0.09, 5800), std::domain_error);
}

TEST(ResultsCsv, RoundTrip) {
    std::vector<LerPoint> pts{make_point("hgp-225-9", 225, 9, 4, 0.1, 0.002, "z", 42, 1000, 73),
                              make_point("hgp-225-9", 225, 9, 4, 0.1, 0.002, "x", 42, 1000, 81)};
    pts.push_back(combine_points(pts[0], pts[1]));
    std::stringstream ss;
    write_results_csv(ss, pts);
    auto back = read_results_csv(ss);
    ASSERT_EQ(back.size(), 3u);
    for (size_t i = 0; i < 3; i++) {
        EXPECT_EQ(back[i].code, pts[i].code);
        EXPECT_EQ(back[i].basis, pts[i].basis);
        EXPECT_EQ(back[i].failures, pts[i].failures);
        EXPECT_EQ(back[i].shots, pts[i].shots);
        EXPECT_DOUBLE_EQ(back[i].p_block_total, pts[i].p_block_total);
        EXPECT_DOUBLE_EQ(back[i].p_cycle(), pts[i].p_cycle());
    }
}
