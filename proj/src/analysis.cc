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

#include "bellq/analysis.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace bellq {

LerEstimate estimate_ler(size_t shots, size_t failures) {
    if (shots == 0) {
        throw std::invalid_argument("estimate_ler: shots must be >= 1");
    }
    if (failures > shots) {
        throw std::invalid_argument("estimate_ler: failures exceed shots");
    }
    double p = static_cast<double>(failures) / static_cast<double>(shots);
    return {p, std::sqrt(p * (1 - p) / static_cast<double>(shots))};
}

double per_cycle(double p_total, size_t cycles) {
    if (!(p_total >= 0 && p_total <= 1) || cycles < 1) {
        throw std::invalid_argument("per_cycle: need 0 <= p <= 1 and cycles >= 1");
    }
    if (cycles == 1) return p_total;
    // 1 - exp(log1p(-p) / c) keeps precision for small p.
    return -std::expm1(std::log1p(-p_total) / static_cast<double>(cycles));
}

double combine_bases(double p_z, double p_x) {
    if (!(p_z >= 0 && p_z <= 1) || !(p_x >= 0 && p_x <= 1)) {
        throw std::invalid_argument("combine_bases: inputs must lie in [0, 1]");
    }
    return 1 - (1 - p_z) * (1 - p_x);
}

double LerPoint::p_cycle() const {
    return per_cycle(p_block_total, cycles);
}

double LerPoint::p_cycle_error() const {
    if (p_block_total >= 1) return std_error / static_cast<double>(cycles);
    double c = static_cast<double>(cycles);
    return std_error / c * std::pow(1 - p_block_total, 1 / c - 1);
}

LerPoint make_point(
    const std::string &code, size_t n, size_t k, double distance, double p, double p_gate, const std::string &basis,
    size_t cycles, size_t shots, size_t failures) {
    LerPoint pt;
    pt.code = code;
    pt.n = n;
    pt.k = k;
    pt.distance = distance;
    pt.p = p;
    pt.p_gate = p_gate;
    pt.basis = basis;
    pt.cycles = cycles;
    pt.shots = shots;
    pt.failures = failures;
    LerEstimate e = estimate_ler(shots, failures);
    pt.p_block_total = e.p;
    pt.std_error = e.std_error;
    return pt;
}

LerPoint combine_points(const LerPoint &z, const LerPoint &x) {
    if (z.code != x.code || z.p != x.p || z.cycles != x.cycles) {
        throw std::invalid_argument("combine_points: points differ in code, p or cycles");
    }
    LerPoint c = z;
    c.basis = "zx";
    // Counts are pooled for the record; the estimate comes from the product rule.
    c.shots = z.shots + x.shots;
    c.failures = z.failures + x.failures;
    c.p_block_total = combine_bases(z.p_block_total, x.p_block_total);
    double a = (1 - x.p_block_total) * z.std_error;
    double b = (1 - z.p_block_total) * x.std_error;
    c.std_error = std::sqrt(a * a + b * b);
    return c;
}

double FitResult::param(const std::string &name) const {
    for (size_t i = 0; i < names.size(); i++) {
        if (names[i] == name) return params[i];
    }
    throw std::out_of_range("fit has no parameter " + name);
}

double FitResult::error(const std::string &name) const {
    for (size_t i = 0; i < names.size(); i++) {
        if (names[i] == name) return covariance.empty() ? 0.0 : std::sqrt(std::max(0.0, covariance[i][i]));
    }
    throw std::out_of_range("fit has no parameter " + name);
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Fills weighted residuals r and Jacobian J at theta; returns false if the
/// model is undefined there.
using Residuals = std::function<bool(const Vec &theta, Vec &r, Mat &j)>;

struct LmOutcome {
    Vec theta;
    double cost = INFINITY;
    Mat jtj;
    size_t iterations = 0;
};

LmOutcome levenberg_marquardt(const Residuals &f, Vec theta, size_t max_iter = 500) {
    Vec r;
    Mat j;
    LmOutcome out;
    if (!f(theta, r, j) || !r.allFinite()) return out;
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    size_t iter = 0;
    for (; iter < max_iter; iter++) {
        Mat a = j.transpose() * j;
        Vec g = j.transpose() * r;
        bool improved = false;
        while (lambda < 1e12) {
            Mat damped = a;
            for (Eigen::Index i = 0; i < a.rows(); i++) damped(i, i) += lambda * std::max(a(i, i), 1e-12);
            Vec step = damped.ldlt().solve(-g);
            Vec trial = theta + step;
            Vec tr;
            Mat tj;
            if (step.allFinite() && f(trial, tr, tj) && tr.allFinite()) {
                double tc = tr.squaredNorm();
                if (tc < cost) {
                    double drop = cost - tc;
                    theta = trial;
                    r = tr;
                    j = tj;
                    cost = tc;
                    lambda = std::max(lambda / 3, 1e-12);
                    improved = true;
                    if (drop <= 1e-15 * std::max(cost, 1e-300) || step.norm() <= 1e-14 * (theta.norm() + 1e-14)) {
                        iter = max_iter;
                    }
                    break;
                }
            }
            lambda *= 4;
        }
        if (!improved) break;
    }
    out.theta = theta;
    out.cost = cost;
    out.jtj = j.transpose() * j;
    out.iterations = iter;
    return out;
}

FitResult finish(
    const LmOutcome &lm, std::vector<std::string> names, std::vector<double> params, size_t npts,
    const Mat &to_params) {
    FitResult fit;
    fit.names = std::move(names);
    fit.params = std::move(params);
    fit.residual = lm.cost;
    fit.points = npts;
    fit.iterations = lm.iterations;
    size_t np = fit.params.size();
    Eigen::FullPivLU<Mat> lu(lm.jtj);
    if (lu.isInvertible()) {
        double dof = npts > np ? static_cast<double>(npts - np) : 1.0;
        // Covariance scaled by the reduced chi-square, then mapped through the
        // Jacobian of the parameter transform.
        Mat cov = lu.inverse() * (lm.cost / dof);
        Mat out = to_params * cov * to_params.transpose();
        fit.covariance.assign(np, std::vector<double>(np));
        for (size_t a = 0; a < np; a++) {
            for (size_t b = 0; b < np; b++) fit.covariance[a][b] = out(a, b);
        }
    }
    return fit;
}

double sigma_of(const LerPoint &pt) {
    double s = pt.p_cycle_error();
    if (s > 0) return s;
    // No spread observed (0 or all failures): one-failure scale.
    return per_cycle(1.0 / static_cast<double>(std::max<size_t>(pt.shots, 1)), pt.cycles);
}

/// Linear interpolation crossing of two curves on their common p range.
double crossing_guess(const std::vector<LerPoint> &lo, const std::vector<LerPoint> &hi) {
    auto interp = [](const std::vector<LerPoint> &c, double p) {
        for (size_t i = 0; i + 1 < c.size(); i++) {
            if (p >= c[i].p && p <= c[i + 1].p) {
                double t = (p - c[i].p) / (c[i + 1].p - c[i].p);
                return c[i].p_cycle() + t * (c[i + 1].p_cycle() - c[i].p_cycle());
            }
        }
        return c.front().p_cycle();
    };
    std::vector<double> ps;
    for (const auto &pt : lo) ps.push_back(pt.p);
    for (const auto &pt : hi) ps.push_back(pt.p);
    std::sort(ps.begin(), ps.end());
    double a = std::max(lo.front().p, hi.front().p);
    double b = std::min(lo.back().p, hi.back().p);
    double prev_p = NAN, prev_diff = NAN;
    for (double p : ps) {
        if (p < a || p > b) continue;
        double diff = interp(hi, p) - interp(lo, p);
        if (!std::isnan(prev_diff) && prev_diff * diff <= 0 && diff != prev_diff) {
            return prev_p + (p - prev_p) * prev_diff / (prev_diff - diff);
        }
        prev_p = p;
        prev_diff = diff;
    }
    return ps[ps.size() / 2];
}

}  // namespace

double threshold_model(const FitResult &fit, double p, double d) {
    double x = (p - fit.param("p_th")) * std::pow(d, fit.param("alpha"));
    return fit.param("A") + fit.param("B") * x + fit.param("C") * x * x;
}

FitResult fit_threshold(const std::vector<LerPoint> &points, const FitMask &mask) {
    std::map<double, std::vector<LerPoint>> groups;
    for (const LerPoint &pt : points) {
        if (mask.contains(pt.p)) groups[pt.distance].push_back(pt);
    }
    if (groups.size() < 3) {
        throw FitError("fit_threshold: need at least 3 code distances");
    }
    std::vector<double> ps, ds, ys, ws;
    for (auto &[d, g] : groups) {
        if (d <= 0) throw FitError("fit_threshold: distances must be positive");
        std::sort(g.begin(), g.end(), [](const LerPoint &a, const LerPoint &b) { return a.p < b.p; });
        if (g.size() < 3) throw FitError("fit_threshold: need at least 3 p values per distance");
        for (const LerPoint &pt : g) {
            ps.push_back(pt.p);
            ds.push_back(d);
            ys.push_back(pt.p_cycle());
            ws.push_back(1 / sigma_of(pt));
        }
    }
    size_t npts = ps.size();
    Residuals f = [&](const Vec &t, Vec &r, Mat &j) {
        r.resize(static_cast<Eigen::Index>(npts));
        j.resize(static_cast<Eigen::Index>(npts), 5);
        for (size_t i = 0; i < npts; i++) {
            double da = std::pow(ds[i], t[4]);
            double x = (ps[i] - t[3]) * da;
            double y = t[0] + t[1] * x + t[2] * x * x;
            double dydx = t[1] + 2 * t[2] * x;
            auto row = static_cast<Eigen::Index>(i);
            r[row] = (y - ys[i]) * ws[i];
            j(row, 0) = ws[i];
            j(row, 1) = x * ws[i];
            j(row, 2) = x * x * ws[i];
            j(row, 3) = -dydx * da * ws[i];
            j(row, 4) = dydx * x * std::log(ds[i]) * ws[i];
        }
        return true;
    };
    // A, B, C enter linearly; solve them exactly for a given (p_th, alpha).
    auto start = [&](double pth, double alpha) {
        Mat a(static_cast<Eigen::Index>(npts), 3);
        Vec b(static_cast<Eigen::Index>(npts));
        for (size_t i = 0; i < npts; i++) {
            double x = (ps[i] - pth) * std::pow(ds[i], alpha);
            auto row = static_cast<Eigen::Index>(i);
            a(row, 0) = ws[i];
            a(row, 1) = x * ws[i];
            a(row, 2) = x * x * ws[i];
            b[row] = ys[i] * ws[i];
        }
        Vec abc = a.colPivHouseholderQr().solve(b);
        Vec t(5);
        t << abc[0], abc[1], abc[2], pth, alpha;
        return t;
    };
    auto last = std::prev(groups.end());
    double pth0 = crossing_guess(std::prev(last)->second, last->second);
    LmOutcome best = levenberg_marquardt(f, start(pth0, 1.0));
    double dof = npts > 5 ? static_cast<double>(npts - 5) : 1.0;
    if (!(best.cost / dof < 2.0) || !(best.theta.size() == 5 && best.theta[3] > 0 && best.theta[3] < 1)) {
        for (double scale : {0.8, 0.9, 1.0, 1.1, 1.2}) {
            for (double alpha : {0.5, 1.0, 1.5, 2.0, 3.0}) {
                LmOutcome o = levenberg_marquardt(f, start(pth0 * scale, alpha));
                if (o.theta.size() == 5 && o.theta[3] > 0 && o.theta[3] < 1 && o.cost < best.cost) best = o;
            }
        }
    }
    if (best.theta.size() != 5 || !std::isfinite(best.cost)) {
        throw FitError("fit_threshold: did not converge");
    }
    if (!(best.theta[3] > 0 && best.theta[3] < 1)) {
        throw FitError("fit_threshold: threshold estimate outside (0, 1)");
    }
    std::vector<double> params(best.theta.data(), best.theta.data() + 5);
    return finish(best, {"A", "B", "C", "p_th", "alpha"}, params, npts, Mat::Identity(5, 5));
}

FitResult subthreshold_params(double a, double b, double c, double p_th) {
    FitResult fit;
    fit.names = {"A", "B", "C", "p_th"};
    fit.params = {a, b, c, p_th};
    return fit;
}

double extrapolate(const FitResult &fit, double p, double n) {
    double pth = fit.param("p_th");
    if (p > pth) {
        throw std::domain_error("extrapolate: p lies above the fitted threshold");
    }
    return fit.param("A") * std::pow(p / pth, fit.param("B") * std::pow(n, fit.param("C")));
}

FitResult fit_subthreshold(const std::vector<LerPoint> &points, const FitMask &mask) {
    std::vector<double> lp, ln, ly, ws;
    std::map<size_t, std::vector<std::pair<double, double>>> by_size;
    for (const LerPoint &pt : points) {
        double y = pt.p_cycle();
        if (!mask.contains(pt.p) || y <= 0 || pt.p <= 0 || pt.n == 0) continue;
        lp.push_back(std::log(pt.p));
        ln.push_back(std::log(static_cast<double>(pt.n)));
        ly.push_back(std::log(y));
        double s = pt.p_cycle_error();
        ws.push_back(s > 0 ? y / s : 1.0);
        by_size[pt.n].push_back({std::log(pt.p), std::log(y)});
    }
    if (by_size.size() < 2) {
        throw FitError("fit_subthreshold: need points from at least 2 code sizes");
    }
    size_t npts = lp.size();
    if (npts < 4) {
        throw FitError("fit_subthreshold: need at least 4 points");
    }
    // theta = (log A, B, C, log p_th)
    Residuals f = [&](const Vec &t, Vec &r, Mat &j) {
        r.resize(static_cast<Eigen::Index>(npts));
        j.resize(static_cast<Eigen::Index>(npts), 4);
        for (size_t i = 0; i < npts; i++) {
            double nc = std::exp(t[2] * ln[i]);
            double lead = lp[i] - t[3];
            double model = t[0] + t[1] * nc * lead;
            auto row = static_cast<Eigen::Index>(i);
            r[row] = (model - ly[i]) * ws[i];
            j(row, 0) = ws[i];
            j(row, 1) = nc * lead * ws[i];
            j(row, 2) = t[1] * nc * ln[i] * lead * ws[i];
            j(row, 3) = -t[1] * nc * ws[i];
        }
        return true;
    };
    // Start: per-size slopes s_n = B n^C and intercepts a_n = log A - s_n log p_th.
    std::vector<double> sizes, slopes, icepts;
    for (const auto &[n, pts] : by_size) {
        if (pts.size() < 2) continue;
        double mx = 0, my = 0;
        for (auto [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(pts.size());
        my /= static_cast<double>(pts.size());
        double sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        if (sxx <= 0) continue;
        double slope = sxy / sxx;
        if (slope <= 0) continue;
        sizes.push_back(std::log(static_cast<double>(n)));
        slopes.push_back(slope);
        icepts.push_back(my - slope * mx);
    }
    auto line = [](const std::vector<double> &x, const std::vector<double> &y) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < x.size(); i++) {
            mx += x[i];
            my += y[i];
        }
        mx /= static_cast<double>(x.size());
        my /= static_cast<double>(x.size());
        double sxx = 0, sxy = 0;
        for (size_t i = 0; i < x.size(); i++) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        double slope = sxx > 0 ? sxy / sxx : 0;
        return std::pair{my - slope * mx, slope};
    };
    Vec t0(4);
    t0 << std::log(0.1), 0.3, 0.4, *std::max_element(lp.begin(), lp.end()) + std::log(1.5);
    if (sizes.size() >= 2) {
        std::vector<double> log_slopes;
        for (double s : slopes) log_slopes.push_back(std::log(s));
        auto [lb, c] = line(sizes, log_slopes);
        auto [la, neg_lpth] = line(slopes, icepts);
        t0 << la, std::exp(lb), c, -neg_lpth;
    }
    LmOutcome best = levenberg_marquardt(f, t0);
    if (best.theta.size() != 4 || !std::isfinite(best.cost)) {
        throw FitError("fit_subthreshold: did not converge");
    }
    const Vec &t = best.theta;
    double a = std::exp(t[0]);
    double pth = std::exp(t[3]);
    Mat to_params = Mat::Identity(4, 4);
    to_params(0, 0) = a;
    to_params(3, 3) = pth;
    return finish(best, {"A", "B", "C", "p_th"}, {a, t[1], t[2], pth}, npts, to_params);
}

void write_results_csv(std::ostream &out, const std::vector<LerPoint> &points) {
    out << "code,n,k,d,p,p_gate,basis,cycles,shots,failures,p_tot,p_cycle,stderr\n";
    std::ostringstream line;
    line.precision(10);
    for (const LerPoint &pt : points) {
        line.str("");
        line << pt.code << ',' << pt.n << ',' << pt.k << ',' << pt.distance << ',' << pt.p << ',' << pt.p_gate << ','
             << pt.basis << ',' << pt.cycles << ',' << pt.shots << ',' << pt.failures << ',' << pt.p_block_total << ','
             << pt.p_cycle() << ',' << pt.std_error << '\n';
        out << line.str();
    }
}

std::vector<LerPoint> read_results_csv(std::istream &in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("results csv: empty input");
    }
    std::vector<std::string> cols;
    {
        std::stringstream hs(header);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    auto index = [&](const std::string &name) -> int {
        auto it = std::find(cols.begin(), cols.end(), name);
        return it == cols.end() ? -1 : static_cast<int>(it - cols.begin());
    };
    for (const char *need : {"code", "p", "shots", "failures", "cycles", "basis"}) {
        if (index(need) < 0) throw std::runtime_error(std::string("results csv: missing column ") + need);
    }
    std::vector<LerPoint> points;
    std::string row;
    size_t line_no = 1;
    while (std::getline(in, row)) {
        line_no++;
        if (row.empty()) continue;
        std::vector<std::string> f;
        std::stringstream rs(row);
        std::string c;
        while (std::getline(rs, c, ',')) f.push_back(c);
        if (f.size() != cols.size()) {
            throw std::runtime_error("results csv: wrong field count on line " + std::to_string(line_no));
        }
        auto get = [&](const std::string &name, const std::string &dflt) {
            int i = index(name);
            return i < 0 ? dflt : f[static_cast<size_t>(i)];
        };
        try {
            LerPoint pt = make_point(
                get("code", ""), std::stoul(get("n", "0")), std::stoul(get("k", "0")), std::stod(get("d", "0")),
                std::stod(get("p", "0")), std::stod(get("p_gate", "0")), get("basis", "z"),
                std::stoul(get("cycles", "1")), std::stoul(get("shots", "0")), std::stoul(get("failures", "0")));
            // A combined row stores its own estimate.
            if (index("p_tot") >= 0 && pt.basis == "zx") {
                pt.p_block_total = std::stod(get("p_tot", "0"));
                pt.std_error = std::stod(get("stderr", "0"));
            }
            points.push_back(pt);
        } catch (const std::logic_error &e) {
            throw std::runtime_error("results csv: bad value on line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return points;
}

}  // namespace bellq
