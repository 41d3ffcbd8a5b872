// Copyright 2026 The qemit Authors
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

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <unsupported/Eigen/NonLinearOptimization>
#include <vector>

#include "qemit/error.hpp"
#include "qemit/rng.hpp"

namespace qemit {

struct DataPoint {
    double x;
    double y;
};

struct ExpComponent {
    double amplitude;
    double gamma;
};

/// sum_k A_k exp(-gamma_k mu), gamma ascending.
struct ExpDecayModel {
    std::vector<ExpComponent> components;
    double residual = 0.0;  // rms misfit divided by max |y|
    double rms = 0.0;
    bool warning = false;

    size_t k() const { return components.size(); }

    double operator()(double mu) const {
        double s = 0;
        for (const auto& c : components) s += c.amplitude * std::exp(-c.gamma * mu);
        return s;
    }

    double extrapolate() const {
        double s = 0;
        for (const auto& c : components) s += c.amplitude;
        return s;
    }
};

struct FitOptions {
    size_t restarts = 20;
    size_t grid = 41;
    uint64_t seed = 0x5eed;
};

namespace detail {

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double logit(double s) {
    s = std::clamp(s, 1e-12, 1.0 - 1e-12);
    return std::log(s / (1.0 - s));
}

/// Fits sum_k A_k exp(-r_k x) with r_k in [0, r_max]. Amplitudes are linear,
/// so every candidate set of rates is scored by a linear solve; the best
/// candidates are then refined jointly by Levenberg-Marquardt with the rates
/// passed through a logistic map onto [0, r_max].
class RateFitter {
   public:
    RateFitter(std::vector<DataPoint> pts, double r_max) : pts_(std::move(pts)), r_max_(r_max) {
        for (const auto& p : pts_) scale_ = std::max(scale_, std::abs(p.y));
    }

    struct Solution {
        std::vector<double> rates;
        std::vector<double> amps;
        double rms = std::numeric_limits<double>::infinity();
    };

    Solution linear(std::vector<double> rates) const {
        size_t n = pts_.size(), k = rates.size();
        Eigen::MatrixXd phi(n, k);
        Eigen::VectorXd y(n);
        for (size_t i = 0; i < n; ++i) {
            y(i) = pts_[i].y;
            for (size_t j = 0; j < k; ++j) phi(i, j) = std::exp(-rates[j] * pts_[i].x);
        }
        Eigen::VectorXd a = phi.colPivHouseholderQr().solve(y);
        Solution s{std::move(rates), std::vector<double>(a.data(), a.data() + k), 0.0};
        s.rms = std::sqrt((phi * a - y).squaredNorm() / static_cast<double>(n));
        if (!std::isfinite(s.rms)) s.rms = std::numeric_limits<double>::infinity();
        return s;
    }

    struct Functor {
        using Scalar = double;
        enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
        using InputType = Eigen::VectorXd;
        using ValueType = Eigen::VectorXd;
        using JacobianType = Eigen::MatrixXd;

        const RateFitter* f;
        int k;

        int inputs() const { return 2 * k; }
        int values() const { return static_cast<int>(f->pts_.size()); }

        int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& out) const {
            for (int i = 0; i < values(); ++i) {
                const auto& d = f->pts_[i];
                double s = 0;
                for (int j = 0; j < k; ++j) s += p(j) * std::exp(-f->r_max_ * logistic(p(k + j)) * d.x);
                out(i) = s - d.y;
            }
            return 0;
        }

        int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
            for (int i = 0; i < values(); ++i) {
                double x = f->pts_[i].x;
                for (int j = 0; j < k; ++j) {
                    double s = logistic(p(k + j));
                    double e = std::exp(-f->r_max_ * s * x);
                    jac(i, j) = e;
                    jac(i, k + j) = -p(j) * x * e * f->r_max_ * s * (1.0 - s);
                }
            }
            return 0;
        }
    };

    Solution refine(const Solution& start) const {
        int k = static_cast<int>(start.rates.size());
        Eigen::VectorXd p(2 * k);
        for (int j = 0; j < k; ++j) {
            p(j) = start.amps[j];
            p(k + j) = logit(start.rates[j] / r_max_);
        }
        Functor fn{this, k};
        Eigen::LevenbergMarquardt<Functor> lm(fn);
        lm.parameters.maxfev = 2000;
        lm.parameters.ftol = 1e-15;
        lm.parameters.xtol = 1e-15;
        lm.minimize(p);
        std::vector<double> rates(k);
        for (int j = 0; j < k; ++j) rates[j] = r_max_ * logistic(p(k + j));
        // Re-solve amplitudes exactly for the final rates, and let rates that
        // ran into a bound sit on it.
        Solution best = linear(rates);
        for (int j = 0; j < k; ++j) {
            for (double edge : {0.0, r_max_}) {
                if (std::abs(best.rates[j] - edge) < 1e-6 * r_max_) {
                    auto r = best.rates;
                    r[j] = edge;
                    auto s = linear(r);
                    if (s.rms <= best.rms * (1 + 1e-9) + 1e-300) best = s;
                }
            }
        }
        return best;
    }

    Solution fit(size_t k, const FitOptions& opt) const {
        std::vector<Solution> starts;
        std::vector<double> grid(opt.grid);
        for (size_t i = 0; i < opt.grid; ++i) grid[i] = r_max_ * static_cast<double>(i) / (opt.grid - 1);

        // Log-linear single-exponential estimate, then component splitting.
        if (auto r0 = log_linear_rate()) {
            std::vector<double> r;
            double spread = std::min(*r0, r_max_ - *r0);
            spread = std::max(spread, 0.05 * r_max_);
            for (size_t j = 0; j < k; ++j) {
                double off = k == 1 ? 0.0 : spread * (2.0 * j / (k - 1) - 1.0);
                r.push_back(std::clamp(*r0 + off, 0.0, r_max_));
            }
            starts.push_back(linear(r));
        }

        // Coarse grid over ordered rate tuples.
        std::vector<Solution> scored;
        std::vector<size_t> idx(k);
        for (size_t j = 0; j < k; ++j) idx[j] = j;
        while (k <= opt.grid) {
            std::vector<double> r(k);
            for (size_t j = 0; j < k; ++j) r[j] = grid[idx[j]];
            scored.push_back(linear(r));
            size_t j = k;
            while (j > 0 && idx[j - 1] == opt.grid - k + j - 1) --j;
            if (j == 0) break;
            ++idx[j - 1];
            for (size_t m = j; m < k; ++m) idx[m] = idx[m - 1] + 1;
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.rms < b.rms; });
        for (size_t i = 0; i < std::min<size_t>(5, scored.size()); ++i) starts.push_back(scored[i]);

        Rng rng(opt.seed ^ (k * 0x9e3779b97f4a7c15ULL));
        for (size_t i = 0; i < opt.restarts; ++i) {
            std::vector<double> r(k);
            for (auto& v : r) v = r_max_ * uniform01(rng);
            std::sort(r.begin(), r.end());
            starts.push_back(linear(r));
        }

        Solution best;
        for (const auto& s : starts) {
            if (s.rms < best.rms) best = s;
            if (!std::isfinite(s.rms)) continue;
            auto r = refine(s);
            if (r.rms < best.rms) best = r;
            if (best.rms <= 1e-15 * std::max(scale_, 1e-300)) break;
        }
        if (!std::isfinite(best.rms)) throw FitDivergence("fit_multi_exp: no restart produced a finite model");
        return best;
    }

    double scale() const { return scale_; }

   private:
    std::optional<double> log_linear_rate() const {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int sign = 0;
        for (const auto& p : pts_) {
            int s = p.y > 0 ? 1 : (p.y < 0 ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign)) return std::nullopt;
            sign = s;
            double ly = std::log(std::abs(p.y));
            sx += p.x;
            sy += ly;
            sxx += p.x * p.x;
            sxy += p.x * ly;
        }
        double n = static_cast<double>(pts_.size());
        double den = n * sxx - sx * sx;
        if (den == 0) return std::nullopt;
        return std::clamp(-(n * sxy - sx * sy) / den, 0.0, r_max_);
    }

    std::vector<DataPoint> pts_;
    double r_max_;
    double scale_ = 0.0;
};

inline void check_points(std::span<const DataPoint> pts, size_t k) {
    if (k == 0) throw std::invalid_argument("fit_multi_exp: k must be >= 1");
    if (pts.size() < 2 * k) throw std::invalid_argument("fit_multi_exp: need at least 2k points");
    std::vector<double> xs;
    for (const auto& p : pts) {
        if (!(p.x >= 0.0) || !std::isfinite(p.y)) throw std::invalid_argument("fit_multi_exp: invalid point");
        xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        throw std::invalid_argument("fit_multi_exp: x values must be distinct");
    }
}

inline double normalized(double rms, double scale) { return scale > 1e-12 ? rms / scale : rms; }

}  // namespace detail

/// Least-squares fit of sum_k A_k exp(-gamma_k mu) with gamma_k in [0, 1].
inline ExpDecayModel fit_multi_exp(std::span<const DataPoint> points, size_t k, const FitOptions& opt = {}) {
    detail::check_points(points, k);
    detail::RateFitter f({points.begin(), points.end()}, 1.0);
    auto s = f.fit(k, opt);
    ExpDecayModel m;
    for (size_t j = 0; j < k; ++j) {
        if (std::abs(s.amps[j]) >= 1e-12) m.components.push_back({s.amps[j], s.rates[j]});
    }
    std::sort(m.components.begin(), m.components.end(),
              [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
    m.rms = s.rms;
    m.residual = detail::normalized(s.rms, f.scale());
    return m;
}

/// Smallest K <= k_max whose normalized residual is below tol; otherwise the
/// best of all K with `warning` set.
inline ExpDecayModel select_model(std::span<const DataPoint> points, size_t k_max, double tol = 1e-4,
                                  const FitOptions& opt = {}) {
    if (k_max == 0) throw std::invalid_argument("select_model: k_max must be >= 1");
    ExpDecayModel best;
    best.residual = std::numeric_limits<double>::infinity();
    for (size_t k = 1; k <= k_max && 2 * k <= points.size(); ++k) {
        auto m = fit_multi_exp(points, k, opt);
        if (m.residual < tol) return m;
        if (m.residual < best.residual) best = m;
    }
    if (!std::isfinite(best.residual)) throw std::invalid_argument("select_model: too few points");
    best.warning = true;
    return best;
}

/// Per-count decay sum_k A_k (1 - gamma_k)^l.
struct GeometricDecayModel {
    std::vector<ExpComponent> components;
    double residual = 0.0;
    double rms = 0.0;

    double operator()(double l) const {
        double s = 0;
        for (const auto& c : components) s += c.amplitude * std::pow(1.0 - c.gamma, l);
        return s;
    }
};

/// Fits sum_k A_k (1 - gamma_k)^l with gamma_k in [0, 1 - e^{-r_max}].
inline GeometricDecayModel fit_geometric(std::span<const DataPoint> points, size_t k, double r_max = 20.0,
                                         const FitOptions& opt = {}) {
    detail::check_points(points, k);
    detail::RateFitter f({points.begin(), points.end()}, r_max);
    auto s = f.fit(k, opt);
    GeometricDecayModel m;
    for (size_t j = 0; j < k; ++j) {
        if (std::abs(s.amps[j]) >= 1e-12) m.components.push_back({s.amps[j], -std::expm1(-s.rates[j])});
    }
    std::sort(m.components.begin(), m.components.end(),
              [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
    m.rms = s.rms;
    m.residual = detail::normalized(s.rms, f.scale());
    return m;
}

}  // namespace qemit
