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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qemit/channels.hpp"
#include "qemit/rng.hpp"

namespace qemit {

struct BasisOp {
    double probability;
    int sign;
    PauliString insertion;
};

/// Signed map written as Q * sum_i sign_i prob_i (conjugation by insertion_i).
class QuasiDecomposition {
   public:
    QuasiDecomposition(std::vector<BasisOp> ops, double one_norm) : ops_(std::move(ops)), q_(one_norm) {
        cdf_.reserve(ops_.size());
        double acc = 0;
        for (const auto& op : ops_) {
            acc += op.probability;
            cdf_.push_back(acc);
        }
        if (ops_.empty() || std::abs(acc - 1.0) > 1e-12) {
            throw std::invalid_argument("QuasiDecomposition: probabilities must sum to 1");
        }
        cdf_.back() = 1.0;
    }

    const std::vector<BasisOp>& ops() const { return ops_; }
    double one_norm() const { return q_; }

    /// Index of the op selected by u in [0, 1).
    size_t index_for(double u) const {
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min(static_cast<size_t>(it - cdf_.begin()), ops_.size() - 1);
    }

    /// Rebuilds the signed map.
    PauliChannel to_channel() const {
        std::map<PauliString, double> w;
        for (const auto& op : ops_) w[op.insertion] += q_ * op.sign * op.probability;
        return PauliChannel(ops_.front().insertion.n_qubits(), std::move(w));
    }

   private:
    std::vector<BasisOp> ops_;
    std::vector<double> cdf_;
    double q_;
};

inline QuasiDecomposition decompose(const PauliChannel& map) {
    double q = map.one_norm();
    if (q == 0.0) throw std::invalid_argument("decompose: all-zero map");
    map.validate();
    std::vector<BasisOp> ops;
    for (const auto& [p, w] : map.terms()) ops.push_back({std::abs(w) / q, w < 0 ? -1 : +1, p});
    return QuasiDecomposition(std::move(ops), q);
}

struct SampledInsertion {
    PauliString insertion;
    int sign;
};

inline SampledInsertion sample(const QuasiDecomposition& dec, Rng& rng) {
    const auto& op = dec.ops()[dec.index_for(uniform01(rng))];
    return {op.insertion, op.sign};
}

/// (1 + 2(|E|-1) p / (|E|(1-p)))^2.
inline double cost_invert_group(double p, size_t group_order) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("cost_invert_group: p must be in [0,1)");
    if (group_order < 1) throw std::invalid_argument("cost_invert_group: group_order must be >= 1");
    double e = static_cast<double>(group_order);
    double b = 1.0 + 2.0 * (e - 1.0) * p / (e * (1.0 - p));
    return b * b;
}

/// First-order cost 1 + 4(p_eps - q_eps).
inline double cost_transform(double p_eps, double q_eps) {
    if (q_eps > p_eps) throw std::invalid_argument("cost_transform: q_eps must not exceed p_eps");
    if (q_eps < 0.0) throw std::invalid_argument("cost_transform: q_eps must be >= 0");
    return 1.0 + 4.0 * (p_eps - q_eps);
}

/// Exact cost of V_q J_{p,E}^{-1}: B1^2 for q >= p_d, B2^2 below.
inline double cost_transform_exact(double p, double q, size_t group_order, size_t subgroup_order) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("cost_transform_exact: p must be in [0,1)");
    if (subgroup_order == 0 || group_order % subgroup_order != 0) {
        throw std::invalid_argument("cost_transform_exact: subgroup order must divide group order");
    }
    double e = static_cast<double>(group_order), qs = static_cast<double>(subgroup_order);
    double p_d = (e - qs) / e * p;
    double b;
    if (q >= p_d) {
        b = 1.0 + 2.0 * (qs - 1.0) * p / (e * (1.0 - p));
    } else {
        b = 1.0 + 2.0 * (e - 1.0) * p / (e * (1.0 - p)) - 2.0 * q / (1.0 - p);
    }
    return b * b;
}

/// e^{4(mu_eps - nu_eps)}.
inline double circuit_cost(double mu_eps, double nu_eps) {
    if (nu_eps > mu_eps) throw std::invalid_argument("circuit_cost: nu_eps must not exceed mu_eps");
    return std::exp(4.0 * (mu_eps - nu_eps));
}

}  // namespace qemit
