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
#include <bit>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

#include "qemit/quasiprob.hpp"
#include "qemit/rng.hpp"
#include "qemit/simulator.hpp"

namespace qemit {

class StateVector {
   public:
    explicit StateVector(unsigned n_qubits, uint64_t bits = 0) : n_(n_qubits), a_(size_t{1} << n_qubits) {
        if (n_qubits == 0 || n_qubits > 24) throw std::invalid_argument("StateVector: n_qubits out of range");
        a_.at(bits) = 1.0;
    }

    unsigned n_qubits() const { return n_; }
    std::vector<cplx>& amplitudes() { return a_; }
    const std::vector<cplx>& amplitudes() const { return a_; }

    void apply(const Gate& g) {
        size_t d = size_t{1} << g.qubits.size();
        auto li = detail::local_indexing(n_, g.qubits);
        auto u = detail::local_matrix(g);
        std::vector<cplx> buf(d);
        for (size_t b : li.bases) {
            for (size_t a = 0; a < d; ++a) buf[a] = a_[b | li.offsets[a]];
            for (size_t a = 0; a < d; ++a) {
                cplx s = 0;
                for (size_t j = 0; j < d; ++j) s += u[a * d + j] * buf[j];
                a_[b | li.offsets[a]] = s;
            }
        }
    }

    /// psi <- G psi for a Hermitian Pauli string (phase i^{|x & z|} included).
    void apply(const PauliString& g) {
        if (g.is_identity()) return;
        uint32_t x = g.x(), z = g.z();
        static constexpr cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        cplx ph = ipow[std::popcount(x & z) & 3];
        std::vector<cplx> out(a_.size());
        for (size_t c = 0; c < a_.size(); ++c) {
            cplx v = a_[c] * ph;
            out[c ^ x] = (std::popcount(static_cast<uint32_t>(z & c)) & 1) ? -v : v;
        }
        a_.swap(out);
    }

    double norm2() const {
        double s = 0;
        for (const auto& v : a_) s += std::norm(v);
        return s;
    }

    /// <psi|G|psi> / <psi|psi>.
    double expectation(const PauliString& g) const {
        StateVector tmp = *this;
        tmp.apply(g);
        cplx s = 0;
        for (size_t i = 0; i < a_.size(); ++i) s += std::conj(a_[i]) * tmp.a_[i];
        return s.real() / norm2();
    }

    /// psi <- (I + s S)/2 psi, renormalized.
    void project(const PauliString& symmetry, int s) {
        StateVector tmp = *this;
        tmp.apply(symmetry);
        for (size_t i = 0; i < a_.size(); ++i) a_[i] = 0.5 * (a_[i] + static_cast<double>(s) * tmp.a_[i]);
        double n = std::sqrt(norm2());
        if (n == 0) throw std::domain_error("StateVector::project: empty projection");
        for (auto& v : a_) v /= n;
    }

   private:
    unsigned n_;
    std::vector<cplx> a_;
};

/// What a trajectory does beyond the physical noise: an optional signed
/// correction after each noise slot and an optional symmetry check.
struct TrajectoryPlan {
    PauliString observable;
    double scale = 1.0;
    std::vector<std::optional<QuasiDecomposition>> corrections;  // empty or one per gate
    std::optional<PauliString> symmetry;
    int symmetry_eigenvalue = 1;

    /// Product of correction one-norms.
    double one_norm() const {
        double q = 1.0;
        for (const auto& c : corrections) {
            if (c) q *= c->one_norm();
        }
        return q;
    }
};

struct TrajectoryResult {
    double value;  // exact expectation of the observable on the sampled branch
    int shot;      // a single +-1 measurement outcome
    int sign;
    bool passed;
};

namespace detail {

inline const PauliString& sample_physical(const QuasiDecomposition& firing, Rng& rng) {
    return firing.ops()[firing.index_for(uniform01(rng))].insertion;
}

}  // namespace detail

/// Precomputed sampling tables for one circuit and plan.
class TrajectoryEngine {
   public:
    TrajectoryEngine(const NoisyCircuit& circuit, TrajectoryPlan plan) : circuit_(circuit), plan_(std::move(plan)) {
        circuit_.validate();
        if (!plan_.corrections.empty() && plan_.corrections.size() != circuit_.gates.size()) {
            throw std::invalid_argument("TrajectoryEngine: one correction slot per gate");
        }
        if (plan_.observable.n_qubits() != circuit_.n_qubits) {
            throw std::invalid_argument("TrajectoryEngine: observable size mismatch");
        }
        for (const auto& site : circuit_.noise) {
            if (site && site->p != 0.0) {
                if (!site->firing.physical()) throw std::invalid_argument("TrajectoryEngine: firing must be physical");
                check_scaled_probability(site->p, plan_.scale);
                firing_.push_back(decompose(site->firing));
                global_.push_back({});
                for (const auto& op : firing_.back()->ops()) {
                    global_.back().push_back(embed(op.insertion, site->qubits, circuit_.n_qubits));
                }
            } else {
                firing_.push_back(std::nullopt);
                global_.push_back({});
            }
        }
        for (size_t i = 0; i < plan_.corrections.size(); ++i) {
            correction_global_.push_back({});
            if (!plan_.corrections[i]) continue;
            const auto& qs = circuit_.noise[i] ? circuit_.noise[i]->qubits : circuit_.gates[i].qubits;
            for (const auto& op : plan_.corrections[i]->ops()) {
                correction_global_.back().push_back(embed(op.insertion, qs, circuit_.n_qubits));
            }
        }
    }

    const TrajectoryPlan& plan() const { return plan_; }

    TrajectoryResult run(Rng& rng) const {
        StateVector psi(circuit_.n_qubits, circuit_.initial_bits);
        int sign = 1;
        for (size_t i = 0; i < circuit_.gates.size(); ++i) {
            psi.apply(circuit_.gates[i]);
            if (firing_[i] && uniform01(rng) < circuit_.noise[i]->p * plan_.scale) {
                psi.apply(global_[i][firing_[i]->index_for(uniform01(rng))]);
            }
            if (!plan_.corrections.empty() && plan_.corrections[i]) {
                size_t k = plan_.corrections[i]->index_for(uniform01(rng));
                sign *= plan_.corrections[i]->ops()[k].sign;
                psi.apply(correction_global_[i][k]);
            }
        }
        bool passed = true;
        if (plan_.symmetry) {
            double p_pass = 0.5 * (1.0 + plan_.symmetry_eigenvalue * psi.expectation(*plan_.symmetry));
            passed = uniform01(rng) < p_pass;
            psi.project(*plan_.symmetry, passed ? plan_.symmetry_eigenvalue : -plan_.symmetry_eigenvalue);
        }
        double value = psi.expectation(plan_.observable);
        int shot = uniform01(rng) < 0.5 * (1.0 + value) ? +1 : -1;
        return {value, shot, sign, passed};
    }

   private:
    NoisyCircuit circuit_;
    TrajectoryPlan plan_;
    std::vector<std::optional<QuasiDecomposition>> firing_;
    std::vector<std::vector<PauliString>> global_;
    std::vector<std::vector<PauliString>> correction_global_;
};

inline TrajectoryResult mc_trajectory(const NoisyCircuit& circuit, const TrajectoryPlan& plan, Rng& rng) {
    return TrajectoryEngine(circuit, plan).run(rng);
}

/// Running sums over trajectories. `q` scales signed quantities.
struct TrajectoryStats {
    size_t n = 0;
    size_t n_passed = 0;
    double sum_sv = 0, sum_sv2 = 0;        // sign * value
    double sum_ss = 0, sum_ss2 = 0;        // sign * shot
    double sum_pass_ss = 0;                // sign * shot on passed runs
    double sum_pass_sv = 0;                // sign * value on passed runs
    double sum_sign = 0, sum_pass_sign = 0;
    double q = 1.0;

    void add(const TrajectoryResult& r) {
        ++n;
        double sv = r.sign * r.value, ss = r.sign * r.shot;
        sum_sv += sv;
        sum_sv2 += sv * sv;
        sum_ss += ss;
        sum_ss2 += ss * ss;
        sum_sign += r.sign;
        if (r.passed) {
            ++n_passed;
            sum_pass_sign += r.sign;
            sum_pass_ss += ss;
            sum_pass_sv += sv;
        }
    }

    void merge(const TrajectoryStats& o) {
        n += o.n;
        n_passed += o.n_passed;
        sum_sv += o.sum_sv;
        sum_sv2 += o.sum_sv2;
        sum_ss += o.sum_ss;
        sum_ss2 += o.sum_ss2;
        sum_pass_ss += o.sum_pass_ss;
        sum_pass_sv += o.sum_pass_sv;
        sum_sign += o.sum_sign;
        sum_pass_sign += o.sum_pass_sign;
    }

    /// Q * mean(sign * shot) and its standard error.
    double estimate() const { return q * sum_ss / static_cast<double>(n); }
    double variance_shot() const {
        double m = sum_ss / static_cast<double>(n);
        return q * q * (sum_ss2 / static_cast<double>(n) - m * m) * static_cast<double>(n) / static_cast<double>(n - 1);
    }
    double standard_error() const { return std::sqrt(variance_shot() / static_cast<double>(n)); }
    double estimate_values() const { return q * sum_sv / static_cast<double>(n); }
    double pass_fraction() const { return static_cast<double>(n_passed) / static_cast<double>(n); }

    /// Signed-weight estimates of the passed and failed branch expectations
    /// and of the pass probability; the one-norm cancels in each ratio.
    double o_pass() const { return sum_pass_sv / sum_pass_sign; }
    double o_fail() const { return (sum_sv - sum_pass_sv) / (sum_sign - sum_pass_sign); }
    double p_pass() const { return sum_pass_sign / sum_sign; }
};

/// Runs `n` trajectories in fixed-size chunks, each with its own stream
/// derived from (seed, chunk index), so results do not depend on `threads`.
inline TrajectoryStats run_trajectories(const TrajectoryEngine& engine, size_t n, uint64_t seed,
                                        unsigned threads = 1) {
    constexpr size_t chunk = 1024;
    size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<TrajectoryStats> partial(n_chunks);
    auto work = [&](size_t first) {
        for (size_t c = first; c < n_chunks; c += std::max(1u, threads)) {
            Rng rng = make_stream(seed, c);
            size_t count = std::min(chunk, n - c * chunk);
            for (size_t i = 0; i < count; ++i) partial[c].add(engine.run(rng));
        }
    };
    if (threads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    TrajectoryStats total;
    total.q = engine.plan().one_norm();
    for (const auto& p : partial) total.merge(p);
    return total;
}

}  // namespace qemit
