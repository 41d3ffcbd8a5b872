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

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qemit/error.hpp"
#include "qemit/pauli.hpp"

namespace qemit {

inline constexpr double kPruneThreshold = 1e-15;
inline constexpr double kTraceTolerance = 1e-10;

/// Pauli channel rho -> sum_E w_E E rho E. Weights may be negative (signed
/// maps used for quasi-probability); `physical()` reports whether they are not.
class PauliChannel {
   public:
    explicit PauliChannel(unsigned n_qubits) : n_(n_qubits) {}

    PauliChannel(unsigned n_qubits, std::map<PauliString, double> weights) : n_(n_qubits), w_(std::move(weights)) {
        for (const auto& [p, w] : w_) {
            if (p.n_qubits() != n_) throw std::invalid_argument("PauliChannel: term size mismatch");
            if (!std::isfinite(w)) throw std::invalid_argument("PauliChannel: non-finite weight");
        }
        prune();
        validate();
    }

    static PauliChannel identity(unsigned n_qubits) {
        return PauliChannel(n_qubits, {{PauliString::identity(n_qubits), 1.0}});
    }

    /// Parses explicit (string, weight) pairs, e.g. {{"II", 0.9}, {"ZZ", 0.1}}.
    static PauliChannel from_pairs(std::span<const std::pair<std::string, double>> pairs) {
        if (pairs.empty()) throw std::invalid_argument("PauliChannel: empty weight list");
        unsigned n = PauliString::parse(pairs.front().first).n_qubits();
        std::map<PauliString, double> w;
        for (const auto& [s, v] : pairs) w[PauliString::parse(s)] += v;
        return PauliChannel(n, std::move(w));
    }

    unsigned n_qubits() const { return n_; }
    const std::map<PauliString, double>& terms() const { return w_; }

    double weight(const PauliString& p) const {
        auto it = w_.find(p);
        return it == w_.end() ? 0.0 : it->second;
    }

    double total_weight() const {
        double s = 0;
        for (const auto& kv : w_) s += kv.second;
        return s;
    }

    bool physical() const {
        for (const auto& kv : w_) {
            if (kv.second < 0) return false;
        }
        return true;
    }

    /// Total weight on non-identity strings (p_eps).
    double non_identity_probability() const { return 1.0 - weight(PauliString::identity(n_)); }

    double one_norm() const {
        double s = 0;
        for (const auto& kv : w_) s += std::abs(kv.second);
        return s;
    }

    void validate() const {
        if (std::abs(total_weight() - 1.0) > kTraceTolerance) {
            throw std::invalid_argument("PauliChannel: weights sum to " + std::to_string(total_weight()) +
                                        ", expected 1");
        }
    }

   private:
    void prune() {
        std::erase_if(w_, [](const auto& kv) { return std::abs(kv.second) <= kPruneThreshold; });
    }

    unsigned n_;
    std::map<PauliString, double> w_;
};

/// J_{p,E} = (1-p) I + p/|E| sum_{E in group} E.
struct GroupChannel {
    double p = 0.0;
    PauliSubgroup group;
};

/// Dense PTM diagonal indexed by PauliString::dense_index().
class PtmDiagonal {
   public:
    PtmDiagonal(unsigned n_qubits, std::vector<double> f) : n_(n_qubits), f_(std::move(f)) {
        if (f_.size() != (size_t{1} << (2 * n_qubits))) throw std::invalid_argument("PtmDiagonal: wrong size");
    }
    unsigned n_qubits() const { return n_; }
    double operator()(const PauliString& g) const { return f_[g.dense_index()]; }
    double operator[](size_t i) const { return f_[i]; }
    size_t size() const { return f_.size(); }
    const std::vector<double>& values() const { return f_; }

   private:
    unsigned n_;
    std::vector<double> f_;
};

namespace detail {

inline constexpr unsigned kMaxDenseQubits = 12;

/// In-place Walsh-Hadamard transform (unnormalized) over a power-of-two array.
inline void walsh_hadamard(std::vector<double>& a) {
    for (size_t h = 1; h < a.size(); h <<= 1) {
        for (size_t i = 0; i < a.size(); i += 2 * h) {
            for (size_t j = i; j < i + h; ++j) {
                double u = a[j], v = a[j + h];
                a[j] = u + v;
                a[j + h] = u - v;
            }
        }
    }
}

/// Dense index with the X and Z halves swapped. The symplectic form between E
/// and G is the ordinary dot product of index(E) and swap_xz(index(G)).
inline size_t swap_xz(size_t idx, unsigned n) {
    size_t mask = (size_t{1} << n) - 1;
    return ((idx & mask) << n) | ((idx >> n) & mask);
}

}  // namespace detail

/// f_G = sum_E w_E eta(E, G) for all 4^n strings G.
inline PtmDiagonal ptm_diagonal(const PauliChannel& ch) {
    unsigned n = ch.n_qubits();
    if (n > detail::kMaxDenseQubits) throw std::invalid_argument("ptm_diagonal: too many qubits for dense PTM");
    std::vector<double> w(size_t{1} << (2 * n), 0.0);
    for (const auto& [p, v] : ch.terms()) w[p.dense_index()] += v;
    detail::walsh_hadamard(w);
    std::vector<double> f(w.size());
    for (size_t g = 0; g < f.size(); ++g) f[g] = w[detail::swap_xz(g, n)];
    return PtmDiagonal(n, std::move(f));
}

/// Inverse of ptm_diagonal: w_E = 4^-n sum_G f_G eta(E, G).
inline PauliChannel channel_from_ptm(const PtmDiagonal& d) {
    unsigned n = d.n_qubits();
    std::vector<double> h(d.size());
    for (size_t k = 0; k < h.size(); ++k) h[k] = d[detail::swap_xz(k, n)];
    detail::walsh_hadamard(h);
    double scale = 1.0 / static_cast<double>(h.size());
    std::map<PauliString, double> w;
    for (size_t e = 0; e < h.size(); ++e) {
        double v = h[e] * scale;
        if (std::abs(v) > kPruneThreshold) w[PauliString::from_dense_index(n, e)] = v;
    }
    return PauliChannel(n, std::move(w));
}

/// Composition a after b (order is irrelevant for Pauli channels).
inline PauliChannel compose(const PauliChannel& a, const PauliChannel& b) {
    if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("compose: size mismatch");
    std::map<PauliString, double> w;
    for (const auto& [pa, wa] : a.terms()) {
        for (const auto& [pb, wb] : b.terms()) w[pa * pb] += wa * wb;
    }
    return PauliChannel(a.n_qubits(), std::move(w));
}

inline void check_group_probability(double p, bool allow_one) {
    if (!(p >= 0.0) || p > 1.0 || (!allow_one && p == 1.0)) {
        throw std::invalid_argument("group channel probability out of range: " + std::to_string(p));
    }
}

inline PauliChannel group_to_pauli(const GroupChannel& gc) {
    check_group_probability(gc.p, true);
    const auto& el = gc.group.elements();
    double each = gc.p / static_cast<double>(el.size());
    std::map<PauliString, double> w;
    for (const auto& e : el) w[e] = each;
    w[PauliString::identity(gc.group.n_qubits())] += 1.0 - gc.p;
    return PauliChannel(gc.group.n_qubits(), std::move(w));
}

inline PauliSubgroup compose_pure_groups(const PauliSubgroup& e, const PauliSubgroup& b) {
    if (e.n_qubits() != b.n_qubits()) throw std::invalid_argument("compose_pure_groups: size mismatch");
    std::vector<PauliString> gens = e.generators();
    gens.insert(gens.end(), b.generators().begin(), b.generators().end());
    return span_group(e.n_qubits(), gens);
}

/// Closed-form inverse J_{-alpha,E}, alpha = p / (1 - p).
inline PauliChannel group_inverse(const GroupChannel& gc) {
    check_group_probability(gc.p, true);
    if (gc.p == 1.0) throw SingularChannel("group_inverse: pure group channel (p = 1) has no inverse");
    double alpha = gc.p / (1.0 - gc.p);
    const auto& el = gc.group.elements();
    double each = -alpha / static_cast<double>(el.size());
    std::map<PauliString, double> w;
    for (const auto& e : el) w[e] = each;
    w[PauliString::identity(gc.group.n_qubits())] += 1.0 + alpha;
    return PauliChannel(gc.group.n_qubits(), std::move(w));
}

/// Exact inverse through the reciprocal PTM diagonal.
inline PauliChannel invert_channel(const PauliChannel& ch) {
    auto d = ptm_diagonal(ch);
    std::vector<double> inv(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
        if (std::abs(d[i]) < 1e-12) {
            throw SingularChannel("invert_channel: PTM eigenvalue of " +
                                  PauliString::from_dense_index(ch.n_qubits(), i).str() + " is zero");
        }
        inv[i] = 1.0 / d[i];
    }
    return channel_from_ptm(PtmDiagonal(ch.n_qubits(), std::move(inv)));
}

struct ApproximateInverse {
    PauliChannel map;
    /// Largest |f_G - 1| of map composed with the channel; O(p_eps^2).
    double residual;
};

/// First-order inverse G_{-p_eps}: identity weight 1 + p_eps, every other
/// weight negated.
inline ApproximateInverse approximate_inverse(const PauliChannel& ch) {
    auto id = PauliString::identity(ch.n_qubits());
    std::map<PauliString, double> w;
    for (const auto& [p, v] : ch.terms()) {
        if (p != id) w[p] = -v;
    }
    w[id] = 1.0 + ch.non_identity_probability();
    PauliChannel m(ch.n_qubits(), std::move(w));
    auto d = ptm_diagonal(compose(m, ch));
    double r = 0;
    for (double f : d.values()) r = std::max(r, std::abs(f - 1.0));
    return {std::move(m), r};
}

struct FilteredChannel {
    GroupChannel residual;
    double p_d = 0.0;
};

inline FilteredChannel symmetry_filtered_channel(const GroupChannel& gc, std::span<const PauliString> symmetries) {
    check_group_probability(gc.p, true);
    auto part = partition_detectable(gc.group, symmetries);
    double e = static_cast<double>(gc.group.order());
    double q = static_cast<double>(part.undetectable.order());
    double p_d = (e - q) / e * gc.p;
    double denom = e * (1.0 - gc.p) + q * gc.p;
    double r = q * gc.p / denom;
    return {GroupChannel{r, std::move(part.undetectable)}, p_d};
}

/// V_q = (1-q) I + q/(|E|-|Q|) sum_{V in E \ Q} V.
inline PauliChannel detectable_channel(double q, const PauliSubgroup& e, const PauliSubgroup& qsub) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("detectable_channel: q must be in [0,1]");
    if (!qsub.is_subgroup_of(e)) throw std::invalid_argument("detectable_channel: Q is not a subgroup of E");
    size_t n_det = e.order() - qsub.order();
    auto id = PauliString::identity(e.n_qubits());
    std::map<PauliString, double> w{{id, 1.0 - q}};
    if (n_det == 0) {
        if (q != 0.0) throw std::invalid_argument("detectable_channel: E \\ Q is empty but q > 0");
        return PauliChannel(e.n_qubits(), std::move(w));
    }
    double each = q / static_cast<double>(n_det);
    for (const auto& v : e.elements()) {
        if (!qsub.contains(v)) w[v] += each;
    }
    return PauliChannel(e.n_qubits(), std::move(w));
}

/// Signed map M with M o gc = target.
inline PauliChannel transform_map(const GroupChannel& gc, const PauliChannel& target) {
    return compose(target, group_inverse(gc));
}

/// Closed-form coefficients of V_q J_{p,E}^{-1}: identity, non-identity
/// elements of Q, and elements of E \ Q.
struct TransformCoefficients {
    double beta_identity;
    double beta_q;
    double beta_v;
};

inline TransformCoefficients detectable_transform_coefficients(double p, double q, size_t group_order,
                                                               size_t subgroup_order) {
    check_group_probability(p, false);
    double e = static_cast<double>(group_order), qs = static_cast<double>(subgroup_order);
    double p_d = (e - qs) / e * p;
    TransformCoefficients c{};
    c.beta_identity = ((1.0 - q) - p / e) / (1.0 - p);
    c.beta_q = -p / ((1.0 - p) * e);
    c.beta_v = group_order == subgroup_order ? 0.0 : (q - p_d) / ((e - qs) * (1.0 - p));
    return c;
}

/// The same map as transform_map(gc, detectable_channel(q, E, Q)), from the closed form.
inline PauliChannel detectable_transform(const GroupChannel& gc, const PauliSubgroup& qsub, double q) {
    auto c = detectable_transform_coefficients(gc.p, q, gc.group.order(), qsub.order());
    auto id = PauliString::identity(gc.group.n_qubits());
    std::map<PauliString, double> w;
    for (const auto& v : gc.group.elements()) {
        if (v == id) {
            w[v] = c.beta_identity;
        } else {
            w[v] = qsub.contains(v) ? c.beta_q : c.beta_v;
        }
    }
    return PauliChannel(gc.group.n_qubits(), std::move(w));
}

/// Maps a local channel onto `qubits` of an n_total-qubit register.
inline PauliChannel embed(const PauliChannel& local, std::span<const unsigned> qubits, unsigned n_total) {
    std::map<PauliString, double> w;
    for (const auto& [p, v] : local.terms()) w[embed(p, qubits, n_total)] += v;
    return PauliChannel(n_total, std::move(w));
}

namespace presets {

/// Depolarizing group channel J_{p,E} over the full n-qubit Pauli group.
inline GroupChannel depolarizing(unsigned n_qubits, double p) { return {p, full_pauli_group(n_qubits)}; }

/// Single-qubit dephasing as the group channel J_{p,{I,Z}}: {I: 1-p/2, Z: p/2}.
inline PauliChannel dephasing(double p) {
    return group_to_pauli({p, span_group(1, {PauliString::parse("Z")})});
}

/// Undetectable subgroup of the two-qubit Pauli group under Z1Z2.
inline PauliSubgroup zz_undetectable() {
    return span_group(2, {PauliString::parse("ZI"), PauliString::parse("IZ"), PauliString::parse("XX")});
}

/// Two-qubit detectable channel V_q (8 detectable strings, uniform).
inline PauliChannel detectable2(double q) { return detectable_channel(q, full_pauli_group(2), zz_undetectable()); }

}  // namespace presets

}  // namespace qemit
