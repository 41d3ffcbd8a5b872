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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qemit/channels.hpp"
#include "qemit/pauli.hpp"

namespace qemit {

using cplx = std::complex<double>;

inline constexpr unsigned kMaxSimQubits = 12;

/// Gate on 1 or 2 qubits. `matrix` is row-major over the local basis in
/// which qubits[0] is the most significant bit (|q0 q1>).
struct Gate {
    std::string name;
    std::vector<unsigned> qubits;
    std::vector<cplx> matrix;
};

namespace gates {

inline Gate h(unsigned q) {
    double s = 1.0 / std::sqrt(2.0);
    return {"H", {q}, {s, s, s, -s}};
}

inline Gate x(unsigned q) { return {"X", {q}, {0, 1, 1, 0}}; }

inline Gate identity2(unsigned a, unsigned b) {
    return {"I2", {a, b}, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}};
}

inline Gate cnot(unsigned control, unsigned target) {
    return {"CNOT", {control, target}, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0}};
}

/// Fermionic swap: exchanges |01> and |10>, -1 on |11>.
inline Gate fswap(unsigned a, unsigned b) {
    return {"FSWAP", {a, b}, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, -1}};
}

/// Number-conserving hopping rotation acting on span{|01>, |10>} as
/// [[cos t, -i e^{i phi} sin t], [-i e^{-i phi} sin t, cos t]].
inline Gate hopping(unsigned a, unsigned b, double theta, double phi) {
    cplx c = std::cos(theta), s = std::sin(theta);
    cplx m01 = cplx(0, -1) * std::polar(1.0, phi) * s;
    cplx m10 = cplx(0, -1) * std::polar(1.0, -phi) * s;
    return {"HOP", {a, b}, {1, 0, 0, 0, 0, c, m01, 0, 0, m10, c, 0, 0, 0, 0, 1}};
}

/// Controlled phase diag(1, 1, 1, e^{-i phi}).
inline Gate cphase(unsigned a, unsigned b, double phi) {
    return {"CPHASE", {a, b}, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, std::polar(1.0, -phi)}};
}

}  // namespace gates

/// Noise after a gate: (1-p) I + p F on `qubits`, where F is `firing`
/// expressed on local qubits (local qubit i -> qubits[i]).
struct NoiseSite {
    std::vector<unsigned> qubits;
    double p = 0.0;
    PauliChannel firing = PauliChannel::identity(1);

    /// The full local channel (1-p) I + p F.
    PauliChannel channel(double scale = 1.0) const {
        double ps = p * scale;
        std::map<PauliString, double> w;
        for (const auto& [s, v] : firing.terms()) w[s] += ps * v;
        w[PauliString::identity(firing.n_qubits())] += 1.0 - ps;
        return PauliChannel(firing.n_qubits(), std::move(w));
    }

    static NoiseSite from_group(std::vector<unsigned> qubits, const GroupChannel& gc) {
        return {std::move(qubits), gc.p, group_to_pauli(GroupChannel{1.0, gc.group})};
    }

    /// Splits off the identity weight: p = 1 - w_I and F the renormalized rest.
    static NoiseSite from_channel(std::vector<unsigned> qubits, const PauliChannel& ch) {
        double p = ch.non_identity_probability();
        if (std::abs(p) <= kPruneThreshold) return {std::move(qubits), 0.0, PauliChannel::identity(ch.n_qubits())};
        auto id = PauliString::identity(ch.n_qubits());
        std::map<PauliString, double> w;
        for (const auto& [s, v] : ch.terms()) {
            if (s != id) w[s] = v / p;
        }
        return {std::move(qubits), p, PauliChannel(ch.n_qubits(), std::move(w))};
    }
};

/// Ordered gates with optional noise after each one.
struct NoisyCircuit {
    unsigned n_qubits = 0;
    uint32_t initial_bits = 0;
    std::vector<Gate> gates;
    std::vector<std::optional<NoiseSite>> noise;
    /// mode_permutation[q] is the fermionic mode held by qubit q after the circuit.
    std::vector<unsigned> mode_permutation;

    void validate() const {
        if (n_qubits == 0 || n_qubits > kMaxSimQubits) {
            throw std::invalid_argument("NoisyCircuit: n_qubits must be in [1, 12]");
        }
        if (noise.size() != gates.size()) throw std::invalid_argument("NoisyCircuit: one noise slot per gate");
        auto check = [&](std::span<const unsigned> qs) {
            for (unsigned q : qs) {
                if (q >= n_qubits) throw std::invalid_argument("NoisyCircuit: qubit index out of range");
            }
        };
        for (size_t i = 0; i < gates.size(); ++i) {
            check(gates[i].qubits);
            size_t d = size_t{1} << gates[i].qubits.size();
            if (gates[i].matrix.size() != d * d) throw std::invalid_argument("NoisyCircuit: gate matrix size");
            if (noise[i]) {
                check(noise[i]->qubits);
                if (noise[i]->qubits.size() != noise[i]->firing.n_qubits()) {
                    throw std::invalid_argument("NoisyCircuit: noise channel size does not match qubit list");
                }
            }
        }
    }

    size_t noise_site_count() const {
        size_t c = 0;
        for (const auto& s : noise) c += s.has_value();
        return c;
    }

    /// Sum of per-site p (the mean firing count mu).
    double mean_error_count() const {
        double s = 0;
        for (const auto& site : noise) {
            if (site) s += site->p;
        }
        return s;
    }
};

class DensityMatrix {
   public:
    explicit DensityMatrix(unsigned n_qubits) : n_(n_qubits), dim_(size_t{1} << n_qubits), a_(dim_ * dim_) {
        if (n_qubits == 0 || n_qubits > kMaxSimQubits) {
            throw std::invalid_argument("DensityMatrix: n_qubits must be in [1, 12]");
        }
    }

    static DensityMatrix basis_state(unsigned n_qubits, uint64_t bits) {
        DensityMatrix d(n_qubits);
        d.at(bits, bits) = 1.0;
        return d;
    }

    static DensityMatrix maximally_mixed(unsigned n_qubits) {
        DensityMatrix d(n_qubits);
        for (size_t i = 0; i < d.dim_; ++i) d.at(i, i) = 1.0 / static_cast<double>(d.dim_);
        return d;
    }

    static DensityMatrix from_pure(unsigned n_qubits, std::span<const cplx> psi) {
        DensityMatrix d(n_qubits);
        if (psi.size() != d.dim_) throw std::invalid_argument("DensityMatrix::from_pure: size mismatch");
        for (size_t r = 0; r < d.dim_; ++r) {
            for (size_t c = 0; c < d.dim_; ++c) d.at(r, c) = psi[r] * std::conj(psi[c]);
        }
        return d;
    }

    unsigned n_qubits() const { return n_; }
    size_t dim() const { return dim_; }
    cplx& at(size_t r, size_t c) { return a_[r * dim_ + c]; }
    const cplx& at(size_t r, size_t c) const { return a_[r * dim_ + c]; }
    std::vector<cplx>& data() { return a_; }
    const std::vector<cplx>& data() const { return a_; }

    cplx trace() const {
        cplx t = 0;
        for (size_t i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    double purity() const {
        double s = 0;
        for (const auto& v : a_) s += std::norm(v);
        return s;
    }

    double hermiticity_error() const {
        double m = 0;
        for (size_t r = 0; r < dim_; ++r) {
            for (size_t c = r; c < dim_; ++c) m = std::max(m, std::abs(at(r, c) - std::conj(at(c, r))));
        }
        return m;
    }

    DensityMatrix& operator+=(const DensityMatrix& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    DensityMatrix& operator*=(double s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    double max_abs_diff(const DensityMatrix& o) const {
        double m = 0;
        for (size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
        return m;
    }

   private:
    unsigned n_;
    size_t dim_;
    std::vector<cplx> a_;
};

namespace detail {

/// Basis indices with the bits of `qubits` cleared, and the offsets of all
/// local assignments (local bit j <-> global qubit qubits[j]).
struct LocalIndexing {
    std::vector<size_t> bases;
    std::vector<size_t> offsets;
};

inline LocalIndexing local_indexing(unsigned n, std::span<const unsigned> qubits) {
    size_t mask = 0;
    for (unsigned q : qubits) mask |= size_t{1} << q;
    LocalIndexing li;
    for (size_t i = 0; i < (size_t{1} << n); ++i) {
        if ((i & mask) == 0) li.bases.push_back(i);
    }
    size_t k = qubits.size();
    li.offsets.resize(size_t{1} << k);
    for (size_t a = 0; a < li.offsets.size(); ++a) {
        size_t off = 0;
        for (size_t j = 0; j < k; ++j) {
            if ((a >> j) & 1) off |= size_t{1} << qubits[j];
        }
        li.offsets[a] = off;
    }
    return li;
}

/// Gate matrices index q0 as the most significant local bit; LocalIndexing
/// uses bit j for qubits[j]. This reverses the bit order.
inline size_t matrix_to_local(size_t m, size_t k) {
    size_t a = 0;
    for (size_t j = 0; j < k; ++j) {
        if ((m >> (k - 1 - j)) & 1) a |= size_t{1} << j;
    }
    return a;
}

inline std::vector<cplx> local_matrix(const Gate& g) {
    size_t k = g.qubits.size(), d = size_t{1} << k;
    std::vector<cplx> u(d * d);
    for (size_t r = 0; r < d; ++r) {
        for (size_t c = 0; c < d; ++c) u[matrix_to_local(r, k) * d + matrix_to_local(c, k)] = g.matrix[r * d + c];
    }
    return u;
}

/// Single-qubit Pauli-basis transform of a 2x2 slot, in place:
/// (m00, m01, m10, m11) -> (c_I, c_X, c_Y, c_Z) with c_P = Tr(P M).
inline void to_pauli_2x2(cplx& m00, cplx& m01, cplx& m10, cplx& m11) {
    cplx ci = m00 + m11, cz = m00 - m11, cx = m01 + m10, cy = cplx(0, 1) * (m01 - m10);
    m00 = ci;
    m01 = cx;
    m10 = cy;
    m11 = cz;
}

inline void from_pauli_2x2(cplx& m00, cplx& m01, cplx& m10, cplx& m11) {
    cplx ci = m00, cx = m01, cy = m10, cz = m11;
    m00 = 0.5 * (ci + cz);
    m11 = 0.5 * (ci - cz);
    m01 = 0.5 * (cx - cplx(0, 1) * cy);
    m10 = 0.5 * (cx + cplx(0, 1) * cy);
}

}  // namespace detail

/// rho -> U rho U^dagger.
inline void apply_gate(DensityMatrix& rho, const Gate& g) {
    size_t k = g.qubits.size(), d = size_t{1} << k;
    auto li = detail::local_indexing(rho.n_qubits(), g.qubits);
    auto u = detail::local_matrix(g);
    size_t dim = rho.dim();
    std::vector<cplx> buf(d), out(d);
    // Rows: rho <- U rho.
    for (size_t c = 0; c < dim; ++c) {
        for (size_t b : li.bases) {
            for (size_t a = 0; a < d; ++a) buf[a] = rho.at(b | li.offsets[a], c);
            for (size_t a = 0; a < d; ++a) {
                cplx s = 0;
                for (size_t j = 0; j < d; ++j) s += u[a * d + j] * buf[j];
                out[a] = s;
            }
            for (size_t a = 0; a < d; ++a) rho.at(b | li.offsets[a], c) = out[a];
        }
    }
    // Columns: rho <- rho U^dagger.
    for (size_t r = 0; r < dim; ++r) {
        cplx* row = &rho.at(r, 0);
        for (size_t b : li.bases) {
            for (size_t a = 0; a < d; ++a) buf[a] = row[b | li.offsets[a]];
            for (size_t a = 0; a < d; ++a) {
                cplx s = 0;
                for (size_t j = 0; j < d; ++j) s += std::conj(u[a * d + j]) * buf[j];
                out[a] = s;
            }
            for (size_t a = 0; a < d; ++a) row[b | li.offsets[a]] = out[a];
        }
    }
}

/// rho -> G rho G for a global Pauli string.
inline void conjugate_pauli(const DensityMatrix& in, const PauliString& g, DensityMatrix& out) {
    size_t dim = in.dim();
    uint32_t x = g.x(), z = g.z();
    for (size_t r = 0; r < dim; ++r) {
        int sr = std::popcount(static_cast<uint32_t>(z & r)) & 1;
        for (size_t c = 0; c < dim; ++c) {
            int sc = std::popcount(static_cast<uint32_t>(z & c)) & 1;
            cplx v = in.at(r ^ x, c ^ x);
            out.at(r, c) = (sr ^ sc) ? -v : v;
        }
    }
}

/// Channel application as a weighted sum of Pauli conjugations.
inline void apply_channel_conjugation(DensityMatrix& rho, const PauliChannel& local, std::span<const unsigned> qubits) {
    DensityMatrix acc(rho.n_qubits()), tmp(rho.n_qubits());
    for (const auto& [p, w] : local.terms()) {
        conjugate_pauli(rho, embed(p, qubits, rho.n_qubits()), tmp);
        for (size_t i = 0; i < acc.data().size(); ++i) acc.data()[i] += w * tmp.data()[i];
    }
    rho = std::move(acc);
}

/// Channel application by scaling each local Pauli component by its PTM
/// eigenvalue. Works block by block on the 2^k x 2^k local slices.
inline void apply_channel_ptm(DensityMatrix& rho, const PtmDiagonal& f, std::span<const unsigned> qubits) {
    size_t k = qubits.size(), d = size_t{1} << k;
    if (f.n_qubits() != k) throw std::invalid_argument("apply_channel_ptm: channel size mismatch");
    auto li = detail::local_indexing(rho.n_qubits(), qubits);
    // Slot (a, b) of the transformed block holds the Pauli with x = a ^ b, z = a.
    std::vector<double> scale(d * d);
    for (size_t a = 0; a < d; ++a) {
        for (size_t b = 0; b < d; ++b) {
            auto p = PauliString(static_cast<unsigned>(k), static_cast<uint32_t>(a ^ b), static_cast<uint32_t>(a));
            scale[a * d + b] = f(p);
        }
    }
    std::vector<cplx> blk(d * d);
    for (size_t br : li.bases) {
        for (size_t bc : li.bases) {
            for (size_t a = 0; a < d; ++a) {
                for (size_t b = 0; b < d; ++b) blk[a * d + b] = rho.at(br | li.offsets[a], bc | li.offsets[b]);
            }
            for (size_t j = 0; j < k; ++j) {
                size_t bit = size_t{1} << j;
                for (size_t a = 0; a < d; ++a) {
                    if (a & bit) continue;
                    for (size_t b = 0; b < d; ++b) {
                        if (b & bit) continue;
                        detail::to_pauli_2x2(blk[a * d + b], blk[a * d + (b | bit)], blk[(a | bit) * d + b],
                                             blk[(a | bit) * d + (b | bit)]);
                    }
                }
            }
            for (size_t i = 0; i < d * d; ++i) blk[i] *= scale[i];
            for (size_t j = 0; j < k; ++j) {
                size_t bit = size_t{1} << j;
                for (size_t a = 0; a < d; ++a) {
                    if (a & bit) continue;
                    for (size_t b = 0; b < d; ++b) {
                        if (b & bit) continue;
                        detail::from_pauli_2x2(blk[a * d + b], blk[a * d + (b | bit)], blk[(a | bit) * d + b],
                                               blk[(a | bit) * d + (b | bit)]);
                    }
                }
            }
            for (size_t a = 0; a < d; ++a) {
                for (size_t b = 0; b < d; ++b) rho.at(br | li.offsets[a], bc | li.offsets[b]) = blk[a * d + b];
            }
        }
    }
}

inline void apply_channel(DensityMatrix& rho, const PauliChannel& local, std::span<const unsigned> qubits) {
    apply_channel_ptm(rho, ptm_diagonal(local), qubits);
}

/// Tr(G rho) for a Hermitian Pauli string G.
inline cplx pauli_trace(const DensityMatrix& rho, const PauliString& g) {
    if (g.n_qubits() != rho.n_qubits()) throw std::invalid_argument("expectation: size mismatch");
    uint32_t x = g.x(), z = g.z();
    cplx s = 0;
    for (size_t c = 0; c < rho.dim(); ++c) {
        size_t r = c ^ x;
        cplx v = rho.at(r, c);
        s += (std::popcount(static_cast<uint32_t>(z & r)) & 1) ? -v : v;
    }
    static constexpr cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return s * ipow[std::popcount(x & z) & 3];
}

inline double expectation(const DensityMatrix& rho, std::span<const SignedPauliTerm> o) {
    cplx s = 0;
    for (const auto& t : o) s += t.coefficient * pauli_trace(rho, t.string);
    if (std::abs(s.imag()) > 1e-10 * std::max(1.0, std::abs(s))) {
        throw std::logic_error("expectation: non-real value; state is not Hermitian");
    }
    return s.real();
}

inline double expectation(const DensityMatrix& rho, const PauliString& o) {
    SignedPauliTerm t{1.0, o};
    return expectation(rho, std::span<const SignedPauliTerm>(&t, 1));
}

inline void check_scaled_probability(double p, double scale) {
    if (scale < 0) throw std::invalid_argument("run_exact: scale must be >= 0");
    if (p * scale > 1.0) {
        throw std::invalid_argument("run_exact: scaled error probability " + std::to_string(p * scale) + " exceeds 1");
    }
}

/// Final state with every site probability multiplied by `scale`.
inline DensityMatrix run_exact(const NoisyCircuit& circuit, double scale = 1.0) {
    circuit.validate();
    auto rho = DensityMatrix::basis_state(circuit.n_qubits, circuit.initial_bits);
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        apply_gate(rho, circuit.gates[i]);
        if (const auto& site = circuit.noise[i]; site && site->p != 0.0) {
            check_scaled_probability(site->p, scale);
            apply_channel(rho, site->channel(scale), site->qubits);
        }
    }
    return rho;
}

struct PartitionResult {
    double o_pass;
    double o_fail;
    double p_pass;
};

/// Expectations of O within the +s and -s eigenspaces of a Pauli symmetry.
/// The failed branch reports 0 when its probability is below 1e-12.
inline PartitionResult symmetry_partition(const DensityMatrix& rho, const PauliString& symmetry, int s,
                                          const PauliString& o) {
    if (s != 1 && s != -1) throw std::invalid_argument("symmetry_partition: s must be +1 or -1");
    if (eta(symmetry, o) != 1) throw std::invalid_argument("symmetry_partition: observable anticommutes with symmetry");
    auto prod = multiply(o, symmetry);
    double sign = prod.phase().real();
    double o_total = expectation(rho, o);
    double os = sign * expectation(rho, prod.string);
    double p_pass = 0.5 * (1.0 + s * expectation(rho, symmetry));
    if (p_pass < 1e-12) throw std::domain_error("symmetry_partition: passed branch is empty");
    double pass_num = 0.5 * (o_total + s * os);
    double fail_num = 0.5 * (o_total - s * os);
    double p_fail = 1.0 - p_pass;
    return {pass_num / p_pass, p_fail < 1e-12 ? 0.0 : fail_num / p_fail, p_pass};
}

/// Per-layer states conditioned on the number of channel firings.
struct CountResolvedState {
    struct Layer {
        double weight;
        DensityMatrix state;  // unnormalized: trace equals weight
    };
    int l_max = 0;
    std::vector<Layer> layers;
    double truncated_mass = 0.0;

    /// <O | l> = Tr(O rho_l) / w_l.
    double conditional_expectation(int l, std::span<const SignedPauliTerm> o) const {
        const auto& layer = layers.at(static_cast<size_t>(l));
        return expectation(layer.state, o) / layer.weight;
    }

    double conditional_expectation(int l, const PauliString& o) const {
        SignedPauliTerm t{1.0, o};
        return conditional_expectation(l, std::span<const SignedPauliTerm>(&t, 1));
    }

    /// sum_l rho_l (missing the truncated mass).
    DensityMatrix summed_state() const {
        DensityMatrix s(layers.front().state.n_qubits());
        for (const auto& l : layers) s += l.state;
        return s;
    }
};

/// Poisson-binomial distribution of the firing count over the given site probabilities.
inline std::vector<double> firing_count_distribution(std::span<const double> probs, size_t l_cap) {
    std::vector<double> dist(l_cap + 2, 0.0);  // last slot collects l > l_cap
    dist[0] = 1.0;
    for (double p : probs) {
        for (size_t l = l_cap + 1; l > 0; --l) {
            double stay = l == l_cap + 1 ? dist[l] : dist[l] * (1.0 - p);
            dist[l] = stay + dist[l - 1] * p;
        }
        dist[0] *= 1.0 - p;
    }
    return dist;
}

/// Smallest l whose tail mass P(L > l) is below 1e-6, capped at 10.
inline int default_l_max(std::span<const double> probs) {
    constexpr size_t cap = 10;
    auto dist = firing_count_distribution(probs, cap);
    double below = 0.0;
    for (size_t l = 0; l <= cap; ++l) {
        below += dist[l];
        if (1.0 - below < 1e-6) return static_cast<int>(l);
    }
    return static_cast<int>(cap);
}

/// Evolution split by firing count: per site rho_l <- (1-p) rho_l + p F(rho_{l-1}).
/// A negative l_max selects default_l_max. With `strict`, non-uniform site
/// probabilities are rejected.
inline CountResolvedState run_count_resolved(const NoisyCircuit& circuit, double scale, int l_max = -1,
                                             bool strict = false) {
    circuit.validate();
    std::vector<double> probs;
    for (const auto& site : circuit.noise) {
        if (site) {
            check_scaled_probability(site->p, scale);
            probs.push_back(site->p * scale);
        }
    }
    if (strict && !probs.empty()) {
        for (double p : probs) {
            if (std::abs(p - probs.front()) > 1e-12 * std::max(1.0, probs.front())) {
                throw std::invalid_argument("run_count_resolved: non-uniform site probabilities");
            }
        }
    }
    if (l_max < 0) l_max = default_l_max(probs);
    CountResolvedState out;
    out.l_max = l_max;
    std::vector<DensityMatrix> layers;
    layers.push_back(DensityMatrix::basis_state(circuit.n_qubits, circuit.initial_bits));
    for (int l = 1; l <= l_max; ++l) layers.emplace_back(circuit.n_qubits);
    std::vector<bool> live(layers.size(), false);
    live[0] = true;
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        for (size_t l = 0; l < layers.size(); ++l) {
            if (live[l]) apply_gate(layers[l], circuit.gates[i]);
        }
        const auto& site = circuit.noise[i];
        if (!site || site->p == 0.0) continue;
        double p = site->p * scale;
        if (p == 0.0) continue;
        auto f = ptm_diagonal(site->firing);
        if (live.back()) out.truncated_mass += p * layers.back().trace().real();
        for (size_t l = layers.size(); l-- > 0;) {
            if (l > 0 && live[l - 1]) {
                DensityMatrix fired = layers[l - 1];
                apply_channel_ptm(fired, f, site->qubits);
                fired *= p;
                if (live[l]) {
                    layers[l] *= 1.0 - p;
                    layers[l] += fired;
                } else {
                    layers[l] = std::move(fired);
                    live[l] = true;
                }
            } else if (live[l]) {
                layers[l] *= 1.0 - p;
            }
        }
    }
    for (size_t l = 0; l < layers.size(); ++l) {
        double w = layers[l].trace().real();
        out.layers.push_back({w, std::move(layers[l])});
    }
    return out;
}

}  // namespace qemit
