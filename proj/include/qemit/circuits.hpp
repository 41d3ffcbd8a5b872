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
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qemit/channels.hpp"
#include "qemit/rng.hpp"
#include "qemit/simulator.hpp"

namespace qemit {

/// Fermi-Hubbard swap-network circuit on an lx x ly open-boundary lattice.
///
/// Modes are numbered 2*site + spin with sites in snake order. Each layer is
///   1. on-site controlled phases on the (up, down) pair of every site,
///   2. fermionic swaps that separate the spin-up and spin-down modes,
///   3. an odd-even reversal network inside each spin sector, with a hopping
///      gate before every swap of two lattice neighbours,
///   4. fermionic swaps that interleave the spins again.
/// Each layer reverses the site order, so an even number of layers returns
/// the modes to their initial positions. The 2x2 lattice has 36 two-qubit
/// gates per layer and 144 for the default four layers.
struct FhCircuitSpec {
    unsigned lx = 2;
    unsigned ly = 2;
    unsigned layers = 4;
    std::vector<double> params;  // empty: drawn from seed
    uint64_t seed = 0;
    std::optional<uint32_t> initial_bits;  // default: Neel state

    unsigned n_sites() const { return lx * ly; }
    unsigned n_qubits() const { return 2 * n_sites(); }
};

enum class NoiseModel { Depolarizing, Detectable };

inline std::string to_string(NoiseModel m) { return m == NoiseModel::Depolarizing ? "depolarizing" : "detectable"; }

inline NoiseModel parse_noise_model(const std::string& s) {
    if (s == "depolarizing") return NoiseModel::Depolarizing;
    if (s == "detectable") return NoiseModel::Detectable;
    throw std::invalid_argument("unknown noise model '" + s + "' (expected depolarizing or detectable)");
}

namespace fh {

/// Snake-order index of lattice site (x, y).
inline unsigned site_index(unsigned lx, unsigned x, unsigned y) { return y * lx + (y % 2 == 0 ? x : lx - 1 - x); }

/// Nearest-neighbour bonds as unordered site-index pairs (a < b).
inline std::set<std::pair<unsigned, unsigned>> bonds(unsigned lx, unsigned ly) {
    std::set<std::pair<unsigned, unsigned>> out;
    for (unsigned y = 0; y < ly; ++y) {
        for (unsigned x = 0; x < lx; ++x) {
            unsigned s = site_index(lx, x, y);
            if (x + 1 < lx) {
                unsigned t = site_index(lx, x + 1, y);
                out.insert({std::min(s, t), std::max(s, t)});
            }
            if (y + 1 < ly) {
                unsigned t = site_index(lx, x, y + 1);
                out.insert({std::min(s, t), std::max(s, t)});
            }
        }
    }
    return out;
}

/// Neel state: spin up on even-parity sites, spin down on odd ones.
inline uint32_t neel_bits(unsigned lx, unsigned ly) {
    uint32_t bits = 0;
    for (unsigned y = 0; y < ly; ++y) {
        for (unsigned x = 0; x < lx; ++x) {
            unsigned spin = (x + y) % 2;
            bits |= uint32_t{1} << (2 * site_index(lx, x, y) + spin);
        }
    }
    return bits;
}

inline unsigned params_per_layer(unsigned lx, unsigned ly) {
    return lx * ly + 2 * 2 * static_cast<unsigned>(bonds(lx, ly).size());
}

class Builder {
   public:
    Builder(const FhCircuitSpec& spec, std::vector<double> params)
        : spec_(spec), params_(std::move(params)), bonds_(bonds(spec.lx, spec.ly)) {
        circuit_.n_qubits = spec.n_qubits();
        circuit_.initial_bits = spec.initial_bits.value_or(neel_bits(spec.lx, spec.ly));
        for (unsigned q = 0; q < spec.n_qubits(); ++q) modes_.push_back(q);
    }

    NoisyCircuit build() {
        for (unsigned l = 0; l < spec_.layers; ++l) layer();
        if (next_param_ != params_.size()) throw std::logic_error("fh::Builder: unused parameters");
        circuit_.mode_permutation = modes_;
        return std::move(circuit_);
    }

   private:
    unsigned site_of(unsigned q) const { return modes_[q] / 2; }
    unsigned spin_of(unsigned q) const { return modes_[q] % 2; }

    void push(Gate g) {
        circuit_.gates.push_back(std::move(g));
        circuit_.noise.push_back(std::nullopt);
    }

    void fswap(unsigned q) {
        push(gates::fswap(q, q + 1));
        std::swap(modes_[q], modes_[q + 1]);
    }

    /// Odd-even transposition sort of positions [lo, hi) by `key`, calling
    /// `before_swap` ahead of each swap.
    template <typename Key, typename Hook>
    void transposition_sort(unsigned lo, unsigned hi, Key key, Hook before_swap) {
        for (unsigned round = 0; round < hi - lo; ++round) {
            for (unsigned q = lo + round % 2; q + 1 < hi; q += 2) {
                if (key(q) > key(q + 1)) {
                    before_swap(q);
                    fswap(q);
                }
            }
        }
    }

    void layer() {
        unsigned n = spec_.n_qubits(), ns = spec_.n_sites();
        for (unsigned q = 0; q < n; q += 2) push(gates::cphase(q, q + 1, params_.at(next_param_++)));

        // Rank of each site in the current order, used to sort positions.
        std::vector<unsigned> rank(ns);
        for (unsigned q = 0; q < n; q += 2) rank[site_of(q)] = q / 2;

        auto no_hook = [](unsigned) {};
        transposition_sort(
            0, n, [&](unsigned q) { return spin_of(q) * ns + rank[site_of(q)]; }, no_hook);

        std::set<std::pair<unsigned, unsigned>> hopped;
        auto hop = [&](unsigned q) {
            unsigned a = site_of(q), b = site_of(q + 1);
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            if (bonds_.count(key) && !hopped.count({key.first + ns * spin_of(q), key.second})) {
                hopped.insert({key.first + ns * spin_of(q), key.second});
                double theta = params_.at(next_param_++);
                double phi = params_.at(next_param_++);
                push(gates::hopping(q, q + 1, theta, phi));
            }
        };
        for (unsigned sector = 0; sector < 2; ++sector) {
            transposition_sort(
                sector * ns, (sector + 1) * ns, [&](unsigned q) { return ns - 1 - rank[site_of(q)]; }, hop);
        }

        std::vector<unsigned> rank2(ns);
        for (unsigned q = 0; q < ns; ++q) rank2[site_of(q)] = q;
        transposition_sort(
            0, n, [&](unsigned q) { return 2 * rank2[site_of(q)] + spin_of(q); }, no_hook);
    }

    FhCircuitSpec spec_;
    std::vector<double> params_;
    std::set<std::pair<unsigned, unsigned>> bonds_;
    NoisyCircuit circuit_;
    std::vector<unsigned> modes_;
    size_t next_param_ = 0;
};

}  // namespace fh

/// Angles uniform in [0, 2 pi) from the seeded engine (see kRngName).
inline std::vector<double> draw_params(const FhCircuitSpec& spec) {
    Rng rng(spec.seed);
    std::vector<double> out(static_cast<size_t>(spec.layers) * fh::params_per_layer(spec.lx, spec.ly));
    for (auto& v : out) v = 2.0 * std::numbers::pi * uniform01(rng);
    return out;
}

inline NoisyCircuit build_circuit(const FhCircuitSpec& spec) {
    if (spec.lx == 0 || spec.ly == 0 || spec.n_qubits() > kMaxSimQubits) {
        throw std::invalid_argument("build_circuit: lattice must have between 1 and 6 sites");
    }
    size_t expected = static_cast<size_t>(spec.layers) * fh::params_per_layer(spec.lx, spec.ly);
    std::vector<double> params = spec.params.empty() ? draw_params(spec) : spec.params;
    if (params.size() != expected) {
        throw std::invalid_argument("build_circuit: expected " + std::to_string(expected) + " parameters, got " +
                                    std::to_string(params.size()));
    }
    auto c = fh::Builder(spec, std::move(params)).build();
    if (spec.lx == 2 && spec.ly == 2 && spec.layers == 4 && c.gates.size() != 144) {
        throw std::logic_error("build_circuit: 2x2 circuit must have 144 two-qubit gates");
    }
    return c;
}

inline PauliString parity_symmetry(unsigned n) {
    if (n == 0 || n > kMaxPauliQubits) throw std::invalid_argument("parity_symmetry: n out of range");
    uint32_t z = n == 32 ? ~uint32_t{0} : (uint32_t{1} << n) - 1;
    return PauliString(n, 0, z);
}

/// Jordan-Wigner terms of H = -t sum_<ij>,s (c_is^+ c_js + h.c.) + U sum_i n_iu n_id.
/// `ordering[q]` is the mode held by qubit q; an empty ordering is the identity.
/// Terms with equal strings are merged; the identity term is included.
inline std::vector<SignedPauliTerm> hamiltonian_terms(unsigned lx, unsigned ly, double t, double u,
                                                      std::vector<unsigned> ordering = {}) {
    unsigned n = 2 * lx * ly;
    if (lx == 0 || ly == 0 || n > kMaxPauliQubits) throw std::invalid_argument("hamiltonian_terms: bad dims");
    if (ordering.empty()) {
        for (unsigned q = 0; q < n; ++q) ordering.push_back(q);
    }
    if (ordering.size() != n) throw std::invalid_argument("hamiltonian_terms: ordering size mismatch");
    std::vector<unsigned> pos(n, n);
    for (unsigned q = 0; q < n; ++q) {
        if (ordering[q] >= n || pos[ordering[q]] != n) throw std::invalid_argument("hamiltonian_terms: bad ordering");
        pos[ordering[q]] = q;
    }
    std::map<PauliString, double> acc;
    auto add = [&](const PauliString& p, double c) {
        if (c != 0.0) acc[p] += c;
    };
    if (t != 0.0) {
        for (const auto& [a, b] : fh::bonds(lx, ly)) {
            for (unsigned spin = 0; spin < 2; ++spin) {
                unsigned i = pos[2 * a + spin], j = pos[2 * b + spin];
                if (i > j) std::swap(i, j);
                uint32_t zs = 0;
                for (unsigned k = i + 1; k < j; ++k) zs |= uint32_t{1} << k;
                uint32_t ends = (uint32_t{1} << i) | (uint32_t{1} << j);
                add(PauliString(n, ends, zs), -t / 2);
                add(PauliString(n, ends, zs | ends), -t / 2);
            }
        }
    }
    if (u != 0.0) {
        for (unsigned s = 0; s < lx * ly; ++s) {
            uint32_t za = uint32_t{1} << pos[2 * s], zb = uint32_t{1} << pos[2 * s + 1];
            add(PauliString::identity(n), u / 4);
            add(PauliString(n, 0, za), -u / 4);
            add(PauliString(n, 0, zb), -u / 4);
            add(PauliString(n, 0, za | zb), u / 4);
        }
    }
    std::vector<SignedPauliTerm> out;
    for (const auto& [p, c] : acc) {
        if (c != 0.0) out.push_back({c, p});
    }
    return out;
}

/// Distinct non-identity strings of hamiltonian_terms, measured in `ordering`.
inline std::vector<PauliString> hamiltonian_observables(unsigned lx, unsigned ly, std::vector<unsigned> ordering = {}) {
    std::vector<PauliString> out;
    for (const auto& t : hamiltonian_terms(lx, ly, 1.0, 1.0, std::move(ordering))) {
        if (!t.string.is_identity()) out.push_back(t.string);
    }
    return out;
}

inline size_t two_qubit_gate_count(const NoisyCircuit& c) {
    size_t m = 0;
    for (const auto& g : c.gates) m += g.qubits.size() == 2;
    return m;
}

/// Puts a noise site after every two-qubit gate with p = mu / M.
/// Depolarizing: J_{p,E} over the two-qubit Pauli group. Detectable: V_p
/// over E \ Q with Q = span{Z1, Z2, X1X2}, so mu counts detectable firings.
inline NoisyCircuit attach_noise(NoisyCircuit c, NoiseModel model, double mu) {
    if (!(mu >= 0.0)) throw std::invalid_argument("attach_noise: mu must be >= 0");
    size_t m = two_qubit_gate_count(c);
    if (m == 0) throw std::invalid_argument("attach_noise: circuit has no two-qubit gates");
    double p = mu / static_cast<double>(m);
    if (p >= 1.0) throw std::invalid_argument("attach_noise: per-site probability must be < 1");
    auto e = full_pauli_group(2);
    PauliChannel firing = model == NoiseModel::Depolarizing ? group_to_pauli({1.0, e})
                                                            : detectable_channel(1.0, e, presets::zz_undetectable());
    for (size_t i = 0; i < c.gates.size(); ++i) {
        if (c.gates[i].qubits.size() == 2) {
            c.noise[i] = NoiseSite{c.gates[i].qubits, p, firing};
        } else {
            c.noise[i] = std::nullopt;
        }
    }
    return c;
}

}  // namespace qemit
