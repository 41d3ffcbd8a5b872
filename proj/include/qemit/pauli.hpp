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
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qemit {

inline constexpr unsigned kMaxPauliQubits = 32;

/// Phase-free Pauli string over up to 32 qubits.
///
/// Stored as X and Z bit masks; qubit q is bit q. A qubit with both bits set
/// is the Hermitian Y (= iXZ), so the string itself is always Hermitian and
/// carries no scalar. Scalars live on SignedPauliTerm / PauliSum.
class PauliString {
   public:
    PauliString() = default;

    explicit PauliString(unsigned n_qubits, uint32_t x = 0, uint32_t z = 0) : x_(x), z_(z), n_(n_qubits) {
        if (n_qubits == 0 || n_qubits > kMaxPauliQubits) {
            throw std::invalid_argument("PauliString: n_qubits must be in [1, 32], got " + std::to_string(n_qubits));
        }
        if (n_qubits < 32) {
            uint32_t mask = (uint32_t{1} << n_qubits) - 1;
            if ((x & ~mask) || (z & ~mask)) {
                throw std::invalid_argument("PauliString: bits set beyond n_qubits");
            }
        }
    }

    static PauliString identity(unsigned n_qubits) { return PauliString(n_qubits); }

    /// Parses "XIZY" (qubit 0 leftmost). Rejects anything outside {I,X,Y,Z}.
    static PauliString parse(std::string_view text) {
        if (text.empty() || text.size() > kMaxPauliQubits) {
            throw std::invalid_argument("PauliString: text length must be in [1, 32]: '" + std::string(text) + "'");
        }
        uint32_t x = 0, z = 0;
        for (size_t q = 0; q < text.size(); ++q) {
            uint32_t bit = uint32_t{1} << q;
            switch (text[q]) {
                case 'I':
                    break;
                case 'X':
                    x |= bit;
                    break;
                case 'Y':
                    x |= bit;
                    z |= bit;
                    break;
                case 'Z':
                    z |= bit;
                    break;
                default:
                    throw std::invalid_argument("PauliString: invalid character '" + std::string(1, text[q]) +
                                                "' in '" + std::string(text) + "'");
            }
        }
        return PauliString(static_cast<unsigned>(text.size()), x, z);
    }

    /// Single-letter string: letter in {I,X,Y,Z} on `qubit`.
    static PauliString single(unsigned n_qubits, unsigned qubit, char letter) {
        if (qubit >= n_qubits) {
            throw std::invalid_argument("PauliString::single: qubit out of range");
        }
        std::string s(n_qubits, 'I');
        s[qubit] = letter;
        return parse(s);
    }

    unsigned n_qubits() const { return n_; }
    uint32_t x() const { return x_; }
    uint32_t z() const { return z_; }
    bool is_identity() const { return x_ == 0 && z_ == 0; }
    unsigned weight() const { return static_cast<unsigned>(std::popcount(x_ | z_)); }

    char letter(unsigned q) const {
        bool bx = (x_ >> q) & 1u, bz = (z_ >> q) & 1u;
        return bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
    }

    std::string str() const {
        std::string s(n_, 'I');
        for (unsigned q = 0; q < n_; ++q) s[q] = letter(q);
        return s;
    }

    /// Symplectic GF(2) vector: low 32 bits X, high 32 bits Z.
    uint64_t symplectic() const { return uint64_t{x_} | (uint64_t{z_} << 32); }

    static PauliString from_symplectic(unsigned n_qubits, uint64_t v) {
        return PauliString(n_qubits, static_cast<uint32_t>(v), static_cast<uint32_t>(v >> 32));
    }

    /// Dense index in [0, 4^n): x | z << n. Used for PTM diagonals.
    uint64_t dense_index() const { return uint64_t{x_} | (uint64_t{z_} << n_); }

    static PauliString from_dense_index(unsigned n_qubits, uint64_t idx) {
        uint64_t mask = (uint64_t{1} << n_qubits) - 1;
        return PauliString(n_qubits, static_cast<uint32_t>(idx & mask), static_cast<uint32_t>((idx >> n_qubits) & mask));
    }

    /// Phase-free product (symplectic xor).
    PauliString operator*(const PauliString& other) const {
        check_same_size(other);
        return PauliString(n_, x_ ^ other.x_, z_ ^ other.z_);
    }

    bool operator==(const PauliString&) const = default;
    auto operator<=>(const PauliString& other) const {
        if (auto c = n_ <=> other.n_; c != 0) return c;
        if (auto c = z_ <=> other.z_; c != 0) return c;
        return x_ <=> other.x_;
    }

    void check_same_size(const PauliString& other) const {
        if (n_ != other.n_) {
            throw std::invalid_argument("Pauli size mismatch: " + std::to_string(n_) + " vs " +
                                        std::to_string(other.n_));
        }
    }

   private:
    uint32_t x_ = 0;
    uint32_t z_ = 0;
    unsigned n_ = 0;
};

inline std::ostream& operator<<(std::ostream& out, const PauliString& p) { return out << p.str(); }

/// Result of multiplying two Hermitian Pauli strings: a * b = i^i_power * string.
struct PauliProduct {
    unsigned i_power = 0;  // in {0,1,2,3}
    PauliString string;

    std::complex<double> phase() const {
        static constexpr std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return table[i_power & 3u];
    }
};

/// Full product with phase tracking.
inline PauliProduct multiply(const PauliString& a, const PauliString& b) {
    a.check_same_size(b);
    int g = 0;
    for (unsigned q = 0; q < a.n_qubits(); ++q) {
        int x1 = (a.x() >> q) & 1, z1 = (a.z() >> q) & 1;
        int x2 = (b.x() >> q) & 1, z2 = (b.z() >> q) & 1;
        if (x1 && z1) {
            g += z2 - x2;
        } else if (x1) {
            g += z2 * (2 * x2 - 1);
        } else if (z1) {
            g += x2 * (1 - 2 * z2);
        }
    }
    return {static_cast<unsigned>(((g % 4) + 4) % 4), a * b};
}

/// Commutator sign: ab = eta(a, b) ba.
inline int eta(const PauliString& a, const PauliString& b) {
    a.check_same_size(b);
    uint32_t overlap = (a.x() & b.z()) ^ (a.z() & b.x());
    return (std::popcount(overlap) & 1) ? -1 : +1;
}

inline bool commutes(const PauliString& a, const PauliString& b) { return eta(a, b) == 1; }

struct SignedPauliTerm {
    double coefficient = 0.0;
    PauliString string;
    bool operator==(const SignedPauliTerm&) const = default;
};

/// Sparse complex-coefficient sum of Pauli strings; the workhorse for
/// phase-tracked algebra (projector expansions, observable products).
class PauliSum {
   public:
    explicit PauliSum(unsigned n_qubits) : n_(n_qubits) {}

    static PauliSum from_terms(unsigned n_qubits, std::span<const SignedPauliTerm> terms) {
        PauliSum s(n_qubits);
        for (const auto& t : terms) s.add(t.string, t.coefficient);
        return s;
    }

    unsigned n_qubits() const { return n_; }
    const std::map<PauliString, std::complex<double>>& terms() const { return terms_; }

    void add(const PauliString& p, std::complex<double> c) {
        if (p.n_qubits() != n_) throw std::invalid_argument("PauliSum::add: size mismatch");
        terms_[p] += c;
    }

    std::complex<double> coefficient(const PauliString& p) const {
        auto it = terms_.find(p);
        return it == terms_.end() ? std::complex<double>{} : it->second;
    }

    PauliSum operator*(const PauliSum& other) const {
        if (other.n_ != n_) throw std::invalid_argument("PauliSum product: size mismatch");
        PauliSum out(n_);
        for (const auto& [pa, ca] : terms_) {
            for (const auto& [pb, cb] : other.terms_) {
                auto prod = multiply(pa, pb);
                out.terms_[prod.string] += ca * cb * prod.phase();
            }
        }
        out.prune(0.0);
        return out;
    }

    void prune(double tol) {
        std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    }

    /// Largest |Im c| over all terms.
    double max_imaginary() const {
        double m = 0;
        for (const auto& kv : terms_) m = std::max(m, std::abs(kv.second.imag()));
        return m;
    }

    /// Real parts as signed terms, dropping |c| <= tol.
    std::vector<SignedPauliTerm> real_terms(double tol = 0.0) const {
        std::vector<SignedPauliTerm> out;
        for (const auto& [p, c] : terms_) {
            if (std::abs(c.real()) > tol) out.push_back({c.real(), p});
        }
        return out;
    }

   private:
    unsigned n_;
    std::map<PauliString, std::complex<double>> terms_;
};

/// Subgroup of the phase-free Pauli group.
///
/// `generators` are independent; `elements` is their full span, enumerated so
/// element i is the product of generators whose bit is set in i. Element 0 is
/// always the identity.
class PauliSubgroup {
   public:
    PauliSubgroup() = default;

    unsigned n_qubits() const { return n_; }
    const std::vector<PauliString>& generators() const { return generators_; }
    const std::vector<PauliString>& elements() const { return elements_; }
    size_t order() const { return elements_.size(); }

    bool contains(const PauliString& p) const {
        return std::binary_search(sorted_.begin(), sorted_.end(), p);
    }

    bool is_subgroup_of(const PauliSubgroup& other) const {
        return std::all_of(generators_.begin(), generators_.end(),
                           [&](const PauliString& g) { return other.contains(g); });
    }

    bool operator==(const PauliSubgroup& other) const { return n_ == other.n_ && sorted_ == other.sorted_; }

   private:
    friend PauliSubgroup span_group(unsigned n_qubits, std::span<const PauliString> generators);

    unsigned n_ = 0;
    std::vector<PauliString> generators_;
    std::vector<PauliString> elements_;
    std::vector<PauliString> sorted_;
};

namespace detail {

/// Incremental GF(2) row-echelon basis over symplectic vectors.
class Gf2Basis {
   public:
    /// Reduces v against the basis; returns the remainder (0 iff v is in the span).
    uint64_t reduce(uint64_t v) const {
        for (const auto& [pivot, row] : rows_) {
            if (v & pivot) v ^= row;
        }
        return v;
    }

    /// Adds v if independent. Returns true if added.
    bool insert(uint64_t v) {
        v = reduce(v);
        if (v == 0) return false;
        uint64_t pivot = uint64_t{1} << (63 - std::countl_zero(v));
        for (auto& [p, row] : rows_) {
            if (row & pivot) row ^= v;
        }
        rows_.emplace_back(pivot, v);
        return true;
    }

    size_t rank() const { return rows_.size(); }

   private:
    std::vector<std::pair<uint64_t, uint64_t>> rows_;
};

}  // namespace detail

/// Span of `generators`. Dependent and duplicate generators are dropped,
/// keeping the earliest independent ones in input order.
inline PauliSubgroup span_group(unsigned n_qubits, std::span<const PauliString> generators) {
    PauliSubgroup g;
    g.n_ = n_qubits;
    detail::Gf2Basis basis;
    for (const auto& p : generators) {
        if (p.n_qubits() != n_qubits) throw std::invalid_argument("span_group: size mismatch");
        if (basis.insert(p.symplectic())) g.generators_.push_back(p);
    }
    size_t k = g.generators_.size();
    if (k > 24) throw std::invalid_argument("span_group: more than 24 independent generators");
    g.elements_.assign(size_t{1} << k, PauliString::identity(n_qubits));
    for (size_t i = 1; i < g.elements_.size(); ++i) {
        size_t low = static_cast<size_t>(std::countr_zero(i));
        g.elements_[i] = g.elements_[i & (i - 1)] * g.generators_[low];
    }
    g.sorted_ = g.elements_;
    std::sort(g.sorted_.begin(), g.sorted_.end());
    return g;
}

inline PauliSubgroup span_group(unsigned n_qubits, std::initializer_list<PauliString> generators) {
    return span_group(n_qubits, std::span<const PauliString>(generators.begin(), generators.size()));
}

/// The full n-qubit phase-free Pauli group (4^n elements).
inline PauliSubgroup full_pauli_group(unsigned n_qubits) {
    std::vector<PauliString> gens;
    for (unsigned q = 0; q < n_qubits; ++q) {
        gens.push_back(PauliString::single(n_qubits, q, 'X'));
        gens.push_back(PauliString::single(n_qubits, q, 'Z'));
    }
    return span_group(n_qubits, gens);
}

/// Rewrites an independent generating set so each symmetry anticommutes with
/// at most one generator. Symplectic Gaussian elimination: for each symmetry
/// in order, the lowest-index unused generator that anticommutes with it
/// becomes its pivot and is multiplied into every other anticommuting
/// generator. The span is unchanged.
///
/// A symmetry whose commutation pattern is a combination of earlier ones gets
/// no pivot; it then anticommutes with exactly the pivots of those earlier
/// symmetries, which no choice of generators can avoid.
inline std::vector<PauliString> canonicalize_generators(std::span<const PauliString> gens,
                                                        std::span<const PauliString> symmetries) {
    std::vector<PauliString> out(gens.begin(), gens.end());
    std::vector<bool> used(out.size(), false);
    for (const auto& s : symmetries) {
        size_t pivot = out.size();
        for (size_t i = 0; i < out.size(); ++i) {
            if (!used[i] && eta(out[i], s) == -1) {
                pivot = i;
                break;
            }
        }
        if (pivot == out.size()) continue;
        used[pivot] = true;
        for (size_t i = 0; i < out.size(); ++i) {
            if (i != pivot && eta(out[i], s) == -1) out[i] = out[i] * out[pivot];
        }
    }
    return out;
}

struct DetectablePartition {
    PauliSubgroup undetectable;
    std::vector<PauliString> detectable;
};

/// Splits a group into the subgroup commuting with every symmetry and the
/// remaining (detectable) elements. The undetectable subgroup is built from
/// the canonical generators and checked against a direct element filter.
inline DetectablePartition partition_detectable(const PauliSubgroup& group, std::span<const PauliString> symmetries) {
    auto commutes_all = [&](const PauliString& e) {
        return std::all_of(symmetries.begin(), symmetries.end(), [&](const PauliString& s) { return commutes(e, s); });
    };
    auto canon = canonicalize_generators(group.generators(), symmetries);
    std::vector<PauliString> qgens;
    for (const auto& g : canon) {
        if (commutes_all(g)) qgens.push_back(g);
    }
    DetectablePartition out{span_group(group.n_qubits(), qgens), {}};
    size_t n_commuting = 0;
    for (const auto& e : group.elements()) {
        if (commutes_all(e)) {
            ++n_commuting;
            if (!out.undetectable.contains(e)) {
                throw std::logic_error("partition_detectable: commuting element outside canonical subgroup");
            }
        } else {
            out.detectable.push_back(e);
        }
    }
    if (n_commuting != out.undetectable.order()) {
        throw std::logic_error("partition_detectable: undetectable set is not the canonical subgroup");
    }
    return out;
}

/// Pauli expansion of prod_i (I + s_i S_i) / 2. Symmetries must commute.
inline std::vector<SignedPauliTerm> projector_expansion(unsigned n_qubits, std::span<const PauliString> symmetries,
                                                        std::span<const int> eigenvalues) {
    if (symmetries.size() != eigenvalues.size()) {
        throw std::invalid_argument("projector_expansion: symmetries and eigenvalues differ in length");
    }
    PauliSum proj(n_qubits);
    proj.add(PauliString::identity(n_qubits), 1.0);
    for (size_t i = 0; i < symmetries.size(); ++i) {
        if (eigenvalues[i] != 1 && eigenvalues[i] != -1) {
            throw std::invalid_argument("projector_expansion: eigenvalues must be +1 or -1");
        }
        for (size_t j = 0; j < i; ++j) {
            if (!commutes(symmetries[i], symmetries[j])) {
                throw std::invalid_argument("projector_expansion: symmetries must commute");
            }
        }
        PauliSum factor(n_qubits);
        factor.add(PauliString::identity(n_qubits), 0.5);
        factor.add(symmetries[i], 0.5 * eigenvalues[i]);
        proj = proj * factor;
    }
    if (proj.max_imaginary() > 1e-12) throw std::logic_error("projector_expansion: non-real coefficient");
    return proj.real_terms(1e-15);
}

struct ObservableProjection {
    std::vector<SignedPauliTerm> terms;
    double one_norm = 0.0;
};

/// Real expansion of O * Pi and its 1-norm. Fails when an imaginary residual
/// survives, which happens when O does not commute with the symmetries.
inline ObservableProjection observable_projector_product(const PauliString& o,
                                                         std::span<const SignedPauliTerm> projector) {
    PauliSum lhs(o.n_qubits());
    lhs.add(o, 1.0);
    auto prod = lhs * PauliSum::from_terms(o.n_qubits(), projector);
    if (prod.max_imaginary() > 1e-12) {
        throw std::domain_error("observable_projector_product: non-real coefficient; observable does not commute "
                                "with the symmetry");
    }
    ObservableProjection out{prod.real_terms(1e-15), 0.0};
    for (const auto& t : out.terms) out.one_norm += std::abs(t.coefficient);
    return out;
}

/// Maps a local string on `qubits` (local qubit i -> global qubits[i]) into an
/// n_total-qubit string.
inline PauliString embed(const PauliString& local, std::span<const unsigned> qubits, unsigned n_total) {
    if (qubits.size() != local.n_qubits()) throw std::invalid_argument("embed: qubit list size mismatch");
    uint32_t x = 0, z = 0;
    for (size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] >= n_total) throw std::invalid_argument("embed: qubit index out of range");
        x |= ((local.x() >> i) & 1u) << qubits[i];
        z |= ((local.z() >> i) & 1u) << qubits[i];
    }
    return PauliString(n_total, x, z);
}

/// Restriction of a global string to `qubits` (inverse of embed on its support).
inline PauliString restrict_to(const PauliString& global, std::span<const unsigned> qubits) {
    uint32_t x = 0, z = 0;
    for (size_t i = 0; i < qubits.size(); ++i) {
        x |= ((global.x() >> qubits[i]) & 1u) << i;
        z |= ((global.z() >> qubits[i]) & 1u) << i;
    }
    return PauliString(static_cast<unsigned>(qubits.size()), x, z);
}

}  // namespace qemit
