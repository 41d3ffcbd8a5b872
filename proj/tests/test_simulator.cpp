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

#include "qemit/simulator.hpp"

#include <random>

#include "gtest/gtest.h"
#include "oracle.hpp"

using namespace qemit;

static PauliString P(const char* s) { return PauliString::parse(s); }

static oracle::Mat to_mat(const DensityMatrix& d) {
    oracle::Mat m(d.dim(), d.dim());
    for (size_t r = 0; r < d.dim(); ++r) {
        for (size_t c = 0; c < d.dim(); ++c) m(r, c) = d.at(r, c);
    }
    return m;
}

static DensityMatrix from_mat(unsigned n, const oracle::Mat& m) {
    DensityMatrix d(n);
    for (size_t r = 0; r < d.dim(); ++r) {
        for (size_t c = 0; c < d.dim(); ++c) d.at(r, c) = m(r, c);
    }
    return d;
}

/// Full-register matrix of a gate, built entry by entry from the definition.
static oracle::Mat full_gate(unsigned n, const Gate& g) {
    size_t dim = size_t{1} << n, k = g.qubits.size(), d = size_t{1} << k;
    size_t mask = 0;
    for (unsigned q : g.qubits) mask |= size_t{1} << q;
    oracle::Mat u = oracle::Mat::Zero(dim, dim);
    for (size_t r = 0; r < dim; ++r) {
        for (size_t c = 0; c < dim; ++c) {
            if ((r & ~mask) != (c & ~mask)) continue;
            size_t lr = 0, lc = 0;
            for (size_t j = 0; j < k; ++j) {
                lr = 2 * lr + ((r >> g.qubits[j]) & 1);
                lc = 2 * lc + ((c >> g.qubits[j]) & 1);
            }
            u(r, c) = g.matrix[lr * d + lc];
        }
    }
    return u;
}

static Gate random_two_qubit(unsigned n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0, 2 * M_PI);
    unsigned a = rng() % n, b = rng() % (n - 1);
    if (b >= a) ++b;
    switch (rng() % 4) {
        case 0:
            return gates::hopping(a, b, ang(rng), ang(rng));
        case 1:
            return gates::cphase(a, b, ang(rng));
        case 2:
            return gates::fswap(a, b);
        default:
            return gates::cnot(a, b);
    }
}

TEST(gates, unitary) {
    for (const auto& g : {gates::hopping(0, 1, 0.3, 1.1), gates::cphase(0, 1, 0.7), gates::fswap(0, 1),
                          gates::h(0), gates::cnot(0, 1)}) {
        size_t d = size_t{1} << g.qubits.size();
        oracle::Mat u(d, d);
        for (size_t i = 0; i < d * d; ++i) u(i / d, i % d) = g.matrix[i];
        ASSERT_LT((u * u.adjoint() - oracle::Mat::Identity(d, d)).norm(), 1e-14) << g.name;
    }
}

TEST(apply_gate, matches_matrix_oracle) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        unsigned n = 2 + trial % 3;
        auto rho_m = oracle::random_density(n, rng);
        auto rho = from_mat(n, rho_m);
        auto g = random_two_qubit(n, rng);
        apply_gate(rho, g);
        auto u = full_gate(n, g);
        ASSERT_LT((to_mat(rho) - u * rho_m * u.adjoint()).norm(), 1e-12);
    }
}

TEST(apply_channel, routes_agree_with_oracle) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        unsigned n = 2 + trial % 3;
        auto rho_m = oracle::random_density(n, rng);
        unsigned a = rng() % n, b = (a + 1 + rng() % (n - 1)) % n;
        std::vector<unsigned> qs{a, b};
        PauliChannel local = trial % 2 ? group_inverse({0.2, full_pauli_group(2)}) : presets::detectable2(0.3);
        auto r1 = from_mat(n, rho_m), r2 = from_mat(n, rho_m);
        apply_channel_ptm(r1, ptm_diagonal(local), qs);
        apply_channel_conjugation(r2, local, qs);
        auto want = oracle::apply_channel(embed(local, qs, n), rho_m);
        ASSERT_LT((to_mat(r1) - want).norm(), 1e-12);
        ASSERT_LT(r1.max_abs_diff(r2), 1e-12);
    }
}

TEST(apply_channel, ptm_route_on_random_circuits) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        auto r1 = DensityMatrix::basis_state(2, trial % 4), r2 = r1;
        std::vector<unsigned> qs{0, 1};
        for (int step = 0; step < 6; ++step) {
            auto g = random_two_qubit(2, rng);
            apply_gate(r1, g);
            apply_gate(r2, g);
            auto ch = group_to_pauli({0.1 * (1 + step % 3), full_pauli_group(2)});
            apply_channel_ptm(r1, ptm_diagonal(ch), qs);
            apply_channel_conjugation(r2, ch, qs);
        }
        ASSERT_LT(r1.max_abs_diff(r2), 1e-12);
    }
}

TEST(expectation, examples) {
    auto zero = DensityMatrix::basis_state(1, 0);
    ASSERT_NEAR(expectation(zero, P("Z")), 1.0, 1e-15);
    auto mixed = DensityMatrix::maximally_mixed(3);
    for (auto s : {"XII", "ZZZ", "YXI", "IIZ"}) ASSERT_NEAR(expectation(mixed, P(s)), 0.0, 1e-15);
    ASSERT_NEAR(expectation(mixed, P("III")), 1.0, 1e-15);
    auto plus = DensityMatrix::basis_state(1, 0);
    apply_gate(plus, gates::h(0));
    ASSERT_NEAR(expectation(plus, P("X")), 1.0, 1e-15);
}

TEST(expectation, matches_trace_oracle) {
    std::mt19937_64 rng(24);
    auto rho_m = oracle::random_density(3, rng);
    auto rho = from_mat(3, rho_m);
    for (size_t i = 0; i < 64; ++i) {
        auto g = PauliString::from_dense_index(3, i);
        double want = (oracle::pauli_matrix(g) * rho_m).trace().real();
        ASSERT_NEAR(expectation(rho, g), want, 1e-12) << g;
    }
}

static NoisyCircuit single_gate(unsigned n, Gate g, std::optional<NoiseSite> site = std::nullopt) {
    NoisyCircuit c;
    c.n_qubits = n;
    c.gates.push_back(std::move(g));
    c.noise.push_back(std::move(site));
    return c;
}

TEST(run_exact, examples) {
    std::mt19937_64 rng(25);
    NoisyCircuit c;
    c.n_qubits = 4;
    for (int i = 0; i < 12; ++i) {
        auto g = random_two_qubit(4, rng);
        c.noise.push_back(NoiseSite::from_group(g.qubits, presets::depolarizing(2, 0.05)));
        c.gates.push_back(std::move(g));
    }
    auto clean = run_exact(c, 0.0);
    ASSERT_NEAR(clean.purity(), 1.0, 1e-10);
    auto noisy = run_exact(c, 1.0);
    ASSERT_LT(noisy.purity(), 0.99);
    ASSERT_NEAR(noisy.trace().real(), 1.0, 1e-10);
    ASSERT_LT(noisy.hermiticity_error(), 1e-10);
    ASSERT_THROW(run_exact(c, 30.0), std::invalid_argument);

    auto xc = single_gate(1, gates::x(0));
    ASSERT_NEAR(expectation(run_exact(xc), P("Z")), -1.0, 1e-15);

    std::vector<unsigned> q0{0};
    auto hc = single_gate(1, gates::h(0), NoiseSite::from_channel(q0, presets::dephasing(0.5)));
    ASSERT_NEAR(expectation(run_exact(hc), P("X")), 0.5, 1e-12);
}

TEST(run_exact, inverse_channels_restore_noiseless) {
    std::mt19937_64 rng(26);
    NoisyCircuit noisy, clean;
    noisy.n_qubits = clean.n_qubits = 4;
    for (int i = 0; i < 10; ++i) {
        auto g = random_two_qubit(4, rng);
        GroupChannel gc{0.08, full_pauli_group(2)};
        auto eff = compose(group_inverse(gc), group_to_pauli(gc));
        noisy.noise.push_back(NoiseSite::from_channel(g.qubits, eff));
        clean.noise.push_back(std::nullopt);
        noisy.gates.push_back(g);
        clean.gates.push_back(g);
    }
    ASSERT_LT(run_exact(noisy).max_abs_diff(run_exact(clean)), 1e-10);
}

TEST(symmetry_partition, examples) {
    std::mt19937_64 rng(27);
    NoisyCircuit c;
    c.n_qubits = 4;
    c.initial_bits = 0b0101;
    for (int i = 0; i < 12; ++i) {
        auto g = i % 2 ? gates::hopping(i % 4, (i + 1) % 4, 0.4 * i, 0.3) : gates::cphase(i % 4, (i + 2) % 4, 0.9);
        c.noise.push_back(NoiseSite::from_channel(g.qubits, presets::detectable2(0.04)));
        c.gates.push_back(g);
    }
    auto sym = P("ZZZZ");
    auto clean = run_exact(c, 0.0);
    auto r0 = symmetry_partition(clean, sym, +1, P("XXII"));
    ASSERT_NEAR(r0.p_pass, 1.0, 1e-12);

    auto noisy = run_exact(c, 1.0);
    for (auto o : {P("XXII"), P("ZIII"), P("YZYI"), P("IIZZ")}) {
        auto r = symmetry_partition(noisy, sym, +1, o);
        ASSERT_NEAR(r.p_pass * r.o_pass + (1 - r.p_pass) * r.o_fail, expectation(noisy, o), 1e-12);
    }
    ASSERT_THROW(symmetry_partition(noisy, sym, +1, P("XIII")), std::invalid_argument);
    ASSERT_THROW(symmetry_partition(clean, sym, -1, P("ZIII")), std::domain_error);
}

TEST(symmetry_partition, matches_projector_oracle) {
    std::mt19937_64 rng(28);
    auto rho_m = oracle::random_density(3, rng);
    auto rho = from_mat(3, rho_m);
    auto sym = P("ZZZ");
    oracle::Mat pi = 0.5 * (oracle::Mat::Identity(8, 8) - oracle::pauli_matrix(sym));
    auto o = P("XYZ");
    auto r = symmetry_partition(rho, sym, -1, o);
    double pp = (pi * rho_m).trace().real();
    ASSERT_NEAR(r.p_pass, pp, 1e-12);
    ASSERT_NEAR(r.o_pass, (oracle::pauli_matrix(o) * pi * rho_m).trace().real() / pp, 1e-12);
}

TEST(run_count_resolved, examples) {
    std::mt19937_64 rng(29);
    NoisyCircuit c;
    c.n_qubits = 3;
    for (int i = 0; i < 2; ++i) {
        auto g = random_two_qubit(3, rng);
        c.noise.push_back(NoiseSite::from_group(g.qubits, presets::depolarizing(2, 0.1)));
        c.gates.push_back(g);
    }
    auto cr = run_count_resolved(c, 1.0, 2);
    ASSERT_NEAR(cr.layers[0].weight, 0.81, 1e-12);
    ASSERT_NEAR(cr.layers[1].weight, 0.18, 1e-12);
    ASSERT_NEAR(cr.layers[2].weight, 0.01, 1e-12);
    ASSERT_NEAR(cr.truncated_mass, 0.0, 1e-15);
    auto clean = run_exact(c, 0.0);
    clean *= 0.81;
    ASSERT_LT(cr.layers[0].state.max_abs_diff(clean), 1e-12);
    ASSERT_LT(cr.summed_state().max_abs_diff(run_exact(c, 1.0)), 1e-12);

    auto cr1 = run_count_resolved(c, 1.0, 1);
    ASSERT_NEAR(cr1.truncated_mass, 0.01, 1e-12);
    double total = cr1.truncated_mass;
    for (const auto& l : cr1.layers) total += l.weight;
    ASSERT_NEAR(total, 1.0, 1e-10);
}

TEST(run_count_resolved, poisson_limit) {
    std::vector<double> probs(144, 1.0 / 144.0);
    auto dist = firing_count_distribution(probs, 10);
    double fact = 1;
    for (int l = 0; l <= 4; ++l) {
        if (l > 0) fact *= l;
        double poisson = std::exp(-1.0) / fact;
        ASSERT_NEAR(dist[l], poisson, 0.01) << l;
        if (l <= 3) ASSERT_NEAR(dist[l] / poisson, 1.0, 0.01) << l;
    }
    double total = 0;
    for (double d : dist) total += d;
    ASSERT_NEAR(total, 1.0, 1e-12);
}

TEST(run_count_resolved, default_l_max_and_strict) {
    std::vector<double> probs(144, 2.0 / 144.0);
    int l = default_l_max(probs);
    ASSERT_EQ(l, 10);
    std::vector<double> small(100, 0.001);
    ASSERT_EQ(default_l_max(small), 4);

    NoisyCircuit c;
    c.n_qubits = 2;
    c.gates = {gates::fswap(0, 1), gates::fswap(0, 1)};
    c.noise = {NoiseSite::from_group({0, 1}, presets::depolarizing(2, 0.1)),
               NoiseSite::from_group({0, 1}, presets::depolarizing(2, 0.2))};
    ASSERT_THROW(run_count_resolved(c, 1.0, 2, true), std::invalid_argument);
    ASSERT_NO_THROW(run_count_resolved(c, 1.0, 2, false));
}

TEST(run_count_resolved, reproduces_run_exact_within_truncation) {
    std::mt19937_64 rng(30);
    NoisyCircuit c;
    c.n_qubits = 4;
    for (int i = 0; i < 20; ++i) {
        auto g = random_two_qubit(4, rng);
        c.noise.push_back(NoiseSite::from_group(g.qubits, presets::depolarizing(2, 0.05)));
        c.gates.push_back(g);
    }
    auto cr = run_count_resolved(c, 1.0, 3);
    auto exact = run_exact(c, 1.0);
    auto sum = cr.summed_state();
    for (auto o : {P("ZZII"), P("XYXY"), P("IIIZ")}) {
        double diff = std::abs(expectation(sum, o) - expectation(exact, o));
        ASSERT_LE(diff, cr.truncated_mass + 1e-12);
    }
}
