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

#include "qemit/circuits.hpp"

#include <random>

#include "gtest/gtest.h"
#include "qemit/trajectory.hpp"

using namespace qemit;

static PauliString P(const char* s) { return PauliString::parse(s); }

static uint32_t bits_from(const char* s) {
    uint32_t b = 0;
    for (size_t i = 0; s[i]; ++i) b |= static_cast<uint32_t>(s[i] == '1') << i;
    return b;
}

TEST(build_circuit, default_2x2) {
    FhCircuitSpec spec;
    auto c = build_circuit(spec);
    ASSERT_EQ(c.n_qubits, 8u);
    ASSERT_EQ(c.gates.size(), 144u);
    ASSERT_EQ(two_qubit_gate_count(c), 144u);
    for (unsigned q = 0; q < 8; ++q) ASSERT_EQ(c.mode_permutation[q], q);
    size_t hops = 0, phases = 0, swaps = 0;
    for (const auto& g : c.gates) {
        hops += g.name == "HOP";
        phases += g.name == "CPHASE";
        swaps += g.name == "FSWAP";
        ASSERT_EQ(g.qubits[1], g.qubits[0] + 1) << "gates act on adjacent qubits";
    }
    ASSERT_EQ(hops, 32u);
    ASSERT_EQ(phases, 16u);
    ASSERT_EQ(swaps, 96u);
    ASSERT_EQ(c.initial_bits, bits_from("10011001"));
}

TEST(build_circuit, odd_layer_count_permutes_modes) {
    FhCircuitSpec spec;
    spec.layers = 1;
    auto c = build_circuit(spec);
    ASSERT_EQ(c.gates.size(), 36u);
    std::vector<unsigned> want{6, 7, 4, 5, 2, 3, 0, 1};
    ASSERT_EQ(c.mode_permutation, want);
}

TEST(build_circuit, parameter_count) {
    FhCircuitSpec spec;
    ASSERT_EQ(fh::params_per_layer(2, 2), 20u);
    spec.params.assign(79, 0.0);
    ASSERT_THROW(build_circuit(spec), std::invalid_argument);
    spec.params.assign(80, 0.0);
    ASSERT_NO_THROW(build_circuit(spec));
    spec.lx = 3;
    spec.ly = 3;
    spec.params.clear();
    ASSERT_THROW(build_circuit(spec), std::invalid_argument);
}

TEST(build_circuit, zero_angles_leave_only_swaps) {
    FhCircuitSpec spec;
    spec.params.assign(80, 0.0);
    auto c = build_circuit(spec);
    for (const auto& g : c.gates) {
        if (g.name == "FSWAP") continue;
        for (size_t r = 0; r < 4; ++r) {
            for (size_t k = 0; k < 4; ++k) ASSERT_NEAR(std::abs(g.matrix[r * 4 + k] - (r == k ? 1.0 : 0.0)), 0, 1e-15);
        }
    }
    auto rho = run_exact(c);
    auto s = parity_symmetry(8);
    ASSERT_NEAR(expectation(rho, s), 1.0, 1e-12);
}

TEST(build_circuit, parity_conserved_from_01010101) {
    FhCircuitSpec spec;
    spec.initial_bits = bits_from("01010101");
    spec.seed = 17;
    auto c = build_circuit(spec);
    auto rho = run_exact(c);
    ASSERT_NEAR(expectation(rho, parity_symmetry(8)), 1.0, 1e-12);
    spec.initial_bits = bits_from("01010100");
    ASSERT_NEAR(expectation(run_exact(build_circuit(spec)), parity_symmetry(8)), -1.0, 1e-12);
}

TEST(build_circuit, parity_eigenspaces_preserved_for_random_draws) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> nd;
    auto s = parity_symmetry(8);
    for (uint64_t seed = 0; seed < 1000; ++seed) {
        FhCircuitSpec spec;
        spec.seed = seed;
        auto c = build_circuit(spec);
        StateVector psi(8);
        for (auto& a : psi.amplitudes()) a = cplx(nd(rng), nd(rng));
        int sector = seed % 2 ? 1 : -1;
        psi.project(s, sector);
        for (const auto& g : c.gates) psi.apply(g);
        StateVector leak = psi;
        leak.project(s, sector);
        double overlap = 0;
        for (size_t i = 0; i < 256; ++i) overlap += std::norm(psi.amplitudes()[i] - leak.amplitudes()[i]);
        ASSERT_LT(std::sqrt(overlap), 1e-12) << seed;
    }
}

TEST(build_circuit, spin_numbers_conserved) {
    FhCircuitSpec spec;
    spec.seed = 5;
    spec.layers = 3;
    auto c = build_circuit(spec);
    auto rho = run_exact(c);
    // n = (1 - Z)/2 summed over the qubits holding each spin species.
    for (unsigned spin = 0; spin < 2; ++spin) {
        double n = 0;
        for (unsigned q = 0; q < 8; ++q) {
            if (c.mode_permutation[q] % 2 == spin) n += 0.5 * (1.0 - expectation(rho, PauliString::single(8, q, 'Z')));
        }
        ASSERT_NEAR(n, 2.0, 1e-12) << spin;
    }
}

TEST(build_circuit, swaps_preserve_fermionic_energy) {
    // With all angles zero the circuit only relabels modes; the Hamiltonian
    // written in the final ordering must give the same energy as the input.
    std::mt19937_64 rng(43);
    std::normal_distribution<double> nd;
    FhCircuitSpec spec;
    spec.layers = 1;
    spec.params.assign(20, 0.0);
    auto c = build_circuit(spec);
    auto h0 = hamiltonian_terms(2, 2, 1.0, 4.0);
    auto h1 = hamiltonian_terms(2, 2, 1.0, 4.0, c.mode_permutation);
    for (int trial = 0; trial < 5; ++trial) {
        StateVector psi(8);
        for (auto& a : psi.amplitudes()) a = cplx(nd(rng), nd(rng));
        double n = std::sqrt(psi.norm2());
        for (auto& a : psi.amplitudes()) a /= n;
        auto rho_in = DensityMatrix::from_pure(8, psi.amplitudes());
        for (const auto& g : c.gates) psi.apply(g);
        auto rho_out = DensityMatrix::from_pure(8, psi.amplitudes());
        ASSERT_NEAR(expectation(rho_out, h1), expectation(rho_in, h0), 1e-10);
    }
}

TEST(build_circuit, seed_determinism) {
    FhCircuitSpec a, b, c;
    a.seed = b.seed = 99;
    c.seed = 100;
    auto pa = draw_params(a), pb = draw_params(b), pc = draw_params(c);
    ASSERT_EQ(pa, pb);
    ASSERT_NE(pa, pc);
    for (double v : pa) {
        ASSERT_GE(v, 0.0);
        ASSERT_LT(v, 2 * M_PI);
    }
    auto ca = build_circuit(a), cb = build_circuit(b);
    for (size_t i = 0; i < ca.gates.size(); ++i) ASSERT_EQ(ca.gates[i].matrix, cb.gates[i].matrix);
}

TEST(hamiltonian_terms, structure) {
    auto all = hamiltonian_observables(2, 2);
    ASSERT_EQ(all.size(), 28u);
    auto s = parity_symmetry(8);
    for (const auto& t : hamiltonian_terms(2, 2, 1.3, 2.7)) ASSERT_EQ(eta(t.string, s), 1) << t.string;

    for (const auto& t : hamiltonian_terms(2, 2, 1.0, 0.0)) {
        ASSERT_NE(t.string.x(), 0u) << "u=0 leaves only hopping terms";
    }
    for (const auto& t : hamiltonian_terms(2, 2, 0.0, 1.0)) ASSERT_EQ(t.string.x(), 0u);
}

TEST(hamiltonian_terms, two_site_chain) {
    // Modes: 0 = site0 up, 1 = site0 down, 2 = site1 up, 3 = site1 down.
    auto h = hamiltonian_terms(2, 1, 1.0, 2.0);
    std::map<std::string, double> got;
    for (const auto& t : h) got[t.string.str()] = t.coefficient;
    ASSERT_NEAR(got["XZXI"], -0.5, 1e-15);
    ASSERT_NEAR(got["YZYI"], -0.5, 1e-15);
    ASSERT_NEAR(got["IXZX"], -0.5, 1e-15);
    ASSERT_NEAR(got["IYZY"], -0.5, 1e-15);
    ASSERT_NEAR(got["ZZII"], 0.5, 1e-15);
    ASSERT_NEAR(got["ZIII"], -0.5, 1e-15);
    ASSERT_NEAR(got["IIII"], 1.0, 1e-15);
}

TEST(parity_symmetry, examples) {
    ASSERT_EQ(parity_symmetry(2), P("ZZ"));
    ASSERT_EQ(parity_symmetry(8), P("ZZZZZZZZ"));
    ASSERT_EQ(eta(parity_symmetry(1), P("X")), -1);
}

TEST(attach_noise, examples) {
    auto c = build_circuit(FhCircuitSpec{});
    auto clean = attach_noise(c, NoiseModel::Depolarizing, 0.0);
    ASSERT_EQ(clean.mean_error_count(), 0.0);
    ASSERT_LT(run_exact(clean).max_abs_diff(run_exact(c)), 1e-15);

    auto dep = attach_noise(c, NoiseModel::Depolarizing, 1.0);
    double mu_eps = 0;
    for (const auto& s : dep.noise) {
        ASSERT_TRUE(s.has_value());
        ASSERT_NEAR(s->p, 1.0 / 144.0, 1e-15);
        mu_eps += s->channel().non_identity_probability();
    }
    ASSERT_NEAR(mu_eps, 15.0 / 16.0, 1e-12);

    auto det = attach_noise(c, NoiseModel::Detectable, 0.5);
    for (const auto& s : det.noise) {
        ASSERT_NEAR(s->p, 0.5 / 144.0, 1e-15);
        for (const auto& [p, w] : s->firing.terms()) ASSERT_EQ(eta(p, P("ZZ")), -1);
    }
    ASSERT_THROW(attach_noise(c, NoiseModel::Depolarizing, 200.0), std::invalid_argument);
    ASSERT_THROW(attach_noise(c, NoiseModel::Depolarizing, -1.0), std::invalid_argument);
}
