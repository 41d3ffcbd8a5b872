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

#include "qemit/quasiprob.hpp"

#include <random>

#include "gtest/gtest.h"
#include "oracle.hpp"

using namespace qemit;

static PauliString P(const char* s) { return PauliString::parse(s); }

TEST(decompose, physical_channel) {
    auto dec = decompose(presets::detectable2(0.2));
    ASSERT_NEAR(dec.one_norm(), 1.0, 1e-15);
    for (const auto& op : dec.ops()) ASSERT_EQ(op.sign, 1);
}

TEST(decompose, inverse_depolarizing) {
    auto inv = group_inverse({0.1, full_pauli_group(1)});
    auto dec = decompose(inv);
    ASSERT_NEAR(dec.one_norm(), 1.0 + 2.0 * 0.75 * (0.1 / 0.9), 1e-12);
    ASSERT_NEAR(dec.one_norm(), 1.1666666666666667, 1e-12);
    ASSERT_NEAR(dec.one_norm() * dec.one_norm(), cost_invert_group(0.1, 4), 1e-12);
    int negatives = 0;
    for (const auto& op : dec.ops()) negatives += op.sign < 0;
    ASSERT_EQ(negatives, 3);
}

TEST(decompose, identity_and_errors) {
    auto dec = decompose(PauliChannel::identity(2));
    ASSERT_EQ(dec.ops().size(), 1u);
    ASSERT_EQ(dec.ops()[0].insertion, P("II"));
    ASSERT_EQ(dec.ops()[0].sign, 1);
    ASSERT_EQ(dec.one_norm(), 1.0);
    ASSERT_THROW(decompose(PauliChannel(1)), std::invalid_argument);
}

TEST(decompose, reconstructs_action) {
    std::mt19937_64 rng(12);
    std::vector<PauliChannel> maps{group_inverse({0.2, full_pauli_group(2)}),
                                   transform_map({0.2, full_pauli_group(2)}, presets::detectable2(0.05)),
                                   invert_channel(group_to_pauli({0.1, full_pauli_group(3)}))};
    for (const auto& m : maps) {
        auto dec = decompose(m);
        double total = 0;
        for (const auto& op : dec.ops()) total += op.probability;
        ASSERT_NEAR(total, 1.0, 1e-12);
        unsigned n = m.n_qubits();
        for (int trial = 0; trial < 3; ++trial) {
            auto rho = oracle::random_density(n, rng);
            oracle::Mat acc = oracle::Mat::Zero(rho.rows(), rho.cols());
            for (const auto& op : dec.ops()) {
                auto g = oracle::pauli_matrix(op.insertion);
                acc += dec.one_norm() * op.sign * op.probability * g * rho * g.adjoint();
            }
            ASSERT_LT((acc - oracle::apply_channel(m, rho)).norm(), 1e-10);
        }
    }
}

TEST(sample, identity_is_deterministic) {
    auto dec = decompose(PauliChannel::identity(1));
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        auto s = sample(dec, rng);
        ASSERT_EQ(s.insertion, P("I"));
        ASSERT_EQ(s.sign, 1);
    }
}

TEST(sample, frequencies_within_3_sigma) {
    QuasiDecomposition dec({{0.5, +1, P("I")}, {0.5, -1, P("X")}}, 2.0);
    Rng rng(99);
    const int n = 100000;
    int xs = 0;
    for (int i = 0; i < n; ++i) {
        auto s = sample(dec, rng);
        if (s.insertion == P("X")) {
            ++xs;
            ASSERT_EQ(s.sign, -1);
        } else {
            ASSERT_EQ(s.sign, +1);
        }
    }
    double sigma = std::sqrt(n * 0.25);
    ASSERT_LT(std::abs(xs - n * 0.5), 3 * sigma);
}

TEST(sample, seeded_reproducible) {
    auto dec = decompose(group_inverse({0.3, full_pauli_group(2)}));
    Rng a(2024), b(2024);
    for (int i = 0; i < 1000; ++i) {
        auto x = sample(dec, a), y = sample(dec, b);
        ASSERT_EQ(x.insertion, y.insertion);
        ASSERT_EQ(x.sign, y.sign);
    }
    auto s1 = make_stream(5, 0), s2 = make_stream(5, 1);
    ASSERT_NE(s1(), s2());
}

TEST(cost_invert_group, examples) {
    ASSERT_EQ(cost_invert_group(0.0, 16), 1.0);
    // 1 + 2 (3/4) (1/9) = 7/6, the one-norm of the inverse map above.
    ASSERT_NEAR(cost_invert_group(0.1, 4), (7.0 / 6.0) * (7.0 / 6.0), 1e-12);
    ASSERT_NEAR(cost_invert_group(0.1, 4), 1.36111, 1e-5);
    double p = 1e-4;
    ASSERT_NEAR(cost_invert_group(p, 16), 1.0 + 4.0 * (15.0 / 16.0) * p, 1e-7);
    ASSERT_THROW(cost_invert_group(1.0, 4), std::invalid_argument);
}

TEST(cost_invert_group, equals_squared_one_norm) {
    for (unsigned n = 1; n <= 3; ++n) {
        auto g = full_pauli_group(n);
        for (double p : {0.01, 0.2, 0.6}) {
            double q = group_inverse({p, g}).one_norm();
            ASSERT_NEAR(cost_invert_group(p, g.order()), q * q, 1e-12);
        }
    }
}

TEST(cost_transform, examples) {
    ASSERT_EQ(cost_transform(0.01, 0.01), 1.0);
    ASSERT_NEAR(cost_transform(0.01, 0.0), 1.04, 1e-15);
    ASSERT_NEAR(cost_transform(0.01, 0.005), 1.02, 1e-15);
    ASSERT_THROW(cost_transform(0.01, 0.02), std::invalid_argument);
}

TEST(cost_transform_exact, examples) {
    ASSERT_NEAR(cost_transform_exact(0.2, 0.1, 16, 8), 1.21875 * 1.21875, 1e-12);
    ASSERT_NEAR(cost_transform_exact(0.2, 0.1, 16, 8), 1.48535, 1e-5);
    for (double p : {1e-3, 1e-2}) {
        double diff = cost_transform_exact(p, 0.0, 16, 8) - cost_invert_group(p, 16);
        ASSERT_LT(std::abs(diff), 10 * p * p);
    }
    ASSERT_EQ(cost_transform_exact(0.0, 0.0, 16, 8), 1.0);
    ASSERT_THROW(cost_transform_exact(0.1, 0.0, 16, 3), std::invalid_argument);
}

TEST(cost_transform_exact, equals_squared_one_norm_of_map) {
    auto e = full_pauli_group(2);
    auto qs = presets::zz_undetectable();
    for (double p : {0.01, 0.1, 0.3}) {
        for (double q : {0.0, 0.002, 0.02, p / 2, 0.2, 0.5}) {
            double one = transform_map({p, e}, detectable_channel(q, e, qs)).one_norm();
            ASSERT_NEAR(cost_transform_exact(p, q, 16, 8), one * one, 1e-12) << p << " " << q;
        }
    }
}

TEST(cost_transform_exact, monotone_in_q) {
    double p = 0.2, p_d = 0.1;
    double prev = cost_transform_exact(p, 0.0, 16, 8);
    for (int i = 1; i <= 200; ++i) {
        double q = 0.5 * i / 200.0;
        double c = cost_transform_exact(p, q, 16, 8);
        if (q < p_d) {
            ASSERT_LE(c, prev + 1e-15);
        } else {
            ASSERT_NEAR(c, cost_transform_exact(p, p_d, 16, 8), 1e-15);
        }
        prev = c;
    }
}

TEST(circuit_cost, examples) {
    ASSERT_EQ(circuit_cost(0.7, 0.7), 1.0);
    double c1 = circuit_cost(15.0 / 16.0, 0.0);
    ASSERT_NEAR(c1, std::exp(3.75), 1e-12);
    ASSERT_NEAR(c1, 43.0, 43.0 * 0.02);
    double c2 = circuit_cost(1.875, 0.0);
    ASSERT_NEAR(c2, 1808.04, 0.01);
    ASSERT_NEAR(c2, 1800.0, 1800.0 * 0.02);
    ASSERT_THROW(circuit_cost(0.1, 0.2), std::invalid_argument);
}
