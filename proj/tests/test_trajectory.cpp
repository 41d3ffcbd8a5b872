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

#include "qemit/trajectory.hpp"

#include <random>

#include "gtest/gtest.h"
#include "qemit/circuits.hpp"

using namespace qemit;

static PauliString P(const char* s) { return PauliString::parse(s); }

static NoisyCircuit chain(unsigned layers, uint64_t seed = 3) {
    FhCircuitSpec spec;
    spec.lx = 2;
    spec.ly = 1;
    spec.layers = layers;
    spec.seed = seed;
    return build_circuit(spec);
}

static std::vector<std::optional<QuasiDecomposition>> full_inverse(const NoisyCircuit& c) {
    std::vector<std::optional<QuasiDecomposition>> out;
    for (const auto& s : c.noise) {
        if (s) {
            out.push_back(decompose(invert_channel(s->channel())));
        } else {
            out.push_back(std::nullopt);
        }
    }
    return out;
}

TEST(StateVector, matches_density_matrix) {
    auto c = chain(2);
    StateVector psi(4, c.initial_bits);
    for (const auto& g : c.gates) psi.apply(g);
    auto rho = run_exact(c);
    for (const char* o : {"ZIII", "XZXI", "YZYI", "ZZII", "IXZX"}) {
        ASSERT_NEAR(psi.expectation(P(o)), expectation(rho, P(o)), 1e-12) << o;
    }
    StateVector y(1);
    y.apply(P("Y"));
    ASSERT_NEAR(std::abs(y.amplitudes()[1] - cplx(0, 1)), 0, 1e-15);
}

TEST(mc_trajectory, zero_noise) {
    auto c = chain(2);
    auto truth = expectation(run_exact(c), P("XZXI"));
    TrajectoryPlan plan{P("XZXI")};
    plan.symmetry = parity_symmetry(4);
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        auto r = mc_trajectory(c, plan, rng);
        ASSERT_NEAR(r.value, truth, 1e-12);
        ASSERT_EQ(r.sign, 1);
        ASSERT_TRUE(r.passed);
    }
}

TEST(mc_trajectory, noisy_values_average_to_exact) {
    auto c = attach_noise(chain(3), NoiseModel::Depolarizing, 1.0);
    auto o = P("ZZII");
    double truth = expectation(run_exact(c), o);
    TrajectoryEngine engine(c, TrajectoryPlan{o});
    auto st = run_trajectories(engine, 40000, 9);
    double se = std::sqrt((st.sum_sv2 / st.n - std::pow(st.sum_sv / st.n, 2)) / st.n);
    ASSERT_NEAR(st.estimate_values(), truth, 4 * se);
    ASSERT_NEAR(st.estimate(), truth, 4 * st.standard_error());
}

TEST(mc_trajectory, quasi_probability_is_unbiased) {
    auto c = attach_noise(chain(3), NoiseModel::Depolarizing, 0.5 * 16.0 / 15.0);
    auto o = P("XZXI");
    double ideal = expectation(run_exact(c, 0.0), o);
    TrajectoryPlan plan{o};
    plan.corrections = full_inverse(c);
    TrajectoryEngine engine(c, plan);
    auto st = run_trajectories(engine, 100000, 21, 4);
    ASSERT_NEAR(st.estimate(), ideal, 3 * st.standard_error());

    // Var(Q s shot) = Q^2 - <O>^2 for +-1 shots.
    double predicted = st.q * st.q - ideal * ideal;
    ASSERT_NEAR(st.variance_shot() / predicted, 1.0, 0.1);
    ASSERT_NEAR(st.q * st.q, std::exp(4 * 0.5), 0.1 * std::exp(2.0));
}

TEST(mc_trajectory, thread_count_does_not_change_results) {
    auto c = attach_noise(chain(2), NoiseModel::Depolarizing, 0.7);
    TrajectoryPlan plan{P("ZIII")};
    plan.corrections = full_inverse(c);
    TrajectoryEngine engine(c, plan);
    auto a = run_trajectories(engine, 5000, 4, 1);
    auto b = run_trajectories(engine, 5000, 4, 3);
    ASSERT_EQ(a.sum_ss, b.sum_ss);
    ASSERT_EQ(a.sum_sv, b.sum_sv);
    ASSERT_EQ(a.n, 5000u);
}

TEST(mc_trajectory, retention_matches_simulator) {
    auto c = attach_noise(chain(12), NoiseModel::Detectable, 0.5);
    auto s = parity_symmetry(4);
    auto part = symmetry_partition(run_exact(c), s, 1, P("ZZII"));
    size_t m = c.noise_site_count();
    double exact = 0.5 * (1.0 + std::pow(1.0 - 2.0 * 0.5 / m, m));
    ASSERT_NEAR(part.p_pass, exact, 1e-12);

    TrajectoryPlan plan{P("ZZII")};
    plan.symmetry = s;
    TrajectoryEngine engine(c, plan);
    auto st = run_trajectories(engine, 50000, 5);
    double sigma = std::sqrt(exact * (1 - exact) / st.n);
    ASSERT_NEAR(st.pass_fraction(), exact, 3 * sigma);
}

TEST(TrajectoryEngine, rejects_bad_plans) {
    auto c = chain(1);
    TrajectoryPlan plan{P("ZZZ")};
    ASSERT_THROW(TrajectoryEngine(c, plan), std::invalid_argument);
    plan.observable = P("ZZZZ");
    plan.corrections.resize(3);
    ASSERT_THROW(TrajectoryEngine(c, plan), std::invalid_argument);
    auto noisy = attach_noise(c, NoiseModel::Depolarizing, 1.0);
    TrajectoryPlan scaled{P("ZZZZ")};
    scaled.scale = 1000.0;
    ASSERT_THROW(TrajectoryEngine(noisy, scaled), std::invalid_argument);
}
