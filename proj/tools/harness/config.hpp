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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qemit/channels.hpp"
#include "qemit/circuits.hpp"

namespace qemit::harness {

/// Bad configuration or command-line input (exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A noise model applied after every two-qubit gate with p = mu / M.
struct NoiseSpec {
    std::string name;
    PauliChannel firing = PauliChannel::identity(2);  // weights sum to 1
};

struct McConfig {
    size_t trajectories = 100000;
    unsigned lx = 2, ly = 1, layers = 12;
    double mu_eps = 0.5;  // quasi-probability check, depolarizing noise
    double mu_d = 0.5;    // retention check, detectable noise
    std::string observable = "XZXI";
};

struct CostGrid {
    std::vector<double> gammas{0.0, 0.5, 1.0};
    double mu_min = 0.05, mu_max = 4.0, mu_step = 0.05;
    double lambda = 2.0;
    double eps_ratio = 15.0 / 16.0;  // mu_eps / mu
    double d_ratio = 0.5;            // mu_d / mu
};

struct ExperimentConfig {
    FhCircuitSpec circuit;
    std::vector<NoiseSpec> noise;
    std::vector<double> probes{0.5, 1.0, 1.5, 2.0};
    std::vector<std::string> methods{"QE", "QH", "Q"};
    std::vector<double> mitigate_mu{1.0, 2.0};
    double lambda = 2.0;
    unsigned k_max = 2;
    double fit_tol = 1e-4;
    double outlier_factor = 10.0;
    McConfig mc;
    CostGrid costs;
    std::string out_dir = "results";

    /// Hex FNV-1a digest of canonical().
    std::string hash() const;
    /// Normalized YAML rendering; equal configs render identically.
    std::string canonical() const;
};

ExperimentConfig default_config();

/// Parses YAML text; `origin` prefixes diagnostics ("origin:line:col: ...").
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Throws ConfigError if any invariant is violated.
void validate(const ExperimentConfig& cfg);

NoiseSpec noise_preset(const std::string& name);
NoisyCircuit attach(const NoisyCircuit& c, const NoiseSpec& noise, double mu);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace qemit::harness
