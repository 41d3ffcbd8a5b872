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

#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "output.hpp"

namespace qemit::harness {

/// Fit divergence, or every observable flagged by hyperbolic extrapolation (exit code 3).
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string out_dir = "results";
    unsigned threads = 1;
};

/// Observables measured on the FH circuit: the distinct non-identity Hamiltonian strings.
std::vector<PauliString> observables(const FhCircuitSpec& spec, const NoisyCircuit& c);

// decay-scan: per noise model, observable,mu,value with mu = 0 the noiseless value.
Csv decay_table(const ExperimentConfig& cfg, const NoiseSpec& noise, unsigned threads);
// Conditional expectations given exactly l firings: observable,l,weight,value.
Csv count_table(const ExperimentConfig& cfg, const NoiseSpec& noise);
std::vector<std::string> cmd_decay_scan(const ExperimentConfig& cfg, const RunOptions& run, bool count_resolved);

struct FitSettings {
    unsigned k_max = 2;
    double tol = 1e-4;
    double outlier_factor = 10.0;
    bool audit = false;
};

/// One row per observable; eps1 / eps2 are the single- and dual-exponential biases.
Csv fit_table(const Csv& decay, const FitSettings& s);
/// Aggregates computed from the rendered detail rows, so they can be re-derived from the file.
Csv fit_summary(const Csv& detail, double outlier_factor);
std::vector<std::string> cmd_fit(const std::string& input, const FitSettings& s, const RunOptions& run);

Csv mitigate_table(const ExperimentConfig& cfg, const std::vector<std::string>& methods, unsigned threads);
Csv mitigate_summary(const Csv& detail);
std::vector<std::string> cmd_mitigate(const ExperimentConfig& cfg, const std::vector<std::string>& methods,
                                      const RunOptions& run, bool audit);

struct CostTables {
    Csv grid;       // gamma,mu,c_q0,c_qe,c_qh
    Csv crossings;  // gamma,pair,mu
};
CostTables cost_tables(const CostGrid& g);
std::vector<std::string> cmd_costs(const ExperimentConfig& cfg, const RunOptions& run);

nlohmann::ordered_json mc_report(const ExperimentConfig& cfg, unsigned threads);
std::vector<std::string> cmd_mc_validate(const ExperimentConfig& cfg, const RunOptions& run);

/// Rows sorted by the given key columns; numeric columns compare as numbers.
void sort_rows(Csv& csv, const std::vector<std::pair<size_t, bool>>& keys);

}  // namespace qemit::harness
