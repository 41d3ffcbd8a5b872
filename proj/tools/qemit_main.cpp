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

// qemit: experiment driver. Exit codes: 0 success, 2 configuration or usage
// error, 3 numerical failure.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "harness/commands.hpp"
#include "qemit/error.hpp"

using namespace qemit::harness;

namespace {

struct Common {
    std::string config;
    std::optional<uint64_t> seed;
    std::string out;
    unsigned threads = 1;

    ExperimentConfig load() const {
        auto cfg = config.empty() ? default_config() : load_config(config);
        if (seed) cfg.circuit.seed = *seed;
        return cfg;
    }

    RunOptions run(const ExperimentConfig& cfg) const { return {out.empty() ? cfg.out_dir : out, threads}; }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "Experiment config (YAML)")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "Circuit seed, overrides the config");
    app->add_option("--out", c.out, "Output directory (default: output.dir from the config)");
    app->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1u, 256u));
}

void report(const std::vector<std::string>& files) {
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qemit: quantum error mitigation experiments"};
    app.require_subcommand(1);
    Common common;

    auto* decay = app.add_subcommand("decay-scan", "Exact noisy expectation values at the probe error counts");
    add_common(decay, common);
    bool counts = false;
    decay->add_flag("--count-resolved", counts, "Also write expectations conditioned on the firing count");

    auto* fit = app.add_subcommand("fit", "Multi-exponential fits of a decay-scan CSV");
    add_common(fit, common);
    std::string input;
    std::optional<unsigned> k_max;
    std::optional<double> tol, outlier;
    bool fit_audit = false;
    fit->add_option("--input", input, "decay-scan CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--k-max", k_max, "Largest number of exponentials");
    fit->add_option("--tol", tol, "Normalized residual accepted by model selection");
    fit->add_option("--outlier-factor", outlier, "Flag biases above this multiple of the column median");
    fit->add_flag("--audit", fit_audit, "Recompute aggregates from the written detail rows");

    auto* mitigate = app.add_subcommand("mitigate", "QE, QH and Q estimates against the noiseless truth");
    add_common(mitigate, common);
    std::vector<std::string> methods;
    bool mit_audit = false;
    mitigate->add_option("--method", methods, "QE, QH or Q (repeatable; default: methods.run)")
        ->check(CLI::IsMember({"QE", "QH", "Q"}));
    mitigate->add_flag("--audit", mit_audit, "Recompute aggregates from the written detail rows");

    auto* costs = app.add_subcommand("costs", "Sampling cost curves and their crossings");
    add_common(costs, common);

    auto* mc = app.add_subcommand("mc-validate", "Monte Carlo checks of the estimators (JSON report)");
    add_common(mc, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto cfg = common.load();
        auto run = common.run(cfg);
        if (decay->parsed()) {
            report(cmd_decay_scan(cfg, run, counts));
        } else if (fit->parsed()) {
            FitSettings s{k_max.value_or(cfg.k_max), tol.value_or(cfg.fit_tol), outlier.value_or(cfg.outlier_factor),
                          fit_audit};
            report(cmd_fit(input, s, run));
        } else if (mitigate->parsed()) {
            report(cmd_mitigate(cfg, methods.empty() ? cfg.methods : methods, run, mit_audit));
        } else if (costs->parsed()) {
            report(cmd_costs(cfg, run));
        } else if (mc->parsed()) {
            auto files = cmd_mc_validate(cfg, run);
            report(files);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const qemit::FitDivergence& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
