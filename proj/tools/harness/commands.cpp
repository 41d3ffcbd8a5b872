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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "boost/math/tools/roots.hpp"
#include "fmt/format.h"
#include "qemit/fitting.hpp"
#include "qemit/mitigation.hpp"
#include "qemit/trajectory.hpp"

namespace qemit::harness {

namespace {

std::string join_path(const RunOptions& run, const std::string& name) {
    std::filesystem::create_directories(run.out_dir);
    return (std::filesystem::path(run.out_dir) / name).string();
}

std::string emit(const RunOptions& run, const std::string& name, Csv csv, const std::string& meta) {
    csv.comments.insert(csv.comments.begin(), meta.substr(1));
    auto path = join_path(run, name);
    write_file(path, csv.render());
    return path;
}

double cell(const Csv& csv, const std::vector<std::string>& row, const std::string& col) {
    return parse_number(row[csv.column(col)], col);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Outlier flags from the eps1 / eps2 columns: eps > factor * median(column).
std::vector<bool> outlier_flags(const Csv& detail, double factor) {
    std::vector<bool> flags(detail.rows.size(), false);
    for (const char* col : {"eps1", "eps2"}) {
        std::vector<double> finite;
        for (const auto& r : detail.rows) {
            double e = cell(detail, r, col);
            if (std::isfinite(e)) finite.push_back(e);
        }
        double cut = factor * median(finite);
        for (size_t i = 0; i < detail.rows.size(); ++i) {
            double e = cell(detail, detail.rows[i], col);
            if (std::isfinite(e) && e > cut) flags[i] = true;
        }
    }
    return flags;
}

}  // namespace

void sort_rows(Csv& csv, const std::vector<std::pair<size_t, bool>>& keys) {
    std::stable_sort(csv.rows.begin(), csv.rows.end(), [&](const auto& a, const auto& b) {
        for (const auto& [col, numeric] : keys) {
            if (numeric) {
                double x = parse_number(a[col], "sort key"), y = parse_number(b[col], "sort key");
                if (x != y) return x < y;
            } else if (a[col] != b[col]) {
                return a[col] < b[col];
            }
        }
        return false;
    });
}

std::vector<PauliString> observables(const FhCircuitSpec& spec, const NoisyCircuit& c) {
    return hamiltonian_observables(spec.lx, spec.ly, c.mode_permutation);
}

// decay-scan

Csv decay_table(const ExperimentConfig& cfg, const NoiseSpec& noise, unsigned threads) {
    auto c = build_circuit(cfg.circuit);
    auto obs = observables(cfg.circuit, c);
    std::vector<double> mus{0.0};
    mus.insert(mus.end(), cfg.probes.begin(), cfg.probes.end());
    std::vector<std::vector<double>> values(mus.size());
    parallel_for(mus.size(), threads, [&](size_t i) {
        auto rho = run_exact(attach(c, noise, mus[i]));
        for (const auto& o : obs) values[i].push_back(expectation(rho, o));
    });
    Csv csv;
    csv.header = {"observable", "mu", "value"};
    for (size_t j = 0; j < obs.size(); ++j) {
        for (size_t i = 0; i < mus.size(); ++i) csv.rows.push_back({obs[j].str(), num(mus[i]), num(values[i][j])});
    }
    sort_rows(csv, {{0, false}, {1, true}});
    return csv;
}

Csv count_table(const ExperimentConfig& cfg, const NoiseSpec& noise) {
    auto c = build_circuit(cfg.circuit);
    auto obs = observables(cfg.circuit, c);
    double mu = *std::max_element(cfg.probes.begin(), cfg.probes.end());
    auto cs = run_count_resolved(attach(c, noise, mu), 1.0);
    Csv csv;
    csv.header = {"observable", "l", "weight", "value"};
    for (const auto& o : obs) {
        for (int l = 0; l <= cs.l_max; ++l) {
            double w = cs.layers[static_cast<size_t>(l)].weight;
            if (w <= 0.0) continue;
            csv.rows.push_back({o.str(), std::to_string(l), num(w), num(cs.conditional_expectation(l, o))});
        }
    }
    sort_rows(csv, {{0, false}, {1, true}});
    return csv;
}

std::vector<std::string> cmd_decay_scan(const ExperimentConfig& cfg, const RunOptions& run, bool count_resolved) {
    auto meta = metadata_line(cfg.circuit.seed, cfg.hash());
    std::vector<std::string> files;
    for (const auto& noise : cfg.noise) {
        files.push_back(emit(run, "decay_" + noise.name + ".csv", decay_table(cfg, noise, run.threads), meta));
        if (count_resolved) {
            files.push_back(emit(run, "decay_" + noise.name + "_counts.csv", count_table(cfg, noise), meta));
        }
    }
    return files;
}

// fit

Csv fit_table(const Csv& decay, const FitSettings& s) {
    size_t c_obs = decay.column("observable"), c_mu = decay.column("mu"), c_val = decay.column("value");
    std::map<std::string, std::vector<DataPoint>> points;
    std::map<std::string, double> truth;
    for (const auto& r : decay.rows) {
        if (r[c_obs].empty()) throw ConfigError("decay CSV: empty observable name");
        double mu = parse_number(r[c_mu], "mu"), v = parse_number(r[c_val], "value");
        if (!(mu >= 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("decay CSV: bad row for '{}'", r[c_obs]));
        if (mu == 0.0) {
            truth[r[c_obs]] = v;
        } else {
            points[r[c_obs]].push_back({mu, v});
        }
    }
    if (points.empty()) throw ConfigError("decay CSV: no rows with mu > 0");

    Csv csv;
    csv.header = {"observable", "k_selected", "warning"};
    for (unsigned k = 1; k <= s.k_max; ++k) {
        csv.header.push_back(fmt::format("a{}", k));
        csv.header.push_back(fmt::format("gamma{}", k));
    }
    for (const char* h : {"residual", "estimate", "truth", "eps1", "eps2", "ratio", "outlier"}) csv.header.push_back(h);

    for (const auto& [name, pts] : points) {
        if (pts.size() < 2) throw ConfigError(fmt::format("decay CSV: '{}' needs at least 2 points with mu > 0", name));
        std::set<double> xs;
        for (const auto& p : pts) {
            if (!xs.insert(p.x).second) throw ConfigError(fmt::format("decay CSV: duplicate mu for '{}'", name));
        }
        unsigned k_fit = std::min<unsigned>(s.k_max, static_cast<unsigned>(pts.size() / 2));
        ExpDecayModel sel, single, dual;
        try {
            sel = select_model(pts, k_fit, s.tol);
            single = fit_multi_exp(pts, 1);
            if (pts.size() >= 4) dual = fit_multi_exp(pts, 2);
        } catch (const FitDivergence& e) {
            throw NumericalFailure(fmt::format("fit diverged for '{}': {}", name, e.what()));
        }
        auto it = truth.find(name);
        double t = it == truth.end() ? std::nan("") : it->second;
        double e1 = std::abs(single.extrapolate() - t);
        double e2 = pts.size() >= 4 ? std::abs(dual.extrapolate() - t) : std::nan("");
        std::vector<std::string> row{name, std::to_string(sel.k()), sel.warning ? "1" : "0"};
        for (unsigned k = 0; k < s.k_max; ++k) {
            if (k < sel.k()) {
                row.push_back(num(sel.components[k].amplitude));
                row.push_back(num(sel.components[k].gamma));
            } else {
                row.push_back("");
                row.push_back("");
            }
        }
        for (double v : {sel.residual, sel.extrapolate(), t, e1, e2}) row.push_back(num(v));
        // Ratio of the printed biases, so it can be checked against the file.
        double r1 = parse_number(num(e1), "eps1"), r2 = parse_number(num(e2), "eps2");
        row.push_back(num(r1 / r2));
        row.push_back("0");
        csv.rows.push_back(std::move(row));
    }
    auto flags = outlier_flags(csv, s.outlier_factor);
    size_t c_out = csv.column("outlier");
    for (size_t i = 0; i < csv.rows.size(); ++i) csv.rows[i][c_out] = flags[i] ? "1" : "0";
    sort_rows(csv, {{0, false}});
    return csv;
}

Csv fit_summary(const Csv& detail, double outlier_factor) {
    auto flags = outlier_flags(detail, outlier_factor);
    size_t c_out = detail.column("outlier");
    size_t n_truth = 0, n_out = 0, n_warn = 0, n_better = 0;
    std::vector<double> e1s, e2s;
    for (size_t i = 0; i < detail.rows.size(); ++i) {
        const auto& r = detail.rows[i];
        if ((r[c_out] == "1") != flags[i]) throw std::runtime_error("audit: outlier column does not match the rule");
        n_warn += r[detail.column("warning")] == "1";
        double e1 = cell(detail, r, "eps1"), e2 = cell(detail, r, "eps2");
        if (!std::isfinite(e1) || !std::isfinite(e2)) continue;
        ++n_truth;
        if (flags[i]) {
            ++n_out;
            continue;
        }
        e1s.push_back(e1);
        e2s.push_back(e2);
        n_better += e2 <= e1;
    }
    double m1 = mean(e1s), m2 = mean(e2s);
    Csv csv;
    csv.header = {"metric", "value"};
    auto add = [&](const char* k, std::string v) { csv.rows.push_back({k, std::move(v)}); };
    add("n_observables", std::to_string(detail.rows.size()));
    add("n_with_truth", std::to_string(n_truth));
    add("n_fit_warnings", std::to_string(n_warn));
    add("outlier_factor", num(outlier_factor));
    add("n_outliers", std::to_string(n_out));
    add("n_included", std::to_string(e1s.size()));
    add("n_dual_not_worse", std::to_string(n_better));
    add("frac_dual_not_worse", num(e1s.empty() ? std::nan("") : double(n_better) / double(e1s.size())));
    add("mean_eps1", num(m1));
    add("mean_eps2", num(m2));
    add("mean_ratio", num(m1 / m2));
    return csv;
}

std::vector<std::string> cmd_fit(const std::string& input, const FitSettings& s, const RunOptions& run) {
    if (s.k_max < 1 || s.k_max > 4) throw ConfigError("--k-max must be in [1, 4]");
    if (!(s.tol > 0.0)) throw ConfigError("--tol must be > 0");
    if (!(s.outlier_factor > 0.0)) throw ConfigError("--outlier-factor must be > 0");
    auto bytes = read_file(input);
    auto decay = parse_csv(bytes, input);
    uint64_t seed = 0;
    for (const auto& c : decay.comments) {
        auto at = c.find(" seed=");
        if (at != std::string::npos) seed = std::strtoull(c.c_str() + at + 6, nullptr, 10);
    }
    auto settings = fmt::format("k_max={} tol={} outlier={}", s.k_max, num(s.tol), num(s.outlier_factor));
    auto meta = metadata_line(seed, fnv1a_hex(bytes + settings));

    auto stem = std::filesystem::path(input).stem().string();
    if (stem.rfind("decay_", 0) == 0) stem = stem.substr(6);
    auto detail = fit_table(decay, s);
    auto summary = fit_summary(detail, s.outlier_factor);
    std::vector<std::string> files{emit(run, "fit_" + stem + ".csv", detail, meta),
                                   emit(run, "fit_" + stem + "_summary.csv", summary, meta)};
    if (s.audit) {
        auto reread = fit_summary(read_csv(files[0]), s.outlier_factor);
        if (reread.rows != read_csv(files[1]).rows) throw std::runtime_error("audit: fit summary differs from detail rows");
    }
    return files;
}

// mitigate

Csv mitigate_table(const ExperimentConfig& cfg, const std::vector<std::string>& methods, unsigned threads) {
    auto c = build_circuit(cfg.circuit);
    auto obs = observables(cfg.circuit, c);
    auto symmetry = parity_symmetry(c.n_qubits);
    struct Job {
        size_t noise;
        double mu;
        std::string method;  // empty: decay probe for classification
        std::vector<MitigationResult> results;
        std::vector<double> values;
    };
    std::vector<Job> jobs;
    for (size_t a = 0; a < cfg.noise.size(); ++a) {
        for (double mu : cfg.probes) jobs.push_back({a, mu, {}, {}, {}});
        for (double mu : cfg.mitigate_mu) {
            for (const auto& m : methods) jobs.push_back({a, mu, m, {}, {}});
        }
    }
    std::vector<double> truth;
    jobs.push_back({0, 0.0, "truth", {}, {}});
    parallel_for(jobs.size(), threads, [&](size_t i) {
        auto& j = jobs[i];
        if (j.method == "truth") {
            auto rho = run_exact(c);
            for (const auto& o : obs) j.values.push_back(expectation(rho, o));
            return;
        }
        auto native = attach(c, cfg.noise[j.noise], j.mu);
        if (j.method.empty()) {
            auto rho = run_exact(native);
            for (const auto& o : obs) j.values.push_back(expectation(rho, o));
        } else if (j.method == "Q") {
            j.results = q_batch(native, obs);
        } else if (j.method == "QE") {
            j.results = qe_batch(native, obs, cfg.lambda);
        } else {
            j.results = qh_batch(native, obs, symmetry);
        }
    });
    truth = jobs.back().values;

    // Number of exponentials needed by each observable's probe data.
    std::vector<std::vector<unsigned>> decay_k(cfg.noise.size(), std::vector<unsigned>(obs.size()));
    for (size_t a = 0; a < cfg.noise.size(); ++a) {
        for (size_t o = 0; o < obs.size(); ++o) {
            std::vector<DataPoint> pts;
            for (const auto& j : jobs) {
                if (j.method.empty() && j.noise == a) pts.push_back({j.mu, j.values[o]});
            }
            unsigned k = std::min<unsigned>(cfg.k_max, static_cast<unsigned>(pts.size() / 2));
            try {
                decay_k[a][o] = static_cast<unsigned>(select_model(pts, std::max(1u, k), cfg.fit_tol).k());
            } catch (const FitDivergence& e) {
                throw NumericalFailure(fmt::format("decay fit diverged for '{}': {}", obs[o].str(), e.what()));
            }
        }
    }

    Csv csv;
    csv.header = {"noise", "observable", "method", "mu", "estimate", "truth", "bias", "cost_factor", "decay_k", "flag"};
    for (const auto& j : jobs) {
        if (j.method.empty() || j.method == "truth") continue;
        for (size_t o = 0; o < obs.size(); ++o) {
            const auto& r = j.results[o];
            bool ok = r.flag.empty();
            csv.rows.push_back({cfg.noise[j.noise].name, obs[o].str(), j.method, num(j.mu), num(r.estimate), num(truth[o]),
                                num(ok ? std::abs(r.estimate - truth[o]) : std::nan("")),
                                num(ok ? r.report.cost_factor : std::nan("")), std::to_string(decay_k[j.noise][o]), r.flag});
        }
    }
    sort_rows(csv, {{0, false}, {2, false}, {3, true}, {1, false}});
    return csv;
}

Csv mitigate_summary(const Csv& detail) {
    size_t c_noise = detail.column("noise"), c_obs = detail.column("observable"), c_method = detail.column("method"),
           c_mu = detail.column("mu"), c_k = detail.column("decay_k"), c_flag = detail.column("flag");
    // An observable flagged by any method at (noise, mu) is excluded from every method there.
    std::set<std::tuple<std::string, std::string, std::string>> excluded;
    for (const auto& r : detail.rows) {
        if (!r[c_flag].empty()) excluded.insert({r[c_noise], r[c_mu], r[c_obs]});
    }
    struct Acc {
        std::vector<double> bias[3];
        size_t n_excluded = 0;
    };
    std::map<std::tuple<std::string, std::string, double>, Acc> groups;
    for (const auto& r : detail.rows) {
        auto& g = groups[{r[c_noise], r[c_method], parse_number(r[c_mu], "mu")}];
        if (excluded.count({r[c_noise], r[c_mu], r[c_obs]})) {
            ++g.n_excluded;
            continue;
        }
        double b = cell(detail, r, "bias");
        g.bias[2].push_back(b);
        if (r[c_k] == "1") g.bias[0].push_back(b);
        if (r[c_k] == "2") g.bias[1].push_back(b);
    }
    Csv csv;
    csv.header = {"noise", "method", "mu", "class", "n", "excluded", "mean_bias"};
    const char* names[3] = {"1-exp", "2-exp", "all"};
    for (const auto& [key, g] : groups) {
        for (int k = 0; k < 3; ++k) {
            csv.rows.push_back({std::get<0>(key), std::get<1>(key), num(std::get<2>(key)), names[k],
                                std::to_string(g.bias[k].size()), std::to_string(g.n_excluded), num(mean(g.bias[k]))});
        }
    }
    return csv;
}

std::vector<std::string> cmd_mitigate(const ExperimentConfig& cfg, const std::vector<std::string>& methods,
                                      const RunOptions& run, bool audit) {
    auto meta = metadata_line(cfg.circuit.seed, cfg.hash());
    auto detail = mitigate_table(cfg, methods, run.threads);
    std::vector<std::string> files{emit(run, "mitigate.csv", detail, meta),
                                   emit(run, "mitigate_summary.csv", mitigate_summary(detail), meta)};
    if (audit && mitigate_summary(read_csv(files[0])).rows != read_csv(files[1]).rows) {
        throw std::runtime_error("audit: mitigation summary differs from detail rows");
    }
    // Every observable flagged by hyperbolic extrapolation at some noisy point.
    std::map<std::pair<std::string, std::string>, std::pair<size_t, size_t>> qh;
    for (const auto& r : detail.rows) {
        if (r[2] != "QH" || r[3] == "0") continue;
        auto& [flagged, total] = qh[{r[0], r[3]}];
        ++total;
        flagged += r[9] == "NonHyperbolicDecay";
    }
    for (const auto& [key, ft] : qh) {
        if (ft.first == ft.second) {
            throw NumericalFailure(fmt::format("NonHyperbolicDecay on all observables ({}, mu={})", key.first, key.second));
        }
    }
    return files;
}

// costs

CostTables cost_tables(const CostGrid& g) {
    auto n = static_cast<size_t>(std::llround((g.mu_max - g.mu_min) / g.mu_step)) + 1;
    std::vector<double> mus;
    for (size_t i = 0; i < n; ++i) mus.push_back(std::min(g.mu_max, g.mu_min + static_cast<double>(i) * g.mu_step));
    auto q0 = [&](double, double mu) { return cost_quasi(g.eps_ratio * mu); };
    auto qe = [&](double gamma, double mu) { return cost_qe(gamma, mu, g.lambda, g.eps_ratio * mu); };
    auto qh = [&](double gamma, double mu) { return cost_qh(gamma, g.eps_ratio * mu, g.d_ratio * mu); };

    CostTables out;
    out.grid.header = {"gamma", "mu", "c_q0", "c_qe", "c_qh"};
    out.crossings.header = {"gamma", "pair", "mu", "cheaper_above"};
    using Diff = std::function<double(double, double)>;
    // log(first) - log(second); "QE-best" compares QE with the cheaper of Q0 and QH.
    std::vector<std::tuple<std::string, std::string, std::string, Diff>> pairs{
        {"QE-Q0", "QE", "Q0", [&](double a, double m) { return std::log(qe(a, m)) - std::log(q0(a, m)); }},
        {"QE-QH", "QE", "QH", [&](double a, double m) { return std::log(qe(a, m)) - std::log(qh(a, m)); }},
        {"QH-Q0", "QH", "Q0", [&](double a, double m) { return std::log(qh(a, m)) - std::log(q0(a, m)); }},
        {"QE-best", "QE", "best", [&](double a, double m) {
             return std::log(qe(a, m)) - std::log(std::min(q0(a, m), qh(a, m)));
         }}};
    for (double gamma : g.gammas) {
        for (double mu : mus) out.grid.rows.push_back({num(gamma), num(mu), num(q0(gamma, mu)), num(qe(gamma, mu)), num(qh(gamma, mu))});
        for (const auto& [name, first, second, diff] : pairs) {
            for (size_t i = 0; i + 1 < mus.size(); ++i) {
                double fa = diff(gamma, mus[i]), fb = diff(gamma, mus[i + 1]);
                if (!(fa * fb < 0.0 || (fb == 0.0 && fa != 0.0))) continue;
                double root = mus[i + 1];
                if (fb != 0.0) {
                    boost::uintmax_t iters = 200;
                    auto f = [&](double m) { return diff(gamma, m); };
                    auto [lo, hi] = boost::math::tools::toms748_solve(f, mus[i], mus[i + 1], fa, fb,
                                                                      boost::math::tools::eps_tolerance<double>(50), iters);
                    root = 0.5 * (lo + hi);
                }
                out.crossings.rows.push_back({num(gamma), name, num(root), fb < 0.0 ? first : second});
            }
        }
    }
    sort_rows(out.grid, {{0, true}, {1, true}});
    sort_rows(out.crossings, {{0, true}, {1, false}, {2, true}});
    return out;
}

std::vector<std::string> cmd_costs(const ExperimentConfig& cfg, const RunOptions& run) {
    auto meta = metadata_line(cfg.circuit.seed, cfg.hash());
    auto t = cost_tables(cfg.costs);
    return {emit(run, "costs.csv", t.grid, meta), emit(run, "costs_crossings.csv", t.crossings, meta)};
}

// mc-validate

namespace {

nlohmann::ordered_json jnum(double v) {
    if (!std::isfinite(v)) return nullptr;
    return parse_number(num(v), "json");
}

}  // namespace

nlohmann::ordered_json mc_report(const ExperimentConfig& cfg, unsigned threads) {
    const auto& mc = cfg.mc;
    if (mc.trajectories < 10000) throw ConfigError("mc.trajectories must be >= 10000 for mc-validate");
    FhCircuitSpec spec;
    spec.lx = mc.lx;
    spec.ly = mc.ly;
    spec.layers = mc.layers;
    spec.seed = cfg.circuit.seed;
    auto c = build_circuit(spec);
    auto o = PauliString::parse(mc.observable);
    auto symmetry = parity_symmetry(c.n_qubits);
    size_t n = mc.trajectories;
    double ideal = expectation(run_exact(c), o);
    auto stream = [&](uint64_t k) { return splitmix64(cfg.circuit.seed ^ splitmix64(k + 1)); };
    auto inverse = [](const NoisyCircuit& nc) {
        std::vector<std::optional<QuasiDecomposition>> out;
        for (const auto& s : nc.noise) {
            out.push_back(s ? std::optional(decompose(invert_channel(s->channel()))) : std::nullopt);
        }
        return out;
    };

    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    auto variance_check = [&](const char* name, const NoisyCircuit& nc, bool correct, double exact, double mu_eps,
                              uint64_t k) {
        TrajectoryPlan plan{o};
        if (correct) plan.corrections = inverse(nc);
        auto st = run_trajectories(TrajectoryEngine(nc, plan), n, stream(k), threads);
        double mean = st.estimate(), se = st.standard_error();
        double predicted = st.q * st.q - exact * exact;
        double ratio = st.variance_shot() / predicted;
        bool pass = std::abs(mean - exact) <= 3.0 * se && std::abs(ratio - 1.0) <= 0.1;
        checks.push_back({{"method", name},
                          {"mu_eps", jnum(mu_eps)},
                          {"mean", jnum(mean)},
                          {"ci_low", jnum(mean - 3.0 * se)},
                          {"ci_high", jnum(mean + 3.0 * se)},
                          {"exact", jnum(exact)},
                          {"q_squared", jnum(st.q * st.q)},
                          {"q_squared_poisson", jnum(cost_quasi(mu_eps))},
                          {"variance", jnum(st.variance_shot())},
                          {"predicted_variance", jnum(predicted)},
                          {"variance_ratio", jnum(ratio)},
                          {"variance_inflation", jnum(st.variance_shot() / (1.0 - exact * exact))},
                          {"pass", pass}});
        return pass;
    };

    bool all = true;
    // Depolarizing noise: mu_eps = 15/16 mu for a two-qubit Pauli group.
    auto dep = attach(c, noise_preset("depolarizing"), mc.mu_eps * 16.0 / 15.0);
    all &= variance_check("direct", dep, false, expectation(run_exact(dep), o), 0.0, 0);
    all &= variance_check("quasi", dep, true, ideal, mean_nonidentity_count(dep), 1);
    all &= variance_check("quasi_zero_noise", c, true, ideal, 0.0, 2);

    auto det = attach(c, noise_preset("detectable"), mc.mu_d);
    TrajectoryPlan plan{o};
    plan.symmetry = symmetry;
    plan.symmetry_eigenvalue = detail::parity_of(symmetry, c.initial_bits);
    auto st = run_trajectories(TrajectoryEngine(det, plan), n, stream(3), threads);
    double poisson = std::exp(-mc.mu_d) * std::cosh(mc.mu_d);
    double binomial = symmetry_partition(run_exact(det), symmetry, plan.symmetry_eigenvalue, o).p_pass;
    double sigma = std::sqrt(poisson * (1.0 - poisson) / static_cast<double>(n));
    double ret = st.pass_fraction();
    bool pass = std::abs(ret - poisson) <= 3.0 * sigma;
    all &= pass;
    checks.push_back({{"method", "symmetry"},
                      {"mu_d", jnum(mc.mu_d)},
                      {"retention", jnum(ret)},
                      {"predicted_poisson", jnum(poisson)},
                      {"predicted_exact", jnum(binomial)},
                      {"sigma", jnum(sigma)},
                      {"z_poisson", jnum((ret - poisson) / sigma)},
                      {"z_exact", jnum((ret - binomial) / sigma)},
                      {"pass", pass}});

    nlohmann::ordered_json report;
    report["version"] = kVersion;
    report["seed"] = cfg.circuit.seed;
    report["config"] = cfg.hash();
    report["rng"] = kRngName;
    report["circuit"] = {{"lx", mc.lx}, {"ly", mc.ly}, {"layers", mc.layers}, {"qubits", c.n_qubits},
                         {"noise_sites", dep.noise_site_count()}, {"observable", mc.observable}};
    report["trajectories"] = n;
    report["tolerance"] = {{"mean_sigmas", 3}, {"variance_ratio", 0.1}, {"retention_sigmas", 3}};
    report["checks"] = checks;
    report["pass"] = all;
    return report;
}

std::vector<std::string> cmd_mc_validate(const ExperimentConfig& cfg, const RunOptions& run) {
    auto report = mc_report(cfg, run.threads);
    auto path = join_path(run, "mc_validate.json");
    write_file(path, report.dump(2) + "\n");
    return {path};
}

}  // namespace qemit::harness
