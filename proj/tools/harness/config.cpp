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

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "fmt/format.h"
#include "yaml-cpp/yaml.h"

namespace qemit::harness {

namespace {

class Reader {
   public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
        auto m = n.Mark();
        if (m.is_null()) throw ConfigError(fmt::format("{}: {}", origin_, msg));
        throw ConfigError(fmt::format("{}:{}:{}: {}", origin_, m.line + 1, m.column + 1, msg));
    }

    void check_keys(const YAML::Node& n, const std::string& section, std::initializer_list<const char*> allowed) const {
        if (!n.IsMap()) fail(n, fmt::format("section '{}' must be a mapping", section));
        for (const auto& kv : n) {
            auto key = kv.first.as<std::string>();
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) fail(kv.first, fmt::format("unknown key '{}' in section '{}'", key, section));
        }
    }

    double real(const YAML::Node& n, const std::string& what) const {
        double v;
        if (!n.IsScalar() || !YAML::convert<double>::decode(n, v) || !std::isfinite(v)) {
            fail(n, fmt::format("'{}' must be a finite number", what));
        }
        return v;
    }

    uint64_t count(const YAML::Node& n, const std::string& what) const {
        if (n.IsScalar()) {
            const auto& s = n.Scalar();
            if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos && s.size() <= 19) {
                return std::stoull(s);
            }
        }
        fail(n, fmt::format("'{}' must be a non-negative integer", what));
    }

    unsigned small(const YAML::Node& n, const std::string& what) const {
        uint64_t v = count(n, what);
        if (v > std::numeric_limits<unsigned>::max()) fail(n, fmt::format("'{}' is too large", what));
        return static_cast<unsigned>(v);
    }

    std::string text(const YAML::Node& n, const std::string& what) const {
        if (!n.IsScalar()) fail(n, fmt::format("'{}' must be a string", what));
        return n.Scalar();
    }

    std::vector<double> reals(const YAML::Node& n, const std::string& what) const {
        if (!n.IsSequence()) fail(n, fmt::format("'{}' must be a list of numbers", what));
        std::vector<double> out;
        for (const auto& e : n) out.push_back(real(e, what));
        return out;
    }

    std::vector<std::string> texts(const YAML::Node& n, const std::string& what) const {
        if (!n.IsSequence()) fail(n, fmt::format("'{}' must be a list of strings", what));
        std::vector<std::string> out;
        for (const auto& e : n) out.push_back(text(e, what));
        return out;
    }

    NoiseSpec noise(const YAML::Node& n) const {
        if (n.IsScalar()) {
            try {
                return noise_preset(n.Scalar());
            } catch (const ConfigError& e) {
                fail(n, e.what());
            }
        }
        check_keys(n, "noise.models[]", {"name", "preset", "weights"});
        if (!n["name"]) fail(n, "custom noise model needs a 'name'");
        if (bool(n["preset"]) == bool(n["weights"])) fail(n, "give exactly one of 'preset' or 'weights'");
        NoiseSpec spec;
        if (n["preset"]) {
            try {
                spec = noise_preset(text(n["preset"], "preset"));
            } catch (const ConfigError& e) {
                fail(n["preset"], e.what());
            }
        } else {
            const auto& w = n["weights"];
            if (!w.IsMap() || w.size() == 0) fail(w, "'weights' must map two-qubit Pauli strings to probabilities");
            std::map<PauliString, double> terms;
            double total = 0.0;
            for (const auto& kv : w) {
                auto key = text(kv.first, "weights key");
                PauliString p;
                try {
                    p = PauliString::parse(key);
                } catch (const std::invalid_argument& e) {
                    fail(kv.first, e.what());
                }
                if (p.n_qubits() != 2) fail(kv.first, "weights keys must be two-qubit Pauli strings");
                double v = real(kv.second, key);
                if (v < 0.0) fail(kv.second, "weights must be non-negative");
                terms[p] += v;
                total += v;
            }
            if (std::abs(total - 1.0) > 1e-9) fail(w, fmt::format("weights must sum to 1, got {:.12g}", total));
            spec.firing = PauliChannel(2, std::move(terms));
        }
        spec.name = text(n["name"], "name");
        return spec;
    }

   private:
    std::string origin_;
};

void check_positive_distinct(const std::vector<double>& v, const std::string& what, bool allow_zero) {
    if (v.empty()) throw ConfigError(fmt::format("{}: list must not be empty", what));
    std::set<double> seen;
    for (double x : v) {
        if (allow_zero ? !(x >= 0.0) : !(x > 0.0)) {
            throw ConfigError(fmt::format("{}: values must be {}, got {:.12g}", what, allow_zero ? "non-negative" : "positive", x));
        }
        if (!seen.insert(x).second) throw ConfigError(fmt::format("{}: duplicate value {:.12g}", what, x));
    }
}

void check_lattice(unsigned lx, unsigned ly, unsigned layers, const std::string& what) {
    if (lx == 0 || ly == 0 || 2 * lx * ly > kMaxSimQubits) {
        throw ConfigError(fmt::format("{}: lattice {}x{} must have between 1 and {} sites", what, lx, ly, kMaxSimQubits / 2));
    }
    if (layers == 0) throw ConfigError(fmt::format("{}: layers must be >= 1", what));
}

}  // namespace

NoiseSpec noise_preset(const std::string& name) {
    auto e = full_pauli_group(2);
    if (name == "depolarizing" || name == "depolarizing2") return {name, group_to_pauli({1.0, e})};
    if (name == "detectable" || name == "detectable2") {
        return {name, detectable_channel(1.0, e, presets::zz_undetectable())};
    }
    if (name == "dephasing") {
        auto zz = span_group(2, {PauliString::parse("ZI"), PauliString::parse("IZ")});
        return {name, group_to_pauli({1.0, zz})};
    }
    throw ConfigError(fmt::format("unknown noise preset '{}' (expected depolarizing, detectable or dephasing)", name));
}

NoisyCircuit attach(const NoisyCircuit& c, const NoiseSpec& noise, double mu) {
    auto out = attach_noise(c, NoiseModel::Depolarizing, mu);
    for (auto& site : out.noise) {
        if (site) site->firing = noise.firing;
    }
    return out;
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.noise = {noise_preset("depolarizing"), noise_preset("detectable")};
    return cfg;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}:{}:{}: {}", origin, e.mark.line + 1, e.mark.column + 1, e.msg));
    }
    Reader r(origin);
    auto cfg = default_config();
    if (root.IsNull()) return cfg;
    r.check_keys(root, "<top>", {"circuit", "noise", "probes", "methods", "mc", "costs", "output"});

    if (auto n = root["circuit"]) {
        r.check_keys(n, "circuit", {"lx", "ly", "layers", "seed"});
        if (n["lx"]) cfg.circuit.lx = r.small(n["lx"], "circuit.lx");
        if (n["ly"]) cfg.circuit.ly = r.small(n["ly"], "circuit.ly");
        if (n["layers"]) cfg.circuit.layers = r.small(n["layers"], "circuit.layers");
        if (n["seed"]) cfg.circuit.seed = r.count(n["seed"], "circuit.seed");
    }
    if (auto n = root["noise"]) {
        r.check_keys(n, "noise", {"models"});
        if (auto m = n["models"]) {
            if (!m.IsSequence()) r.fail(m, "'noise.models' must be a list");
            cfg.noise.clear();
            for (const auto& e : m) cfg.noise.push_back(r.noise(e));
        }
    }
    if (auto n = root["probes"]) {
        r.check_keys(n, "probes", {"mu"});
        if (n["mu"]) cfg.probes = r.reals(n["mu"], "probes.mu");
        if (cfg.probes.empty()) r.fail(n["mu"], "probes.mu: list must not be empty");
    }
    if (auto n = root["methods"]) {
        r.check_keys(n, "methods", {"run", "mu", "lambda", "k_max", "fit_tol", "outlier_factor"});
        if (n["run"]) cfg.methods = r.texts(n["run"], "methods.run");
        if (n["mu"]) cfg.mitigate_mu = r.reals(n["mu"], "methods.mu");
        if (n["lambda"]) cfg.lambda = r.real(n["lambda"], "methods.lambda");
        if (n["k_max"]) cfg.k_max = r.small(n["k_max"], "methods.k_max");
        if (n["fit_tol"]) cfg.fit_tol = r.real(n["fit_tol"], "methods.fit_tol");
        if (n["outlier_factor"]) cfg.outlier_factor = r.real(n["outlier_factor"], "methods.outlier_factor");
    }
    if (auto n = root["mc"]) {
        r.check_keys(n, "mc", {"trajectories", "lx", "ly", "layers", "mu_eps", "mu_d", "observable"});
        if (n["trajectories"]) cfg.mc.trajectories = r.count(n["trajectories"], "mc.trajectories");
        if (n["lx"]) cfg.mc.lx = r.small(n["lx"], "mc.lx");
        if (n["ly"]) cfg.mc.ly = r.small(n["ly"], "mc.ly");
        if (n["layers"]) cfg.mc.layers = r.small(n["layers"], "mc.layers");
        if (n["mu_eps"]) cfg.mc.mu_eps = r.real(n["mu_eps"], "mc.mu_eps");
        if (n["mu_d"]) cfg.mc.mu_d = r.real(n["mu_d"], "mc.mu_d");
        if (n["observable"]) cfg.mc.observable = r.text(n["observable"], "mc.observable");
    }
    if (auto n = root["costs"]) {
        r.check_keys(n, "costs", {"gammas", "mu_min", "mu_max", "mu_step", "lambda", "eps_ratio", "d_ratio"});
        if (n["gammas"]) cfg.costs.gammas = r.reals(n["gammas"], "costs.gammas");
        if (n["mu_min"]) cfg.costs.mu_min = r.real(n["mu_min"], "costs.mu_min");
        if (n["mu_max"]) cfg.costs.mu_max = r.real(n["mu_max"], "costs.mu_max");
        if (n["mu_step"]) cfg.costs.mu_step = r.real(n["mu_step"], "costs.mu_step");
        if (n["lambda"]) cfg.costs.lambda = r.real(n["lambda"], "costs.lambda");
        if (n["eps_ratio"]) cfg.costs.eps_ratio = r.real(n["eps_ratio"], "costs.eps_ratio");
        if (n["d_ratio"]) cfg.costs.d_ratio = r.real(n["d_ratio"], "costs.d_ratio");
    }
    if (auto n = root["output"]) {
        r.check_keys(n, "output", {"dir"});
        if (n["dir"]) cfg.out_dir = r.text(n["dir"], "output.dir");
    }
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", origin, e.what()));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void validate(const ExperimentConfig& cfg) {
    check_lattice(cfg.circuit.lx, cfg.circuit.ly, cfg.circuit.layers, "circuit");
    check_lattice(cfg.mc.lx, cfg.mc.ly, cfg.mc.layers, "mc");
    if (cfg.noise.empty()) throw ConfigError("noise.models: list must not be empty");
    std::set<std::string> names;
    for (const auto& n : cfg.noise) {
        if (n.name.empty() || n.name.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_-") != std::string::npos) {
            throw ConfigError(fmt::format("noise.models: name '{}' must use [a-z0-9_-]", n.name));
        }
        if (!names.insert(n.name).second) throw ConfigError(fmt::format("noise.models: duplicate name '{}'", n.name));
    }
    check_positive_distinct(cfg.probes, "probes.mu", false);
    check_positive_distinct(cfg.mitigate_mu, "methods.mu", true);
    if (cfg.methods.empty()) throw ConfigError("methods.run: list must not be empty");
    std::set<std::string> ms;
    for (const auto& m : cfg.methods) {
        if (m != "QE" && m != "QH" && m != "Q") throw ConfigError(fmt::format("methods.run: unknown method '{}'", m));
        if (!ms.insert(m).second) throw ConfigError(fmt::format("methods.run: duplicate method '{}'", m));
    }
    if (!(cfg.lambda > 1.0)) throw ConfigError("methods.lambda must be > 1");
    if (cfg.k_max < 1 || cfg.k_max > 4) throw ConfigError("methods.k_max must be in [1, 4]");
    if (!(cfg.fit_tol > 0.0)) throw ConfigError("methods.fit_tol must be > 0");
    if (!(cfg.outlier_factor > 0.0)) throw ConfigError("methods.outlier_factor must be > 0");
    if (!(cfg.mc.mu_eps >= 0.0) || !(cfg.mc.mu_d >= 0.0)) throw ConfigError("mc.mu_eps and mc.mu_d must be >= 0");
    try {
        auto o = PauliString::parse(cfg.mc.observable);
        if (o.n_qubits() != 2 * cfg.mc.lx * cfg.mc.ly) throw ConfigError("mc.observable length must equal the mc qubit count");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("mc.observable: {}", e.what()));
    }
    const auto& g = cfg.costs;
    if (g.gammas.empty()) throw ConfigError("costs.gammas: list must not be empty");
    for (double x : g.gammas) {
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("costs.gammas: values must be in [0, 1]");
    }
    if (!(g.mu_min >= 0.0 && g.mu_max > g.mu_min && g.mu_step > 0.0)) {
        throw ConfigError("costs: need 0 <= mu_min < mu_max and mu_step > 0");
    }
    if ((g.mu_max - g.mu_min) / g.mu_step > 1e6) throw ConfigError("costs: grid has more than 1e6 points");
    if (!(g.lambda > 1.0)) throw ConfigError("costs.lambda must be > 1");
    if (!(g.eps_ratio >= 0.0) || !(g.d_ratio >= 0.0)) throw ConfigError("costs: eps_ratio and d_ratio must be >= 0");
    if (cfg.out_dir.empty()) throw ConfigError("output.dir must not be empty");
}

std::string ExperimentConfig::canonical() const {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "circuit" << YAML::Value << YAML::BeginMap << YAML::Key << "lx" << YAML::Value << circuit.lx
      << YAML::Key << "ly" << YAML::Value << circuit.ly << YAML::Key << "layers" << YAML::Value << circuit.layers
      << YAML::Key << "seed" << YAML::Value << circuit.seed << YAML::EndMap;
    e << YAML::Key << "noise" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : noise) {
        e << YAML::BeginMap << YAML::Key << "name" << YAML::Value << n.name << YAML::Key << "weights" << YAML::Value
          << YAML::BeginMap;
        for (const auto& [p, w] : n.firing.terms()) e << YAML::Key << p.str() << YAML::Value << w;
        e << YAML::EndMap << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::Key << "probes" << YAML::Value << YAML::Flow << probes;
    e << YAML::Key << "methods" << YAML::Value << YAML::BeginMap << YAML::Key << "run" << YAML::Value << YAML::Flow
      << methods << YAML::Key << "mu" << YAML::Value << YAML::Flow << mitigate_mu << YAML::Key << "lambda"
      << YAML::Value << lambda << YAML::Key << "k_max" << YAML::Value << k_max << YAML::Key << "fit_tol" << YAML::Value
      << fit_tol << YAML::Key << "outlier_factor" << YAML::Value << outlier_factor << YAML::EndMap;
    e << YAML::Key << "mc" << YAML::Value << YAML::BeginMap << YAML::Key << "trajectories" << YAML::Value
      << static_cast<uint64_t>(mc.trajectories) << YAML::Key << "lx" << YAML::Value << mc.lx << YAML::Key << "ly"
      << YAML::Value << mc.ly << YAML::Key << "layers" << YAML::Value << mc.layers << YAML::Key << "mu_eps"
      << YAML::Value << mc.mu_eps << YAML::Key << "mu_d" << YAML::Value << mc.mu_d << YAML::Key << "observable"
      << YAML::Value << mc.observable << YAML::EndMap;
    e << YAML::Key << "costs" << YAML::Value << YAML::BeginMap << YAML::Key << "gammas" << YAML::Value << YAML::Flow
      << costs.gammas << YAML::Key << "mu_min" << YAML::Value << costs.mu_min << YAML::Key << "mu_max" << YAML::Value
      << costs.mu_max << YAML::Key << "mu_step" << YAML::Value << costs.mu_step << YAML::Key << "lambda"
      << YAML::Value << costs.lambda << YAML::Key << "eps_ratio" << YAML::Value << costs.eps_ratio << YAML::Key
      << "d_ratio" << YAML::Value << costs.d_ratio << YAML::EndMap;
    // The output directory does not change results and is left out.
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return fmt::format("{:016x}", h);
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

}  // namespace qemit::harness
