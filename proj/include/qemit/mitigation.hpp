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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "qemit/channels.hpp"
#include "qemit/error.hpp"
#include "qemit/fitting.hpp"
#include "qemit/quasiprob.hpp"
#include "qemit/simulator.hpp"
#include "qemit/trajectory.hpp"

namespace qemit {

// Extrapolation.

/// (o_mu^lambda / o_lmu)^{1/(lambda-1)}, sign carried through.
inline double two_point_exp(double o_mu, double o_lmu, double lambda) {
    if (!(lambda > 1.0)) throw std::invalid_argument("two_point_exp: lambda must be > 1");
    if (o_mu == 0.0 || o_lmu == 0.0 || (o_mu > 0) != (o_lmu > 0)) {
        throw NonExponentialData("two_point_exp: data points must be nonzero and of the same sign");
    }
    double sign = o_mu > 0 ? 1.0 : -1.0;
    double a = std::abs(o_mu), b = std::abs(o_lmu);
    return sign * std::exp((lambda * std::log(a) - std::log(b)) / (lambda - 1.0));
}

/// Passed and failed branch expectations of a single-exponential observable
/// under Poisson-distributed detectable errors with mean mu_d.
struct PartitionForward {
    double o_pass;
    double o_fail;
};

inline PartitionForward partition_forward(double o, double gamma, double mu_d) {
    if (!(mu_d > 0.0)) throw std::invalid_argument("partition_forward: mu_d must be > 0");
    double r = (1.0 - gamma) * mu_d;
    return {o * std::cosh(r) / std::cosh(mu_d), o * std::sinh(r) / std::sinh(mu_d)};
}

inline double hyperbolic_extrapolate(double o_pass, double o_fail, double mu_d) {
    if (!(mu_d > 0.0)) throw std::invalid_argument("hyperbolic_extrapolate: mu_d must be > 0");
    double c = std::cosh(mu_d), s = std::sinh(mu_d);
    double radicand = o_pass * o_pass * c * c - o_fail * o_fail * s * s;
    if (radicand < 0.0) {
        throw NonHyperbolicDecay("hyperbolic_extrapolate: negative radicand " + std::to_string(radicand));
    }
    return (o_pass < 0 ? -1.0 : 1.0) * std::sqrt(radicand);
}

/// e^{-mu_d}(cosh(mu_d) o_pass + sinh(mu_d) o_fail).
inline double recombine_identity_check(double o_pass, double o_fail, double mu_d) {
    if (!(mu_d >= 0.0)) throw std::invalid_argument("recombine_identity_check: mu_d must be >= 0");
    return std::exp(-mu_d) * (std::cosh(mu_d) * o_pass + std::sinh(mu_d) * o_fail);
}

/// The same recombination with the exact pass probability as weight.
inline double recombine_weighted(double o_pass, double o_fail, double p_pass) {
    if (!(p_pass >= 0.0 && p_pass <= 1.0)) throw std::invalid_argument("recombine_weighted: p_pass must be in [0,1]");
    return p_pass * o_pass + (1.0 - p_pass) * o_fail;
}

// Cost factors.

inline void check_nonnegative(double v, const char* what) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + " must be >= 0");
}

inline void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in [0,1]");
}

inline double cost_symmetry(double mu_d) {
    check_nonnegative(mu_d, "mu_d");
    return 2.0 / (1.0 + std::exp(-2.0 * mu_d));
}

inline double detection_prob(double mu_d) {
    check_nonnegative(mu_d, "mu_d");
    return -std::expm1(-2.0 * mu_d) / 2.0;
}

inline double residual_error(double mu_d) {
    check_nonnegative(mu_d, "mu_d");
    double a = -std::expm1(-mu_d);
    return 0.5 * a * a;
}

/// e^{4 mu_eps}.
inline double cost_quasi(double mu_eps) {
    check_nonnegative(mu_eps, "mu_eps");
    return std::exp(4.0 * mu_eps);
}

inline double cost_exp_extrapolation(double gamma, double mu, double lambda) {
    check_gamma(gamma);
    check_nonnegative(mu, "mu");
    if (!(lambda > 1.0)) throw std::invalid_argument("cost_exp_extrapolation: lambda must be > 1");
    double l2 = (lambda - 1.0) * (lambda - 1.0);
    return 2.0 * (lambda * lambda * std::exp(2 * gamma * mu) + std::exp(2 * lambda * gamma * mu)) / l2;
}

inline double cost_qe(double gamma, double mu, double lambda, double mu_eps) {
    check_gamma(gamma);
    check_nonnegative(mu, "mu");
    check_nonnegative(mu_eps, "mu_eps");
    if (!(lambda > 1.0)) throw std::invalid_argument("cost_qe: lambda must be > 1");
    double l2 = (lambda - 1.0) * (lambda - 1.0);
    double e = 2.0 / lambda * (gamma * mu + 2.0 * (lambda - 1.0) * mu_eps);
    return 2.0 * (lambda * lambda * std::exp(e) + std::exp(2 * gamma * mu)) / l2;
}

inline double cost_hyperbolic(double gamma, double mu_d) {
    check_gamma(gamma);
    check_nonnegative(mu_d, "mu_d");
    return std::cosh(2.0 * (1.0 - gamma) * mu_d) * std::cosh(mu_d) * std::exp(mu_d);
}

inline double cost_qh(double gamma, double mu_eps, double mu_d) {
    check_gamma(gamma);
    check_nonnegative(mu_eps, "mu_eps");
    check_nonnegative(mu_d, "mu_d");
    return std::exp(4.0 * mu_eps - 3.0 * mu_d) * std::cosh(mu_d) * std::cosh(2.0 * (1.0 - gamma) * mu_d);
}

struct QsCost {
    double cost;
    double saving_ratio;
    double p_circ;
};

inline QsCost cost_qs(double mu_eps, double nu) {
    check_nonnegative(mu_eps, "mu_eps");
    check_nonnegative(nu, "nu");
    double saving = std::exp(3.0 * nu) * std::cosh(nu);
    return {std::exp(4.0 * mu_eps) / saving, saving, residual_error(nu)};
}

/// Inverse of residual_error: the nu that leaves a fraction p_circ of erroneous runs.
inline double nu_for_residual(double p_circ) {
    if (!(p_circ >= 0.0 && p_circ < 0.5)) throw std::invalid_argument("nu_for_residual: p_circ must be in [0, 0.5)");
    return -std::log1p(-std::sqrt(2.0 * p_circ));
}

inline double cost_postproc(double p_pass) {
    if (!(p_pass > 0.0 && p_pass <= 1.0)) throw std::invalid_argument("cost_postproc: p_pass must be in (0,1]");
    return 1.0 / (p_pass * p_pass);
}

struct SplitCost {
    double alpha;
    double cost;
    double naive_cost;
};

inline SplitCost optimal_split(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("optimal_split: a and b must be > 0");
    return {a / (a + b), (a + b) * (a + b), 2.0 * (a * a + b * b)};
}

struct BreakEven {
    double exact;
    double leading;  // c1 / eps2^2
};

inline BreakEven break_even(double c1, double c2, double eps1, double eps2) {
    if (!(eps2 > eps1 && eps1 >= 0.0)) throw std::invalid_argument("break_even: need eps2 > eps1 >= 0");
    if (c1 < c2) throw std::invalid_argument("break_even: need c1 >= c2");
    return {(c1 - c2) / (eps2 * eps2 - eps1 * eps1), c1 / (eps2 * eps2)};
}

// Pipelines.

struct CostReport {
    std::string method;
    double cost_factor = 1.0;
    double mu = 0, mu_eps = 0, mu_d = 0, nu = 0, gamma = 0, lambda = 0;
};

struct MitigationResult {
    double estimate = std::numeric_limits<double>::quiet_NaN();
    CostReport report;
    std::string flag;  // batch runs: name of the error that excluded this observable
};

struct Backend {
    enum Kind { Exact, MonteCarlo } kind = Exact;
    size_t trajectories = 100000;
    uint64_t seed = 1;
    unsigned threads = 1;
};

/// Sum over sites of p times the non-identity weight of the firing channel.
inline double mean_nonidentity_count(const NoisyCircuit& c) {
    double s = 0;
    for (const auto& site : c.noise) {
        if (site) s += site->p * site->firing.non_identity_probability();
    }
    return s;
}

namespace detail {

/// Replaces each noise site by `target(site)`, realized as the composition
/// of the signed map target o channel^{-1} with the physical channel.
/// Returns the transformed circuit and the per-slot signed maps.
template <typename Target>
std::pair<NoisyCircuit, std::vector<std::optional<PauliChannel>>> transform_sites(const NoisyCircuit& c,
                                                                                  Target target) {
    NoisyCircuit out = c;
    std::vector<std::optional<PauliChannel>> maps(c.gates.size());
    for (size_t i = 0; i < c.noise.size(); ++i) {
        if (!c.noise[i]) continue;
        auto ch = c.noise[i]->channel();
        auto m = compose(target(*c.noise[i]), invert_channel(ch));
        out.noise[i] = NoiseSite::from_channel(c.noise[i]->qubits, compose(m, ch));
        maps[i] = std::move(m);
    }
    return {std::move(out), std::move(maps)};
}

inline std::vector<std::optional<QuasiDecomposition>> decompositions(
    const std::vector<std::optional<PauliChannel>>& maps) {
    std::vector<std::optional<QuasiDecomposition>> out;
    for (const auto& m : maps) {
        if (m) {
            out.push_back(decompose(*m));
        } else {
            out.push_back(std::nullopt);
        }
    }
    return out;
}

inline double clamp_gamma(double g) { return std::isfinite(g) ? std::clamp(g, 0.0, 1.0) : 0.0; }

inline int parity_of(const PauliString& s, uint32_t bits) { return (std::popcount(s.z() & bits) & 1) ? -1 : 1; }

template <typename F>
MitigationResult flagged(F&& f) {
    try {
        return f();
    } catch (const NonExponentialData&) {
        return {std::numeric_limits<double>::quiet_NaN(), {}, "NonExponentialData"};
    } catch (const NonHyperbolicDecay&) {
        return {std::numeric_limits<double>::quiet_NaN(), {}, "NonHyperbolicDecay"};
    }
}

/// Signed-sampling estimate of Tr(O rho) for the corrected circuit.
inline TrajectoryStats sample(const NoisyCircuit& native, TrajectoryPlan plan, const Backend& b, uint64_t stream) {
    TrajectoryEngine engine(native, std::move(plan));
    return run_trajectories(engine, b.trajectories, splitmix64(b.seed ^ stream), b.threads);
}

/// Reduced-noise circuit for QE together with its quasi-probability maps.
struct QePrepared {
    NoisyCircuit reduced;
    std::vector<std::optional<QuasiDecomposition>> corrections;
    CostReport report;
};

inline QePrepared prepare_qe(const NoisyCircuit& native, double lambda) {
    if (!(lambda > 1.0)) throw std::invalid_argument("qe_pipeline: lambda must be > 1");
    auto [reduced, maps] = transform_sites(
        native, [&](const NoiseSite& s) { return NoiseSite{s.qubits, s.p / lambda, s.firing}.channel(); });
    CostReport rep{"QE"};
    rep.mu = native.mean_error_count();
    rep.mu_eps = mean_nonidentity_count(native);
    rep.nu = rep.mu / lambda;
    rep.lambda = lambda;
    return {std::move(reduced), decompositions(maps), rep};
}

inline MitigationResult qe_from_values(double o_nu, double o_mu, CostReport rep) {
    if (rep.mu == 0.0) return {o_mu, rep, {}};
    double est = two_point_exp(o_nu, o_mu, rep.lambda);
    rep.gamma = clamp_gamma(std::log(o_nu / o_mu) / (rep.mu - rep.nu));
    rep.cost_factor = cost_qe(rep.gamma, rep.mu, rep.lambda, rep.mu_eps);
    return {est, rep, {}};
}

/// Circuit whose sites are uniform detectable channels carrying each site's
/// detectable weight, together with the quasi-probability maps.
struct QhPrepared {
    NoisyCircuit detectable;
    std::vector<std::optional<QuasiDecomposition>> corrections;
    int eigenvalue;
    CostReport report;
};

inline QhPrepared prepare_qh(const NoisyCircuit& native, const PauliString& symmetry) {
    double mu_d = 0;
    auto [detectable, maps] = transform_sites(native, [&](const NoiseSite& s) {
        auto local = restrict_to(symmetry, s.qubits);
        auto group = full_pauli_group(static_cast<unsigned>(s.qubits.size()));
        auto ch = s.channel();
        std::vector<PauliString> commuting;
        double q = 0;
        for (const auto& v : group.elements()) {
            if (eta(v, local) == 1) {
                commuting.push_back(v);
            } else {
                q += ch.weight(v);
            }
        }
        mu_d += q;
        return detectable_channel(q, group, span_group(group.n_qubits(), commuting));
    });
    CostReport rep{"QH"};
    rep.mu = native.mean_error_count();
    rep.mu_eps = mean_nonidentity_count(native);
    rep.mu_d = mu_d;
    rep.nu = mu_d;
    return {std::move(detectable), decompositions(maps), parity_of(symmetry, native.initial_bits), rep};
}

inline MitigationResult qh_from_values(double o_pass, double o_fail, CostReport rep) {
    if (rep.mu_d == 0.0) return {o_pass, rep, {}};
    double est = hyperbolic_extrapolate(o_pass, o_fail, rep.mu_d);
    // cosh((1 - gamma) mu_d) = o_pass cosh(mu_d) / est.
    double ratio = est != 0.0 ? o_pass * std::cosh(rep.mu_d) / est : 1.0;
    rep.gamma = clamp_gamma(1.0 - std::acosh(std::max(1.0, ratio)) / rep.mu_d);
    rep.cost_factor = cost_qh(rep.gamma, rep.mu_eps, rep.mu_d);
    return {est, rep, {}};
}

inline void check_commuting(const PauliString& symmetry, std::span<const PauliString> obs) {
    for (const auto& o : obs) {
        if (eta(symmetry, o) != 1) throw std::invalid_argument("qh_pipeline: observable must commute with the symmetry");
    }
}

}  // namespace detail

/// Pure quasi-probability: every site inverted. The exact backend returns the
/// noiseless value; the cost is the product of squared one-norms.
inline std::vector<MitigationResult> q_batch(const NoisyCircuit& native, std::span<const PauliString> obs,
                                             const Backend& b = {}) {
    CostReport rep{"Q"};
    rep.mu = native.mean_error_count();
    rep.mu_eps = mean_nonidentity_count(native);
    double q = 1.0;
    std::vector<std::optional<QuasiDecomposition>> corr;
    for (const auto& s : native.noise) {
        if (s) {
            corr.push_back(decompose(invert_channel(s->channel())));
            q *= corr.back()->one_norm();
        } else {
            corr.push_back(std::nullopt);
        }
    }
    rep.cost_factor = q * q;
    std::vector<MitigationResult> out;
    if (b.kind == Backend::Exact) {
        auto rho = run_exact(native, 0.0);
        for (const auto& o : obs) out.push_back({expectation(rho, o), rep, {}});
    } else {
        for (size_t i = 0; i < obs.size(); ++i) {
            TrajectoryPlan plan{obs[i]};
            plan.corrections = corr;
            out.push_back({detail::sample(native, plan, b, 3 * i).estimate_values(), rep, {}});
        }
    }
    return out;
}

/// Quasi-probability reduces every site's firing probability by lambda; the
/// reduced and native expectations are extrapolated by two_point_exp.
/// Observables whose data are not exponential are flagged, not thrown.
inline std::vector<MitigationResult> qe_batch(const NoisyCircuit& native, std::span<const PauliString> obs,
                                              double lambda = 2.0, const Backend& b = {}) {
    auto prep = detail::prepare_qe(native, lambda);
    std::vector<MitigationResult> out;
    if (b.kind == Backend::Exact) {
        auto rho_mu = run_exact(native), rho_nu = run_exact(prep.reduced);
        for (const auto& o : obs) {
            double o_mu = expectation(rho_mu, o), o_nu = expectation(rho_nu, o);
            out.push_back(detail::flagged([&] { return detail::qe_from_values(o_nu, o_mu, prep.report); }));
        }
    } else {
        for (size_t i = 0; i < obs.size(); ++i) {
            double o_mu = detail::sample(native, TrajectoryPlan{obs[i]}, b, 3 * i + 1).estimate_values();
            TrajectoryPlan plan{obs[i]};
            plan.corrections = prep.corrections;
            double o_nu = detail::sample(native, plan, b, 3 * i + 2).estimate_values();
            out.push_back(detail::flagged([&] { return detail::qe_from_values(o_nu, o_mu, prep.report); }));
        }
    }
    return out;
}

/// Quasi-probability turns each site into a uniform detectable channel with
/// the site's detectable weight; the symmetry-partitioned expectations are
/// combined by hyperbolic extrapolation. Non-hyperbolic observables are flagged.
inline std::vector<MitigationResult> qh_batch(const NoisyCircuit& native, std::span<const PauliString> obs,
                                              const PauliString& symmetry, const Backend& b = {}) {
    detail::check_commuting(symmetry, obs);
    auto prep = detail::prepare_qh(native, symmetry);
    std::vector<MitigationResult> out;
    if (b.kind == Backend::Exact) {
        auto rho = run_exact(prep.detectable);
        for (const auto& o : obs) {
            auto part = symmetry_partition(rho, symmetry, prep.eigenvalue, o);
            out.push_back(detail::flagged([&] { return detail::qh_from_values(part.o_pass, part.o_fail, prep.report); }));
        }
    } else {
        for (size_t i = 0; i < obs.size(); ++i) {
            TrajectoryPlan plan{obs[i]};
            plan.corrections = prep.corrections;
            plan.symmetry = symmetry;
            plan.symmetry_eigenvalue = prep.eigenvalue;
            auto st = detail::sample(native, plan, b, 3 * i);
            out.push_back(detail::flagged([&] { return detail::qh_from_values(st.o_pass(), st.o_fail(), prep.report); }));
        }
    }
    return out;
}

inline MitigationResult q_pipeline(const NoisyCircuit& native, const PauliString& o, const Backend& b = {}) {
    return q_batch(native, std::span(&o, 1), b).front();
}

/// Single-observable QE; NonExponentialData propagates.
inline MitigationResult qe_pipeline(const NoisyCircuit& native, const PauliString& o, double lambda = 2.0,
                                    const Backend& b = {}) {
    auto r = qe_batch(native, std::span(&o, 1), lambda, b).front();
    if (!r.flag.empty()) throw NonExponentialData("qe_pipeline: reduced and native values differ in sign");
    return r;
}

/// Single-observable QH; NonHyperbolicDecay propagates.
inline MitigationResult qh_pipeline(const NoisyCircuit& native, const PauliString& o, const PauliString& symmetry,
                                    const Backend& b = {}) {
    auto r = qh_batch(native, std::span(&o, 1), symmetry, b).front();
    if (!r.flag.empty()) throw NonHyperbolicDecay("qh_pipeline: negative radicand");
    return r;
}

}  // namespace qemit
