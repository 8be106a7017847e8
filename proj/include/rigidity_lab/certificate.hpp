/* Copyright 2026 The rigidity-lab Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ========================================================================= */
// Certificates: the raw measured trace and the verdict derived from it. The
// derivation is a pure function of the numbers in the trace, so a stored
// certificate can be replayed and compared byte for byte.

#ifndef RIGIDITY_LAB_CERTIFICATE_HPP
#define RIGIDITY_LAB_CERTIFICATE_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidity_lab/displacement.hpp"
#include "rigidity_lab/error.hpp"

namespace rigidity_lab {

enum class Verdict { H_trivial, growth_witnessed, hypothesis_violated, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::H_trivial: return "H_trivial";
        case Verdict::growth_witnessed: return "growth_witnessed";
        case Verdict::hypothesis_violated: return "hypothesis_violated";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

// Which component the orbit tracks: pi+ along t^-1 or pi- along t.
enum class Branch { unstable, stable };

inline std::string to_string(Branch b) { return b == Branch::unstable ? "unstable" : "stable"; }

namespace detail {

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

inline std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace detail

// One point x_j of the orbit. Transition fields describe x_j -> x_{j+1} and are
// empty on the last point.
struct OrbitRecord {
    int step = 0;
    double x = 0.0;
    double norm_plus = 0.0;
    double norm_minus = 0.0;
    std::optional<double> mccarthy_lhs, mccarthy_rhs, mccarthy_budget;

    // Derived.
    std::optional<double> ratio;
    bool dominance = false;
    bool holds = false;  // mccarthy report holds
    bool certified = false;
    std::string reason;  // why this transition is not certified

    nlohmann::json to_json() const {
        return {{"step", step},
                {"x", x},
                {"norm_plus", norm_plus},
                {"norm_minus", norm_minus},
                {"mccarthy_lhs", detail::opt_json(mccarthy_lhs)},
                {"mccarthy_rhs", detail::opt_json(mccarthy_rhs)},
                {"mccarthy_budget", detail::opt_json(mccarthy_budget)},
                {"ratio", detail::opt_json(ratio)},
                {"dominance", dominance},
                {"holds", holds},
                {"certified", certified},
                {"reason", reason}};
    }

    // Raw fields only; derived fields are recomputed.
    static OrbitRecord from_json(const nlohmann::json& j) {
        OrbitRecord r;
        r.step = j.at("step").get<int>();
        r.x = j.at("x").get<double>();
        r.norm_plus = j.at("norm_plus").get<double>();
        r.norm_minus = j.at("norm_minus").get<double>();
        r.mccarthy_lhs = detail::opt_from(j, "mccarthy_lhs");
        r.mccarthy_rhs = detail::opt_from(j, "mccarthy_rhs");
        r.mccarthy_budget = detail::opt_from(j, "mccarthy_budget");
        return r;
    }
};

struct Trace {
    // Parameters.
    double eta = 0.3;
    double eta_prime = 0.0;
    int p0 = 1;
    double defect_tol = 1e-10;
    int n_steps = 12;
    int min_growth_steps = 3;
    int grid_size = 0;
    double grid_spacing = 0.0;
    double defect_budget = 0.0;
    std::uint64_t seed = 0;

    // Hypotheses.
    bool hyperbolic = false;
    double spectral_margin = 0.0;
    bool eta_in_range = false;
    bool stable_branch_available = true;

    // Measurements.
    std::optional<double> sup_displacement_S;
    std::optional<double> sup_x, sup_value, grid_modulus;
    std::optional<int> sup_index;
    std::optional<Branch> branch;
    std::vector<InequalityReport> reports;
    std::vector<OrbitRecord> orbit;
    std::string stop_reason;

    nlohmann::json parameters_json() const {
        return {{"eta", eta},           {"eta_prime", eta_prime},     {"p0", p0},
                {"defect_tol", defect_tol}, {"n_steps", n_steps},     {"min_growth_steps", min_growth_steps},
                {"grid_size", grid_size}, {"grid_spacing", grid_spacing}, {"defect_budget", defect_budget},
                {"seed", seed}};
    }
};

struct Certificate {
    Verdict verdict = Verdict::inconclusive;
    std::string binding_constraint;
    Trace trace;

    nlohmann::json to_json() const {
        const auto& t = trace;
        nlohmann::json reports = nlohmann::json::array(), orbit = nlohmann::json::array();
        for (const auto& r : t.reports) reports.push_back(r.to_json());
        for (const auto& r : t.orbit) orbit.push_back(r.to_json());
        nlohmann::json sup;
        sup["x"] = detail::opt_json(t.sup_x);
        sup["index"] = t.sup_index ? nlohmann::json(*t.sup_index) : nlohmann::json();
        sup["value"] = detail::opt_json(t.sup_value);
        sup["grid_modulus"] = detail::opt_json(t.grid_modulus);
        sup["branch"] = t.branch ? nlohmann::json(to_string(*t.branch)) : nlohmann::json();
        return {{"verdict", to_string(verdict)},
                {"binding_constraint", binding_constraint},
                {"parameters", t.parameters_json()},
                {"hypotheses",
                 {{"hyperbolic", t.hyperbolic},
                  {"spectral_margin", t.spectral_margin},
                  {"eta_in_range", t.eta_in_range},
                  {"stable_branch_available", t.stable_branch_available}}},
                {"trace",
                 {{"sup_displacement_S", detail::opt_json(t.sup_displacement_S)},
                  {"sup_point", sup},
                  {"reports", reports},
                  {"orbit", orbit},
                  {"stop_reason", t.stop_reason}}}};
    }
};

inline Trace trace_from_json(const nlohmann::json& c) {
    Trace t;
    const auto& p = c.at("parameters");
    t.eta = p.at("eta").get<double>();
    t.eta_prime = p.at("eta_prime").get<double>();
    t.p0 = p.at("p0").get<int>();
    t.defect_tol = p.at("defect_tol").get<double>();
    t.n_steps = p.at("n_steps").get<int>();
    t.min_growth_steps = p.at("min_growth_steps").get<int>();
    t.grid_size = p.at("grid_size").get<int>();
    t.grid_spacing = p.at("grid_spacing").get<double>();
    t.defect_budget = p.at("defect_budget").get<double>();
    t.seed = p.at("seed").get<std::uint64_t>();
    const auto& h = c.at("hypotheses");
    t.hyperbolic = h.at("hyperbolic").get<bool>();
    t.spectral_margin = h.at("spectral_margin").get<double>();
    t.eta_in_range = h.at("eta_in_range").get<bool>();
    t.stable_branch_available = h.at("stable_branch_available").get<bool>();
    const auto& tr = c.at("trace");
    t.sup_displacement_S = detail::opt_from(tr, "sup_displacement_S");
    const auto& sp = tr.at("sup_point");
    t.sup_x = detail::opt_from(sp, "x");
    if (!sp.at("index").is_null()) t.sup_index = sp.at("index").get<int>();
    t.sup_value = detail::opt_from(sp, "value");
    t.grid_modulus = detail::opt_from(sp, "grid_modulus");
    if (!sp.at("branch").is_null())
        t.branch = sp.at("branch").get<std::string>() == "unstable" ? Branch::unstable : Branch::stable;
    for (const auto& r : tr.at("reports")) t.reports.push_back(InequalityReport::from_json(r));
    for (const auto& r : tr.at("orbit")) t.orbit.push_back(OrbitRecord::from_json(r));
    t.stop_reason = tr.at("stop_reason").get<std::string>();
    return t;
}

// Fills the derived orbit fields and decides the verdict from measured numbers only.
inline Certificate derive_verdict(Trace t) {
    Certificate c;
    if (!t.eta_in_range || !t.hyperbolic) {
        c.verdict = Verdict::hypothesis_violated;
        c.binding_constraint = !t.hyperbolic ? "psi* not hyperbolic" : "eta outside (0, 1/3)";
        c.trace = std::move(t);
        return c;
    }
    if (t.sup_displacement_S && *t.sup_displacement_S <= t.defect_tol) {
        c.verdict = Verdict::H_trivial;
        c.trace = std::move(t);
        return c;
    }

    const bool unstable = !t.branch || *t.branch == Branch::unstable;
    const double threshold = 2.0 * (1.0 - t.eta);
    int run = 0, best = 0;
    std::string first_failure;
    for (std::size_t j = 0; j < t.orbit.size(); ++j) {
        auto& r = t.orbit[j];
        const double grow = unstable ? r.norm_plus : r.norm_minus;
        const double other = unstable ? r.norm_minus : r.norm_plus;
        r.dominance = grow >= other;
        r.ratio.reset();
        r.certified = false;
        r.reason.clear();
        r.holds = false;
        if (j + 1 == t.orbit.size() || !r.mccarthy_lhs) {
            r.reason = "end of orbit";
            continue;
        }
        const auto& next = t.orbit[j + 1];
        const double grow_next = unstable ? next.norm_plus : next.norm_minus;
        if (grow > 0.0) r.ratio = grow_next / grow;
        const double lhs = *r.mccarthy_lhs, rhs = *r.mccarthy_rhs, budget = *r.mccarthy_budget;
        r.holds = lhs <= rhs + budget;
        if (!(grow > 0.0))
            r.reason = "growth bound";
        else if (budget > rhs)
            r.reason = "relation defect";
        else if (!r.holds)
            r.reason = "mccarthy";
        else if (!r.dominance)
            r.reason = unstable ? "unstable dominance" : "stable dominance";
        else if (grow_next < threshold * grow)
            r.reason = "growth bound";
        else
            r.certified = true;
        if (r.certified) {
            best = std::max(best, ++run);
        } else {
            run = 0;
            if (first_failure.empty()) first_failure = r.reason;
        }
    }
    if (!t.branch) {
        c.verdict = Verdict::inconclusive;
        c.binding_constraint = "stable-direction maximum";
    } else if (best >= t.min_growth_steps) {
        c.verdict = Verdict::growth_witnessed;
    } else {
        c.verdict = Verdict::inconclusive;
        c.binding_constraint = first_failure.empty() ? "orbit length" : first_failure;
    }
    c.trace = std::move(t);
    return c;
}

struct ReplayResult {
    bool identical = false;
    std::string original;
    std::string replayed;
};

// Re-derives a serialized certificate from its raw trace and compares the dumps.
inline ReplayResult replay_certificate(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ReplayResult r;
    r.original = text;
    r.replayed = derive_verdict(trace_from_json(j)).to_json().dump(2) + "\n";
    r.identical = r.original == r.replayed;
    return r;
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_CERTIFICATE_HPP
