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
// Displacement vectors rho(g)(x) - x in ambient coordinates, the linearization
// residual of a word, and the pointwise inequality reports of the reduction
// and McCarthy estimates.

#ifndef RIGIDITY_LAB_DISPLACEMENT_HPP
#define RIGIDITY_LAB_DISPLACEMENT_HPP

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidity_lab/diffeo.hpp"
#include "rigidity_lab/error.hpp"
#include "rigidity_lab/hyperbolic.hpp"
#include "rigidity_lab/presentation.hpp"
#include "rigidity_lab/representation.hpp"

namespace rigidity_lab {

struct DisplacementMatrix {
    double x = 0.0;
    std::vector<std::string> labels;
    Matrix rows;  // one row per element, N columns

    double norm() const { return linf(rows); }
};

inline Vector displacement_vector(const RepTuple& r, const Word& w, double x) {
    const auto& m = r.manifold();
    return m.embed(r.eval(w, x)) - m.embed(x);
}

inline DisplacementMatrix displacement(const RepTuple& r, const std::vector<Word>& elements, double x) {
    DisplacementMatrix d;
    d.x = x;
    d.rows = Matrix::Zero(static_cast<Eigen::Index>(elements.size()), r.manifold().ambient_dim());
    for (std::size_t i = 0; i < elements.size(); ++i) {
        d.labels.push_back(format_word(elements[i], r.alphabet()));
        d.rows.row(static_cast<Eigen::Index>(i)) = displacement_vector(r, elements[i], x).transpose();
    }
    return d;
}

inline std::vector<Word> generator_words(const std::vector<int>& gens) {
    std::vector<Word> out;
    for (const int g : gens) out.push_back(Word::generator(g));
    return out;
}

// Delta_x(S0), d x N.
inline Matrix delta_S0(const RepTuple& r, double x) {
    return displacement(r, generator_words(r.presentation().s0_indices()), x).rows;
}

// ||Delta_x(S)|| over every generator of H.
inline double norm_delta_S(const RepTuple& r, double x) {
    std::vector<int> all = r.presentation().s0_indices();
    for (const int s : r.presentation().s1_indices()) all.push_back(s);
    return displacement(r, generator_words(all), x).norm();
}

struct LinearizationResidual {
    double residual = 0.0;   // |Delta_x(w) - sum eps_i Delta_x(g_i)|
    double reference = 0.0;  // max_i |Delta_x(g_i)|
    double eta_hat = 0.0;    // residual / reference, 0 when both vanish
    bool degenerate = false;  // reference = 0 with a residual above tolerance

    nlohmann::json to_json() const {
        return {{"residual", residual}, {"reference", reference}, {"eta_hat", eta_hat}, {"degenerate", degenerate}};
    }
};

// Word f_k^{e_k} ... f_1^{e_1} given as (f_i, e_i) with e_i = +-1, rightmost acting first.
inline LinearizationResidual linearization_residual(const std::vector<std::pair<Diffeo, int>>& word, const Manifold& m,
                                                    double x, double tol = 1e-15) {
    if (word.empty()) throw Error("analysis", "linearization needs a nonempty word");
    Vector sum = Vector::Zero(m.ambient_dim());
    double y = x, reference = 0.0;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const auto& [f, e] = *it;
        if (e != 1 && e != -1) throw Error("analysis", "linearization exponents must be +-1");
        const Vector d = m.embed(f.eval(x)) - m.embed(x);
        sum += e * d;
        reference = std::max(reference, linf(d));
        y = e > 0 ? f.eval(y) : f.inverse().eval(y);
    }
    LinearizationResidual r;
    r.residual = linf(m.embed(y) - m.embed(x) - sum);
    r.reference = reference;
    if (reference > 0.0)
        r.eta_hat = r.residual / reference;
    else
        r.degenerate = r.residual > tol;
    return r;
}

inline LinearizationResidual linearization_residual(const RepTuple& r, const Word& w, double x, double tol = 1e-15) {
    std::vector<std::pair<Diffeo, int>> word;
    for (const auto& l : w.expanded()) word.emplace_back(r.image(l.gen), static_cast<int>(l.exp));
    return linearization_residual(word, r.manifold(), x, tol);
}

struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double defect_budget = 0.0;

    bool holds() const { return lhs <= rhs + defect_budget; }
    double slack() const { return rhs + defect_budget - lhs; }

    nlohmann::json to_json() const {
        return {{"name", name}, {"lhs", lhs}, {"rhs", rhs}, {"defect_budget", defect_budget},
                {"holds", holds()}, {"slack", slack()}};
    }
    static InequalityReport from_json(const nlohmann::json& j) {
        return {j.at("name").get<std::string>(), j.at("lhs").get<double>(), j.at("rhs").get<double>(),
                j.at("defect_budget").get<double>()};
    }
};

// Admissible eta' for a given eta: eta / (2 ((d|A| + 2/3) / (1/3) + 1)).
inline double eta_prime(double eta, std::size_t d, std::int64_t norm_A) {
    return eta / (2.0 * ((static_cast<double>(d) * static_cast<double>(norm_A) + 2.0 / 3.0) / (1.0 / 3.0) + 1.0));
}

inline void require_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0 / 3.0)) throw Error("analysis", "eta must lie in (0, 1/3)");
}

// The measured relation defect scaled by the word length bound k.
inline double defect_budget(const RepTuple& r, const GroupConstants& c) {
    return static_cast<double>(c.k) * r.defect().aggregate;
}

// red1..red4 at x.
inline std::vector<InequalityReport> check_reduction(const RepTuple& r, const GroupConstants& c, double x,
                                                     double eta) {
    const auto& p = r.presentation();
    const double budget = defect_budget(r, c);
    const double nS = norm_delta_S(r, x);
    const Matrix d0 = delta_S0(r, x);
    const double nS0 = linf(d0);

    std::vector<InequalityReport> out;
    out.push_back({"red1", displacement(r, c.s_prime, x).norm(), eta * nS, budget});

    std::vector<Word> small = generator_words(p.s1_indices());
    small.insert(small.end(), c.tau.begin(), c.tau.end());
    out.push_back({"red2", displacement(r, small, x).norm(), eta * nS, budget});

    out.push_back({"red3", std::abs(nS - nS0), 0.0, budget});

    const Matrix psi_rows = displacement(r, std::vector<Word>(p.psi().begin(), p.psi().begin() + static_cast<long>(p.d())), x).rows;
    out.push_back({"red4", linf(psi_rows - to_real(c.A) * d0), 2.0 * eta * nS0, budget});
    return out;
}

// Largest linearization residual over the words psi(s), s in S0, against eta.
inline InequalityReport check_bonatti(const RepTuple& r, const GroupConstants& c, double x, double eta) {
    const auto& p = r.presentation();
    InequalityReport rep{"bonatti", 0.0, 0.0, defect_budget(r, c)};
    for (std::size_t j = 0; j < p.d(); ++j) {
        if (p.psi()[j].empty()) continue;
        const auto lr = linearization_residual(r, p.psi()[j], x);
        if (lr.residual - eta * lr.reference > rep.lhs - rep.rhs) {
            rep.lhs = lr.residual;
            rep.rhs = eta * lr.reference;
        }
    }
    return rep;
}

struct McCarthyTerm {
    std::string generator;
    double taylor_lhs = 0.0;     // |Delta_x(psi(s)) - Delta_y(s)|
    double jacobian_term = 0.0;  // N |D_y t - 1| |Delta_y(s)|
    double taylor_bound = 0.0;   // 2 eta' |Delta_y(s)|
};

struct McCarthyCheck {
    InequalityReport report;
    double y = 0.0;
    double eta_prime = 0.0;
    std::vector<McCarthyTerm> terms;

    nlohmann::json to_json() const {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& m : terms)
            t.push_back({{"generator", m.generator}, {"taylor_lhs", m.taylor_lhs},
                         {"jacobian_term", m.jacobian_term}, {"taylor_bound", m.taylor_bound}});
        auto j = report.to_json();
        j["y"] = y;
        j["eta_prime"] = eta_prime;
        j["terms"] = t;
        return j;
    }
};

// |Delta_y(S0) - A Delta_x(S0)| <= eta |Delta_x(S0)| with y = rho(t^-1)(x).
inline McCarthyCheck check_mccarthy(const RepTuple& r, const GroupConstants& c, double x, double eta) {
    require_eta(eta);
    const auto& p = r.presentation();
    const auto& m = r.manifold();
    const Word t_inv = Word::generator(r.t_index(), -1);
    McCarthyCheck out;
    out.y = r.eval(t_inv, x);
    out.eta_prime = eta_prime(eta, p.d(), c.norm_A);
    const Matrix dx = delta_S0(r, x), dy = delta_S0(r, out.y);
    out.report = {"mccarthy", linf(dy - to_real(c.A) * dx), eta * linf(dx), defect_budget(r, c)};

    const Jet ty = r.image(r.t_index()).jet(out.y);
    const Matrix jac_dev = ambient_jacobian(m, out.y, ty) - Matrix::Identity(m.ambient_dim(), m.ambient_dim());
    for (const int s : p.s0_indices()) {
        McCarthyTerm term;
        term.generator = p.alphabet().name(s);
        const double ny = linf(dy.row(s));
        term.taylor_lhs = linf(displacement_vector(r, p.psi(s), x).transpose() - dy.row(s));
        term.jacobian_term = static_cast<double>(m.ambient_dim()) * linf(jac_dev) * ny;
        term.taylor_bound = 2.0 * out.eta_prime * ny;
        out.terms.push_back(term);
    }
    return out;
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_DISPLACEMENT_HPP
