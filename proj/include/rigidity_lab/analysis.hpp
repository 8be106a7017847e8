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
// Orbit iteration and certificate synthesis. The engine only sees a
// DisplacementSource, which is either a representation on a manifold or the
// synthetic linear model D_{j+1} = A D_j + E_j.

#ifndef RIGIDITY_LAB_ANALYSIS_HPP
#define RIGIDITY_LAB_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rigidity_lab/certificate.hpp"
#include "rigidity_lab/displacement.hpp"
#include "rigidity_lab/hyperbolic.hpp"
#include "rigidity_lab/parallel.hpp"
#include "rigidity_lab/presentation.hpp"
#include "rigidity_lab/representation.hpp"

namespace rigidity_lab {

class DisplacementSource {
public:
    virtual ~DisplacementSource() = default;

    virtual IntMatrix monodromy() const = 0;
    virtual std::vector<double> grid() const = 0;
    virtual double grid_spacing() const = 0;
    // Orbit iteration stops once |Delta| reaches this scale.
    virtual double diameter() const = 0;
    virtual Matrix delta_S0(double x) const = 0;
    virtual double norm_delta_S(double x) const = 0;
    // rho(t^-1)(x) and rho(t)(x); the latter may be unavailable.
    virtual double pull(double x) const = 0;
    virtual std::optional<double> push(double x) const = 0;
    virtual double defect_budget() const = 0;
    // Pointwise reduction and McCarthy reports at x.
    virtual std::vector<InequalityReport> point_reports(double x, double eta) const = 0;
    // The same source with psi replaced by psi^p and t by t^p.
    virtual std::unique_ptr<DisplacementSource> powered(int p) const = 0;
};

class RepSource final : public DisplacementSource {
public:
    explicit RepSource(RepTuple rep) : rep_(std::move(rep)), constants_(compute_constants(rep_.presentation())) {}

    const RepTuple& rep() const { return rep_; }
    const GroupConstants& constants() const { return constants_; }

    IntMatrix monodromy() const override { return constants_.A; }
    std::vector<double> grid() const override { return rep_.manifold().grid(); }
    double grid_spacing() const override { return rep_.manifold().grid_spacing(); }
    double diameter() const override { return rep_.manifold().diameter(); }
    Matrix delta_S0(double x) const override { return rigidity_lab::delta_S0(rep_, x); }
    double norm_delta_S(double x) const override { return rigidity_lab::norm_delta_S(rep_, x); }
    double pull(double x) const override {
        return rep_.manifold().canonical(rep_.eval(Word::generator(rep_.t_index(), -1), x));
    }
    std::optional<double> push(double x) const override {
        return rep_.manifold().canonical(rep_.eval(Word::generator(rep_.t_index()), x));
    }
    double defect_budget() const override { return rigidity_lab::defect_budget(rep_, constants_); }
    std::vector<InequalityReport> point_reports(double x, double eta) const override {
        auto out = check_reduction(rep_, constants_, x, eta);
        out.push_back(check_bonatti(rep_, constants_, x, eta));
        out.push_back(check_mccarthy(rep_, constants_, x, eta).report);
        return out;
    }
    std::unique_ptr<DisplacementSource> powered(int p) const override {
        return std::make_unique<RepSource>(rep_.power_substituted(p));
    }

private:
    RepTuple rep_;
    GroupConstants constants_;
};

// D_0 = seed, D_{j+1} = A^p D_j + E_j with max(|E_j|, |pi+ E_j|, |pi- E_j|) <= noise |D_j|.
// The orbit point x is the step index and t^-1 advances it by one.
class SyntheticLinearModel final : public DisplacementSource {
public:
    struct Options {
        int n_columns = 2;      // N
        double plus_scale = 1e-6;   // |pi+ D_0|
        double minus_ratio = 0.5;   // |pi- D_0| / |pi+ D_0|, at most 1
        double noise = 0.1;         // bound on |E_j| / |D_j| for the stored D_j
        int max_steps = 64;
        std::uint64_t seed = 0;
    };

    SyntheticLinearModel(const IntMatrix& A, Options opt, int power = 1)
        : A_(A), opt_(opt), power_(power), splitting_(invariant_splitting(to_real(A))) {
        step_ = real_power(to_real(A_), power_);
        build();
    }

    const std::vector<Matrix>& sequence() const { return seq_; }
    const HyperbolicSplitting& splitting() const { return splitting_; }

    IntMatrix monodromy() const override { return int_power(A_, power_); }
    std::vector<double> grid() const override { return {0.0}; }
    double grid_spacing() const override { return 0.0; }
    double diameter() const override { return 1e300; }
    Matrix delta_S0(double x) const override {
        const auto j = static_cast<std::size_t>(x);
        return j < seq_.size() ? seq_[j] : seq_.back();
    }
    double norm_delta_S(double x) const override { return linf(delta_S0(x)); }
    double pull(double x) const override { return std::min(x + 1.0, static_cast<double>(seq_.size() - 1)); }
    std::optional<double> push(double) const override { return std::nullopt; }
    double defect_budget() const override { return 0.0; }
    std::vector<InequalityReport> point_reports(double x, double eta) const override {
        const Matrix d = delta_S0(x), next = delta_S0(pull(x));
        return {{"mccarthy", linf(next - step_ * d), eta * linf(d), 0.0}};
    }
    std::unique_ptr<DisplacementSource> powered(int p) const override {
        return std::make_unique<SyntheticLinearModel>(A_, opt_, power_ * p);
    }

private:
    void build() {
        std::mt19937_64 rng(opt_.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0), frac(0.0, 1.0);
        const Eigen::Index d = A_.rows(), n = opt_.n_columns;
        auto random = [&] {
            Matrix m(d, n);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index k = 0; k < n; ++k) m(i, k) = u(rng);
            return m;
        };
        Matrix plus = splitting_.P_plus * random(), minus = splitting_.P_minus * random();
        const double np = linf(plus), nm = linf(minus);
        Matrix d0 = Matrix::Zero(d, n);
        if (np > 0 && opt_.plus_scale > 0) d0 += plus * (opt_.plus_scale / np);
        if (nm > 0 && opt_.plus_scale > 0) d0 += minus * (opt_.minus_ratio * opt_.plus_scale / nm);
        seq_.push_back(d0);
        for (int j = 0; j < opt_.max_steps; ++j) {
            const Matrix& cur = seq_.back();
            Matrix e = random();
            const double scale = std::max({linf(e), linf(splitting_.P_plus * e), linf(splitting_.P_minus * e)});
            e *= opt_.noise * frac(rng) * linf(cur) / scale;
            // The noise bound holds for the stored values: rounding of the
            // sum counts as noise, and e shrinks until it fits.
            const Matrix image = step_ * cur;
            Matrix next = image + e;
            for (int k = 0; k < 64 && !(linf(next - step_ * cur) <= opt_.noise * linf(cur)); ++k) {
                e *= 0.5;
                next = image + e;
            }
            if (!(linf(next - step_ * cur) <= opt_.noise * linf(cur))) next = image;
            seq_.push_back(next);
        }
    }

    IntMatrix A_;
    Options opt_;
    int power_;
    HyperbolicSplitting splitting_;
    Matrix step_;
    std::vector<Matrix> seq_;
};

struct SupPoint {
    int index = 0;
    double x = 0.0;
    double value = 0.0;
    double norm_plus = 0.0;
    double norm_minus = 0.0;
    double grid_modulus = 0.0;  // max change of the maximized quantity between grid neighbours
};

// argmax over the grid of max(|pi+ Delta_z(S0)|, |pi- Delta_z(S0)|), lowest index on ties.
inline SupPoint find_sup_point(const DisplacementSource& src, const HyperbolicSplitting& s,
                               const std::vector<double>& grid) {
    if (grid.empty()) throw Error("analysis", "empty grid");
    std::vector<double> plus(grid.size()), minus(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Matrix d = src.delta_S0(grid[i]);
        plus[i] = linf(project_displacement(s.P_plus, d));
        minus[i] = linf(project_displacement(s.P_minus, d));
    });
    SupPoint p;
    p.value = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = std::max(plus[i], minus[i]);
        if (q > p.value) {
            p.value = q;
            p.index = static_cast<int>(i);
        }
        if (i > 0) p.grid_modulus = std::max(p.grid_modulus, std::abs(q - std::max(plus[i - 1], minus[i - 1])));
    }
    p.x = grid[static_cast<std::size_t>(p.index)];
    p.norm_plus = plus[static_cast<std::size_t>(p.index)];
    p.norm_minus = minus[static_cast<std::size_t>(p.index)];
    return p;
}

// Orbit of x0 along t^-1 (unstable branch, model matrix A) or t (stable
// branch, model matrix A^-1), with the McCarthy report of each transition.
inline std::vector<OrbitRecord> iterate_orbit(const DisplacementSource& src, const HyperbolicSplitting& s,
                                              Branch branch, double x0, double eta, int n_steps,
                                              std::string* stop_reason = nullptr) {
    const Matrix model = branch == Branch::unstable ? s.A : Matrix(s.A.inverse());
    const double budget = src.defect_budget();
    std::vector<OrbitRecord> out;
    double x = x0;
    Matrix d = src.delta_S0(x);
    std::string why = "n_steps";
    for (int j = 0;; ++j) {
        OrbitRecord r;
        r.step = j;
        r.x = x;
        r.norm_plus = linf(project_displacement(s.P_plus, d));
        r.norm_minus = linf(project_displacement(s.P_minus, d));
        if (j == n_steps) {
            out.push_back(r);
            break;
        }
        if (linf(d) >= src.diameter()) {
            why = "diameter";
            out.push_back(r);
            break;
        }
        std::optional<double> next_x;
        if (branch == Branch::unstable)
            next_x = src.pull(x);
        else
            next_x = src.push(x);
        if (!next_x) {
            why = "no orbit map";
            out.push_back(r);
            break;
        }
        const Matrix next = src.delta_S0(*next_x);
        if (!next.allFinite()) {
            why = "overflow";
            out.push_back(r);
            break;
        }
        r.mccarthy_lhs = linf(next - model * d);
        r.mccarthy_rhs = eta * linf(d);
        r.mccarthy_budget = budget;
        out.push_back(r);
        x = *next_x;
        d = next;
    }
    if (stop_reason) *stop_reason = why;
    return out;
}

inline double sup_norm_delta_S(const DisplacementSource& src) {
    const auto grid = src.grid();
    std::vector<double> nS(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { nS[i] = src.norm_delta_S(grid[i]); });
    return *std::max_element(nS.begin(), nS.end());
}

// The splitting of A^p: same invariant subspaces and projections, with the
// power taken in floating point so large p cannot overflow.
inline HyperbolicSplitting powered_splitting(const HyperbolicSplitting& base, int p) {
    HyperbolicSplitting s = base;
    s.A = real_power(base.A, p);
    s.margin = std::numeric_limits<double>::infinity();
    for (auto& l : s.eigenvalues) {
        l = std::pow(l, p);
        s.margin = std::min(s.margin, std::abs(std::abs(l) - 1.0));
    }
    s.p0 = 0;
    return s;
}

struct CertifyParams {
    double eta = 0.3;
    int grid_size = 4096;
    int n_steps = 12;
    double defect_tol = 1e-10;
    int min_growth_steps = 3;
    std::uint64_t seed = 0;
    P0Options p0;
};

inline Certificate certify(const DisplacementSource& source, const CertifyParams& params) {
    Trace t;
    t.eta = params.eta;
    t.defect_tol = params.defect_tol;
    t.n_steps = params.n_steps;
    t.min_growth_steps = params.min_growth_steps;
    t.seed = params.seed;
    t.eta_in_range = params.eta > 0.0 && params.eta < 1.0 / 3.0;

    const IntMatrix A = source.monodromy();
    const auto h = is_hyperbolic(A);
    t.hyperbolic = h.hyperbolic;
    t.spectral_margin = h.margin;
    t.eta_prime = eta_prime(params.eta, static_cast<std::size_t>(A.rows()), max_abs_entry(A));
    if (!t.hyperbolic || !t.eta_in_range) return derive_verdict(std::move(t));

    HyperbolicSplitting base = invariant_splitting(to_real(A));
    // H acting trivially needs no power substitution.
    std::unique_ptr<DisplacementSource> src;
    HyperbolicSplitting s = base;
    if (!(sup_norm_delta_S(source) <= params.defect_tol)) {
        P0Options p0opt = params.p0;
        p0opt.seed = params.seed;
        t.p0 = compute_p0(base, p0opt);
        src = source.powered(t.p0);
        s = powered_splitting(base, t.p0);
    } else {
        src = source.powered(1);
    }
    t.defect_budget = src->defect_budget();

    const auto grid = src->grid();
    t.grid_size = static_cast<int>(grid.size());
    t.grid_spacing = src->grid_spacing();
    t.sup_displacement_S = sup_norm_delta_S(*src);

    const SupPoint sp = find_sup_point(*src, s, grid);
    t.sup_x = sp.x;
    t.sup_index = sp.index;
    t.sup_value = sp.value;
    t.grid_modulus = sp.grid_modulus;
    t.reports = src->point_reports(sp.x, params.eta);

    if (*t.sup_displacement_S > params.defect_tol) {
        Branch b = sp.norm_plus >= sp.norm_minus ? Branch::unstable : Branch::stable;
        t.stable_branch_available = src->push(sp.x).has_value();
        if (b == Branch::unstable || t.stable_branch_available) {
            t.branch = b;
            t.orbit = iterate_orbit(*src, s, b, sp.x, params.eta, params.n_steps, &t.stop_reason);
        } else {
            t.stop_reason = "no orbit map";
        }
    }
    return derive_verdict(std::move(t));
}

inline Certificate certify(const RepTuple& rep, const CertifyParams& params) {
    RepTuple r = rep;
    if (r.manifold().grid_size() != params.grid_size)
        r = RepTuple(rep.presentation(), rep.manifold().with_grid(params.grid_size), rep.images());
    return certify(RepSource(std::move(r)), params);
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_ANALYSIS_HPP
