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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rigidity_lab/analysis.hpp"
#include "rigidity_lab/gallery.hpp"

namespace rl = rigidity_lab;
using rl::Diffeo;
using rl::Manifold;

namespace {

rl::SemidirectPresentation fibonacci() {
    const rl::Alphabet ab({"a", "b"});
    return rl::SemidirectPresentation(rl::GroupClass::free, {"a", "b"}, {},
                                      {rl::parse_word("b", ab), rl::parse_word("b a", ab)});
}

rl::SemidirectPresentation unipotent() {
    const rl::Alphabet ab({"a", "b"});
    return rl::SemidirectPresentation(rl::GroupClass::free_abelian, {"a", "b"}, {},
                                      {rl::parse_word("a", ab), rl::parse_word("a b", ab)});
}

rl::IntMatrix int2(int a, int b, int c, int d) {
    rl::IntMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

// Oracle: least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST(Displacement, Basics) {
    const auto p = fibonacci();
    const auto m = Manifold::interval();
    EXPECT_EQ(rl::delta_S0(rl::trivial_rep(p, m), 0.3).cwiseAbs().maxCoeff(), 0.0);
    const auto bump = rl::gallery_bump(p, m, 0.01, {{"c", {1.0, 0.0}}, {"t_scale", 0.0}});
    EXPECT_NEAR(rl::delta_S0(bump, 0.5)(0, 0), 0.0025, 1e-15);
    const auto rot = rl::gallery_trivial_H(p, Manifold::circle(), {{"t", {{"type", "rotation"}, {"theta", 0.2}}}});
    for (const double x : Manifold::circle(64).grid()) EXPECT_EQ(rl::delta_S0(rot, x).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(rl::displacement_vector(bump, rl::Word{}, 0.4).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Displacement, InverseCancels) {
    const auto r = rl::gallery_bump(fibonacci(), Manifold::interval(), 0.3, {{"c", {1.0, -0.7}}});
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        for (int g = 0; g < 3; ++g) {
            const auto w = rl::Word::generator(g);
            const double gx = r.eval(w, x);
            const auto sum = rl::displacement_vector(r, w, x) + rl::displacement_vector(r, rl::inverse(w), gx);
            ASSERT_LE(sum.cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Linearization, TelescopingWordHasNoResidual) {
    const auto f = Diffeo::bump(0.2);
    const auto lr = rl::linearization_residual({{f, 1}, {f, -1}}, Manifold::interval(), 0.3);
    EXPECT_LE(lr.residual, 1e-16);
}

TEST(Linearization, SquaredBump) {
    const double eps = 0.01, x = 0.25;
    const auto f = Diffeo::bump(eps);
    const auto lr = rl::linearization_residual({{f, 1}, {f, 1}}, Manifold::interval(), x);
    // Direct arithmetic: f(f(x)) - x - 2 eps x (1 - x).
    const double fx = x + eps * x * (1 - x), ffx = fx + eps * fx * (1 - fx);
    EXPECT_NEAR(lr.residual, std::abs(ffx - x - 2 * eps * x * (1 - x)), 1e-15);
    EXPECT_NEAR(lr.residual, 9.34e-6, 9.34e-6 * 0.02);
    EXPECT_NEAR(lr.reference, 1.875e-3, 1e-15);
    EXPECT_NEAR(lr.eta_hat, 5.0e-3, 5e-5);
}

TEST(Linearization, ResidualScalesQuadratically) {
    std::vector<double> eps{1e-2, 1e-3, 1e-4}, res;
    for (const double e : eps) {
        const auto f = Diffeo::bump(e);
        res.push_back(rl::linearization_residual({{f, 1}, {f, 1}}, Manifold::interval(), 0.25).residual);
    }
    const double slope = loglog_slope(eps, res);
    EXPECT_GE(slope, 1.9);
    EXPECT_LE(slope, 2.1);
}

TEST(Linearization, EtaHatShrinksAlongFamily) {
    const auto p = fibonacci();
    double prev = 1e300;
    for (const double eps : {0.1, 0.03, 0.01, 3e-3, 1e-3}) {
        const auto r = rl::gallery_bump(p, Manifold::interval(), eps, {{"c", {1.0, 0.5}}});
        const auto lr = rl::linearization_residual(r, rl::parse_word("a b a b^-1", r.alphabet()), 0.3);
        EXPECT_LT(lr.eta_hat, prev * 1.1);
        prev = lr.eta_hat;
    }
}

TEST(Linearization, DegenerateFlag) {
    const auto lr = rl::linearization_residual({{Diffeo::identity(), 1}}, Manifold::interval(), 0.5);
    EXPECT_FALSE(lr.degenerate);
    EXPECT_EQ(lr.eta_hat, 0.0);
}

TEST(Reduction, TrivialActionsHoldWithZeroSides) {
    const auto p = fibonacci();
    const auto c = rl::compute_constants(p);
    for (const auto& r : {rl::trivial_rep(p, Manifold::interval()), rl::gallery_trivial_H(p, Manifold::interval())}) {
        const auto reps = rl::check_reduction(r, c, 0.37, 0.1);
        ASSERT_EQ(reps.size(), 4u);
        for (const auto& rep : reps) {
            EXPECT_TRUE(rep.holds()) << rep.name;
            EXPECT_EQ(rep.lhs, 0.0);
            EXPECT_EQ(rep.rhs, 0.0);
        }
        const auto mc = rl::check_mccarthy(r, c, 0.37, 0.1);
        EXPECT_TRUE(mc.report.holds());
        EXPECT_EQ(mc.report.lhs, 0.0);
    }
}

TEST(Reduction, CommutingFlowReportsAreLogged) {
    const auto p = fibonacci();
    const auto r = rl::gallery_commuting_flow(p, Manifold::interval(), 1e-3);
    const auto reps = rl::check_reduction(r, rl::compute_constants(p), 0.4, 0.1);
    for (const auto& rep : reps) {
        EXPECT_GE(rep.lhs, 0.0);
        EXPECT_TRUE(std::isfinite(rep.slack()));
    }
    // S' is a set of squared commutators, which vanish for commuting images.
    EXPECT_LE(reps[0].lhs, 1e-15);
}

TEST(McCarthy, EtaPrimeFormula) {
    EXPECT_NEAR(rl::eta_prime(0.3, 2, 1), 0.3 / 18, 1e-16);
    EXPECT_NEAR(rl::eta_prime(0.3, 2, 1), 0.01667, 1e-5);
    const auto p = fibonacci();
    const auto r = rl::trivial_rep(p, Manifold::interval());
    const auto c = rl::compute_constants(p);
    EXPECT_THROW(rl::check_mccarthy(r, c, 0.5, 0.4), rl::Error);
    EXPECT_THROW(rl::check_mccarthy(r, c, 0.5, 0.0), rl::Error);
    EXPECT_NEAR(rl::check_mccarthy(r, c, 0.5, 0.3).eta_prime, 0.3 / 18, 1e-16);
}

TEST(McCarthy, DiagnosticTermsForBumpT) {
    const auto p = fibonacci();
    const auto r = rl::gallery_bump(p, Manifold::interval(), 1e-3);
    const auto mc = rl::check_mccarthy(r, rl::compute_constants(p), 0.3, 0.1);
    ASSERT_EQ(mc.terms.size(), 2u);
    const double y = r.eval(rl::parse_word("t^-1", r.alphabet()), 0.3);
    EXPECT_NEAR(mc.y, y, 1e-15);
    // N |D_y t - 1| |Delta_y(a)| with N = 1.
    const double expected = std::abs(Diffeo::bump(1e-3).derivative(y) - 1.0) * std::abs(Diffeo::bump(1e-3).eval(y) - y);
    EXPECT_NEAR(mc.terms[0].jacobian_term, expected, 1e-18);
}

TEST(Orbit, TrivialOnHHasZeroNorms) {
    const auto src = rl::RepSource(rl::gallery_trivial_H(fibonacci(), Manifold::interval()));
    const auto s = rl::invariant_splitting(rl::to_real(src.monodromy()));
    const auto orbit = rl::iterate_orbit(src, s, rl::Branch::unstable, 0.4, 0.3, 10);
    ASSERT_EQ(orbit.size(), 11u);
    for (const auto& r : orbit) {
        EXPECT_EQ(r.norm_plus, 0.0);
        EXPECT_EQ(r.norm_minus, 0.0);
    }
}

TEST(Orbit, SyntheticModelGrowsEveryStep) {
    for (const double eta : {0.05, 0.1, 0.3}) {
        rl::SyntheticLinearModel::Options o;
        o.noise = eta;
        o.seed = 3;
        const auto A = int2(2, 1, 1, 1);
        const rl::SyntheticLinearModel model(A, o);
        const auto s = rl::invariant_splitting(rl::to_real(A));
        const auto orbit = rl::iterate_orbit(model, s, rl::Branch::unstable, 0.0, eta, 10);
        for (std::size_t j = 0; j + 1 < orbit.size(); ++j) {
            EXPECT_GE(orbit[j + 1].norm_plus, 2 * (1 - eta) * orbit[j].norm_plus) << j;
            EXPECT_LE(*orbit[j].mccarthy_lhs, *orbit[j].mccarthy_rhs * (1 + 1e-12));
        }
    }
}

TEST(SupPoint, TieBreakAndLocation) {
    const auto p = fibonacci();
    const auto s = rl::invariant_splitting(rl::to_real(rl::compute_constants(p).A));
    const auto triv = rl::RepSource(rl::trivial_rep(p, Manifold::interval()));
    const auto grid = Manifold::interval(4097).grid();
    const auto z = rl::find_sup_point(triv, s, grid);
    EXPECT_EQ(z.index, 0);
    EXPECT_EQ(z.value, 0.0);

    const auto bump = rl::RepSource(rl::gallery_bump(p, Manifold::interval(), 0.01, {{"c", {1.0, 0.0}}}));
    const auto b = rl::find_sup_point(bump, s, grid);
    EXPECT_EQ(b.x, 0.5);
    std::vector<double> rev(grid.rbegin(), grid.rend());
    EXPECT_EQ(rl::find_sup_point(bump, s, rev).value, b.value);
}

TEST(Certify, HypothesisViolated) {
    const auto r = rl::gallery_trivial_H(unipotent(), Manifold::interval());
    const auto c = rl::certify(r, {});
    EXPECT_EQ(c.verdict, rl::Verdict::hypothesis_violated);
    EXPECT_EQ(c.binding_constraint, "psi* not hyperbolic");
    rl::CertifyParams bad;
    bad.eta = 0.4;
    EXPECT_EQ(rl::certify(rl::gallery_trivial_H(fibonacci(), Manifold::interval()), bad).verdict,
              rl::Verdict::hypothesis_violated);
}

TEST(Certify, TrivialOnH) {
    const auto c = rl::certify(rl::gallery_trivial_H(fibonacci(), Manifold::interval()), {});
    EXPECT_EQ(c.verdict, rl::Verdict::H_trivial);
    EXPECT_EQ(c.trace.p0, 1);  // nothing to iterate, so no power substitution
    for (const auto& r : c.trace.reports) {
        EXPECT_TRUE(r.holds()) << r.name;
        EXPECT_EQ(r.lhs, 0.0) << r.name;
    }
}

TEST(Certify, CommutingFlowIsNotTrivial) {
    const auto c = rl::certify(rl::gallery_commuting_flow(fibonacci(), Manifold::interval(), 1e-2), {});
    EXPECT_EQ(c.verdict, rl::Verdict::inconclusive);
    EXPECT_EQ(c.binding_constraint, "relation defect");
}

TEST(Certify, EveryTransitionIsCertifiedOrNamed) {
    rl::CertifyParams prm;
    prm.eta = 0.1;
    const auto c = rl::certify(rl::gallery_commuting_flow(fibonacci(), Manifold::interval(), 1e-3), prm);
    ASSERT_FALSE(c.trace.orbit.empty());
    for (std::size_t j = 0; j + 1 < c.trace.orbit.size(); ++j) {
        const auto& r = c.trace.orbit[j];
        EXPECT_TRUE(r.certified != !r.reason.empty()) << j;
    }
}

TEST(Certify, SyntheticGrowthAndZeroSeed) {
    rl::SyntheticLinearModel::Options o;
    o.noise = 0.3;
    const auto A = int2(0, 1, 1, 1);
    rl::CertifyParams prm;
    prm.eta = 0.3;
    const auto c = rl::certify(rl::SyntheticLinearModel(A, o), prm);
    EXPECT_EQ(c.verdict, rl::Verdict::growth_witnessed);
    o.plus_scale = 0.0;
    EXPECT_EQ(rl::certify(rl::SyntheticLinearModel(A, o), prm).verdict, rl::Verdict::H_trivial);
}

TEST(Certify, ReplayIsByteIdentical) {
    for (const auto& cert : {rl::certify(rl::gallery_commuting_flow(fibonacci(), Manifold::interval(), 1e-2), {}),
                             rl::certify(rl::gallery_trivial_H(unipotent(), Manifold::interval()), {}),
                             rl::certify(rl::SyntheticLinearModel(int2(2, 1, 1, 1), {}), {})}) {
        const auto text = cert.to_json().dump(2) + "\n";
        const auto r = rl::replay_certificate(text);
        EXPECT_TRUE(r.identical);
        // Tampering with a derived flag is caught.
        auto j = nlohmann::json::parse(text);
        j["verdict"] = "H_trivial";
        if (cert.verdict != rl::Verdict::H_trivial) {
            EXPECT_FALSE(rl::replay_certificate(j.dump(2) + "\n").identical);
        }
    }
}

TEST(Certify, Deterministic) {
    const auto r = rl::gallery_commuting_flow(fibonacci(), Manifold::interval(), 5e-3);
    EXPECT_EQ(rl::certify(r, {}).to_json().dump(), rl::certify(r, {}).to_json().dump());
}
