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

#include "rigidity_lab/diffeo.hpp"

namespace rl = rigidity_lab;
using rl::Diffeo;
using rl::Manifold;

namespace {

double bump_oracle(double eps, double x) { return x + eps * x * (1 - x); }

// Random diffeo of the given manifold built from a few primitives.
Diffeo random_diffeo(std::mt19937_64& rng, const Manifold& m) {
    std::uniform_real_distribution<double> eps(-0.9, 0.9), theta(-0.5, 0.5), time(-2.0, 2.0);
    std::uniform_int_distribution<int> pick(0, 2), count(1, 3);
    std::vector<Diffeo> parts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const int p = pick(rng);
        if (m.kind() == rl::ManifoldKind::interval) {
            if (p == 0) parts.push_back(Diffeo::bump(eps(rng)));
            if (p == 1) parts.push_back(Diffeo::flow(time(rng)));
            if (p == 2) parts.push_back(Diffeo::bump(eps(rng)).inverse());
        } else {
            if (p == 0) parts.push_back(Diffeo::bump(eps(rng), rl::BumpShape::sine));
            if (p == 1) parts.push_back(Diffeo::rotation(theta(rng)));
            if (p == 2) parts.push_back(Diffeo::bump(eps(rng), rl::BumpShape::sine_squared).power(2));
        }
    }
    return Diffeo::compose(parts);
}

}  // namespace

TEST(Eval, Identity) { EXPECT_EQ(Diffeo::identity().eval(0.3), 0.3); }

TEST(Eval, BumpAndComposition) {
    const auto f = Diffeo::bump(0.01);
    EXPECT_NEAR(f.eval(0.25), 0.251875, 1e-15);
    EXPECT_NEAR((f * f).eval(0.25), 0.25375933984, 1e-11);
    EXPECT_NEAR(f.power(2).eval(0.25), bump_oracle(0.01, bump_oracle(0.01, 0.25)), 1e-15);
}

TEST(Eval, IntervalPrimitivesFixEndpoints) {
    for (const auto& f : {Diffeo::bump(0.7), Diffeo::flow(1.3), Diffeo::bump(-0.4).inverse()}) {
        EXPECT_NEAR(f.eval(0.0), 0.0, 1e-15);
        EXPECT_NEAR(f.eval(1.0), 1.0, 1e-13);
    }
}

TEST(Derivative, BumpAtZero) {
    EXPECT_EQ(Diffeo::identity().derivative(0.4), 1.0);
    EXPECT_NEAR(Diffeo::bump(0.01).derivative(0.0), 1.01, 1e-15);
}

TEST(Derivative, MatchesCentralDifferences) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pt(0.05, 0.95);
    for (const auto& m : {Manifold::interval(), Manifold::circle()}) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto f = random_diffeo(rng, m);
            const double x = pt(rng), h = 1e-6;
            const double fd = (f.eval(x + h) - f.eval(x - h)) / (2 * h);
            const double d = f.derivative(x);
            ASSERT_GT(d, 0.0);
            ASSERT_NEAR(d, fd, 1e-5 * std::abs(fd)) << f.to_json().dump();
        }
    }
}

TEST(Derivative, FlowIsAGroup) {
    const auto f = Diffeo::flow(0.3), g = Diffeo::flow(-0.7);
    for (double x : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR((f * g).eval(x), Diffeo::flow(-0.4).eval(x), 1e-15);
        EXPECT_NEAR((f * g).eval(x), (g * f).eval(x), 1e-15);
    }
}

TEST(Inverse, RoundTrip) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pt(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& m = trial % 2 ? Manifold::circle() : Manifold::interval();
        const auto f = random_diffeo(rng, m);
        const auto g = Diffeo::bump(0.5 * (pt(rng) - 0.5)) * f;
        const auto& h = m.kind() == rl::ManifoldKind::interval ? g : f;
        const double x = pt(rng);
        ASSERT_NEAR(h.inverse().eval(h.eval(x)), x, 1e-12) << h.to_json().dump();
        ASSERT_NEAR(h.eval(h.inverse().eval(x)), x, 1e-12) << h.to_json().dump() << " x=" << x;
        ASSERT_NEAR(h.inverse().derivative(h.eval(x)) * h.derivative(x), 1.0, 1e-12);
    }
}

TEST(Inverse, Simplifications) {
    EXPECT_EQ(Diffeo::rotation(0.2).inverse().to_json(), Diffeo::rotation(-0.2).to_json());
    EXPECT_EQ(Diffeo::bump(0.1).inverse().inverse().to_json(), Diffeo::bump(0.1).to_json());
    EXPECT_EQ(Diffeo::flow(0.1).power(3).to_json(), Diffeo::flow(0.1 * 3).to_json());
    EXPECT_TRUE(Diffeo::bump(0.1).power(0).is_identity());
}

TEST(Json, RoundTrip) {
    const auto j = nlohmann::json::parse(
        R"j({"type":"compose","of":[{"type":"bump","eps":0.01,"shape":"x(1-x)"},
            {"type":"power","n":-2,"of":{"type":"bump","eps":0.2,"shape":"x(1-x)"}}]})j");
    const auto f = Diffeo::from_json(j);
    EXPECT_EQ(Diffeo::from_json(f.to_json()).to_json(), f.to_json());
    EXPECT_NEAR(f.eval(0.3), Diffeo::bump(0.01).eval(Diffeo::bump(0.2).inverse().power(2).eval(0.3)), 1e-14);
    EXPECT_THROW(Diffeo::from_json({{"type", "spiral"}}), rl::Error);
    EXPECT_THROW(Diffeo::from_json({{"type", "bump"}, {"eps", 0.1}, {"shape", "cube"}}), rl::Error);
    EXPECT_THROW(Diffeo::bump(1.0), rl::Error);
}

TEST(Check, PrimitivesRespectTheirManifold) {
    EXPECT_THROW(Diffeo::rotation(0.1).check(rl::ManifoldKind::interval), rl::Error);
    EXPECT_THROW(Diffeo::flow(0.1).check(rl::ManifoldKind::circle), rl::Error);
    EXPECT_THROW(Diffeo::bump(0.1).check(rl::ManifoldKind::circle), rl::Error);
    EXPECT_NO_THROW(Diffeo::bump(0.1, rl::BumpShape::sine).check(rl::ManifoldKind::circle));
}

TEST(Distance, BumpVersusIdentity) {
    const auto m = Manifold::interval();
    EXPECT_EQ(rl::c1_distance(Diffeo::bump(0.01), Diffeo::bump(0.01), m), 0.0);
    const auto d = rl::c1_distance_detail(Diffeo::bump(0.01), Diffeo::identity(), m);
    // sup |f - id| = 0.01/4 at 1/2 (not on the even grid), sup |f' - 1| = 0.01 at the ends.
    EXPECT_NEAR(d.value, 0.0125, 0.0125 * 5e-3);
    EXPECT_NEAR(d.c1, 0.01, 1e-15);
    EXPECT_EQ(rl::c1_distance(Diffeo::rotation(0.0), Diffeo::identity(), Manifold::circle()), 0.0);
}

TEST(Distance, CircleRotation) {
    // |e(t + theta) - e(t)|_inf is maximal at 2 sin(pi theta); derivatives agree up to the
    // rotated unit tangent, whose deviation has the same bound.
    const double theta = 0.05, chord = 2 * std::sin(M_PI * theta);
    const auto d = rl::c1_distance_detail(Diffeo::rotation(theta), Diffeo::identity(), Manifold::circle());
    EXPECT_NEAR(d.c0, chord, 1e-6);
    EXPECT_NEAR(d.c1, chord, 1e-6);
}

TEST(Distance, SymmetricAndTriangle) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto m = (trial % 2 ? Manifold::circle() : Manifold::interval()).with_grid(257);
        const auto f = random_diffeo(rng, m), g = random_diffeo(rng, m), h = random_diffeo(rng, m);
        const double fg = rl::c1_distance(f, g, m);
        ASSERT_EQ(fg, rl::c1_distance(g, f, m));
        ASSERT_LE(fg, rl::c1_distance(f, h, m) + rl::c1_distance(h, g, m) + 1e-12);
    }
}

TEST(Jacobian, AmbientMatrixActsOnTangentAndNormal) {
    const auto m = Manifold::circle();
    const auto f = Diffeo::bump(0.3, rl::BumpShape::sine);
    const double x = 0.17;
    const auto j = f.jet(x);
    const rl::Matrix jac = rl::ambient_jacobian(m, x, j);
    EXPECT_LT((jac * m.tangent(x) - j.deriv * m.tangent(j.value)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((jac * m.normal(x) - m.normal(j.value)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Norms, LinfOperatorEstimate) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + trial % 2;
        rl::Matrix t(n, n);
        rl::Vector v(n);
        for (int i = 0; i < n; ++i) {
            v(i) = u(rng);
            for (int k = 0; k < n; ++k) t(i, k) = u(rng);
        }
        ASSERT_LE(rl::linf(t * v), n * rl::linf(t) * rl::linf(v));
    }
}

TEST(ManifoldTest, Basics) {
    const auto i = Manifold::interval(5), c = Manifold::circle(4);
    EXPECT_EQ(i.grid(), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
    EXPECT_EQ(c.grid(), (std::vector<double>{0, 0.25, 0.5, 0.75}));
    EXPECT_EQ(i.ambient_dim(), 1);
    EXPECT_EQ(c.ambient_dim(), 2);
    EXPECT_NEAR(c.embed(0.25)(1), 1.0, 1e-15);
    EXPECT_THROW(Manifold::interval(1), rl::Error);
}
