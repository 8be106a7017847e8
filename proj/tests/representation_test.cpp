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

rl::SemidirectPresentation cat_abelian() {
    const rl::Alphabet ab({"a", "b"});
    return rl::SemidirectPresentation(rl::GroupClass::free_abelian, {"a", "b"}, {},
                                      {rl::parse_word("a^2 b", ab), rl::parse_word("a b", ab)});
}

}  // namespace

TEST(BuildRep, TrivialImagesHaveNoDefect) {
    const auto r = rl::trivial_rep(fibonacci(), Manifold::interval());
    EXPECT_EQ(r.defect().aggregate, 0.0);
    EXPECT_EQ(r.defect().relators.size(), 2u);
}

TEST(BuildRep, TrivialOnHIsExact) {
    for (const auto& m : {Manifold::interval(), Manifold::circle()}) {
        const auto r = rl::gallery_trivial_H(fibonacci(), m);
        EXPECT_EQ(r.defect().aggregate, 0.0);
        const auto c = rl::gallery_trivial_H(cat_abelian(), m);
        EXPECT_EQ(c.defect().aggregate, 0.0);
    }
    const auto rot = rl::gallery_trivial_H(fibonacci(), Manifold::circle(), {{"t", {{"type", "rotation"}, {"theta", 0.3}}}});
    EXPECT_EQ(rot.defect().aggregate, 0.0);
}

TEST(BuildRep, CommutingFlowHasConjugationDefect) {
    const auto r = rl::gallery_commuting_flow(fibonacci(), Manifold::interval(), 0.01, {{"c", {1.0, 0.0}}});
    const auto& rels = r.defect().relators;
    ASSERT_EQ(rels.size(), 2u);
    EXPECT_EQ(rels[1].label, "conj_b");
    EXPECT_GT(rels[1].displacement, 0.0);
    EXPECT_GT(rels[1].derivative, 0.0);
    EXPECT_GT(r.defect().aggregate, 0.0);
}

TEST(BuildRep, CommutingFlowImagesOfHCommute) {
    const auto p = cat_abelian();
    const auto r = rl::gallery_commuting_flow(p, Manifold::interval(), 0.01, {{"c", {1.0, 0.6}}});
    for (const auto& rel : r.defect().relators)
        if (rel.label.rfind("comm_", 0) == 0) {
            EXPECT_LE(rel.displacement, 1e-12);
            EXPECT_LE(rel.derivative, 1e-12);
        }
    // The free presentation has no commutator relator; evaluate one directly.
    const auto f = rl::gallery_commuting_flow(fibonacci(), Manifold::interval(), 0.01, {{"c", {1.0, -0.3}}});
    const auto comm = rl::parse_word("a b a^-1 b^-1", f.alphabet());
    for (const double x : Manifold::interval(257).grid()) EXPECT_NEAR(f.eval(comm, x), x, 1e-12);
}

TEST(BuildRep, Errors) {
    const auto p = fibonacci();
    EXPECT_THROW(rl::RepTuple::build(p, Manifold::interval(), {{"a", Diffeo()}, {"t", Diffeo()}}), rl::Error);
    EXPECT_THROW(rl::RepTuple::build(p, Manifold::interval(),
                                     {{"a", Diffeo()}, {"b", Diffeo()}, {"t", Diffeo()}, {"c", Diffeo()}}),
                 rl::Error);
    EXPECT_THROW(rl::RepTuple::build(p, Manifold::interval(),
                                     {{"a", Diffeo::rotation(0.1)}, {"b", Diffeo()}, {"t", Diffeo()}}),
                 rl::Error);
    EXPECT_THROW(rl::build_action(p, Manifold::interval(), {{"gallery", "sierpinski"}}), rl::ConfigError);
    EXPECT_THROW(rl::gallery_commuting_flow(p, Manifold::circle(), 0.01), rl::Error);
    EXPECT_THROW(rl::scale_family("bump", p, Manifold::interval(), 1.5), rl::Error);
    EXPECT_THROW(rl::scale_family("trivial_H", p, Manifold::interval(), 0.1), rl::Error);
}

TEST(BuildRep, WordEvaluationOrder) {
    const auto p = fibonacci();
    const auto r = rl::RepTuple::build(p, Manifold::interval(),
                                       {{"a", Diffeo::bump(0.3)}, {"b", Diffeo::flow(0.5)}, {"t", Diffeo()}});
    const double x = 0.4;
    // "a b" applies b first.
    EXPECT_DOUBLE_EQ(r.eval(rl::parse_word("a b", r.alphabet()), x), Diffeo::bump(0.3).eval(Diffeo::flow(0.5).eval(x)));
    EXPECT_NEAR(r.eval(rl::parse_word("a^-2 a b b^-1 b^-1", r.alphabet()), x),
                Diffeo::bump(0.3).inverse().eval(Diffeo::flow(0.5).inverse().eval(x)), 1e-14);
}

TEST(RepDistance, BumpFamily) {
    const auto p = fibonacci();
    const auto m = Manifold::interval();
    const auto r = rl::gallery_bump(p, m, 0.01);
    EXPECT_NEAR(rl::distance_to_trivial(r), 0.0125, 0.0125 * 5e-3);
    EXPECT_EQ(rl::rep_distance(r, r), 0.0);
    // trivial vs a single bump generator
    const auto single = rl::gallery_bump(p, m, 0.01, {{"c", {1.0, 0.0}}, {"t_scale", 0.0}});
    EXPECT_NEAR(rl::distance_to_trivial(single), 0.0125, 0.0125 * 5e-3);
    const auto triv = rl::trivial_rep(p, m);
    EXPECT_LE(rl::rep_distance(single, triv, {"b"}), rl::rep_distance(single, triv, {"a", "b"}));
    EXPECT_THROW(rl::rep_distance(single, triv, {"z"}), rl::Error);
}

TEST(ScaleFamily, DistanceDecreasesWithEps) {
    const auto p = fibonacci();
    for (const std::string name : {"bump", "commuting_flow"}) {
        double prev = 1e300;
        for (const double eps : {0.2, 0.1, 0.05, 0.01, 1e-3, 1e-4}) {
            const double d = rl::distance_to_trivial(rl::scale_family(name, p, Manifold::interval(), eps));
            EXPECT_LT(d, prev) << name << " eps=" << eps;
            prev = d;
        }
        EXPECT_LT(prev, 2e-4);
    }
}

TEST(PowerSubstitution, ReplacesPsiAndT) {
    const auto r = rl::gallery_commuting_flow(fibonacci(), Manifold::interval(), 0.05);
    const auto q = r.power_substituted(2);
    EXPECT_EQ(rl::format_word(q.presentation().psi(0), q.presentation().alphabet()), "b a");
    const double x = 0.3;
    const auto& t = r.image(r.t_index());
    EXPECT_NEAR(q.image(q.t_index()).eval(x), t.eval(t.eval(x)), 1e-15);
    EXPECT_EQ(q.image(0).to_json(), r.image(0).to_json());
}

TEST(C0LeftOrder, SmallAndPingPong) {
    const auto a = rl::gallery_c0_leftorder(fibonacci(), 0.01);
    const auto cert = a.certify();
    EXPECT_TRUE(cert.disjoint);
    EXPECT_EQ(cert.arcs.size(), 4u);
    EXPECT_EQ(cert.inclusions.size(), 4u);
    EXPECT_TRUE(cert.holds);
    for (int g = 0; g < 2; ++g) EXPECT_LE(a.sup_displacement(g), 0.01);
    // Homeomorphism: increasing, endpoints fixed, inverse letters undo each other.
    double prev = -1;
    for (const double x : Manifold::interval(1001).grid()) {
        const double y = a.apply_letter(0, 1, x);
        EXPECT_GT(y, prev - 1e-18);
        prev = y;
        EXPECT_NEAR(a.apply_letter(0, -1, y), x, 1e-12);
    }
    EXPECT_EQ(a.apply_letter(1, 1, 0.5), 0.5);
}

TEST(C0LeftOrder, ReducedWordsMoveSomeLiftedPoint) {
    // Second route to faithfulness: evaluate random reduced words on the line
    // model directly and look for a moved point.
    const auto a = rl::gallery_c0_leftorder(fibonacci(), 0.01);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> gen(0, 1), sgn(0, 1), len(1, 6);
    const std::vector<double> probes{0.05, 0.2, 0.3, 0.45, 0.55, 0.7, 0.8, 0.95};
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::pair<int, int>> w;
        const int n = len(rng);
        while (static_cast<int>(w.size()) < n) {
            const int g = gen(rng), s = sgn(rng) ? 1 : -1;
            if (!w.empty() && w.back().first == g && w.back().second == -s) continue;
            w.emplace_back(g, s);
        }
        bool moved = false;
        for (const double th : probes) {
            double y = th;
            for (auto it = w.rbegin(); it != w.rend(); ++it) y = a.lift(it->first, it->second, y);
            if (std::abs(y - th) > 1e-9) moved = true;
        }
        ASSERT_TRUE(moved) << "trial " << trial;
    }
}
