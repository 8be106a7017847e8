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
// A faithful action of a free group by homeomorphisms of [0,1] supported in
// [0, delta]. It is C^0 small but carries no derivative control, so it lives
// outside the Diffeo type.
//
// Construction: generator i acts on the projective line (parameter theta,
// direction angle pi * theta) by a hyperbolic matrix with attracting point
// alpha_i = i / 2n and repelling point alpha_i + 1/2. Lifting each map to R so
// that it fixes the lifts of its fixed points, conjugating R onto (0,1) by
// u = 1/2 + atan(x) / pi and shrinking [0,1] onto [0, delta] gives the action.

#ifndef RIGIDITY_LAB_PINGPONG_HPP
#define RIGIDITY_LAB_PINGPONG_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidity_lab/error.hpp"
#include "rigidity_lab/words.hpp"

namespace rigidity_lab {

struct PingPongArc {
    double center = 0.0;
    double radius = 0.0;
    double lo() const { return center - radius; }
    double hi() const { return center + radius; }
};

struct PingPongInclusion {
    std::string map;     // e.g. "a" or "a^-1"
    PingPongArc source;  // the complement of this arc is mapped ...
    PingPongArc target;  // ... into this arc
    double image_lo = 0.0, image_hi = 0.0;  // outward-rounded enclosure of the image arc
    bool holds = false;
};

struct PingPongCertificate {
    std::vector<PingPongArc> arcs;
    bool disjoint = false;
    std::vector<PingPongInclusion> inclusions;
    bool holds = false;

    nlohmann::json to_json() const {
        nlohmann::json a = nlohmann::json::array(), inc = nlohmann::json::array();
        for (const auto& arc : arcs) a.push_back({arc.lo(), arc.hi()});
        for (const auto& i : inclusions)
            inc.push_back({{"map", i.map},
                           {"source_complement_of", {i.source.lo(), i.source.hi()}},
                           {"target", {i.target.lo(), i.target.hi()}},
                           {"image", {i.image_lo, i.image_hi}},
                           {"holds", i.holds}});
        return {{"arcs", a}, {"disjoint", disjoint}, {"inclusions", inc}, {"holds", holds}};
    }
};

class PingPongAction {
public:
    PingPongAction(std::vector<std::string> generators, double delta)
        : names_(std::move(generators)), delta_(delta) {
        const auto n = static_cast<double>(names_.size());
        if (names_.size() < 2) throw Error("representation", "c0_leftorder needs at least two generators");
        if (!(delta > 0.0 && delta <= 1.0)) throw Error("representation", "c0_leftorder needs delta in (0, 1]");
        radius_ = 0.2 / n;
        // Strong enough that the complement of the repelling arc lands well inside
        // the attracting arc.
        const double c = 1.0 / std::tan(M_PI * radius_);
        lambda2_ = 2.0 * c * c;
    }

    const std::vector<std::string>& generators() const noexcept { return names_; }
    double delta() const noexcept { return delta_; }
    double radius() const noexcept { return radius_; }
    double lambda_squared() const noexcept { return lambda2_; }
    double attracting(int gen) const { return gen / (2.0 * static_cast<double>(names_.size())); }

    // Lift to R of generator `gen` to the power sign (+1 or -1).
    double lift(int gen, int sign, double theta) const {
        const double s = theta - attracting(gen);
        const double n = std::round(s);
        // tan is finite at +-pi/2 in floating point, so the repelling point stays fixed.
        const double r = std::atan(std::tan(M_PI * (s - n)) * (sign > 0 ? 1.0 / lambda2_ : lambda2_)) / M_PI;
        return n + r + attracting(gen);
    }

    // rho(gen^sign) on [0,1].
    double apply_letter(int gen, int sign, double x) const {
        if (x <= 0.0 || x >= delta_) return x;
        const double u = x / delta_;
        const double theta = std::tan(M_PI * (u - 0.5));
        const double out = 0.5 + std::atan(lift(gen, sign, theta)) / M_PI;
        return std::clamp(out, 0.0, 1.0) * delta_;
    }

    // Right-to-left over the letters of w.
    double eval(const Word& w, double x) const {
        const auto& ls = w.letters();
        for (auto it = ls.rbegin(); it != ls.rend(); ++it)
            for (std::int64_t k = 0; k < std::abs(it->exp); ++k) x = apply_letter(it->gen, it->exp > 0 ? 1 : -1, x);
        return x;
    }

    // sup_x |rho(g)(x) - x| on a uniform grid of [0,1].
    double sup_displacement(int gen, int grid = 4096) const {
        double m = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double x = static_cast<double>(i) / (grid - 1);
            m = std::max({m, std::abs(apply_letter(gen, 1, x) - x), std::abs(apply_letter(gen, -1, x) - x)});
        }
        return m;
    }

    // Ping-pong on the projective circle: the arcs around the attracting and
    // repelling points of every generator are pairwise disjoint, g maps the
    // complement of its repelling arc into its attracting arc and g^-1 the
    // complement of the attracting arc into the repelling arc. Each map is an
    // increasing homeomorphism of R commuting with theta -> theta + 1, so the
    // image of an arc is the arc between the endpoint images; endpoint images
    // are widened by a bound well above the floating point error of tan/atan.
    PingPongCertificate certify() const {
        constexpr double widen = 1e-12;
        PingPongCertificate c;
        const int n = static_cast<int>(names_.size());
        for (int g = 0; g < n; ++g) {
            c.arcs.push_back({attracting(g), radius_});
            c.arcs.push_back({attracting(g) + 0.5, radius_});
        }
        c.disjoint = true;
        for (std::size_t i = 0; i < c.arcs.size(); ++i)
            for (std::size_t j = i + 1; j < c.arcs.size(); ++j) {
                double gap = std::abs(c.arcs[i].center - c.arcs[j].center);
                gap = std::min(gap, 1.0 - gap);
                if (gap <= c.arcs[i].radius + c.arcs[j].radius + widen) c.disjoint = false;
            }
        c.holds = c.disjoint;
        for (int g = 0; g < n; ++g) {
            for (const int sign : {1, -1}) {
                const PingPongArc attract{attracting(g), radius_}, repel{attracting(g) + 0.5, radius_};
                PingPongInclusion inc;
                inc.map = names_[static_cast<std::size_t>(g)] + (sign > 0 ? "" : "^-1");
                inc.source = sign > 0 ? repel : attract;
                inc.target = sign > 0 ? attract : repel;
                // The complement of the source arc is [source.hi, source.lo + 1].
                const double lo = lift(g, sign, inc.source.hi()), hi = lift(g, sign, inc.source.lo() + 1.0);
                // Shift the target by the integer that places the image next to it.
                const double shift = std::round(0.5 * (lo + hi) - inc.target.center);
                inc.image_lo = lo - shift - widen;
                inc.image_hi = hi - shift + widen;
                inc.holds = inc.image_lo > inc.target.lo() && inc.image_hi < inc.target.hi();
                c.holds = c.holds && inc.holds;
                c.inclusions.push_back(inc);
            }
        }
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["type"] = "c0_leftorder";
        j["generators"] = names_;
        j["delta"] = delta_;
        j["c1_controlled"] = false;
        j["arc_radius"] = radius_;
        j["lambda_squared"] = lambda2_;
        return j;
    }

private:
    std::vector<std::string> names_;
    double delta_;
    double radius_ = 0.0;
    double lambda2_ = 0.0;
};

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_PINGPONG_HPP
