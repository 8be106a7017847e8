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
// Named constructions of actions. Exact actions of a hyperbolic G with
// nontrivial H-image do not exist on [0,1] or the circle, so the gallery holds
// exact degenerate actions and scaled near-actions whose relation defect is
// measured.

#ifndef RIGIDITY_LAB_GALLERY_HPP
#define RIGIDITY_LAB_GALLERY_HPP

#include <cmath>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidity_lab/diffeo.hpp"
#include "rigidity_lab/error.hpp"
#include "rigidity_lab/pingpong.hpp"
#include "rigidity_lab/presentation.hpp"
#include "rigidity_lab/representation.hpp"

namespace rigidity_lab {

struct GalleryEntry {
    const char* name;
    const char* summary;
    bool scalable;  // takes eps
};

inline const std::vector<GalleryEntry>& gallery_entries() {
    static const std::vector<GalleryEntry> entries{
        {"trivial_H", "rho(s) = id on H, rho(t) given; an exact action", false},
        {"commuting_flow", "rho(s_i) = time c_i*eps map of x(1-x) d/dx, rho(t) = bump(t_scale*eps)", true},
        {"bump", "rho(s_i) = bump(c_i*eps), rho(t) = bump(t_scale*eps)", true},
        {"c0_leftorder", "faithful free-group action by homeomorphisms supported in [0, delta]", false},
    };
    return entries;
}

namespace detail {

inline std::vector<double> coefficients(const nlohmann::json& params, std::size_t n) {
    std::vector<double> c(n, 1.0);
    if (params.contains("c")) {
        c = params.at("c").get<std::vector<double>>();
        if (c.size() != n)
            throw ConfigError("/action/params/c", "expected " + std::to_string(n) + " coefficients, got " +
                                                      std::to_string(c.size()));
    }
    return c;
}

inline BumpShape default_shape(const Manifold& m) {
    return m.kind() == ManifoldKind::interval ? BumpShape::quadratic : BumpShape::sine;
}

inline Diffeo t_image(const nlohmann::json& params, const Manifold& m, double eps) {
    if (params.contains("t")) return Diffeo::from_json(params.at("t"));
    return Diffeo::bump(params.value("t_scale", 1.0) * eps, default_shape(m));
}

}  // namespace detail

// rho(H) = 1 with rho(t) from params["t"] (default a bump of size 0.05).
inline RepTuple gallery_trivial_H(const SemidirectPresentation& p, const Manifold& m,
                                  const nlohmann::json& params = nlohmann::json::object()) {
    std::vector<Diffeo> images(p.num_h_generators());
    images.push_back(detail::t_image(params, m, 0.05));
    return RepTuple(p, m, std::move(images));
}

// Time c_i*eps maps of the single field x(1-x) d/dx, so the images of H commute
// exactly; all defect sits in the conjugation relators.
inline RepTuple gallery_commuting_flow(const SemidirectPresentation& p, const Manifold& m, double eps,
                                       const nlohmann::json& params = nlohmann::json::object()) {
    if (m.kind() != ManifoldKind::interval) throw Error("representation", "commuting_flow needs the interval");
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("representation", "commuting_flow needs eps in (0, 1]");
    const auto c = detail::coefficients(params, p.num_h_generators());
    std::vector<Diffeo> images;
    for (const double ci : c) images.push_back(Diffeo::flow(ci * eps));
    images.push_back(detail::t_image(params, m, eps));
    return RepTuple(p, m, std::move(images));
}

// rho(s_i) = bump(c_i*eps); the distance to the trivial tuple is 1.25 eps max|c|
// on the interval when |t_scale| <= max|c|.
inline RepTuple gallery_bump(const SemidirectPresentation& p, const Manifold& m, double eps,
                             const nlohmann::json& params = nlohmann::json::object()) {
    const auto c = detail::coefficients(params, p.num_h_generators());
    double cmax = std::abs(params.value("t_scale", 1.0));
    for (const double ci : c) cmax = std::max(cmax, std::abs(ci));
    if (!(eps > 0.0 && eps * cmax < 1.0)) throw Error("representation", "bump needs eps in (0, 1/max|c|)");
    std::vector<Diffeo> images;
    for (const double ci : c) images.push_back(Diffeo::bump(ci * eps, detail::default_shape(m)));
    images.push_back(detail::t_image(params, m, eps));
    return RepTuple(p, m, std::move(images));
}

inline PingPongAction gallery_c0_leftorder(const SemidirectPresentation& p, double delta) {
    if (p.group_class() != GroupClass::free) throw Error("representation", "c0_leftorder needs a free group H");
    return PingPongAction(p.alphabet().names(), delta);
}

// One member of a scalable family; distance to the trivial tuple shrinks with eps.
inline RepTuple scale_family(const std::string& name, const SemidirectPresentation& p, const Manifold& m, double eps,
                             const nlohmann::json& params = nlohmann::json::object()) {
    if (name == "commuting_flow") return gallery_commuting_flow(p, m, eps, params);
    if (name == "bump") return gallery_bump(p, m, eps, params);
    throw Error("representation", "'" + name + "' is not a scalable family");
}

using GalleryAction = std::variant<RepTuple, PingPongAction>;

// {"gallery": "bump", "eps": 0.01, "params": {...}} or {"gallery": "c0_leftorder", "delta": 0.01}
// or {"images": {"a": {...}, "b": {...}, "t": {...}}}.
inline GalleryAction build_action(const SemidirectPresentation& p, const Manifold& m, const nlohmann::json& desc,
                                  double eps_override = -1.0) {
    if (desc.contains("images")) {
        std::map<std::string, Diffeo> images;
        for (const auto& [name, f] : desc.at("images").items()) images.emplace(name, Diffeo::from_json(f));
        return RepTuple::build(p, m, images);
    }
    const auto name = desc.at("gallery").get<std::string>();
    const auto params = desc.value("params", nlohmann::json::object());
    const double eps = eps_override > 0 ? eps_override : desc.value("eps", 0.01);
    if (name == "trivial_H") return gallery_trivial_H(p, m, params);
    if (name == "commuting_flow") return gallery_commuting_flow(p, m, eps, params);
    if (name == "bump") return gallery_bump(p, m, eps, params);
    if (name == "c0_leftorder") return gallery_c0_leftorder(p, desc.value("delta", 0.01));
    throw ConfigError("/action/gallery", "unknown gallery '" + name + "'");
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_GALLERY_HPP
