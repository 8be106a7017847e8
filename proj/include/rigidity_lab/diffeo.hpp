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
// C^1 diffeomorphisms of [0,1] and of the circle as closed-form expression
// trees. Every node propagates (value, derivative) exactly by the chain rule.
//
// Points are parameters: t in [0,1] for the interval, a lift t in R for the
// circle with embedding t -> (cos 2 pi t, sin 2 pi t). Circle diffeomorphisms
// are represented by lifts F with F(t + 1) = F(t) + 1.

#ifndef RIGIDITY_LAB_DIFFEO_HPP
#define RIGIDITY_LAB_DIFFEO_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rigidity_lab/error.hpp"
#include "rigidity_lab/hyperbolic.hpp"
#include "rigidity_lab/parallel.hpp"

namespace rigidity_lab {

enum class ManifoldKind { interval, circle };

inline std::string to_string(ManifoldKind k) { return k == ManifoldKind::interval ? "interval" : "circle"; }

class Manifold {
public:
    explicit Manifold(ManifoldKind kind, int grid_size = 4096) : kind_(kind), grid_size_(grid_size) {
        if (grid_size < 2) throw Error("diffeo", "grid needs at least two points");
    }

    static Manifold interval(int grid_size = 4096) { return Manifold(ManifoldKind::interval, grid_size); }
    static Manifold circle(int grid_size = 4096) { return Manifold(ManifoldKind::circle, grid_size); }

    ManifoldKind kind() const noexcept { return kind_; }
    int grid_size() const noexcept { return grid_size_; }
    int ambient_dim() const noexcept { return kind_ == ManifoldKind::interval ? 1 : 2; }
    // l-infinity diameter of the embedded manifold.
    double diameter() const noexcept { return kind_ == ManifoldKind::interval ? 1.0 : 2.0; }

    Manifold with_grid(int m) const { return Manifold(kind_, m); }

    // Interval: m points including both endpoints. Circle: m points of [0,1).
    std::vector<double> grid() const {
        std::vector<double> g(static_cast<std::size_t>(grid_size_));
        const double denom = kind_ == ManifoldKind::interval ? grid_size_ - 1 : grid_size_;
        for (int i = 0; i < grid_size_; ++i) g[static_cast<std::size_t>(i)] = i / denom;
        return g;
    }

    double grid_spacing() const {
        return kind_ == ManifoldKind::interval ? 1.0 / (grid_size_ - 1) : 1.0 / grid_size_;
    }

    // Canonical representative of a point: [0,1) on the circle.
    double canonical(double t) const { return kind_ == ManifoldKind::circle ? t - std::floor(t) : t; }

    Vector embed(double t) const {
        if (kind_ == ManifoldKind::interval) return Vector::Constant(1, t);
        Vector v(2);
        v << std::cos(2 * M_PI * t), std::sin(2 * M_PI * t);
        return v;
    }

    // Unit tangent vector in the ambient space.
    Vector tangent(double t) const {
        if (kind_ == ManifoldKind::interval) return Vector::Constant(1, 1.0);
        Vector v(2);
        v << -std::sin(2 * M_PI * t), std::cos(2 * M_PI * t);
        return v;
    }

    Vector normal(double t) const {
        if (kind_ == ManifoldKind::interval) return Vector(0);
        return embed(t);
    }

    bool operator==(const Manifold&) const = default;

private:
    ManifoldKind kind_;
    int grid_size_;
};

// Value and derivative along the manifold parameter.
struct Jet {
    double value = 0.0;
    double deriv = 1.0;
};

enum class BumpShape { quadratic, sine, sine_squared };

namespace detail {

struct ShapeInfo {
    const char* name;
    double sup_abs;  // sup |s|
    bool periodic;
};

inline ShapeInfo shape_info(BumpShape s) {
    switch (s) {
        case BumpShape::quadratic: return {"x(1-x)", 0.25, false};
        case BumpShape::sine: return {"sin", 1.0 / (2 * M_PI), true};
        case BumpShape::sine_squared: return {"sin2", 1.0 / M_PI, true};
    }
    return {"?", 0.0, false};
}

inline BumpShape parse_shape(const std::string& name) {
    if (name == "x(1-x)") return BumpShape::quadratic;
    if (name == "sin") return BumpShape::sine;
    if (name == "sin2") return BumpShape::sine_squared;
    throw Error("diffeo", "unknown bump shape '" + name + "'");
}

// s and s' for each shape; every shape has sup |s'| = 1.
inline Jet shape_jet(BumpShape s, double x) {
    switch (s) {
        case BumpShape::quadratic: return {x * (1 - x), 1 - 2 * x};
        case BumpShape::sine: return {std::sin(2 * M_PI * x) / (2 * M_PI), std::cos(2 * M_PI * x)};
        case BumpShape::sine_squared: {
            const double sn = std::sin(M_PI * x);
            return {sn * sn / M_PI, std::sin(2 * M_PI * x)};
        }
    }
    return {};
}

class Node {
public:
    enum class Kind { identity, bump, rotation, flow, compose, inverse, power };

    virtual ~Node() = default;
    virtual Kind kind() const = 0;
    virtual Jet jet(double x) const = 0;
    // Upper bound on sup |F(x) - x|.
    virtual double max_shift() const = 0;
    virtual void check(ManifoldKind m) const = 0;
    // True when the formula is a degree-one lift valid on all of R; otherwise
    // it is only monotone on [0,1].
    virtual bool periodic() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

using NodePtr = std::shared_ptr<const Node>;

class IdentityNode final : public Node {
public:
    Kind kind() const override { return Kind::identity; }
    Jet jet(double x) const override { return {x, 1.0}; }
    double max_shift() const override { return 0.0; }
    void check(ManifoldKind) const override {}
    bool periodic() const override { return true; }
    nlohmann::json to_json() const override { return {{"type", "identity"}}; }
};

// x + eps * s(x)
class BumpNode final : public Node {
public:
    BumpNode(double eps, BumpShape shape) : eps_(eps), shape_(shape) {
        if (!(std::abs(eps) < 1.0)) throw Error("diffeo", "bump needs |eps| * c_shape < 1");
    }
    Kind kind() const override { return Kind::bump; }
    Jet jet(double x) const override {
        const Jet s = shape_jet(shape_, x);
        return {x + eps_ * s.value, 1.0 + eps_ * s.deriv};
    }
    double max_shift() const override { return std::abs(eps_) * shape_info(shape_).sup_abs; }
    void check(ManifoldKind m) const override {
        if (m == ManifoldKind::circle && !shape_info(shape_).periodic)
            throw Error("diffeo", std::string("bump shape '") + shape_info(shape_).name + "' is not periodic");
    }
    bool periodic() const override { return shape_info(shape_).periodic; }
    nlohmann::json to_json() const override {
        return {{"type", "bump"}, {"eps", eps_}, {"shape", shape_info(shape_).name}};
    }
    double eps() const { return eps_; }

private:
    double eps_;
    BumpShape shape_;
};

class RotationNode final : public Node {
public:
    explicit RotationNode(double theta) : theta_(theta) {}
    Kind kind() const override { return Kind::rotation; }
    Jet jet(double x) const override { return {x + theta_, 1.0}; }
    double max_shift() const override { return std::abs(theta_); }
    void check(ManifoldKind m) const override {
        if (m != ManifoldKind::circle) throw Error("diffeo", "rotation is only defined on the circle");
    }
    bool periodic() const override { return true; }
    nlohmann::json to_json() const override { return {{"type", "rotation"}, {"theta", theta_}}; }
    double theta() const { return theta_; }

private:
    double theta_;
};

// Time-tau map of the vector field x(1-x) d/dx on [0,1]; these commute exactly.
class FlowNode final : public Node {
public:
    explicit FlowNode(double time) : time_(time) {}
    Kind kind() const override { return Kind::flow; }
    Jet jet(double x) const override {
        const double e = std::exp(time_);
        const double den = 1.0 - x + x * e;
        return {x * e / den, e / (den * den)};
    }
    double max_shift() const override { return std::min(1.0, std::abs(std::tanh(time_ / 4.0))); }
    void check(ManifoldKind m) const override {
        if (m != ManifoldKind::interval) throw Error("diffeo", "flow is only defined on the interval");
    }
    bool periodic() const override { return false; }
    nlohmann::json to_json() const override { return {{"type", "flow"}, {"time", time_}}; }
    double time() const { return time_; }

private:
    double time_;
};

// of[0] o of[1] o ... ; the last factor acts first.
class ComposeNode final : public Node {
public:
    explicit ComposeNode(std::vector<NodePtr> of) : of_(std::move(of)) {}
    Kind kind() const override { return Kind::compose; }
    Jet jet(double x) const override {
        Jet j{x, 1.0};
        for (auto it = of_.rbegin(); it != of_.rend(); ++it) {
            const Jet k = (*it)->jet(j.value);
            j = {k.value, k.deriv * j.deriv};
        }
        return j;
    }
    double max_shift() const override {
        double s = 0.0;
        for (const auto& f : of_) s += f->max_shift();
        return s;
    }
    void check(ManifoldKind m) const override {
        for (const auto& f : of_) f->check(m);
    }
    bool periodic() const override {
        return std::all_of(of_.begin(), of_.end(), [](const NodePtr& f) { return f->periodic(); });
    }
    nlohmann::json to_json() const override {
        nlohmann::json of = nlohmann::json::array();
        for (const auto& f : of_) of.push_back(f->to_json());
        return {{"type", "compose"}, {"of", of}};
    }

private:
    std::vector<NodePtr> of_;
};

// Safeguarded Newton on F(y) = x inside the bracket [x - B, x + B].
inline Jet invert(const Node& f, double x) {
    const double b = f.max_shift() + 1e-12;
    double lo = x - b, hi = x + b;
    if (!f.periodic()) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
    }
    double y = x - (f.jet(x).value - x);
    if (!(y > lo && y < hi)) y = 0.5 * (lo + hi);
    Jet fy = f.jet(y);
    for (int it = 0; it < 200; ++it) {
        const double r = fy.value - x;
        if (r == 0.0) break;
        if (r < 0)
            lo = y;
        else
            hi = y;
        double next = y - r / fy.deriv;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == y || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(y))) break;
        const Jet fn = f.jet(next);
        if (std::abs(fn.value - x) >= std::abs(r) && hi - lo < 1e-15) break;
        y = next;
        fy = fn;
    }
    return {y, 1.0 / fy.deriv};
}

class InverseNode final : public Node {
public:
    explicit InverseNode(NodePtr inner) : inner_(std::move(inner)) {}
    Kind kind() const override { return Kind::inverse; }
    Jet jet(double x) const override { return invert(*inner_, x); }
    double max_shift() const override { return inner_->max_shift(); }
    void check(ManifoldKind m) const override { inner_->check(m); }
    bool periodic() const override { return inner_->periodic(); }
    nlohmann::json to_json() const override { return {{"type", "inverse"}, {"of", inner_->to_json()}}; }
    const NodePtr& inner() const { return inner_; }

private:
    NodePtr inner_;
};

class PowerNode final : public Node {
public:
    PowerNode(NodePtr inner, int n) : inner_(std::move(inner)), n_(n) {
        if (n_ < 0) inv_ = std::make_shared<InverseNode>(inner_);
    }
    Kind kind() const override { return Kind::power; }
    Jet jet(double x) const override {
        const Node& step = n_ < 0 ? *inv_ : *inner_;
        Jet j{x, 1.0};
        for (int i = 0; i < std::abs(n_); ++i) {
            const Jet k = step.jet(j.value);
            j = {k.value, k.deriv * j.deriv};
        }
        return j;
    }
    double max_shift() const override { return std::abs(n_) * inner_->max_shift(); }
    void check(ManifoldKind m) const override { inner_->check(m); }
    bool periodic() const override { return inner_->periodic(); }
    nlohmann::json to_json() const override { return {{"type", "power"}, {"n", n_}, {"of", inner_->to_json()}}; }
    const NodePtr& inner() const { return inner_; }
    int n() const { return n_; }

private:
    NodePtr inner_;
    NodePtr inv_;
    int n_;
};

}  // namespace detail

// Immutable handle to an expression tree; cheap to copy.
class Diffeo {
public:
    Diffeo() : node_(std::make_shared<detail::IdentityNode>()) {}

    static Diffeo identity() { return Diffeo(); }
    // Zero-size primitives collapse to the identity.
    static Diffeo bump(double eps, BumpShape shape = BumpShape::quadratic) {
        if (eps == 0.0) return identity();
        return Diffeo(std::make_shared<detail::BumpNode>(eps, shape));
    }
    static Diffeo rotation(double theta) {
        if (theta == 0.0) return identity();
        return Diffeo(std::make_shared<detail::RotationNode>(theta));
    }
    static Diffeo flow(double time) {
        if (time == 0.0) return identity();
        return Diffeo(std::make_shared<detail::FlowNode>(time));
    }

    // of[0] o of[1] o ...
    static Diffeo compose(const std::vector<Diffeo>& of) {
        std::vector<detail::NodePtr> nodes;
        for (const auto& f : of)
            if (!f.is_identity()) nodes.push_back(f.node_);
        if (nodes.empty()) return identity();
        if (nodes.size() == 1) return Diffeo(nodes.front());
        return Diffeo(std::make_shared<detail::ComposeNode>(std::move(nodes)));
    }

    Diffeo inverse() const {
        using K = detail::Node::Kind;
        switch (node_->kind()) {
            case K::identity: return *this;
            case K::rotation: return rotation(-static_cast<const detail::RotationNode&>(*node_).theta());
            case K::flow: return flow(-static_cast<const detail::FlowNode&>(*node_).time());
            case K::inverse: return Diffeo(static_cast<const detail::InverseNode&>(*node_).inner());
            case K::power: {
                const auto& p = static_cast<const detail::PowerNode&>(*node_);
                return Diffeo(p.inner()).power(-p.n());
            }
            default: return Diffeo(std::make_shared<detail::InverseNode>(node_));
        }
    }

    Diffeo power(int n) const {
        using K = detail::Node::Kind;
        if (n == 0 || is_identity()) return identity();
        if (n == 1) return *this;
        if (n == -1) return inverse();
        if (node_->kind() == K::rotation)
            return rotation(n * static_cast<const detail::RotationNode&>(*node_).theta());
        if (node_->kind() == K::flow) return flow(n * static_cast<const detail::FlowNode&>(*node_).time());
        return Diffeo(std::make_shared<detail::PowerNode>(node_, n));
    }

    Jet jet(double x) const { return node_->jet(x); }
    double eval(double x) const { return node_->jet(x).value; }
    double derivative(double x) const { return node_->jet(x).deriv; }
    double max_shift() const { return node_->max_shift(); }
    bool is_identity() const { return node_->kind() == detail::Node::Kind::identity; }

    // Throws if a primitive is not defined on the manifold.
    void check(ManifoldKind m) const { node_->check(m); }

    nlohmann::json to_json() const { return node_->to_json(); }

    // {"type":"bump","eps":0.01,"shape":"x(1-x)"} | {"type":"rotation","theta":0.1} |
    // {"type":"flow","time":0.01} | {"type":"compose","of":[...]} |
    // {"type":"inverse","of":{...}} | {"type":"power","n":2,"of":{...}} | {"type":"identity"}
    static Diffeo from_json(const nlohmann::json& j) {
        const auto type = j.at("type").get<std::string>();
        if (type == "identity") return identity();
        if (type == "bump")
            return bump(j.at("eps").get<double>(), detail::parse_shape(j.value("shape", std::string("x(1-x)"))));
        if (type == "rotation") return rotation(j.at("theta").get<double>());
        if (type == "flow") return flow(j.at("time").get<double>());
        if (type == "compose") {
            std::vector<Diffeo> of;
            for (const auto& f : j.at("of")) of.push_back(from_json(f));
            return compose(of);
        }
        if (type == "inverse") return from_json(j.at("of")).inverse();
        if (type == "power") return from_json(j.at("of")).power(j.at("n").get<int>());
        throw Error("diffeo", "unknown diffeo type '" + type + "'");
    }

    friend Diffeo operator*(const Diffeo& f, const Diffeo& g) { return compose({f, g}); }

private:
    explicit Diffeo(detail::NodePtr node) : node_(std::move(node)) {}
    detail::NodePtr node_;
};

// D_x f as the N x 1 matrix sending the unit tangent at x to the ambient vector
// f'(x) * tangent(f(x)).
inline Vector tangent_jacobian(const Manifold& m, const Jet& j) { return j.deriv * m.tangent(j.value); }

// D_x f extended to an N x N ambient matrix: tangent to tangent as above,
// normal to normal (the radial extension r * e(t) -> r * e(f(t)) on the circle).
inline Matrix ambient_jacobian(const Manifold& m, double x, const Jet& j) {
    if (m.kind() == ManifoldKind::interval) return Matrix::Constant(1, 1, j.deriv);
    return j.deriv * m.tangent(j.value) * m.tangent(x).transpose() + m.normal(j.value) * m.normal(x).transpose();
}

struct C1Distance {
    double value = 0.0;    // c0 + c1
    double c0 = 0.0;       // sup_x |f(x) - g(x)|
    double c1 = 0.0;       // sup_x |D_x f - D_x g|
    double grid_spacing = 0.0;
    int grid_size = 0;
};

// d(f, g) = sup |f - g| + sup |D f - D g| in ambient l-infinity units, with both
// suprema taken over the manifold's sample grid.
inline C1Distance c1_distance_detail(const Diffeo& f, const Diffeo& g, const Manifold& m) {
    const auto grid = m.grid();
    std::vector<double> c0(grid.size()), c1(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const Jet jf = f.jet(grid[i]), jg = g.jet(grid[i]);
        c0[i] = (m.embed(jf.value) - m.embed(jg.value)).cwiseAbs().maxCoeff();
        c1[i] = (tangent_jacobian(m, jf) - tangent_jacobian(m, jg)).cwiseAbs().maxCoeff();
    });
    C1Distance d;
    d.c0 = *std::max_element(c0.begin(), c0.end());
    d.c1 = *std::max_element(c1.begin(), c1.end());
    d.value = d.c0 + d.c1;
    d.grid_spacing = m.grid_spacing();
    d.grid_size = m.grid_size();
    return d;
}

inline double c1_distance(const Diffeo& f, const Diffeo& g, const Manifold& m) {
    return c1_distance_detail(f, g, m).value;
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_DIFFEO_HPP
