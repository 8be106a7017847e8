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
// Experiment configuration: validation against the published schema (with
// defaults filled in place) and typed accessors over the validated document.
//
// The validator covers the keywords the schema uses: type, enum, minimum,
// maximum, exclusiveMinimum, exclusiveMaximum, minLength, minItems, items,
// required, properties, additionalProperties, default and oneOf.

#ifndef RIGIDITY_LAB_CONFIG_HPP
#define RIGIDITY_LAB_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidity_lab/analysis.hpp"
#include "rigidity_lab/config_schema.hpp"
#include "rigidity_lab/diffeo.hpp"
#include "rigidity_lab/error.hpp"
#include "rigidity_lab/gallery.hpp"
#include "rigidity_lab/presentation.hpp"

namespace rigidity_lab {

inline const nlohmann::json& config_schema() {
    static const nlohmann::json schema = nlohmann::json::parse(kConfigSchemaText);
    return schema;
}

namespace detail {

inline std::string pointer_append(const std::string& ptr, const std::string& key) {
    std::string k;
    for (const char c : key) {
        if (c == '~')
            k += "~0";
        else if (c == '/')
            k += "~1";
        else
            k += c;
    }
    return ptr + "/" + k;
}

inline std::string json_type_name(const nlohmann::json& v) {
    if (v.is_number_integer()) return "integer";
    if (v.is_number()) return "number";
    return v.type_name();
}

inline bool type_matches(const nlohmann::json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "number") return v.is_number();
    if (t == "integer") {
        if (v.is_number_integer()) return true;
        if (!v.is_number_float()) return false;
        const double x = v.get<double>();
        return std::isfinite(x) && x == std::floor(x);
    }
    throw Error("config", "schema uses unknown type '" + t + "'");
}

inline const std::set<std::string>& supported_keywords() {
    static const std::set<std::string> k{"$schema", "$id", "title", "description", "type", "enum",
                                         "minimum", "maximum", "exclusiveMinimum", "exclusiveMaximum",
                                         "minLength", "minItems", "items", "required", "properties",
                                         "additionalProperties", "default", "oneOf"};
    return k;
}

inline std::string describe_alternatives(const nlohmann::json& one_of) {
    std::string out;
    for (const auto& alt : one_of) {
        if (!out.empty()) out += " | ";
        if (alt.size() == 1 && alt.contains("required")) {
            std::string fields;
            for (const auto& f : alt.at("required")) fields += (fields.empty() ? "" : ", ") + f.get<std::string>();
            out += "{" + fields + "}";
        } else {
            out += alt.dump();
        }
    }
    return out;
}

// Validates `v` at pointer `ptr` and fills defaults for absent properties.
inline void validate_node(const nlohmann::json& schema, nlohmann::json& v, const std::string& ptr) {
    for (const auto& [key, value] : schema.items())
        if (!supported_keywords().count(key)) throw Error("config", "schema keyword '" + key + "' is not supported");

    if (schema.contains("type")) {
        const auto& t = schema.at("type");
        bool ok = false;
        std::string names;
        for (const auto& name : t.is_array() ? t : nlohmann::json::array({t})) {
            ok = ok || type_matches(v, name.get<std::string>());
            names += (names.empty() ? "" : " or ") + name.get<std::string>();
        }
        if (!ok) throw ConfigError(ptr, "expected " + names + ", got " + json_type_name(v));
    }
    if (schema.contains("enum")) {
        const auto& e = schema.at("enum");
        if (std::find(e.begin(), e.end(), v) == e.end())
            throw ConfigError(ptr, "value " + v.dump() + " is not one of " + e.dump());
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (schema.contains("minimum") && x < schema.at("minimum").get<double>())
            throw ConfigError(ptr, "must be >= " + schema.at("minimum").dump());
        if (schema.contains("maximum") && x > schema.at("maximum").get<double>())
            throw ConfigError(ptr, "must be <= " + schema.at("maximum").dump());
        if (schema.contains("exclusiveMinimum") && x <= schema.at("exclusiveMinimum").get<double>())
            throw ConfigError(ptr, "must be > " + schema.at("exclusiveMinimum").dump());
        if (schema.contains("exclusiveMaximum") && x >= schema.at("exclusiveMaximum").get<double>())
            throw ConfigError(ptr, "must be < " + schema.at("exclusiveMaximum").dump());
    }
    if (v.is_string() && schema.contains("minLength") &&
        v.get<std::string>().size() < schema.at("minLength").get<std::size_t>())
        throw ConfigError(ptr, "must have at least " + schema.at("minLength").dump() + " characters");
    if (v.is_array()) {
        if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>())
            throw ConfigError(ptr, "must have at least " + schema.at("minItems").dump() + " items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                validate_node(schema.at("items"), v[i], pointer_append(ptr, std::to_string(i)));
    }
    if (v.is_object()) {
        if (schema.contains("oneOf")) {
            int matches = 0;
            for (const auto& alt : schema.at("oneOf")) {
                nlohmann::json copy = v;
                try {
                    validate_node(alt, copy, ptr);
                    ++matches;
                } catch (const ConfigError&) {
                }
            }
            if (matches != 1)
                throw ConfigError(ptr, "must match exactly one of " + describe_alternatives(schema.at("oneOf")));
        }
        const auto props = schema.value("properties", nlohmann::json::object());
        for (const auto& r : schema.value("required", nlohmann::json::array()))
            if (!v.contains(r.get<std::string>()))
                throw ConfigError(pointer_append(ptr, r.get<std::string>()), "required field is missing");
        for (const auto& [key, sub] : props.items())
            if (!v.contains(key) && sub.contains("default")) v[key] = sub.at("default");
        for (auto it = v.begin(); it != v.end(); ++it) {
            const std::string child = pointer_append(ptr, it.key());
            if (props.contains(it.key())) {
                validate_node(props.at(it.key()), it.value(), child);
            } else if (schema.contains("additionalProperties")) {
                const auto& ap = schema.at("additionalProperties");
                if (ap.is_boolean()) {
                    if (!ap.get<bool>()) throw ConfigError(child, "unknown field");
                } else {
                    validate_node(ap, it.value(), child);
                }
            }
        }
    }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path, const std::string& ptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(ptr, "cannot read '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(ptr, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

}  // namespace detail

// Validates a document against a schema, filling defaults in place.
inline void validate_against(const nlohmann::json& schema, nlohmann::json& doc, const std::string& ptr = "") {
    detail::validate_node(schema, doc, ptr);
}

class ExperimentConfig {
public:
    // `base_dir` resolves a presentation given as a file path.
    static ExperimentConfig from_json(nlohmann::json doc, const std::filesystem::path& base_dir = ".") {
        validate_against(config_schema(), doc);
        auto& p = doc["presentation"];
        if (p.is_string()) {
            std::filesystem::path file = p.get<std::string>();
            if (file.is_relative()) file = base_dir / file;
            nlohmann::json inline_p = detail::read_json_file(file, "/presentation");
            validate_against(config_schema().at("properties").at("presentation"), inline_p, "/presentation");
            if (!inline_p.is_object()) throw ConfigError("/presentation", "file must hold a JSON object");
            p = std::move(inline_p);
        }
        ExperimentConfig c;
        c.doc_ = std::move(doc);
        c.presentation_ = c.parse_presentation();
        c.check_action();
        return c;
    }

    static ExperimentConfig from_file(const std::filesystem::path& path) {
        return from_json(detail::read_json_file(path, ""), path.parent_path().empty() ? "." : path.parent_path());
    }

    // The validated document with every default present and the presentation inlined.
    const nlohmann::json& json() const noexcept { return doc_; }
    std::string name() const { return doc_.at("name").get<std::string>(); }
    const SemidirectPresentation& presentation() const noexcept { return *presentation_; }
    Manifold manifold() const {
        const int grid = analysis().at("grid_size").get<int>();
        return doc_.at("manifold").at("kind") == "circle" ? Manifold::circle(grid) : Manifold::interval(grid);
    }
    bool has_action() const { return doc_.contains("action"); }
    const nlohmann::json& action() const {
        if (!has_action()) throw ConfigError("/action", "required field is missing");
        return doc_.at("action");
    }
    const nlohmann::json& analysis() const { return doc_.at("analysis"); }
    std::uint64_t seed() const { return doc_.at("seed").get<std::uint64_t>(); }
    std::filesystem::path output_dir() const { return doc_.at("output").at("dir").get<std::string>(); }
    bool plots() const { return doc_.at("output").at("plots").get<bool>(); }
    double probe_x() const { return analysis().at("probe_x").get<double>(); }
    std::vector<double> eps_list() const { return analysis().at("eps_list").get<std::vector<double>>(); }

    void set_seed(std::uint64_t s) { doc_["seed"] = s; }
    void set_output_dir(const std::string& dir) { doc_["output"]["dir"] = dir; }

    CertifyParams certify_params() const {
        const auto& a = analysis();
        CertifyParams p;
        p.eta = a.at("eta").get<double>();
        p.grid_size = a.at("grid_size").get<int>();
        p.n_steps = a.at("n_steps").get<int>();
        p.min_growth_steps = a.at("min_growth_steps").get<int>();
        p.defect_tol = a.at("defect_tol").get<double>();
        p.seed = seed();
        p.p0.p_max = a.at("p_max").get<int>();
        p.p0.seed = seed();
        return p;
    }

    // Builds the configured action; eps_override > 0 replaces action.eps.
    GalleryAction build(double eps_override = -1.0) const {
        try {
            return build_action(*presentation_, manifold(), action(), eps_override);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError("/action", e.what());
        }
    }

private:
    SemidirectPresentation parse_presentation() const {
        try {
            auto p = SemidirectPresentation::from_json(doc_.at("presentation"));
            (void)compute_constants(p);  // rejects psi that is singular on homology
            return p;
        } catch (const ConfigError& e) {
            throw ConfigError("/presentation" + e.pointer(), e.reason());
        } catch (const Error& e) {
            throw ConfigError("/presentation", e.what());
        }
    }

    // Diffeo literals are parsed up front so errors point at the literal.
    void check_action() const {
        if (!has_action()) return;
        const auto& a = doc_.at("action");
        const auto parse = [](const nlohmann::json& f, const std::string& ptr) {
            try {
                (void)Diffeo::from_json(f);
            } catch (const Error& e) {
                throw ConfigError(ptr, e.what());
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(ptr, e.what());
            }
        };
        if (a.contains("images"))
            for (const auto& [name, f] : a.at("images").items()) parse(f, "/action/images/" + name);
        if (a.at("params").contains("t")) parse(a.at("params").at("t"), "/action/params/t");
    }

    nlohmann::json doc_;
    std::optional<SemidirectPresentation> presentation_;
};

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_CONFIG_HPP
