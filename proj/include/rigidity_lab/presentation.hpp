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
// Semidirect products H x|_psi Z: the monodromy matrix on H^1, the correction
// words tau_j, and the word-length constants K, k0 and k.

#ifndef RIGIDITY_LAB_PRESENTATION_HPP
#define RIGIDITY_LAB_PRESENTATION_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidity_lab/error.hpp"
#include "rigidity_lab/smith.hpp"
#include "rigidity_lab/words.hpp"

namespace rigidity_lab {

// H is generated by S0 (a basis of the free part of H_1) followed by S1
// (torsion or trivial in H_1). psi is given on every generator of H; the
// stable letter is `t`, with t h t^-1 = psi(h).
class SemidirectPresentation {
public:
    SemidirectPresentation(GroupClass group_class, std::vector<std::string> s0,
                           std::vector<std::string> s1, std::vector<Word> psi_images,
                           std::vector<Word> torsion_relators = {}, std::string t_name = "t")
        : group_class_(group_class),
          d_(s0.size()),
          psi_(std::move(psi_images)),
          relators_(std::move(torsion_relators)),
          t_name_(std::move(t_name)) {
        std::vector<std::string> names = std::move(s0);
        names.insert(names.end(), s1.begin(), s1.end());
        alphabet_ = Alphabet(std::move(names));
        validate();
    }

    // {"group_class": "free", "S0": ["a","b"], "S1": [], "psi": {"a": "b", "b": "b a"},
    //  "relators": ["c^3"], "K_override": 4}
    static SemidirectPresentation from_json(const nlohmann::json& j) {
        const auto cls_name = j.at("group_class").get<std::string>();
        GroupClass cls;
        if (cls_name == "free")
            cls = GroupClass::free;
        else if (cls_name == "free_abelian")
            cls = GroupClass::free_abelian;
        else
            throw ConfigError("/group_class", "unknown group class '" + cls_name + "'");
        const auto s0 = j.at("S0").get<std::vector<std::string>>();
        const auto s1 = j.value("S1", std::vector<std::string>{});
        std::vector<std::string> all = s0;
        all.insert(all.end(), s1.begin(), s1.end());
        const Alphabet alphabet(all);
        const auto& psi = j.at("psi");
        std::vector<Word> images;
        for (const auto& name : all) {
            if (!psi.contains(name)) throw ConfigError("/psi/" + name, "psi has no image for generator");
            try {
                images.push_back(parse_word(psi.at(name).get<std::string>(), alphabet));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError("/psi/" + name, e.what());
            }
        }
        for (const auto& [name, value] : psi.items())
            if (alphabet.index_of(name) < 0) throw ConfigError("/psi/" + name, "not a generator of H");
        std::vector<Word> rels;
        const auto rel_text = j.value("relators", std::vector<std::string>{});
        for (std::size_t i = 0; i < rel_text.size(); ++i) {
            try {
                rels.push_back(parse_word(rel_text[i], alphabet));
            } catch (const Error& e) {
                throw ConfigError("/relators/" + std::to_string(i), e.what());
            }
        }
        SemidirectPresentation p(cls, s0, s1, std::move(images), std::move(rels),
                                 j.value("t", std::string("t")));
        if (j.contains("K_override") && !j.at("K_override").is_null())
            p.set_K_override(j.at("K_override").get<std::int64_t>());
        return p;
    }

    GroupClass group_class() const noexcept { return group_class_; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::size_t d() const noexcept { return d_; }
    std::size_t num_h_generators() const noexcept { return alphabet_.size(); }
    std::size_t num_s1() const noexcept { return alphabet_.size() - d_; }
    const std::string& t_name() const noexcept { return t_name_; }
    const std::vector<Word>& psi() const noexcept { return psi_; }
    const Word& psi(int gen) const { return psi_.at(static_cast<std::size_t>(gen)); }
    const std::vector<Word>& torsion_relators() const noexcept { return relators_; }

    std::vector<int> s0_indices() const {
        std::vector<int> v(d_);
        for (std::size_t i = 0; i < d_; ++i) v[i] = static_cast<int>(i);
        return v;
    }

    std::vector<int> s1_indices() const {
        std::vector<int> v;
        for (std::size_t i = d_; i < alphabet_.size(); ++i) v.push_back(static_cast<int>(i));
        return v;
    }

    std::optional<std::int64_t> K_override() const noexcept { return K_override_; }
    void set_K_override(std::int64_t K) { K_override_ = K; }

    Word reduce(const Word& w) const { return reduce_word(w, group_class_); }

    // psi(w) for a word in H, reduced.
    Word apply_psi(const Word& w) const { return reduce(substitute(w, psi_)); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["group_class"] = to_string(group_class_);
        j["S0"] = std::vector<std::string>(alphabet_.names().begin(),
                                           alphabet_.names().begin() + static_cast<long>(d_));
        j["S1"] = std::vector<std::string>(alphabet_.names().begin() + static_cast<long>(d_),
                                           alphabet_.names().end());
        nlohmann::json psi = nlohmann::json::object();
        for (std::size_t i = 0; i < alphabet_.size(); ++i)
            psi[alphabet_.names()[i]] = format_word(psi_[i], alphabet_);
        j["psi"] = psi;
        if (!relators_.empty()) {
            std::vector<std::string> rels;
            for (const auto& r : relators_) rels.push_back(format_word(r, alphabet_));
            j["relators"] = rels;
        }
        if (t_name_ != "t") j["t"] = t_name_;
        if (K_override_) j["K_override"] = *K_override_;
        return j;
    }

private:
    void validate() const {
        if (d_ < 1) throw Error("presentation", "S0 must contain at least one generator");
        if (alphabet_.index_of(t_name_) >= 0)
            throw Error("presentation", "stable letter '" + t_name_ + "' collides with a generator of H");
        if (psi_.size() != alphabet_.size())
            throw Error("presentation", "psi must be given on every generator of H");
        for (const auto& w : psi_)
            for (const auto& l : w.letters())
                if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= alphabet_.size())
                    throw Error("presentation", "psi image uses a letter outside H");
        if (group_class_ == GroupClass::free) {
            if (num_s1() != 0)
                throw Error("presentation", "S1 generator '" + alphabet_.name(static_cast<int>(d_)) +
                                                "' has infinite order in H1 of a free group");
            if (!relators_.empty()) throw Error("presentation", "free groups take no relators");
        }
        for (const auto& r : relators_)
            for (const auto& l : r.letters())
                if (static_cast<std::size_t>(l.gen) < d_)
                    throw Error("presentation", "torsion relator involves S0 generator '" +
                                                    alphabet_.name(l.gen) + "'");
    }

    GroupClass group_class_;
    Alphabet alphabet_;
    std::size_t d_;
    std::vector<Word> psi_;
    std::vector<Word> relators_;
    std::string t_name_;
    std::optional<std::int64_t> K_override_;
};

// max |a_ij|
inline std::int64_t max_abs_entry(const IntMatrix& a) {
    std::int64_t m = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) m = std::max(m, a(i, j) < 0 ? -a(i, j) : a(i, j));
    return m;
}

// A(j, i) = exponent sum of s_i in psi(s_j): the transpose of the matrix of psi
// on H_1, i.e. the matrix of psi^* on H^1 in the basis dual to S0.
inline IntMatrix monodromy_matrix(const SemidirectPresentation& p) {
    const auto d = static_cast<Eigen::Index>(p.d());
    IntMatrix a(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto sums = exponent_sums(p.psi(static_cast<int>(j)), p.num_h_generators());
        for (Eigen::Index i = 0; i < d; ++i) a(j, i) = sums[static_cast<std::size_t>(i)];
    }
    if (determinant(a) == 0) throw Error("presentation", "psi not an automorphism on homology");
    for (const int c : p.s1_indices()) {
        const auto sums = exponent_sums(p.psi(c), p.num_h_generators());
        for (std::size_t i = 0; i < p.d(); ++i)
            if (sums[i] != 0)
                throw Error("presentation", "psi maps torsion generator '" + p.alphabet().name(c) +
                                                "' to an element of infinite order");
    }
    return a;
}

// tau_j = (prod_i s_i^{A(j,i)})^-1 psi(s_j), reduced.
inline std::vector<Word> extract_tau(const SemidirectPresentation& p, const IntMatrix& a) {
    std::vector<Word> tau;
    for (std::size_t j = 0; j < p.d(); ++j) {
        Word lead;
        for (std::size_t i = 0; i < p.d(); ++i) {
            const auto e = a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            if (e != 0) lead = lead * Word::generator(static_cast<int>(i), e);
        }
        tau.push_back(p.reduce(inverse(lead) * p.psi(static_cast<int>(j))));
    }
    return tau;
}

inline std::vector<Word> extract_tau(const SemidirectPresentation& p) {
    return extract_tau(p, monodromy_matrix(p));
}

// Torsion of H_1 (free_abelian class): relator matrix over S1 in Smith form.
struct TorsionData {
    std::vector<std::int64_t> divisors;  // elementary divisors > 1
    IntMatrix change_of_basis;           // V with U R V = diag, columns indexed by S1
    std::int64_t minimal_K = 2;
};

inline TorsionData torsion_data(const SemidirectPresentation& p) {
    TorsionData t;
    const auto s1 = p.s1_indices();
    if (s1.empty()) return t;
    IntMatrix r = IntMatrix::Zero(static_cast<Eigen::Index>(p.torsion_relators().size()),
                                  static_cast<Eigen::Index>(s1.size()));
    for (std::size_t i = 0; i < p.torsion_relators().size(); ++i) {
        const auto sums = exponent_sums(p.torsion_relators()[i], p.num_h_generators());
        for (std::size_t c = 0; c < s1.size(); ++c)
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                sums[static_cast<std::size_t>(s1[c])];
    }
    const SmithForm f = smith_normal_form(r);
    if (f.rank() < static_cast<Eigen::Index>(s1.size()))
        throw Error("presentation", "S1 does not consist of torsion elements of H1 (relator rank " +
                                        std::to_string(f.rank()) + " < " + std::to_string(s1.size()) + ")");
    for (const auto e : f.elementary_divisors())
        if (e > 1) t.divisors.push_back(e);
    t.change_of_basis = f.V;
    t.minimal_K = std::max<std::int64_t>(2, lcm_of(t.divisors));
    return t;
}

// Smallest K >= 2 annihilating the torsion of H_1, or the configured override.
inline std::int64_t compute_K(const SemidirectPresentation& p) {
    const TorsionData t = p.group_class() == GroupClass::free ? TorsionData{} : torsion_data(p);
    if (const auto o = p.K_override()) {
        const std::int64_t exponent = lcm_of(t.divisors);
        if (*o < t.minimal_K || *o % exponent != 0)
            throw Error("presentation", "K_override " + std::to_string(*o) +
                                            " does not annihilate the torsion (minimal K " +
                                            std::to_string(t.minimal_K) + ")");
        return *o;
    }
    return t.minimal_K;
}

struct GroupConstants {
    IntMatrix A;
    std::vector<Word> tau;
    std::vector<Word> s_prime;  // u^K for u in S1 then tau_1..tau_d
    std::int64_t K = 2;
    std::int64_t k0 = 2;
    std::int64_t k = 2;
    std::int64_t norm_A = 0;
    TorsionData torsion;
};

inline GroupConstants compute_constants(const SemidirectPresentation& p) {
    GroupConstants c;
    c.A = monodromy_matrix(p);
    c.tau = extract_tau(p, c.A);
    if (p.group_class() == GroupClass::free_abelian) c.torsion = torsion_data(p);
    c.K = compute_K(p);
    for (const int s : p.s1_indices()) c.s_prime.push_back(p.reduce(power(Word::generator(s), c.K)));
    for (const auto& t : c.tau) c.s_prime.push_back(p.reduce(power(t, c.K)));
    c.k0 = c.K;
    for (const auto& u : c.s_prime) c.k0 = std::max(c.k0, u.length());
    c.norm_A = max_abs_entry(c.A);
    c.k = c.k0 + static_cast<std::int64_t>(p.d()) * c.norm_A;
    return c;
}

// (first o second)(s) = first(second(s)).
inline SemidirectPresentation compose(const SemidirectPresentation& first,
                                      const SemidirectPresentation& second) {
    std::vector<Word> images;
    for (const auto& w : second.psi()) images.push_back(first.reduce(substitute(w, first.psi())));
    const auto& names = first.alphabet().names();
    const auto d = static_cast<long>(first.d());
    return SemidirectPresentation(first.group_class(), {names.begin(), names.begin() + d},
                                  {names.begin() + d, names.end()}, std::move(images),
                                  first.torsion_relators(), first.t_name());
}

// The index-n subgroup H x| <t^n>: same H, monodromy psi^n.
inline SemidirectPresentation power_presentation(const SemidirectPresentation& p, int n) {
    if (n < 1) throw Error("presentation", "power must be positive");
    SemidirectPresentation out = p;
    for (int i = 1; i < n; ++i) out = compose(p, out);
    if (p.K_override()) out.set_K_override(*p.K_override());
    return out;
}

inline nlohmann::json int_matrix_json(const IntMatrix& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        std::vector<std::int64_t> row;
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json constants_json(const SemidirectPresentation& p, const GroupConstants& c) {
    nlohmann::json j;
    j["A"] = int_matrix_json(c.A);
    j["d"] = p.d();
    j["norm_A"] = c.norm_A;
    std::vector<std::string> tau, sp;
    for (const auto& t : c.tau) tau.push_back(format_word(t, p.alphabet()));
    for (const auto& u : c.s_prime) sp.push_back(format_word(u, p.alphabet()));
    j["tau"] = tau;
    j["S_prime"] = sp;
    j["K"] = c.K;
    j["k0"] = c.k0;
    j["k"] = c.k;
    if (p.group_class() == GroupClass::free_abelian && p.num_s1() > 0) {
        j["torsion_divisors"] = c.torsion.divisors;
        j["torsion_change_of_basis"] = int_matrix_json(c.torsion.change_of_basis);
    }
    return j;
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_PRESENTATION_HPP
