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
// Candidate representations of H x| <t> given by generator images, and the
// measured failure of those images to satisfy the group relations.

#ifndef RIGIDITY_LAB_REPRESENTATION_HPP
#define RIGIDITY_LAB_REPRESENTATION_HPP

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rigidity_lab/diffeo.hpp"
#include "rigidity_lab/error.hpp"
#include "rigidity_lab/parallel.hpp"
#include "rigidity_lab/presentation.hpp"
#include "rigidity_lab/words.hpp"

namespace rigidity_lab {

struct RelatorDefect {
    std::string label;
    Word word;                  // over the extended alphabet
    double displacement = 0.0;  // sup_x |r(x) - x|
    double derivative = 0.0;    // sup_x |D_x r - 1|

    double value() const { return std::max(displacement, derivative); }
};

struct RelationDefect {
    std::vector<RelatorDefect> relators;
    double aggregate = 0.0;
};

class RepTuple {
public:
    // images[i] is the image of generator i of H; images.back() is rho(t).
    RepTuple(SemidirectPresentation p, Manifold m, std::vector<Diffeo> images)
        : presentation_(std::move(p)), manifold_(m), images_(std::move(images)) {
        alphabet_ = presentation_.alphabet();
        t_index_ = alphabet_.push_back(presentation_.t_name());
        if (images_.size() != alphabet_.size())
            throw Error("representation", "expected " + std::to_string(alphabet_.size()) + " images, got " +
                                              std::to_string(images_.size()));
        for (std::size_t i = 0; i < images_.size(); ++i) {
            try {
                images_[i].check(manifold_.kind());
            } catch (const Error& e) {
                throw Error("representation", "image of '" + alphabet_.names()[i] + "' is not a diffeo of the " +
                                                  to_string(manifold_.kind()) + ": " + e.what());
            }
        }
        for (const auto& f : images_) inverses_.push_back(f.inverse());
        defect_ = measure_defect();
    }

    // Images keyed by generator name; every generator of H and t must appear.
    static RepTuple build(const SemidirectPresentation& p, const Manifold& m,
                          const std::map<std::string, Diffeo>& images) {
        std::vector<std::string> names = p.alphabet().names();
        names.push_back(p.t_name());
        std::vector<Diffeo> ordered;
        for (const auto& n : names) {
            const auto it = images.find(n);
            if (it == images.end()) throw Error("representation", "missing image for generator '" + n + "'");
            ordered.push_back(it->second);
        }
        for (const auto& [n, f] : images)
            if (std::find(names.begin(), names.end(), n) == names.end())
                throw Error("representation", "image given for unknown generator '" + n + "'");
        return RepTuple(p, m, std::move(ordered));
    }

    const SemidirectPresentation& presentation() const noexcept { return presentation_; }
    const Manifold& manifold() const noexcept { return manifold_; }
    // Generators of H followed by t.
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    int t_index() const noexcept { return t_index_; }
    const Diffeo& image(int gen) const { return images_.at(static_cast<std::size_t>(gen)); }
    const Diffeo& image(const std::string& name) const {
        const int i = alphabet_.index_of(name);
        if (i < 0) throw Error("representation", "unknown generator '" + name + "'");
        return image(i);
    }
    const std::vector<Diffeo>& images() const noexcept { return images_; }
    const RelationDefect& defect() const noexcept { return defect_; }

    // Letters whose image is the identity are dropped before free reduction, so
    // a word that collapses under rho evaluates to the identity exactly.
    Word effective(const Word& w) const {
        std::vector<Letter> kept;
        for (const auto& l : w.letters())
            if (!images_.at(static_cast<std::size_t>(l.gen)).is_identity()) kept.push_back(l);
        return free_reduce(Word(std::move(kept)));
    }

    // rho(w) at x with its derivative; the rightmost letter acts first.
    Jet apply(const Word& w, double x) const {
        Jet j{x, 1.0};
        const Word e = effective(w);
        const auto& ls = e.letters();
        for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
            const auto& f = it->exp > 0 ? images_[static_cast<std::size_t>(it->gen)]
                                        : inverses_[static_cast<std::size_t>(it->gen)];
            for (std::int64_t k = 0; k < (it->exp > 0 ? it->exp : -it->exp); ++k) {
                const Jet n = f.jet(j.value);
                j = {n.value, n.deriv * j.deriv};
            }
        }
        return j;
    }

    double eval(const Word& w, double x) const { return apply(w, x).value; }

    // Relators of G over the extended alphabet: t s t^-1 psi(s)^-1 for every
    // generator of H, plus commutators and torsion relators when H is abelian.
    std::vector<std::pair<std::string, Word>> relators() const {
        std::vector<std::pair<std::string, Word>> out;
        const Word t = Word::generator(t_index_);
        const auto n = static_cast<int>(presentation_.num_h_generators());
        for (int s = 0; s < n; ++s) {
            const Word r = t * Word::generator(s) * inverse(t) * inverse(presentation_.psi(s));
            out.emplace_back("conj_" + alphabet_.name(s), r);
        }
        if (presentation_.group_class() == GroupClass::free_abelian) {
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) {
                    const Word ga = Word::generator(a), gb = Word::generator(b);
                    out.emplace_back("comm_" + alphabet_.name(a) + "_" + alphabet_.name(b),
                                     ga * gb * inverse(ga) * inverse(gb));
                }
            int i = 0;
            for (const auto& r : presentation_.torsion_relators())
                out.emplace_back("torsion_" + std::to_string(i++), r);
        }
        return out;
    }

    // Same action with psi replaced by psi^p and t by t^p.
    RepTuple power_substituted(int p) const {
        if (p == 1) return *this;
        std::vector<Diffeo> images = images_;
        images.back() = images_.back().power(p);
        return RepTuple(power_presentation(presentation_, p), manifold_, std::move(images));
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["manifold"] = {{"kind", to_string(manifold_.kind())}, {"grid", manifold_.grid_size()}};
        nlohmann::json im = nlohmann::json::object();
        for (std::size_t i = 0; i < images_.size(); ++i) im[alphabet_.names()[i]] = images_[i].to_json();
        j["images"] = im;
        nlohmann::json rels = nlohmann::json::array();
        for (const auto& r : defect_.relators)
            rels.push_back({{"relator", r.label},
                            {"word", format_word(r.word, alphabet_)},
                            {"displacement", r.displacement},
                            {"derivative", r.derivative}});
        j["defect"] = {{"aggregate", defect_.aggregate}, {"relators", rels}};
        return j;
    }

private:
    RelationDefect measure_defect() const {
        RelationDefect d;
        const auto grid = manifold_.grid();
        for (const auto& [label, word] : relators()) {
            RelatorDefect r{label, word};
            if (!effective(word).empty()) {
                std::vector<double> disp(grid.size()), der(grid.size());
                parallel_for(grid.size(), [&](std::size_t i) {
                    const Jet j = apply(word, grid[i]);
                    disp[i] = linf(manifold_.embed(j.value) - manifold_.embed(grid[i]));
                    der[i] = linf(tangent_jacobian(manifold_, j) - manifold_.tangent(grid[i]));
                });
                r.displacement = *std::max_element(disp.begin(), disp.end());
                r.derivative = *std::max_element(der.begin(), der.end());
            }
            d.aggregate = std::max(d.aggregate, r.value());
            d.relators.push_back(std::move(r));
        }
        return d;
    }

    SemidirectPresentation presentation_;
    Manifold manifold_;
    Alphabet alphabet_;
    int t_index_ = 0;
    std::vector<Diffeo> images_;
    std::vector<Diffeo> inverses_;
    RelationDefect defect_;
};

// Every generator sent to the identity.
inline RepTuple trivial_rep(const SemidirectPresentation& p, const Manifold& m) {
    return RepTuple(p, m, std::vector<Diffeo>(p.num_h_generators() + 1));
}

// max over the named generators of the C^1 distance between their images.
inline double rep_distance(const RepTuple& a, const RepTuple& b, const std::vector<std::string>& gens) {
    if (!(a.manifold() == b.manifold())) throw Error("representation", "tuples live on different manifolds");
    double d = 0.0;
    for (const auto& g : gens) {
        if (a.alphabet().index_of(g) < 0 || b.alphabet().index_of(g) < 0)
            throw Error("representation", "generator '" + g + "' missing from a tuple");
        d = std::max(d, c1_distance(a.image(g), b.image(g), a.manifold()));
    }
    return d;
}

// Over every generator of H and t.
inline double rep_distance(const RepTuple& a, const RepTuple& b) {
    return rep_distance(a, b, a.alphabet().names());
}

inline double distance_to_trivial(const RepTuple& r) {
    return rep_distance(r, trivial_rep(r.presentation(), r.manifold()));
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_REPRESENTATION_HPP
