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
// Words over a finite alphabet of generators, with free and free-abelian
// reduction.

#ifndef RIGIDITY_LAB_WORDS_HPP
#define RIGIDITY_LAB_WORDS_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rigidity_lab/error.hpp"

namespace rigidity_lab {

enum class GroupClass { free, free_abelian };

inline std::string to_string(GroupClass c) {
    return c == GroupClass::free ? "free" : "free_abelian";
}

// One syllable g^e of a word. `gen` indexes an Alphabet, `exp` is nonzero in
// any reduced word.
struct Letter {
    int gen = 0;
    std::int64_t exp = 1;

    friend bool operator==(const Letter&, const Letter&) = default;
};

// A formal product read left to right: letters[0] * letters[1] * ...
// Acting on a space, the rightmost letter is applied first.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
    Word(std::initializer_list<Letter> letters) : letters_(letters) {}

    static Word generator(int gen, std::int64_t exp = 1) { return Word{{gen, exp}}; }

    const std::vector<Letter>& letters() const noexcept { return letters_; }
    bool empty() const noexcept { return letters_.empty(); }
    std::size_t syllables() const noexcept { return letters_.size(); }

    // Word length in the generators: the sum of |exponent|.
    std::int64_t length() const noexcept {
        std::int64_t n = 0;
        for (const auto& l : letters_) n += l.exp < 0 ? -l.exp : l.exp;
        return n;
    }

    // Spelled out as a sequence of (gen, +-1), left to right.
    std::vector<Letter> expanded() const {
        std::vector<Letter> out;
        out.reserve(static_cast<std::size_t>(length()));
        for (const auto& l : letters_) {
            const std::int64_t step = l.exp < 0 ? -1 : 1;
            for (std::int64_t i = 0; i != l.exp; i += step) out.push_back({l.gen, step});
        }
        return out;
    }

    friend bool operator==(const Word&, const Word&) = default;

    friend Word operator*(const Word& a, const Word& b) {
        std::vector<Letter> out = a.letters_;
        out.insert(out.end(), b.letters_.begin(), b.letters_.end());
        return Word(std::move(out));
    }

private:
    std::vector<Letter> letters_;
};

inline Word inverse(const Word& w) {
    std::vector<Letter> out;
    out.reserve(w.syllables());
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it)
        out.push_back({it->gen, -it->exp});
    return Word(std::move(out));
}

// Free reduction: merge adjacent syllables on the same generator and drop zero
// exponents. Stack based, single pass.
inline Word free_reduce(const Word& w) {
    std::vector<Letter> stack;
    stack.reserve(w.syllables());
    for (const auto& l : w.letters()) {
        if (l.exp == 0) continue;
        if (!stack.empty() && stack.back().gen == l.gen) {
            stack.back().exp += l.exp;
            if (stack.back().exp == 0) stack.pop_back();
        } else {
            stack.push_back(l);
        }
    }
    return Word(std::move(stack));
}

// Normal form in the free abelian group: one syllable per generator, sorted.
inline Word abelian_reduce(const Word& w) {
    std::vector<Letter> ls = w.letters();
    std::stable_sort(ls.begin(), ls.end(),
                     [](const Letter& a, const Letter& b) { return a.gen < b.gen; });
    return free_reduce(Word(std::move(ls)));
}

inline Word reduce_word(const Word& w, GroupClass c = GroupClass::free) {
    return c == GroupClass::free ? free_reduce(w) : abelian_reduce(w);
}

inline Word power(const Word& w, std::int64_t n) {
    const Word base = n < 0 ? inverse(w) : w;
    const std::int64_t m = n < 0 ? -n : n;
    Word out;
    for (std::int64_t i = 0; i < m; ++i) out = out * base;
    return out;
}

// Replace every generator g by images[g]; the result is not reduced.
inline Word substitute(const Word& w, const std::vector<Word>& images) {
    Word out;
    for (const auto& l : w.letters()) {
        if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= images.size())
            throw Error("words", "substitution has no image for generator index " +
                                     std::to_string(l.gen));
        out = out * power(images[static_cast<std::size_t>(l.gen)], l.exp);
    }
    return out;
}

// Generator names; a Word's letters index into one of these.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (names_[i] == names_[j])
                    throw Error("words", "duplicate generator name '" + names_[i] + "'");
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(int gen) const { return names_.at(static_cast<std::size_t>(gen)); }

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<int>(i);
        return -1;
    }

    int push_back(std::string name) {
        if (index_of(name) >= 0) throw Error("words", "duplicate generator name '" + name + "'");
        names_.push_back(std::move(name));
        return static_cast<int>(names_.size()) - 1;
    }

private:
    std::vector<std::string> names_;
};

// Parses space-separated letters: "b a", "a^-1 b^2", "" or "1" for the identity.
inline Word parse_word(std::string_view text, const Alphabet& alphabet) {
    std::vector<Letter> letters;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
        if (token == "1") continue;
        std::string name = token;
        std::int64_t exp = 1;
        if (const auto caret = token.find('^'); caret != std::string::npos) {
            name = token.substr(0, caret);
            const std::string e = token.substr(caret + 1);
            char* end = nullptr;
            exp = std::strtoll(e.c_str(), &end, 10);
            if (e.empty() || end == nullptr || *end != '\0')
                throw Error("words", "bad exponent in letter '" + token + "'");
        }
        const int gen = alphabet.index_of(name);
        if (gen < 0) throw Error("words", "unknown generator '" + name + "'");
        if (exp != 0) letters.push_back({gen, exp});
    }
    return Word(std::move(letters));
}

inline std::string format_word(const Word& w, const Alphabet& alphabet) {
    if (w.empty()) return "1";
    std::string out;
    for (const auto& l : w.letters()) {
        if (!out.empty()) out += ' ';
        out += alphabet.name(l.gen);
        if (l.exp != 1) out += "^" + std::to_string(l.exp);
    }
    return out;
}

// Total exponent of each generator of `basis` (alphabet indices, in order).
// Throws, naming the generator, if w uses a letter outside `basis`.
inline std::vector<std::int64_t> exponent_sums(const Word& w, const std::vector<int>& basis,
                                               const Alphabet& alphabet) {
    std::vector<std::int64_t> sums(basis.size(), 0);
    for (const auto& l : w.letters()) {
        const auto it = std::find(basis.begin(), basis.end(), l.gen);
        if (it == basis.end()) {
            const std::string name = l.gen >= 0 && static_cast<std::size_t>(l.gen) < alphabet.size()
                                         ? alphabet.name(l.gen)
                                         : "#" + std::to_string(l.gen);
            throw Error("words", "unknown generator '" + name + "' in exponent sum");
        }
        sums[static_cast<std::size_t>(it - basis.begin())] += l.exp;
    }
    return sums;
}

// Exponent sums over the first n generators of the alphabet.
inline std::vector<std::int64_t> exponent_sums(const Word& w, std::size_t n) {
    std::vector<std::int64_t> sums(n, 0);
    for (const auto& l : w.letters()) {
        if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= n)
            throw Error("words", "unknown generator index " + std::to_string(l.gen));
        sums[static_cast<std::size_t>(l.gen)] += l.exp;
    }
    return sums;
}

inline bool is_balanced(const Word& w, std::size_t n) {
    const auto s = exponent_sums(w, n);
    return std::all_of(s.begin(), s.end(), [](std::int64_t v) { return v == 0; });
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_WORDS_HPP
