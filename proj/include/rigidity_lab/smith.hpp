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
// Integer matrix helpers: Smith normal form, exact determinant.

#ifndef RIGIDITY_LAB_SMITH_HPP
#define RIGIDITY_LAB_SMITH_HPP

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rigidity_lab/error.hpp"

namespace rigidity_lab {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("smith", "integer overflow");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a, b, &r)) throw Error("smith", "integer overflow");
    return r;
}

// row_i -= q * row_j (or columns), with overflow checks.
inline void row_axpy(IntMatrix& m, Eigen::Index i, Eigen::Index j, std::int64_t q) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = checked_sub(m(i, c), checked_mul(q, m(j, c)));
}

inline void col_axpy(IntMatrix& m, Eigen::Index i, Eigen::Index j, std::int64_t q) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, i) = checked_sub(m(r, i), checked_mul(q, m(r, j)));
}

}  // namespace detail

// U * input * V == diag, with U and V unimodular and diag(i,i) | diag(i+1,i+1).
struct SmithForm {
    IntMatrix diag;
    IntMatrix U;
    IntMatrix V;

    // Nonzero diagonal entries, in order.
    std::vector<std::int64_t> elementary_divisors() const {
        std::vector<std::int64_t> out;
        const Eigen::Index n = std::min(diag.rows(), diag.cols());
        for (Eigen::Index i = 0; i < n; ++i)
            if (diag(i, i) != 0) out.push_back(diag(i, i));
        return out;
    }

    Eigen::Index rank() const { return static_cast<Eigen::Index>(elementary_divisors().size()); }
};

inline SmithForm smith_normal_form(const IntMatrix& input) {
    using detail::col_axpy;
    using detail::row_axpy;
    const Eigen::Index m = input.rows();
    const Eigen::Index n = input.cols();
    SmithForm f{input, IntMatrix::Identity(m, m), IntMatrix::Identity(n, n)};
    IntMatrix& a = f.diag;

    for (Eigen::Index s = 0; s < std::min(m, n); ++s) {
        for (;;) {
            // Pivot: smallest nonzero |entry| of the trailing block.
            Eigen::Index pr = -1, pc = -1;
            std::int64_t best = 0;
            for (Eigen::Index i = s; i < m; ++i)
                for (Eigen::Index j = s; j < n; ++j) {
                    const std::int64_t v = a(i, j) < 0 ? -a(i, j) : a(i, j);
                    if (v != 0 && (best == 0 || v < best)) best = v, pr = i, pc = j;
                }
            if (pr < 0) return f;
            a.row(s).swap(a.row(pr));
            f.U.row(s).swap(f.U.row(pr));
            a.col(s).swap(a.col(pc));
            f.V.col(s).swap(f.V.col(pc));

            bool clean = true;
            for (Eigen::Index i = s + 1; i < m; ++i) {
                const std::int64_t q = a(i, s) / a(s, s);
                row_axpy(a, i, s, q);
                row_axpy(f.U, i, s, q);
                if (a(i, s) != 0) clean = false;
            }
            for (Eigen::Index j = s + 1; j < n; ++j) {
                const std::int64_t q = a(s, j) / a(s, s);
                col_axpy(a, j, s, q);
                col_axpy(f.V, j, s, q);
                if (a(s, j) != 0) clean = false;
            }
            if (!clean) continue;

            // Divisibility: fold any entry not divisible by the pivot into row s.
            Eigen::Index bad = -1;
            for (Eigen::Index i = s + 1; i < m && bad < 0; ++i)
                for (Eigen::Index j = s + 1; j < n; ++j)
                    if (a(i, j) % a(s, s) != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            row_axpy(a, s, bad, -1);
            row_axpy(f.U, s, bad, -1);
        }
        if (a(s, s) < 0) {
            a.row(s) *= -1;
            f.U.row(s) *= -1;
        }
    }
    return f;
}

// Exact determinant by fraction-free (Bareiss) elimination.
inline std::int64_t determinant(IntMatrix a) {
    using detail::checked_mul;
    using detail::checked_sub;
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw Error("smith", "determinant of a non-square matrix");
    if (n == 0) return 1;
    std::int64_t sign = 1, prev = 1;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            Eigen::Index p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.row(k).swap(a.row(p));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j)
                a(i, j) = checked_sub(checked_mul(a(i, j), a(k, k)), checked_mul(a(i, k), a(k, j))) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

inline std::int64_t lcm_of(const std::vector<std::int64_t>& values) {
    std::int64_t l = 1;
    for (const auto v : values) l = std::lcm(l, v < 0 ? -v : v);
    return l;
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_SMITH_HPP
