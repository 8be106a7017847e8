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
// Stable/unstable splitting of a hyperbolic matrix, its spectral projections,
// and the power p0 after which E- contracts by 1/2 and E+ expands by 2 in the
// ambient l-infinity norm.

#ifndef RIGIDITY_LAB_HYPERBOLIC_HPP
#define RIGIDITY_LAB_HYPERBOLIC_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rigidity_lab/error.hpp"
#include "rigidity_lab/smith.hpp"

namespace rigidity_lab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

// Max absolute entry; the norm used for vectors and matrices throughout.
inline double linf(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix to_real(const IntMatrix& a) { return a.cast<double>(); }

inline IntMatrix int_power(const IntMatrix& a, int p) {
    IntMatrix out = IntMatrix::Identity(a.rows(), a.cols());
    for (int i = 0; i < p; ++i) {
        IntMatrix next = IntMatrix::Zero(a.rows(), a.cols());
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < a.cols(); ++c)
                for (Eigen::Index m = 0; m < a.cols(); ++m) {
                    std::int64_t prod = 0, sum = 0;
                    if (__builtin_mul_overflow(out(r, m), a(m, c), &prod) ||
                        __builtin_add_overflow(next(r, c), prod, &sum))
                        throw Error("hyperbolic", "integer overflow in matrix power");
                    next(r, c) = sum;
                }
        out = std::move(next);
    }
    return out;
}

// Repeated squaring; entries may reach inf for large p.
inline Matrix real_power(const Matrix& a, int p) {
    if (p < 0) throw Error("hyperbolic", "negative matrix power");
    Matrix out = Matrix::Identity(a.rows(), a.cols()), base = a;
    for (; p > 0; p >>= 1) {
        if (p & 1) out = out * base;
        if (p > 1) base = base * base;
    }
    return out;
}

// Eigenvalues with multiplicity, sorted by decreasing modulus, then real part,
// then imaginary part.
inline std::vector<Complex> eigenvalues(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("hyperbolic", "eigenvalues of a non-square matrix");
    if (a.rows() == 0) return {};
    if (!a.allFinite()) throw Error("hyperbolic", "matrix has non-finite entries");
    Eigen::EigenSolver<Matrix> solver(a, false);
    if (solver.info() != Eigen::Success) throw Error("hyperbolic", "eigenvalue iteration failed");
    std::vector<Complex> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](const Complex& x, const Complex& y) {
        if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return ev;
}

struct Hyperbolicity {
    bool hyperbolic = false;
    double margin = 0.0;  // min over eigenvalues of ||lambda| - 1|
};

inline Hyperbolicity is_hyperbolic(const Matrix& a, double tol = 1e-9) {
    Hyperbolicity h;
    h.margin = std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues(a)) h.margin = std::min(h.margin, std::abs(std::abs(l) - 1.0));
    h.hyperbolic = h.margin > tol;
    return h;
}

namespace detail {

// Integer polynomials, lowest degree first. 128-bit with overflow checks.
using Poly = std::vector<__int128>;

inline __int128 ck_mul(__int128 a, __int128 b) {
    __int128 r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("hyperbolic", "integer overflow in characteristic polynomial");
    return r;
}

inline __int128 ck_add(__int128 a, __int128 b) {
    __int128 r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw Error("hyperbolic", "integer overflow in characteristic polynomial");
    return r;
}

inline __int128 ck_sub(__int128 a, __int128 b) {
    __int128 r = 0;
    if (__builtin_sub_overflow(a, b, &r)) throw Error("hyperbolic", "integer overflow in characteristic polynomial");
    return r;
}

inline bool is_zero(const Poly& p) { return p.size() == 1 && p[0] == 0; }

inline void trim(Poly& p) {
    while (p.size() > 1 && p.back() == 0) p.pop_back();
}

inline __int128 abs128(__int128 v) { return v < 0 ? -v : v; }

inline Poly primitive(Poly p) {
    trim(p);
    __int128 g = 0;
    for (const auto c : p)
        for (__int128 a = abs128(c); a != 0;) {
            const __int128 t = g % a;
            g = a;
            a = t;
        }
    if (g > 1)
        for (auto& c : p) c /= g;
    if (p.back() < 0)
        for (auto& c : p) c = -c;
    return p;
}

// lc(b)^k a = q b + r; only r is kept, made primitive.
inline Poly pseudo_remainder(Poly a, const Poly& b) {
    trim(a);
    while (!is_zero(a) && a.size() >= b.size()) {
        const __int128 la = a.back(), lb = b.back();
        const std::size_t shift = a.size() - b.size();
        for (auto& c : a) c = ck_mul(c, lb);
        for (std::size_t j = 0; j < b.size(); ++j) a[j + shift] = ck_sub(a[j + shift], ck_mul(la, b[j]));
        a.pop_back();
        if (a.empty()) a.push_back(0);
        a = primitive(a);
    }
    return a;
}

inline Poly poly_gcd(Poly a, Poly b) {
    a = primitive(a);
    b = primitive(b);
    while (!is_zero(b)) {
        Poly r = pseudo_remainder(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return primitive(a);
}

// a / b where b divides a and lc(b) divides every leading coefficient met.
inline Poly exact_quotient(Poly a, const Poly& b) {
    trim(a);
    Poly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 1, 0);
    while (!is_zero(a) && a.size() >= b.size()) {
        if (a.back() % b.back() != 0) throw Error("hyperbolic", "inexact polynomial division");
        const __int128 c = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        q[shift] = c;
        for (std::size_t j = 0; j < b.size(); ++j) a[j + shift] = ck_sub(a[j + shift], ck_mul(c, b[j]));
        a.pop_back();
        if (a.empty()) a.push_back(0);
        trim(a);
    }
    if (!is_zero(a)) throw Error("hyperbolic", "inexact polynomial division");
    return q;
}

// det(xI - A) by Faddeev-LeVerrier; every division is exact.
inline Poly char_poly(const IntMatrix& a) {
    const auto n = static_cast<std::size_t>(a.rows());
    Poly c(n + 1, 0);
    c[n] = 1;
    std::vector<__int128> m(n * n, 0), am(n * n, 0);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) m[i * n + i] += c[n - k + 1];
        __int128 trace = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                __int128 v = 0;
                for (std::size_t l = 0; l < n; ++l)
                    v = ck_add(v, ck_mul(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)), m[l * n + j]));
                am[i * n + j] = v;
                if (i == j) trace = ck_add(trace, v);
            }
        if (trace % static_cast<__int128>(k) != 0) throw Error("hyperbolic", "inexact Faddeev-LeVerrier step");
        c[n - k] = -trace / static_cast<__int128>(k);
        m = am;
    }
    return c;
}

}  // namespace detail

// Coefficients of det(xI - A), constant term first.
inline std::vector<std::int64_t> characteristic_polynomial(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw Error("hyperbolic", "characteristic polynomial of a non-square matrix");
    std::vector<std::int64_t> out;
    for (const auto c : detail::char_poly(a)) {
        if (c > std::numeric_limits<std::int64_t>::max() || c < std::numeric_limits<std::int64_t>::min())
            throw Error("hyperbolic", "characteristic polynomial coefficient exceeds 64 bits");
        out.push_back(static_cast<std::int64_t>(c));
    }
    return out;
}

// Integer matrices: the test runs on the distinct eigenvalues, taken as roots of
// the squarefree part of the characteristic polynomial. Roots of that part are
// simple, so their moduli are accurate; a repeated unit root seen through
// floating point eigenvalues would be off by about sqrt(machine eps) instead.
inline Hyperbolicity is_hyperbolic(const IntMatrix& a, double tol = 1e-9) {
    if (a.rows() != a.cols()) throw Error("hyperbolic", "hyperbolicity of a non-square matrix");
    Hyperbolicity h;
    h.margin = std::numeric_limits<double>::infinity();
    if (a.rows() == 0) {
        h.hyperbolic = true;
        return h;
    }
    const detail::Poly p = detail::char_poly(a);
    detail::Poly dp;
    for (std::size_t i = 1; i < p.size(); ++i) dp.push_back(detail::ck_mul(p[i], static_cast<__int128>(i)));
    const detail::Poly g = detail::poly_gcd(p, dp);
    const detail::Poly sq = g.size() > 1 ? detail::exact_quotient(p, g) : p;
    const auto deg = static_cast<Eigen::Index>(sq.size() - 1);
    if (deg > 0) {
        // Companion matrix of the monic squarefree part.
        Matrix comp = Matrix::Zero(deg, deg);
        const double lead = static_cast<double>(sq.back());
        for (Eigen::Index i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
        for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -static_cast<double>(sq[static_cast<std::size_t>(i)]) / lead;
        for (const auto& l : eigenvalues(comp)) h.margin = std::min(h.margin, std::abs(std::abs(l) - 1.0));
    }
    h.hyperbolic = h.margin > tol;
    return h;
}

namespace detail {

using CMatrix = Eigen::MatrixXcd;

// Swaps the diagonal entries k, k+1 of an upper triangular T with a unitary
// rotation, updating the Schur vectors U.
inline void swap_schur_pair(CMatrix& t, CMatrix& u, Eigen::Index k) {
    const Complex t11 = t(k, k), t22 = t(k + 1, k + 1);
    const Complex x0 = t(k, k + 1), x1 = t22 - t11;
    const double r = std::hypot(std::abs(x0), std::abs(x1));
    if (r == 0.0) return;
    const Complex c = x0 / r, s = x1 / r;
    const Eigen::Index n = t.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex a = t(k, j), b = t(k + 1, j);
        t(k, j) = std::conj(c) * a + std::conj(s) * b;
        t(k + 1, j) = -s * a + c * b;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex a = t(i, k), b = t(i, k + 1);
        t(i, k) = a * c + b * s;
        t(i, k + 1) = -a * std::conj(s) + b * std::conj(c);
        const Complex ua = u(i, k), ub = u(i, k + 1);
        u(i, k) = ua * c + ub * s;
        u(i, k + 1) = -ua * std::conj(s) + ub * std::conj(c);
    }
    t(k + 1, k) = 0.0;
    t(k, k) = t22;
    t(k + 1, k + 1) = t11;
}

// Bubble-sorts the Schur form so eigenvalues with `lead(lambda)` come first.
template <class Pred>
inline Eigen::Index order_schur(CMatrix& t, CMatrix& u, Pred lead) {
    const Eigen::Index n = t.rows();
    for (bool swapped = true; swapped;) {
        swapped = false;
        for (Eigen::Index k = 0; k + 1 < n; ++k)
            if (!lead(t(k, k)) && lead(t(k + 1, k + 1))) {
                swap_schur_pair(t, u, k);
                swapped = true;
            }
    }
    Eigen::Index m = 0;
    while (m < n && lead(t(m, m))) ++m;
    return m;
}

// Orthonormal real basis of a conjugation-invariant complex subspace of
// dimension m spanned by the columns of z.
inline Matrix real_basis(const CMatrix& z, Eigen::Index m) {
    if (m == 0) return Matrix(z.rows(), 0);
    Matrix stacked(z.rows(), 2 * z.cols());
    stacked << z.real(), z.imag();
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(m);
}

}  // namespace detail

struct HyperbolicSplitting {
    Matrix A;
    std::vector<Complex> eigenvalues;
    Matrix E_plus;   // d x dim E+, orthonormal columns
    Matrix E_minus;  // d x dim E-, orthonormal columns
    Matrix P_plus;   // projection onto E+ along E-
    Matrix P_minus;
    double margin = 0.0;
    int p0 = 0;  // 0 until compute_p0 has run
    double contraction_at_p0 = 0.0;  // sup gain on E- of A^p0
    double expansion_at_p0 = 0.0;    // inf gain on E+ of A^p0
    const char* norm_tag = "linf";

    Eigen::Index dim() const { return A.rows(); }
};

// E- and E+ from a complex Schur form reordered by eigenvalue modulus; the
// projections come from the adapted basis [E+ E-].
inline HyperbolicSplitting invariant_splitting(const Matrix& a, double tol = 1e-9) {
    const auto h = is_hyperbolic(a, tol);
    if (!h.hyperbolic) throw Error("hyperbolic", "unit-modulus spectrum");
    HyperbolicSplitting s;
    s.A = a;
    s.eigenvalues = eigenvalues(a);
    s.margin = h.margin;

    Eigen::ComplexSchur<detail::CMatrix> schur(a.cast<Complex>());
    if (schur.info() != Eigen::Success) throw Error("hyperbolic", "Schur iteration failed");
    detail::CMatrix t = schur.matrixT(), u = schur.matrixU();
    t.triangularView<Eigen::StrictlyLower>().setZero();
    const auto m_plus = detail::order_schur(t, u, [](Complex l) { return std::abs(l) > 1.0; });
    s.E_plus = detail::real_basis(u.leftCols(m_plus), m_plus);
    const auto m_minus = detail::order_schur(t, u, [](Complex l) { return std::abs(l) < 1.0; });
    s.E_minus = detail::real_basis(u.leftCols(m_minus), m_minus);
    if (m_plus + m_minus != a.rows()) throw Error("hyperbolic", "splitting dimensions do not add up");

    const Eigen::Index d = a.rows();
    Matrix basis(d, d);
    basis << s.E_plus, s.E_minus;
    const Matrix inv = basis.fullPivLu().inverse();
    s.P_plus = s.E_plus * inv.topRows(m_plus);
    s.P_minus = Matrix::Identity(d, d) - s.P_plus;
    return s;
}

// Sampled l-infinity gain of powers of A restricted to an invariant subspace.
// Directions are a deterministic low-discrepancy set shifted by `seed`; the
// powers act on coefficients through R = Q^T A Q so roundoff cannot leak out
// of the subspace.
class SubspaceGainSampler {
public:
    SubspaceGainSampler(const Matrix& a, const Matrix& basis, std::uint64_t seed, int base_samples = 4096)
        : q_(basis) {
        const Eigen::Index k = basis.cols();
        if (k == 0) return;
        r_ = basis.transpose() * a * basis;
        coeff_ = directions(k, seed, base_samples);
        const Matrix v = q_ * coeff_;
        log_norm0_.resize(coeff_.cols());
        for (Eigen::Index i = 0; i < v.cols(); ++i) log_norm0_(i) = std::log(v.col(i).cwiseAbs().maxCoeff());
        log_scale_ = Vector::Zero(coeff_.cols());
    }

    bool empty() const { return q_.cols() == 0; }
    Eigen::Index samples() const { return coeff_.cols(); }

    // Advances the tracked power by one application of A.
    void step() {
        if (empty()) return;
        coeff_ = r_ * coeff_;
        for (Eigen::Index i = 0; i < coeff_.cols(); ++i) {
            const double n = coeff_.col(i).cwiseAbs().maxCoeff();
            if (n > 1e100 || (n < 1e-100 && n > 0.0)) {
                coeff_.col(i) /= n;
                log_scale_(i) += std::log(n);
            }
        }
    }

    // log of max / min over samples of |A^p v| / |v| at the current power.
    std::pair<double, double> log_gain_range() const {
        if (empty()) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        const Matrix w = q_ * coeff_;
        double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < w.cols(); ++i) {
            const double g = std::log(w.col(i).cwiseAbs().maxCoeff()) + log_scale_(i) - log_norm0_(i);
            hi = std::max(hi, g);
            lo = std::min(lo, g);
        }
        return {hi, lo};
    }

    static double radical_inverse(std::uint64_t i, std::uint64_t base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= static_cast<double>(base);
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        return r;
    }

    // Directions in coefficient space: a half circle for k = 2, shifted Halton
    // points of the cube boundary otherwise.
    static Matrix directions(Eigen::Index k, std::uint64_t seed, int base_samples) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        if (k == 1) return Matrix::Ones(1, 1);
        if (k == 2) {
            const double shift = unif(rng);
            Matrix c(2, base_samples);
            for (int i = 0; i < base_samples; ++i) {
                const double th = M_PI * (i + shift) / base_samples;
                c(0, i) = std::cos(th);
                c(1, i) = std::sin(th);
            }
            return c;
        }
        static constexpr std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                                   37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79};
        if (k > static_cast<Eigen::Index>(std::size(primes)))
            throw Error("hyperbolic", "subspace dimension too large for sampling");
        const Eigen::Index n = static_cast<Eigen::Index>(base_samples) * std::max<Eigen::Index>(1, k - 2);
        std::vector<double> shift(static_cast<std::size_t>(k));
        for (auto& s : shift) s = unif(rng);
        Matrix c(k, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) {
                double u = radical_inverse(static_cast<std::uint64_t>(i + 1), primes[j]) + shift[j];
                u -= std::floor(u);
                c(j, i) = 2.0 * u - 1.0;
            }
            // Push onto the cube boundary so every direction is represented once.
            Eigen::Index arg = 0;
            c.col(i).cwiseAbs().maxCoeff(&arg);
            c(arg, i) = c(arg, i) < 0 ? -1.0 : 1.0;
        }
        return c;
    }

private:
    Matrix q_;
    Matrix r_;
    Matrix coeff_;
    Vector log_norm0_;
    Vector log_scale_;
};

// Vertices of the section {c : |B c|_inf <= 1} of the unit cube by the column
// span of B, in coefficients. Convex functions of c peak at one of them.
inline Matrix section_vertices(const Matrix& basis, double tol = 1e-9) {
    const Eigen::Index d = basis.rows(), k = basis.cols();
    if (k == 0) return Matrix(0, 0);
    if (d > 24) throw Error("hyperbolic", "dimension too large for vertex enumeration");
    std::vector<Vector> out;
    std::vector<Eigen::Index> rows;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        if (std::popcount(mask) != k) continue;
        rows.clear();
        for (Eigen::Index i = 0; i < d; ++i)
            if (mask & (1u << i)) rows.push_back(i);
        Matrix sub(k, k);
        for (Eigen::Index r = 0; r < k; ++r) sub.row(r) = basis.row(rows[static_cast<std::size_t>(r)]);
        const Eigen::FullPivLU<Matrix> lu(sub);
        if (!lu.isInvertible()) continue;
        for (std::uint32_t signs = 0; signs < (1u << k); ++signs) {
            Vector rhs(k);
            for (Eigen::Index r = 0; r < k; ++r) rhs(r) = (signs & (1u << r)) ? -1.0 : 1.0;
            const Vector c = lu.solve(rhs);
            if ((basis * c).cwiseAbs().maxCoeff() <= 1.0 + tol) out.push_back(c);
        }
    }
    if (out.empty()) throw Error("hyperbolic", "no vertices found for the subspace section");
    Matrix v(k, static_cast<Eigen::Index>(out.size()));
    for (std::size_t i = 0; i < out.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = out[i];
    return v;
}

// Exact l-infinity operator norm of powers of a map restricted to an invariant
// subspace with orthonormal basis B, where r = B^T a B acts on coefficients.
class RestrictedNorm {
public:
    RestrictedNorm(const Matrix& r, const Matrix& basis) : q_(basis), r_(r) {
        if (basis.cols() > 0) v_ = section_vertices(basis);
    }

    bool empty() const { return q_.cols() == 0; }
    void step() {
        if (!empty()) v_ = r_ * v_;
    }
    double value() const { return empty() ? 0.0 : (q_ * v_).cwiseAbs().maxCoeff(); }

private:
    Matrix q_;
    Matrix r_;
    Matrix v_;
};

enum class P0Method { exact, sampled };

struct P0Options {
    int p_max = 10000;
    P0Method method = P0Method::exact;
    double safety = 1.05;  // sampled method only
    std::uint64_t seed = 0;
    int base_samples = 4096;
};

// Smallest p with sup_{E-} |A^p v| / |v| <= 1/2 and inf_{E+} |A^p v| / |v| >= 2
// that keeps both bounds for every power up to 4p. The exact method walks the
// vertices of the unit-ball sections; the inf over E+ is 1 / sup of A^-p there.
// The sampled method takes the gains over a direction set with a safety factor.
inline int compute_p0(HyperbolicSplitting& s, const P0Options& opt = {}) {
    std::function<void()> step;
    std::function<std::pair<double, double>()> gains;  // sup on E-, inf on E+
    std::optional<SubspaceGainSampler> contract_s, expand_s;
    std::optional<RestrictedNorm> contract_x, expand_inv_x;
    double safety = 1.0;
    if (opt.method == P0Method::sampled) {
        safety = opt.safety;
        contract_s.emplace(s.A, s.E_minus, opt.seed, opt.base_samples);
        expand_s.emplace(s.A, s.E_plus, opt.seed + 1, opt.base_samples);
        step = [&] {
            contract_s->step();
            expand_s->step();
        };
        gains = [&] {
            return std::pair{std::exp(contract_s->log_gain_range().first), std::exp(expand_s->log_gain_range().second)};
        };
    } else {
        const Matrix rm = s.E_minus.transpose() * s.A * s.E_minus;
        const Matrix rp = s.E_plus.transpose() * s.A * s.E_plus;
        contract_x.emplace(rm, s.E_minus);
        expand_inv_x.emplace(rp.cols() > 0 ? Matrix(rp.inverse()) : rp, s.E_plus);
        step = [&] {
            contract_x->step();
            expand_inv_x->step();
        };
        gains = [&] {
            const double inv = expand_inv_x->value();
            return std::pair{contract_x->value(),
                             expand_inv_x->empty() ? std::numeric_limits<double>::infinity() : 1.0 / inv};
        };
    }
    int candidate = 0;
    double c_at = 0.0, e_at = 0.0;
    for (int q = 1; q <= 4 * opt.p_max; ++q) {
        step();
        const auto [c_hi, e_lo] = gains();
        const bool pass = c_hi * safety <= 0.5 && e_lo / safety >= 2.0;
        if (!pass) {
            candidate = 0;
            if (q >= opt.p_max) break;
            continue;
        }
        if (candidate == 0) {
            candidate = q;
            c_at = c_hi;
            e_at = e_lo;
        }
        if (q >= 4 * candidate) {
            s.p0 = candidate;
            s.contraction_at_p0 = s.E_minus.cols() == 0 ? 0.0 : c_at;
            s.expansion_at_p0 = s.E_plus.cols() == 0 ? std::numeric_limits<double>::infinity() : e_at;
            return candidate;
        }
    }
    throw Error("hyperbolic", "contraction unreachable within p_max = " + std::to_string(opt.p_max));
}

// P * D: the projection acting on the R^d index of a d x N displacement matrix.
inline Matrix project_displacement(const Matrix& p, const Matrix& d) {
    if (p.rows() != p.cols() || p.cols() != d.rows())
        throw Error("hyperbolic", "projection is " + std::to_string(p.rows()) + "x" +
                                      std::to_string(p.cols()) + " but displacement has " +
                                      std::to_string(d.rows()) + " rows");
    return p * d;
}

inline nlohmann::json matrix_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json splitting_json(const HyperbolicSplitting& s) {
    nlohmann::json j;
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& l : s.eigenvalues) ev.push_back({l.real(), l.imag()});
    j["eigenvalues"] = ev;
    j["margin"] = s.margin;
    j["dim_E_plus"] = s.E_plus.cols();
    j["dim_E_minus"] = s.E_minus.cols();
    j["E_plus_basis"] = matrix_json(s.E_plus);
    j["E_minus_basis"] = matrix_json(s.E_minus);
    j["P_plus"] = matrix_json(s.P_plus);
    j["P_minus"] = matrix_json(s.P_minus);
    j["p0"] = s.p0;
    j["contraction_at_p0"] = s.contraction_at_p0;
    j["expansion_at_p0"] = std::isfinite(s.expansion_at_p0) ? nlohmann::json(s.expansion_at_p0) : nlohmann::json();
    j["norm"] = s.norm_tag;
    return j;
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_HYPERBOLIC_HPP
