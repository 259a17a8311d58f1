#pragma once

#include "hplab/laurent.hpp"
#include "hplab/linalg.hpp"
#include "hplab/poly.hpp"
#include "hplab/series.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace hplab {

enum class Normalization { monic_last, unit_vector };

struct Diagnostics {
    int defect = 0;            // nullspace dimension minus one
    double residual = 0.0;     // float path only
    int precision_bits = 0;    // float path only; 0 means exact
};

/// Polynomials Q_0..Q_{k-1} of degree <= n with sum Q_j f^j = remainder.
/// Two polynomials for Pade (P_{n,0}, P_{n,1}), three for Hermite-Pade.
template <class T>
struct HPSolution {
    int n = 0;
    std::vector<Poly<T>> polys;
    Laurent<T> remainder;
    Normalization normalization = Normalization::monic_last;
    Diagnostics diagnostics;
    /// Full nullspace when the index is degenerate (each entry one vector of polynomials).
    std::vector<std::vector<Poly<T>>> basis;

    int kind() const { return static_cast<int>(polys.size()); }
    /// Guaranteed leading order of the remainder in powers of 1/z.
    int target_order() const { return kind() == 2 ? n + 1 : 2 * n + 2; }
};

namespace detail {

template <class T>
double magnitude(const T& x)
{
    return std::abs(to_complex(x));
}

/// Linear system "coefficients of z^e, e = n .. n - rows + 1, of sum_j Q_j s_j vanish".
template <class T>
Matrix<T> order_matrix(const std::vector<const Laurent<T>*>& series, int n, int rows)
{
    const T zero = zero_like(series.front()->coeffs().at(0));
    const int k = static_cast<int>(series.size());
    Matrix<T> m(rows, k * (n + 1), zero);
    for (int r = 0; r < rows; ++r) {
        const int e = n - r;
        for (int j = 0; j < k; ++j)
            for (int deg = 0; deg <= n; ++deg) {
                // z^deg * s_j contributes its coefficient of z^(e - deg)
                const int ex = e - deg;
                if (ex > series[static_cast<std::size_t>(j)]->top()) continue;
                m(r, j * (n + 1) + deg) = series[static_cast<std::size_t>(j)]->coeff(ex);
            }
    }
    return m;
}

template <class T>
std::vector<Poly<T>> split(const std::vector<T>& v, int k, int n)
{
    std::vector<Poly<T>> out;
    for (int j = 0; j < k; ++j)
        out.emplace_back(std::vector<T>(v.begin() + j * (n + 1), v.begin() + (j + 1) * (n + 1)));
    return out;
}

template <class T>
std::vector<T> normalize(std::vector<T> v, int k, int n, Normalization& tag)
{
    const T& lead = v[static_cast<std::size_t>(k * (n + 1) - 1)];
    T scale_by = lead;
    tag = Normalization::monic_last;
    if (is_zero(lead)) {
        tag = Normalization::unit_vector;
        std::size_t best = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (magnitude(v[i]) > magnitude(v[best])) best = i;
        scale_by = v[best];
    }
    const T inv = from_rational_like(Rational(1), scale_by) / scale_by;
    for (auto& x : v) x = x * inv;
    return v;
}

inline Nullspace<Rational> nullspace_of(const Matrix<Rational>& m) { return exact_nullspace(m); }
inline Nullspace<QF> nullspace_of(const Matrix<QF>& m) { return exact_nullspace(m); }
inline Nullspace<BigComplex> nullspace_of(const Matrix<BigComplex>& m)
{
    int bits = 53;
    if (m.rows() > 0 && m.cols() > 0) bits = m(0, 0).precision_bits();
    return float_nullspace(m, -bits / 2.0);
}

template <class T>
HPSolution<T> solve(const std::vector<const Laurent<T>*>& series, int n)
{
    if (n < 0) throw DomainError("degree must be nonnegative");
    const int k = static_cast<int>(series.size());
    for (const auto* s : series) {
        if (s->size() == 0) throw DomainError("empty series");
        bool all_zero = true;
        for (const auto& c : s->coeffs()) all_zero = all_zero && is_zero(c);
        if (all_zero) throw DomainError("all-zero input series");
    }
    // k(n+1) - 1 conditions on z^n .. z^{n-rows+1}; the lowest coefficient referenced is z^{1-rows}
    const int rows = k * (n + 1) - 1;
    for (const auto* s : series)
        if (s->low_known() > 1 - rows) throw DomainError("series order too low for this degree");

    const Matrix<T> m = order_matrix(series, n, rows);
    const auto ns = nullspace_of(m);
    if (ns.basis.empty()) throw InconsistencyError("order system has a trivial nullspace");

    HPSolution<T> sol;
    sol.n = n;
    sol.diagnostics.defect = static_cast<int>(ns.basis.size()) - 1;
    sol.diagnostics.residual = ns.residual;
    sol.diagnostics.precision_bits = ns.precision_bits;
    const auto v = normalize(ns.basis.front(), k, n, sol.normalization);
    sol.polys = split(v, k, n);
    if (ns.basis.size() > 1) {
        for (const auto& b : ns.basis) {
            Normalization ignored;
            sol.basis.push_back(split(normalize(b, k, n, ignored), k, n));
        }
    }

    const T& like = series.front()->coeffs().at(0);
    const int low = series.front()->low_known();
    Laurent<T> rem = Laurent<T>::from_poly(sol.polys[0], low, like);
    for (int j = 1; j < k; ++j) rem = rem + sol.polys[static_cast<std::size_t>(j)] * *series[static_cast<std::size_t>(j)];
    sol.remainder = rem;
    return sol;
}

template <class T>
Laurent<T> unit_series(const Laurent<T>& like)
{
    const T one = from_rational_like(Rational(1), like.coeffs().at(0));
    std::vector<T> c(static_cast<std::size_t>(like.size()), zero_like(one));
    c[0] = one;
    return Laurent<T>(0, std::move(c));
}

}  // namespace detail

/// Pade: P_0 + P_1 f = O(z^{-n-1}).
template <class T>
HPSolution<T> pade_solve(const Laurent<T>& f, int n)
{
    const Laurent<T> e = detail::unit_series(f);
    return detail::solve<T>({&e, &f}, n);
}

/// Type I Hermite-Pade: Q_0 + Q_1 f + Q_2 f^2 = O(z^{-2n-2}).
template <class T>
HPSolution<T> hp_solve(const Laurent<T>& f, const Laurent<T>& f2, int n)
{
    const Laurent<T> e = detail::unit_series(f);
    return detail::solve<T>({&e, &f, &f2}, n);
}

struct Normality {
    bool normal = false;
    int defect = 0;
};

template <class T>
Normality normality_check(const HPSolution<T>& sol)
{
    Normality out;
    out.defect = sol.diagnostics.defect;
    const auto& last = sol.polys.back();
    const bool full_degree = last.degree() == sol.n;
    bool rem_ok = false;
    const int e = -sol.target_order();
    if (sol.remainder.size() > 0 && e >= sol.remainder.low_known()) {
        const T lead = sol.remainder.coeff(e);
        if constexpr (std::is_same_v<T, BigComplex>) {
            rem_ok = !(abs(lead).to_double() <= sol.diagnostics.residual * 1e3);
        } else {
            rem_ok = !is_zero(lead);
        }
    }
    out.normal = out.defect == 0 && full_degree && rem_ok;
    return out;
}

/// Leading order (in powers of 1/z) of the stored remainder; empty if it vanishes identically to its truncation.
template <class T>
std::optional<int> remainder_order(const HPSolution<T>& sol)
{
    if constexpr (std::is_same_v<T, BigComplex>) {
        const auto& c = sol.remainder.coeffs();
        double scale_ref = 0.0;
        for (const auto& p : sol.polys)
            for (const auto& x : p.coeffs()) scale_ref = std::max(scale_ref, abs(x).to_double());
        const double tol = std::ldexp(scale_ref, -sol.diagnostics.precision_bits / 2) * 1e3;
        for (std::size_t k = 0; k < c.size(); ++k)
            if (abs(c[k]).to_double() > tol) return -(sol.remainder.top() - static_cast<int>(k));
        return std::nullopt;
    } else {
        return sol.remainder.valuation();
    }
}

struct FloatPolicy {
    int start_bits = 128;
    int cap_bits = 4096;
};

/// Hermite-Pade (kind 3) or Pade (kind 2) from configuration data in
/// big-float arithmetic, doubling the precision until the nullspace residual
/// falls below 2^{-bits/2} times the matrix scale.
HPSolution<BigComplex> solve_float(const BranchConfig& cfg, int n, int kind, const FloatPolicy& policy);

}  // namespace hplab
