#pragma once

#include "hplab/error.hpp"
#include "hplab/laurent.hpp"
#include "hplab/poly.hpp"

#include <cmath>
#include <vector>

namespace hplab {

/// One step of P_n = (z - b_n) P_{n-1} - a2_n P_{n-2}; a2_n stands for a_{n-1}^2.
template <class T>
struct RecurrenceStep {
    int n = 0;
    T b;
    T a2;
    Poly<T> residual;  // zero in exact arithmetic
};

template <class T>
struct RecurrenceCoeffs {
    std::vector<RecurrenceStep<T>> steps;
};

namespace detail {

template <class T>
double residual_size(const Poly<T>& p)
{
    double m = 0.0;
    for (const auto& c : p.coeffs()) m = std::max(m, std::abs(to_complex(c)));
    return m;
}

template <class T>
void require_monic(const Poly<T>& p, int degree)
{
    if (p.degree() != degree) throw DomainError("denominator has the wrong degree");
    if (!(p.lead() == from_rational_like(Rational(1), p.lead()))) throw DomainError("denominator is not monic");
}

template <class T>
void check_exact(const Poly<T>& residual, double tol)
{
    if constexpr (std::is_same_v<T, BigComplex> || std::is_same_v<T, std::complex<double>>) {
        if (residual_size(residual) > tol) throw InconsistencyError("recurrence residual above tolerance");
    } else {
        (void)tol;
        if (!residual.is_zero()) throw InconsistencyError("recurrence residual is not zero");
    }
}

}  // namespace detail

/// b_1 from P_1 = (z - b_1) P_0 with P_0 = 1.
template <class T>
RecurrenceStep<T> recurrence_first(const Poly<T>& p0, const Poly<T>& p1, double tol = 0.0)
{
    detail::require_monic(p0, 0);
    detail::require_monic(p1, 1);
    const T& like = p1.lead();
    RecurrenceStep<T> s{1, -p1.coeff(0, like), zero_like(like), {}};
    s.residual = p1 - Poly<T>{-s.b, from_rational_like(Rational(1), like)} * p0;
    detail::check_exact(s.residual, tol);
    return s;
}

/// b_n and a_{n-1}^2 from three consecutive monic denominators, matched on the
/// two leading coefficients and verified on the whole polynomial.
template <class T>
RecurrenceStep<T> recurrence_coeffs(const Poly<T>& pm2, const Poly<T>& pm1, const Poly<T>& p, double tol = 0.0)
{
    const int n = p.degree();
    if (n < 2) throw DomainError("three-term step needs n >= 2");
    detail::require_monic(pm2, n - 2);
    detail::require_monic(pm1, n - 1);
    detail::require_monic(p, n);
    const T& like = p.lead();
    const T p1 = p.coeff(n - 1, like), p2 = p.coeff(n - 2, like);
    const T q1 = pm1.coeff(n - 2, like), q2 = pm1.coeff(n - 3, like);
    RecurrenceStep<T> s;
    s.n = n;
    s.b = q1 - p1;
    s.a2 = q2 - s.b * q1 - p2;
    if constexpr (std::is_same_v<T, BigComplex> || std::is_same_v<T, std::complex<double>>) {
        if (std::abs(to_complex(s.a2)) <= tol) throw InconsistencyError("a_{n-1}^2 vanishes: abnormal index");
    } else {
        if (is_zero(s.a2)) throw InconsistencyError("a_{n-1}^2 vanishes: abnormal index");
    }
    const Poly<T> shift{-s.b, from_rational_like(Rational(1), like)};
    s.residual = p - (shift * pm1 - pm2 * s.a2);
    detail::check_exact(s.residual, tol);
    return s;
}

/// Coefficients for denominators[0..N] (degrees 0..N).
template <class T>
RecurrenceCoeffs<T> recurrence_table(const std::vector<Poly<T>>& denominators, double tol = 0.0)
{
    RecurrenceCoeffs<T> out;
    if (denominators.size() < 2) return out;
    out.steps.push_back(recurrence_first(denominators[0], denominators[1], tol));
    for (std::size_t n = 2; n < denominators.size(); ++n)
        out.steps.push_back(recurrence_coeffs(denominators[n - 2], denominators[n - 1], denominators[n], tol));
    return out;
}

/// R_n - (z - b_n) R_{n-1} + a2_n R_{n-2} as a series, truncated to the common order.
template <class T>
Laurent<T> remainder_recurrence_check(const Laurent<T>& rm2, const Laurent<T>& rm1, const Laurent<T>& r, const RecurrenceStep<T>& step)
{
    const int low = std::max({rm2.low_known(), rm1.low_known() + 1, r.low_known()});
    const int order = -low;
    if (order < step.n + 3) throw DomainError("remainder series truncated too short for the check");
    const T& like = r.coeffs().at(0);
    const Poly<T> shift{-step.b, from_rational_like(Rational(1), like)};
    return (r - shift * rm1 + rm2 * step.a2).truncated(low);
}

/// Largest coefficient magnitude of a residual series.
template <class T>
double series_norm(const Laurent<T>& s)
{
    double m = 0.0;
    for (const auto& c : s.coeffs()) m = std::max(m, std::abs(to_complex(c)));
    return m;
}

/// Formal quotient R_{n+1} / R_n; its leading exponent is -1 at normal indices.
template <class T>
Laurent<T> remainder_ratio(const Laurent<T>& next, const Laurent<T>& cur)
{
    return next / cur;
}

}  // namespace hplab
