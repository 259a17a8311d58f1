#pragma once

#include "hplab/laurent.hpp"
#include "hplab/poly.hpp"
#include "hplab/scalar.hpp"

#include <complex>
#include <string>
#include <vector>

namespace hplab {

/// f(z) = prod_j (z - a_j)^{alpha_j} with sum alpha_j = 0, normalized by f(inf) = 1.
struct BranchConfig {
    std::vector<QF> points;
    std::vector<Rational> exponents;

    /// Throws DomainError on a malformed configuration. With for_hermite_pade
    /// the exponents must also avoid +-1/2.
    void validate(bool for_hermite_pade = false) const;

    int size() const { return static_cast<int>(points.size()); }
    /// Discriminant of the coefficient field (0 when every point is rational).
    long field() const;
    bool rational_points() const { return field() == 0; }
    std::vector<std::complex<double>> points_c() const;
    double diameter() const;
    /// The configuration with every exponent multiplied by k.
    BranchConfig scaled(const Rational& k) const;

    /// a = {1, -1}, exponents {alpha, -alpha}.
    static BranchConfig segment(const Rational& alpha);
    /// Parses comma-separated exact points and exponents.
    static BranchConfig parse(const std::string& points, const std::string& exponents);
};

/// Point a_j in the scalar type of `like`.
template <class T>
T point_as(const QF& a, const T& like)
{
    if constexpr (std::is_same_v<T, QF>) {
        (void)like;
        return a;
    } else if constexpr (std::is_same_v<T, Rational>) {
        (void)like;
        if (!a.is_rational()) throw DomainError("complex branch point in a rational computation");
        return a.re();
    } else if constexpr (std::is_same_v<T, BigComplex>) {
        return embed(a, like.precision_bits());
    } else {
        (void)like;
        return T(a.to_complex());
    }
}

/// A(z) = prod (z - a_j).
template <class T>
Poly<T> poly_A(const BranchConfig& cfg, const T& like)
{
    Poly<T> a = Poly<T>::constant(from_rational_like(Rational(1), like));
    for (const auto& pt : cfg.points) a = a * Poly<T>::linear_root(point_as(pt, like));
    return a;
}

/// B(z) = sum_j alpha_j prod_{i != j} (z - a_i), so that A f' = B f.
template <class T>
Poly<T> poly_B(const BranchConfig& cfg, const T& like)
{
    Poly<T> b;
    for (int j = 0; j < cfg.size(); ++j) {
        Poly<T> term = Poly<T>::constant(from_rational_like(cfg.exponents[static_cast<std::size_t>(j)], like));
        for (int i = 0; i < cfg.size(); ++i)
            if (i != j) term = term * Poly<T>::linear_root(point_as(cfg.points[static_cast<std::size_t>(i)], like));
        b += term;
    }
    return b;
}

/// Expansion of f at infinity through z^{-N}, from the recurrence implied by A f' = B f.
template <class T>
Laurent<T> expand_f(const BranchConfig& cfg, int N, const T& like)
{
    cfg.validate();
    if (N < 1) throw DomainError("expansion order must be at least 1");
    const Poly<T> A = poly_A(cfg, like);
    const Poly<T> B = poly_B(cfg, like);
    const int p = cfg.size();
    std::vector<T> c;
    c.reserve(static_cast<std::size_t>(N) + 1);
    c.push_back(from_rational_like(Rational(1), like));
    for (int m = 1; m <= N; ++m) {
        T acc = zero_like(like);
        for (int i = 0; i < p; ++i) {
            const int k = m - p + i;
            if (k < 0 || is_zero(A[i])) continue;
            acc -= from_rational_like(Rational(k), like) * A[i] * c[static_cast<std::size_t>(k)];
        }
        for (int i = 0; i <= B.degree() && i <= p - 2; ++i) {
            const int k = m - p + 1 + i;
            if (k < 0 || is_zero(B[i])) continue;
            acc -= B[i] * c[static_cast<std::size_t>(k)];
        }
        c.push_back(acc / from_rational_like(Rational(m), like));
    }
    return Laurent<T>(0, std::move(c));
}

/// s^j for j in {-1, 2}, truncated to the order of s.
template <class T>
Laurent<T> expand_power(const Laurent<T>& s, int j)
{
    if (s.size() == 0) throw DomainError("empty series");
    if (j == 2) return (s * s).truncated(s.low_known() + s.top());
    if (j == -1) {
        if (s.top() != 0 || is_zero(s.coeffs()[0])) throw DomainError("series inversion needs a nonzero constant term");
        Laurent<T> one(0, std::vector<T>{from_rational_like(Rational(1), s.coeffs()[0])});
        // pad the numerator so the quotient keeps the full order
        std::vector<T> padded(static_cast<std::size_t>(s.size()), zero_like(s.coeffs()[0]));
        padded[0] = one.coeffs()[0];
        return Laurent<T>(0, std::move(padded)) / s;
    }
    throw DomainError("expand_power supports j = -1 and j = 2");
}

/// Residual series A f' - B f, known through the order of f.
template <class T>
Laurent<T> ode1_residual(const BranchConfig& cfg, const Laurent<T>& f)
{
    const T& like = f.coeffs().at(0);
    return poly_A(cfg, like) * f.derivative() - poly_B(cfg, like) * f;
}

// ----- evaluation with branch tracking -------------------------------------

using Path = std::vector<std::complex<double>>;

/// Minimum distance kept between evaluation paths and branch points.
double clearance(const BranchConfig& cfg);

/// A base point far enough out that the principal branch of prod (1 - a_j/z)^{alpha_j} is the normalized f.
std::complex<double> base_point(const BranchConfig& cfg, double direction_arg);

/// Analytic continuation of f from path.front() (a base point) along the
/// polyline to the final vertex `z`, which may carry more precision than the
/// double vertices. Throws ClearanceError if a segment passes too close to a branch point.
BigComplex eval_f(const BranchConfig& cfg, const Path& path, const BigComplex& z);

/// Continuation along the ray from infinity through z.
BigComplex eval_f(const BranchConfig& cfg, const BigComplex& z);

/// Oriented cut arc from a branch point to its other end, as a polyline.
struct Arc {
    std::vector<std::complex<double>> nodes;
};

struct BoundarySum {
    BigComplex plus;   // left side of the oriented arc
    BigComplex minus;  // right side
    BigComplex sum;
};

/// f+(zeta) + f-(zeta) at an interior point of the arc. When `target` is
/// given, both one-sided branches are continued across to that point
/// instead (the analytic continuation of the sum off the arc).
BoundarySum boundary_sum(const BranchConfig& cfg, const Arc& arc, std::complex<double> zeta, int bits);
BoundarySum boundary_sum(const BranchConfig& cfg, const Arc& arc, std::complex<double> zeta, const BigComplex& target);

}  // namespace hplab
