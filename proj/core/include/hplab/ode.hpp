#pragma once

#include "hplab/laurent.hpp"
#include "hplab/linalg.hpp"
#include "hplab/poly.hpp"
#include "hplab/series.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <complex>
#include <vector>

namespace hplab {

enum class Provenance { explicit_form, recovered };

/// sum_k coeffs[order - k] w^{(k)} = 0; coeffs are listed from the highest derivative down.
template <class T>
struct OdeSystem {
    int order = 0;
    int n = 0;
    std::vector<Poly<T>> coeffs;
    Provenance provenance = Provenance::explicit_form;
    /// Recovery only: nullspace dimension minus one (0 when the ODE is unique).
    int defect = 0;

    const Poly<T>& coeff_of_derivative(int k) const { return coeffs[static_cast<std::size_t>(order - k)]; }
};

/// (z^2-1) w'' + 2(z-alpha) w' - n(n+1) w = 0.
OdeSystem<Rational> build_ode2_jacobi(int n, const Rational& alpha);

/// Constant terms of the two lowest coefficients of the explicit third-order operator.
/// `published` uses -(3n(n+1) + 8alpha^2 - 10) and alpha(3n(n+1) - 8);
/// `annihilating` uses -(3n(n+1) + 8alpha^2 - 2) and 3alpha n(n+1), the values
/// the exact Hermite-Pade solutions actually satisfy.
enum class Ode3Constants { published, annihilating };

/// The explicit third-order operator for f = ((z-1)/(z+1))^alpha, targeting Q_{n,0}, Q_{n,1} f, Q_{n,2} f^2.
OdeSystem<Rational> build_ode3_p2(int n, const Rational& alpha, Ode3Constants constants = Ode3Constants::published);

/// Applies the operator to Q f^j with f'/f = B/A, returning sum_k c_k U_k A^{order-k}
/// where (Q f^j)^{(k)} = U_k f^j / A^k. Zero exactly when Q f^j is a solution.
template <class T>
Poly<T> verify_solution(const OdeSystem<T>& sys, const Poly<T>& q, int j, const BranchConfig& cfg)
{
    const T& like = q.is_zero() ? sys.coeffs.front().lead() : q.lead();
    const Poly<T> A = poly_A(cfg, like);
    const Poly<T> B = poly_B(cfg, like);
    const Poly<T> dA = A.derivative();
    const Poly<T> jB = B * from_rational_like(Rational(j), like);

    std::vector<Poly<T>> U{q};
    for (int k = 0; k < sys.order; ++k) {
        const Poly<T>& u = U.back();
        U.push_back(A * u.derivative() + (jB - dA * from_rational_like(Rational(k), like)) * u);
    }
    std::vector<Poly<T>> Apow{Poly<T>::constant(from_rational_like(Rational(1), like))};
    for (int k = 0; k < sys.order; ++k) Apow.push_back(Apow.back() * A);

    Poly<T> out;
    for (int k = 0; k <= sys.order; ++k)
        out += sys.coeff_of_derivative(k) * U[static_cast<std::size_t>(k)] * Apow[static_cast<std::size_t>(sys.order - k)];
    return out;
}

/// Degree bounds of the coefficient polynomials, highest derivative first.
using DegreeProfile = std::vector<int>;

/// (2p-2, 2p-3, 2p-4): A_p Pi_1, Pi_3, Pi_2 for p = 3; (z^2-1), 2(z-alpha), const for p = 2.
DegreeProfile order2_profile(int p);
/// (5p-6, 5p-7, 5p-8, 5p-9).
DegreeProfile order3_profile(int p);

/// Recovers the operator annihilating every given solution series.
/// The unknown coefficients are solved exactly from the series coefficients
/// that are fully determined by the truncation; the leading coefficient of
/// the highest-order polynomial is normalized to 1. Throws
/// InconsistencyError when only the zero operator fits the profile.
template <class T>
OdeSystem<T> recover_ode(const std::vector<Laurent<T>>& solutions, int order, const DegreeProfile& profile, int n)
{
    if (static_cast<int>(profile.size()) != order + 1) throw DomainError("degree profile does not match the order");
    if (solutions.empty()) throw DomainError("no solutions supplied");
    const T like = solutions.front().coeffs().at(0);

    // column layout: for k = order .. 0, coefficients of z^0 .. z^{d_k} of c_k
    std::vector<int> offset;
    int cols = 0;
    for (int idx = 0; idx <= order; ++idx) {
        offset.push_back(cols);
        cols += profile[static_cast<std::size_t>(idx)] + 1;
    }

    std::vector<std::vector<T>> rows;
    for (const auto& w : solutions) {
        std::vector<Laurent<T>> d{w};
        for (int k = 1; k <= order; ++k) d.push_back(d.back().derivative());
        int top = std::numeric_limits<int>::min();
        int low = std::numeric_limits<int>::min();
        for (int idx = 0; idx <= order; ++idx) {
            const int k = order - idx;
            const int dk = profile[static_cast<std::size_t>(idx)];
            top = std::max(top, d[static_cast<std::size_t>(k)].top() + dk);
            low = std::max(low, d[static_cast<std::size_t>(k)].low_known() + dk);
        }
        for (int e = top; e >= low; --e) {
            std::vector<T> row(static_cast<std::size_t>(cols), zero_like(like));
            bool any = false;
            for (int idx = 0; idx <= order; ++idx) {
                const int k = order - idx;
                const auto& s = d[static_cast<std::size_t>(k)];
                for (int i = 0; i <= profile[static_cast<std::size_t>(idx)]; ++i) {
                    const int ex = e - i;
                    if (ex > s.top()) continue;
                    T v = s.coeff(ex);
                    if (!is_zero(v)) any = true;
                    row[static_cast<std::size_t>(offset[static_cast<std::size_t>(idx)] + i)] = std::move(v);
                }
            }
            if (any) rows.push_back(std::move(row));
        }
    }

    Matrix<T> m(static_cast<int>(rows.size()), cols, zero_like(like));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    const auto ns = exact_nullspace(m);
    if (ns.basis.empty()) throw InconsistencyError("no operator of this degree profile annihilates the solutions");

    OdeSystem<T> sys;
    sys.order = order;
    sys.n = n;
    sys.provenance = Provenance::recovered;
    sys.defect = static_cast<int>(ns.basis.size()) - 1;
    const auto& v = ns.basis.front();
    for (int idx = 0; idx <= order; ++idx) {
        const auto b = v.begin() + offset[static_cast<std::size_t>(idx)];
        sys.coeffs.emplace_back(std::vector<T>(b, b + profile[static_cast<std::size_t>(idx)] + 1));
    }
    const Poly<T>& lead_poly = sys.coeffs.front();
    if (lead_poly.is_zero()) throw InconsistencyError("recovered operator has a vanishing leading coefficient");
    const T inv = from_rational_like(Rational(1), lead_poly.lead()) / lead_poly.lead();
    for (auto& c : sys.coeffs) c = c * inv;
    return sys;
}

/// H, F, G of the third-order equation: c_3 = A^2 H, c_1 = -3(n-1)(n+2) F, c_0 = 2n(n^2-1) G.
template <class T>
struct ThirdOrderFactors {
    Poly<T> H, F, G;
    Poly<T> H_remainder;  // c_3 mod A^2, zero when the form holds
    /// c_2 - A{3(A'-B)H - AH'}; zero when the second coefficient has the stated form
    Poly<T> c2_mismatch;
};

template <class T>
ThirdOrderFactors<T> third_order_factors(const OdeSystem<T>& sys, const BranchConfig& cfg)
{
    if (sys.order != 3) throw DomainError("third-order system expected");
    const T& like = sys.coeffs.front().lead();
    const Poly<T> A = poly_A(cfg, like);
    const Poly<T> B = poly_B(cfg, like);
    ThirdOrderFactors<T> out;
    auto [h, rem] = divmod(sys.coeffs[0], A * A);
    out.H = h;
    out.H_remainder = rem;
    const long n = sys.n;
    const T s1 = from_rational_like(Rational(-3 * (n - 1) * (n + 2)), like);
    const T s0 = from_rational_like(Rational(2 * n * (n * n - 1)), like);
    if (!is_zero(s1)) out.F = sys.coeffs[2] * (from_rational_like(Rational(1), like) / s1);
    if (!is_zero(s0)) out.G = sys.coeffs[3] * (from_rational_like(Rational(1), like) / s0);
    const Poly<T> three = Poly<T>::constant(from_rational_like(Rational(3), like));
    out.c2_mismatch = sys.coeffs[1] - A * (three * (A.derivative() - B) * out.H - A * out.H.derivative());
    return out;
}

/// z_n, b_n, v_n from a second-order Laguerre-type system with Pi_2 = -n(n+1)(z-b_n)(z-v_n).
struct OdeParameters {
    std::complex<double> z_n;
    std::complex<double> b_n;
    std::complex<double> v_n;
    /// |lead(Pi_2) + n(n+1)| relative to n(n+1), and the remainder of c_2 / A_3.
    double lead_residual = 0.0;
    double pi1_residual = 0.0;
};

/// Labels v_n as the root of Pi_2 nearer to `chebotarev`.
template <class T>
OdeParameters extract_parameters(const OdeSystem<T>& sys, const BranchConfig& cfg, std::complex<double> chebotarev)
{
    if (sys.order != 2) throw DomainError("second-order system expected");
    const Poly<T>& pi2 = sys.coeffs[2];
    if (pi2.degree() != 2) throw DomainError("Pi_2 must have degree 2");
    const T& like = pi2.lead();
    auto [pi1, rem] = divmod(sys.coeffs[0], poly_A(cfg, like));
    OdeParameters out;
    double r = 0.0;
    for (const auto& c : rem.coeffs()) r = std::max(r, std::abs(to_complex(c)));
    out.pi1_residual = r;
    if (pi1.degree() != 1) throw DomainError("Pi_1 must have degree 1");
    out.z_n = -to_complex(pi1[0]) / to_complex(pi1[1]);

    const double nn = static_cast<double>(sys.n) * (sys.n + 1);
    // Pi_2 carries the overall scale of the normalized operator; compare it to -n(n+1) relative to Pi_1's leading coefficient
    const std::complex<double> lead = to_complex(pi2.lead()) / to_complex(pi1.lead());
    out.lead_residual = std::abs(lead + nn) / nn;

    // roots of the quadratic in 256-bit arithmetic
    const int bits = 256;
    const BigComplex a = embed(pi2[2], bits), b = embed(pi2[1], bits), c = embed(pi2[0], bits);
    const BigComplex disc = sqrt(b * b - from_rational_like(Rational(4), a) * a * c);
    const BigComplex two_a = from_rational_like(Rational(2), a) * a;
    const std::complex<double> r1 = ((-b + disc) / two_a).to_complex();
    const std::complex<double> r2 = ((-b - disc) / two_a).to_complex();
    const bool first_is_v = std::abs(r1 - chebotarev) <= std::abs(r2 - chebotarev);
    out.v_n = first_is_v ? r1 : r2;
    out.b_n = first_is_v ? r2 : r1;
    return out;
}

// ----- characteristic cubic --------------------------------------------------

/// p^3 + r2 p^2 + r1 p + r0 = 0 with r2 = c2/(n c3), r1 = c1/(n^2 c3), r0 = c0/(n^3 c3).
/// Stored as the scaled numerators P3 = c3, P2 = c2/n, P1 = c1/n^2, P0 = c0/n^3.
class CharacteristicCubic {
public:
    CharacteristicCubic() = default;
    CharacteristicCubic(std::array<Poly<std::complex<double>>, 4> scaled, int n) : p_(std::move(scaled)), n_(n) {}

    int n() const { return n_; }  // 0 marks the n -> infinity limit
    /// r2, r1, r0 at z.
    std::array<std::complex<double>, 3> coefficients(std::complex<double> z) const;
    /// The three roots at z, unordered.
    std::array<std::complex<double>, 3> roots(std::complex<double> z) const;
    /// dp/dz for a root p at z, by implicit differentiation.
    std::complex<double> root_derivative(std::complex<double> z, std::complex<double> p) const;
    /// Discriminant of P3 p^3 + P2 p^2 + P1 p + P0 at z (vanishes where roots merge or escape to infinity).
    std::complex<double> discriminant(std::complex<double> z) const;

    const std::array<Poly<std::complex<double>>, 4>& scaled() const { return p_; }

private:
    std::array<Poly<std::complex<double>>, 4> p_;
    int n_ = 0;
};

template <class T>
CharacteristicCubic characteristic_cubic(const OdeSystem<T>& sys)
{
    if (sys.order != 3) throw DomainError("third-order system expected");
    std::array<Poly<std::complex<double>>, 4> s;
    const double n = sys.n;
    double scale = 1.0;
    for (int idx = 0; idx <= 3; ++idx) {
        s[static_cast<std::size_t>(3 - idx)] = sys.coeffs[static_cast<std::size_t>(idx)].template map<std::complex<double>>(
            [&](const T& x) { return to_complex(x) / scale; });
        scale *= n;
    }
    return CharacteristicCubic(std::move(s), sys.n);
}

/// (z^2-1)^2 p^3 - 3(z^2-1) p + 2z: the n -> infinity limit for the two-point configuration.
CharacteristicCubic limit_cubic_p2();

/// Roots of a monic cubic p^3 + a p^2 + b p + c.
std::array<std::complex<double>, 3> solve_cubic(std::complex<double> a, std::complex<double> b, std::complex<double> c);

}  // namespace hplab
