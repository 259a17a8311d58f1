#include "doctest.h"

#include "hplab/approx.hpp"
#include "hplab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace hplab;

namespace {

using cplx = std::complex<double>;

Poly<Rational> zpoly(std::initializer_list<Rational> c) { return Poly<Rational>(c); }

template <class T>
std::vector<Laurent<T>> hp_solution_series(const HPSolution<T>& sol, const Laurent<T>& f, const Laurent<T>& f2, const T& like)
{
    return {Laurent<T>::from_poly(sol.polys[0], f.low_known(), like), sol.polys[1] * f, sol.polys[2] * f2};
}

template <class T>
std::vector<Laurent<T>> pade_solution_series(const HPSolution<T>& sol, const Laurent<T>& f, const T& like)
{
    return {Laurent<T>::from_poly(sol.polys[0], f.low_known(), like), sol.polys[1] * f};
}

bool same_roots(std::array<cplx, 3> a, std::array<cplx, 3> b, double tol)
{
    for (const auto& x : a) {
        double best = 1e300;
        for (const auto& y : b) best = std::min(best, std::abs(x - y));
        if (best > tol) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("second-order operator for the segment")
{
    const auto sys = build_ode2_jacobi(1, ratio(1, 4));
    CHECK(sys.order == 2);
    CHECK(sys.coeffs[0] == zpoly({-1, 0, 1}));
    CHECK(sys.coeffs[1] == zpoly({ratio(-1, 2), 2}));
    CHECK(sys.coeffs[2] == zpoly({-2}));

    // symmetric case: w' coefficient is 2z
    CHECK(build_ode2_jacobi(3, Rational(0)).coeffs[1] == zpoly({0, 2}));

    // z - 1/4 solves the n = 1 equation; the shifted sign does not
    const auto cfg = BranchConfig::segment(ratio(1, 4));
    CHECK(verify_solution(sys, zpoly({ratio(-1, 4), 1}), 0, cfg).is_zero());
    CHECK_FALSE(verify_solution(sys, zpoly({ratio(1, 4), 1}), 0, cfg).is_zero());
}

TEST_CASE("Pade numerator and remainder-side function solve the second-order equation")
{
    for (const Rational& alpha : {ratio(1, 4), ratio(2, 7)}) {
        const auto cfg = BranchConfig::segment(alpha);
        const auto f = expand_f(cfg, 40, Rational(0));
        for (int n = 1; n <= 12; ++n) {
            const auto sol = pade_solve(f, n);
            const auto sys = build_ode2_jacobi(n, alpha);
            CHECK(verify_solution(sys, sol.polys[0], 0, cfg).is_zero());
            CHECK(verify_solution(sys, sol.polys[1], 1, cfg).is_zero());
        }
    }
}

TEST_CASE("explicit third-order operator: published coefficients")
{
    const Rational a = ratio(1, 4);
    for (int n : {1, 2, 7}) {
        const auto sys = build_ode3_p2(n, a);
        CHECK(sys.coeffs[0] == zpoly({1, 0, -2, 0, 1}));
        CHECK(sys.coeffs[1] == zpoly({6 * a, -6, -6 * a, 6}));
    }
    const auto one = build_ode3_p2(1, a);
    CHECK(one.coeffs[2] == zpoly({8 * a * a - 4, -12 * a}));
    CHECK(one.coeffs[3] == zpoly({-4 * a}));
}

TEST_CASE("third-order operator annihilates the Hermite-Pade triple")
{
    for (const Rational& alpha : {ratio(1, 6), ratio(1, 4), ratio(1, 3)}) {
        const auto cfg = BranchConfig::segment(alpha);
        const auto f = expand_f(cfg, 40, Rational(0));
        const auto f2 = expand_power(f, 2);
        for (int n = 2; n <= 9; ++n) {
            const auto sol = hp_solve(f, f2, n);
            const auto fixed = build_ode3_p2(n, alpha, Ode3Constants::annihilating);
            const auto printed = build_ode3_p2(n, alpha);
            bool printed_ok = true;
            for (int j = 0; j < 3; ++j) {
                CHECK(verify_solution(fixed, sol.polys[static_cast<std::size_t>(j)], j, cfg).is_zero());
                printed_ok = printed_ok && verify_solution(printed, sol.polys[static_cast<std::size_t>(j)], j, cfg).is_zero();
            }
            CHECK_FALSE(printed_ok);
        }
    }
}

TEST_CASE("negative control: a random polynomial is not a solution")
{
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coef(-9, 9);
    const auto cfg = BranchConfig::segment(ratio(1, 4));
    for (int n = 2; n <= 6; ++n) {
        std::vector<Rational> c;
        for (int k = 0; k < n; ++k) c.emplace_back(coef(rng));
        c.emplace_back(1);
        const Poly<Rational> q(c);
        CHECK_FALSE(verify_solution(build_ode3_p2(n, ratio(1, 4), Ode3Constants::annihilating), q, 0, cfg).is_zero());
        CHECK_FALSE(verify_solution(build_ode2_jacobi(n, ratio(1, 4)), q, 0, cfg).is_zero());
    }
}

TEST_CASE("recovery round trip for the segment")
{
    const Rational alpha = ratio(1, 4);
    const auto cfg = BranchConfig::segment(alpha);
    const auto f = expand_f(cfg, 60, Rational(0));
    const auto f2 = expand_power(f, 2);
    for (int n = 2; n <= 8; ++n) {
        const auto order2 = recover_ode(pade_solution_series(pade_solve(f, n), f, Rational(0)), 2, order2_profile(2), n);
        CHECK(order2.defect == 0);
        CHECK(order2.provenance == Provenance::recovered);
        CHECK(order2.coeffs == build_ode2_jacobi(n, alpha).coeffs);

        const auto order3 = recover_ode(hp_solution_series(hp_solve(f, f2, n), f, f2, Rational(0)), 3, order3_profile(2), n);
        CHECK(order3.defect == 0);
        CHECK(order3.coeffs == build_ode3_p2(n, alpha, Ode3Constants::annihilating).coeffs);
    }
}

TEST_CASE("recovery rejects an operator that cannot exist")
{
    const auto cfg = BranchConfig::segment(ratio(1, 4));
    const auto f = expand_f(cfg, 60, Rational(0));
    const auto f2 = expand_power(f, 2);
    const auto sols = hp_solution_series(hp_solve(f, f2, 5), f, f2, Rational(0));
    // an order-3 operator with constant coefficients has too few unknowns
    CHECK_THROWS_AS(recover_ode(sols, 3, DegreeProfile{0, 0, 0, 0}, 5), InconsistencyError);
    CHECK_THROWS_AS(recover_ode(sols, 3, DegreeProfile{1, 1}, 5), DomainError);
}

TEST_CASE("three-point configuration: third-order structure")
{
    const auto check = [](const BranchConfig& cfg, auto like, int nmax) {
        const auto f = expand_f(cfg, 5 * nmax + 40, like);
        const auto f2 = expand_power(f, 2);
        for (int n = 2; n <= nmax; ++n) {
            const auto sys = recover_ode(hp_solution_series(hp_solve(f, f2, n), f, f2, like), 3, order3_profile(3), n);
            CHECK(sys.defect == 0);
            const auto fac = third_order_factors(sys, cfg);
            CHECK(fac.H_remainder.is_zero());
            CHECK(fac.c2_mismatch.is_zero());
            CHECK(fac.H.degree() == 3);
            CHECK(fac.F.degree() == 7);
            CHECK(fac.G.degree() == 6);
            const auto unit = from_rational_like(Rational(1), like);
            CHECK(fac.H.lead() == unit);
            CHECK(fac.F.lead() == unit);
            CHECK(fac.G.lead() == unit);
        }
    };
    check(BranchConfig::parse("0,1,-1", "1/3,1/3,-2/3"), Rational(0), 5);
    check(BranchConfig::parse("1,w,w2", "1/3,1/3,-2/3"), QF(0), 5);
}

TEST_CASE("Laguerre-type parameters for the cube roots of unity")
{
    const auto cfg = BranchConfig::parse("1,w,w2", "1/6,1/6,-1/3");
    const auto f = expand_f(cfg, 80, QF(0));
    std::vector<double> along_zero_class;
    for (int n : {6, 12, 24}) {
        const auto sys = recover_ode(pade_solution_series(pade_solve(f, n), f, QF(0)), 2, order2_profile(3), n);
        CHECK(sys.defect == 0);
        const auto par = extract_parameters(sys, cfg, cplx(0.0, 0.0));
        CHECK(par.lead_residual == 0.0);
        CHECK(par.pi1_residual == 0.0);
        CHECK(std::abs(par.v_n) < std::abs(par.b_n));
        along_zero_class.push_back(std::abs(par.v_n));
    }
    CHECK(along_zero_class[1] < along_zero_class[0]);
    CHECK(along_zero_class[2] < along_zero_class[1]);
}

TEST_CASE("cubic solver")
{
    const cplx r1(1.0, 2.0), r2(-0.5, 0.25), r3(3.0, -1.0);
    const auto roots = solve_cubic(-(r1 + r2 + r3), r1 * r2 + r1 * r3 + r2 * r3, -(r1 * r2 * r3));
    CHECK(same_roots(roots, {r1, r2, r3}, 1e-13));
    // triple root
    CHECK(same_roots(solve_cubic(-3.0, 3.0, -1.0), {1.0, 1.0, 1.0}, 1e-5));
}

TEST_CASE("characteristic cubic of the explicit operator")
{
    const Rational alpha = ratio(1, 4);
    const auto limit = limit_cubic_p2();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.5, 2.5);

    SUBCASE("Vieta identities")
    {
        const auto cubic = characteristic_cubic(build_ode3_p2(10, alpha, Ode3Constants::annihilating));
        for (int k = 0; k < 20; ++k) {
            const cplx z(u(rng), u(rng));
            const auto r = cubic.coefficients(z);
            const auto p = cubic.roots(z);
            CHECK(std::abs(p[0] + p[1] + p[2] + r[0]) < 1e-10 * (1.0 + std::abs(r[0])));
            CHECK(std::abs(p[0] * p[1] * p[2] + r[2]) < 1e-10 * (1.0 + std::abs(r[2])));
        }
    }

    SUBCASE("finite-n roots approach the limit cubic")
    {
        const cplx z(0.3, 0.8);
        double prev = 1e300;
        for (int n : {10, 100, 1000, 10000}) {
            const auto cubic = characteristic_cubic(build_ode3_p2(n, alpha, Ode3Constants::annihilating));
            const auto a = cubic.roots(z);
            const auto b = limit.roots(z);
            double worst = 0.0;
            for (const auto& x : a) {
                double best = 1e300;
                for (const auto& y : b) best = std::min(best, std::abs(x - y));
                worst = std::max(worst, best);
            }
            CHECK(worst < prev);
            prev = worst;
        }
        CHECK(prev < 1e-3);
    }

    SUBCASE("discriminant of the limit cubic")
    {
        // closed form -108 (z^2-1)^4, so the only merging points are +-1
        for (int k = 0; k < 20; ++k) {
            const cplx z(u(rng), u(rng));
            const cplx expect = -108.0 * std::pow(z * z - 1.0, 4);
            CHECK(std::abs(limit.discriminant(z) - expect) < 1e-10 * (1.0 + std::abs(expect)));
        }
        CHECK(std::abs(limit.discriminant(cplx(1.0 + 1e-3, 0.0))) < 1e-8);
        CHECK(std::abs(limit.discriminant(cplx(-1.0, 1e-3))) < 1e-8);
    }

    SUBCASE("implicit derivative matches a finite difference")
    {
        const cplx z(0.4, 0.7), h(1e-6, 0.0);
        const auto r0 = limit.roots(z);
        const auto r1 = limit.roots(z + h);
        for (const auto& p : r0) {
            double best = 1e300;
            cplx partner;
            for (const auto& q : r1)
                if (std::abs(q - p) < best) best = std::abs(q - p), partner = q;
            const cplx fd = (partner - p) / h;
            CHECK(std::abs(limit.root_derivative(z, p) - fd) < 1e-4 * (1.0 + std::abs(fd)));
        }
    }

    SUBCASE("roots are pairwise distinct at regular points")
    {
        for (int k = 0; k < 50; ++k) {
            const cplx z(u(rng), u(rng));
            const auto r = limit.roots(z);
            CHECK(std::abs(r[0] - r[1]) > 1e-8);
            CHECK(std::abs(r[0] - r[2]) > 1e-8);
            CHECK(std::abs(r[1] - r[2]) > 1e-8);
        }
    }
}
