#include "doctest.h"

#include "hplab/approx.hpp"
#include "hplab/series.hpp"
#include "hplab/zeros.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace hplab;

namespace {

using cplx = std::complex<double>;
const double kPi = std::acos(-1.0);
const double c128 = std::sqrt(3.0) / (2.0 * kPi);

/// With t = ((r-1)/(r+1))^{1/3}, rho dr = 3c dt / (1 + t + t^2), so the
/// folded CDF is (6/pi) (atan((2t+1)/sqrt 3) - pi/6).
double cdf_oracle(double r)
{
    const double t = std::cbrt((r - 1.0) / (r + 1.0));
    return 6.0 / kPi * (std::atan((2.0 * t + 1.0) / std::sqrt(3.0)) - kPi / 6.0);
}

/// Potential in the same t variable, as an independent second scheme.
double potential_oracle(cplx z)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    const auto f = [&](double t) {
        const double t3 = t * t * t;
        const double r = (1.0 + t3) / (1.0 - t3);
        return -(std::log(std::abs(z - r)) + std::log(std::abs(z + r))) * 3.0 * c128 / (1.0 + t + t * t);
    };
    const double r0 = std::abs(z.real());
    if (r0 <= 1.0) return ts.integrate(f, 0.0, 1.0);
    const double t0 = std::cbrt((r0 - 1.0) / (r0 + 1.0));
    return ts.integrate(f, 0.0, t0) + ts.integrate(f, t0, 1.0);
}

Poly<Rational> rpoly(std::initializer_list<long> c)
{
    std::vector<Rational> v;
    for (long x : c) v.emplace_back(x);
    return Poly<Rational>(v);
}

Poly<Rational> hp_q(const Rational& alpha, int n, int j)
{
    const auto cfg = BranchConfig::segment(alpha);
    const auto f = expand_f(cfg, 3 * n + 10, Rational(0));
    return hp_solve(f, f * f, n).polys[static_cast<std::size_t>(j)];
}

double err(const Root& r, cplx exact) { return abs(r.value - BigComplex(exact, r.value.precision_bits())).to_double(); }

double set_distance(std::vector<cplx> a, std::vector<cplx> b)
{
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    const auto key = [](const cplx& x, const cplx& y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace

TEST_CASE("roots of simple polynomials")
{
    const auto r = find_roots(rpoly({1, 0, 1}), 128);
    REQUIRE(r.roots.size() == 2);
    CHECK(r.certified);
    CHECK(err(r.roots[0], cplx(0, -1)) < 1e-36);
    CHECK(err(r.roots[1], cplx(0, 1)) < 1e-36);
    CHECK(r.count() == 2);

    const auto w = find_roots(rpoly({-6, 11, -6, 1}), 96);
    REQUIRE(w.roots.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(err(w.roots[static_cast<std::size_t>(k)], cplx(k + 1.0)) < 1e-26);
}

TEST_CASE("multiple roots are merged into clusters")
{
    const auto r = find_roots(rpoly({-8, 12, -6, 1}), 128);
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0].multiplicity == 3);
    CHECK(err(r.roots[0], 2.0) < 1e-30);
    CHECK(r.count() == 3);
    CHECK(r.certified);

    // z^2 (z - 1)^2 (z + 3)
    const auto s = find_roots(rpoly({1, -2, 1}) * rpoly({0, 0, 1}) * rpoly({3, 1}), 128);
    CHECK(s.count() == 5);
    REQUIRE(s.roots.size() == 3);
    CHECK(err(s.roots[0], -3.0) < 1e-30);
    CHECK(err(s.roots[2], 1.0) < 1e-30);
    CHECK(s.roots[1].multiplicity == 2);
    CHECK(std::abs(s.roots[1].approx) == 0.0);
    CHECK(s.roots[2].multiplicity == 2);
}

TEST_CASE("residual certificates hold on re-evaluation at doubled precision")
{
    const auto p = hp_q(ratio(1, 4), 12, 1);
    const auto r = find_roots(p, 160);
    CHECK(r.certified);
    CHECK(r.count() == p.degree());
    for (const auto& root : r.roots) {
        // Independent check with the exact coefficients at four times the precision.
        const BigComplex z = embed(root.value, 320);
        BigComplex acc(320);
        BigFloat scale(0.0, 640);
        const BigFloat rz = abs(z);
        for (int k = p.degree(); k >= 0; --k) {
            acc = acc * z + embed(p[k], 640);
            scale = scale * rz + abs(embed(p[k], 640));
        }
        CHECK((abs(acc) / scale).to_double() <= std::exp2(-80.0));
    }
}

TEST_CASE("zeros of Q_{n,0} lie on the real axis outside [-1, 1]")
{
    const auto q = hp_q(ratio(1, 4), 20, 0);
    REQUIRE(q.degree() == 20);
    const auto r = find_roots(q, 256);
    CHECK(r.certified);
    CHECK(r.count() == 20);
    for (const auto& root : r.roots) {
        CHECK(std::abs(root.value.im().to_double()) < 1e-20);
        CHECK(std::abs(root.approx.real()) > 1.0);
        CHECK(root.multiplicity == 1);
    }
}

TEST_CASE("exponent flip exchanges Q_{n,0} and Q_{n,2}")
{
    for (const Rational& alpha : {ratio(1, 4), ratio(1, 6), ratio(1, 3)}) {
        const auto a = find_roots(hp_q(alpha, 10, 0), 192);
        const auto b = find_roots(hp_q(-alpha, 10, 2), 192);
        CHECK(set_distance(a.values(), b.values()) < 1e-20);
    }
}

TEST_CASE("root finder input errors")
{
    CHECK_THROWS_AS(find_roots(rpoly({3}), 128), DomainError);
    std::vector<BigComplex> c{BigComplex(cplx(1.0), 64), BigComplex(cplx(1.0), 64)};
    CHECK_THROWS_AS(find_roots(Poly<BigComplex>(c), 32), DomainError);
    CHECK_THROWS_AS(find_roots(Poly<BigComplex>(c), 64, 1) /* budget too small to converge */, RootConvergenceError);
}

TEST_CASE("roots export as CSV")
{
    const auto r = find_roots(rpoly({-8, 12, -6, 1}), 128);
    std::istringstream in(roots_csv(r));
    std::string line;
    std::getline(in, line);
    CHECK(line == "re,im,residual");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("limit density: symmetry, endpoint scaling, mass")
{
    for (double x : {1.0001, 1.3, 2.0, 7.5, 1e3, 1e8}) {
        CHECK(density128(x) == density128(-x));
        CHECK(density128(x) > 0.0);
        const double direct = c128 / std::cbrt(x * x - 1.0) * (1.0 / std::cbrt(x - 1.0) - 1.0 / std::cbrt(x + 1.0));
        if (x < 1e3) CHECK(density128(x) == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK_THROWS_AS(density128(1.0), DomainError);
    CHECK_THROWS_AS(density128(-0.5), DomainError);

    const double limit = c128 * std::cbrt(0.5);
    CHECK(limit == doctest::Approx(0.21884).epsilon(1e-4));
    double prev = 1.0;
    for (double eps : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        const double err = std::abs(density128(1.0 + eps) * std::pow(eps, 2.0 / 3.0) - limit);
        CHECK(err < prev);
        CHECK(err < 2.0 * std::cbrt(eps) * limit);
        prev = err;
    }

    const auto prof = density_profile(64);
    CHECK(std::abs(prof.total_mass - 1.0) < 1e-8);
    CHECK(std::abs(density128_cdf(std::numeric_limits<double>::infinity()) - 1.0) < 1e-12);
}

TEST_CASE("limit CDF matches the closed form and is monotone")
{
    for (double r : {1.0 + 1e-9, 1.001, 1.5, 2.0, 2.5, 10.0, 1e4, 1e9}) CHECK(std::abs(density128_cdf(r) - cdf_oracle(r)) < 1e-12);
    const auto prof = density_profile(200);
    for (std::size_t k = 1; k < prof.cdf.size(); ++k) CHECK(prof.cdf[k] > prof.cdf[k - 1]);
    CHECK(prof.cdf.front() >= 0.0);
    CHECK(prof.cdf.back() < 1.0);
    for (double q : {1e-3, 0.1, 0.5, 0.6, 0.9, 0.999}) CHECK(density128_cdf(density128_quantile(q)) == doctest::Approx(q).epsilon(1e-9));

    std::istringstream in(cdf_csv(prof));
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,cdf");
}

TEST_CASE("potential of the limit density")
{
    const auto prof = density_profile(32);
    const cplx far = 1e6 * cplx(0.6, 0.8);
    CHECK(std::abs(potential_from_density(prof, far) + std::log(std::abs(far))) < 1e-4);

    const cplx center(0.0, 2.0);
    const double v0 = potential_from_density(prof, center);
    double mean = 0.0;
    const int m = 64;
    for (int k = 0; k < m; ++k) mean += potential_from_density(prof, center + std::polar(0.5, 2.0 * kPi * k / m));
    CHECK(std::abs(mean / m - v0) < 1e-6);

    for (cplx z : {center, cplx(0.5, 0.0), cplx(3.0, 0.2), cplx(1.2, 1e-3), cplx(-40.0, 7.0)})
        CHECK(std::abs(potential_from_density(prof, z) - potential_oracle(z)) < 1e-8);
    // Golden value, confirmed by a 30-digit computation in the t variable.
    CHECK(std::abs(v0 + 1.0271325234855870) < 1e-12);

    CHECK_THROWS_AS(potential_from_density(prof, 1.5), DomainError);
    CHECK_THROWS_AS(potential_from_density(prof, -1.0), DomainError);
}

TEST_CASE("zero statistics")
{
    const auto prof = density_profile(32);
    const int n = 50;
    std::vector<cplx> q;
    for (int i = 0; i < n; ++i) q.emplace_back((i % 2 ? -1.0 : 1.0) * density128_quantile((i + 0.5) / n), 0.0);
    const auto st = zero_stats(q, prof);
    CHECK(st.ks_distance <= 0.5 / n + 1e-12);
    CHECK(st.count == n);
    REQUIRE(st.intervals.size() == 10);
    for (const auto& ic : st.intervals) CHECK(ic.count == 5);

    CHECK_THROWS_AS(zero_stats(std::vector<cplx>{}, prof), DomainError);
    CHECK_THROWS_AS(zero_stats(std::vector<cplx>{cplx(2.0, 0.5)}, prof), DomainError);

    const auto ks = [&](const Rational& alpha, int deg) { return zero_stats(find_roots(hp_q(alpha, deg, 0), 256), prof).ks_distance; };
    CHECK(ks(ratio(1, 4), 40) < ks(ratio(1, 4), 10));
}
