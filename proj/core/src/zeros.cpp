#include "hplab/zeros.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

namespace hplab {

namespace {

using cplx = std::complex<double>;

BigFloat with_bits(const BigFloat& x, int bits)
{
    BigFloat r(bits);
    mpfr_set(r.get(), x.get(), MPFR_RNDN);
    return r;
}

BigComplex with_bits(const BigComplex& z, int bits) { return {with_bits(z.re(), bits), with_bits(z.im(), bits)}; }

double log2_abs(const BigFloat& x)
{
    if (x.is_zero()) return -std::numeric_limits<double>::infinity();
    long e = 0;
    const double m = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDN);
    return std::log2(std::abs(m)) + static_cast<double>(e);
}

struct Eval {
    BigComplex p;
    BigComplex dp;
};

Eval horner(const std::vector<BigComplex>& c, const BigComplex& z)
{
    const int bits = z.precision_bits();
    BigComplex p = c.back(), dp(bits);
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[i];
    }
    return {p, dp};
}

/// |p(z)| / sum |c_k| |z|^k.
BigFloat relative_residual(const std::vector<BigComplex>& c, const BigComplex& z)
{
    const BigFloat r = abs(z);
    BigFloat scale = abs(c.back());
    BigComplex p = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        p = p * z + c[i];
        scale = scale * r + abs(c[i]);
    }
    if (scale.is_zero()) return BigFloat(0.0, z.precision_bits());
    return abs(p) / scale;
}

/// Starting points on circles whose radii come from the upper convex hull of
/// (k, log2 |c_k|).
std::vector<cplx> initial_points(const std::vector<BigComplex>& c)
{
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<std::pair<int, double>> pts;
    for (int k = 0; k <= n; ++k) {
        const double l = log2_abs(abs(c[static_cast<std::size_t>(k)]));
        if (std::isfinite(l)) pts.emplace_back(k, l);
    }
    std::vector<std::pair<int, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
            if (cross >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<cplx> z;
    const double two_pi = 2.0 * std::acos(-1.0);
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        const int m = hull[e + 1].first - hull[e].first;
        const double radius = std::exp2((hull[e].second - hull[e + 1].second) / m);
        for (int j = 0; j < m; ++j) {
            const double angle = two_pi * j / m + two_pi * hull[e + 1].first / n + 0.7;
            z.push_back(std::polar(radius, angle));
        }
    }
    return z;
}

/// Newton on the (k-1)-th derivative, which has a simple root at a k-fold cluster center.
BigComplex polish_cluster(const std::vector<BigComplex>& c, int k, BigComplex z)
{
    const int bits = z.precision_bits();
    std::vector<BigComplex> d = c;
    for (int m = 1; m < k; ++m) {
        std::vector<BigComplex> next;
        for (std::size_t i = 1; i < d.size(); ++i) next.push_back(d[i] * BigComplex(cplx(static_cast<double>(i)), bits));
        d = std::move(next);
    }
    const BigFloat tiny(std::exp2(-(bits - 8)), bits);
    for (int it = 0; it < 60; ++it) {
        const Eval e = horner(d, z);
        if (e.p.is_zero() || e.dp.is_zero()) break;
        const BigComplex step = e.p / e.dp;
        z -= step;
        const BigFloat mag = abs(z);
        if (!(abs(step) > tiny * (mag.is_zero() ? BigFloat(1.0, bits) : mag))) break;
    }
    return z;
}

std::size_t find_set(std::vector<std::size_t>& parent, std::size_t i)
{
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

}  // namespace

int RootSet::count() const
{
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
}

std::vector<cplx> RootSet::values() const
{
    std::vector<cplx> v;
    for (const auto& r : roots) v.push_back(r.approx);
    return v;
}

double RootSet::max_residual() const
{
    double m = 0.0;
    for (const auto& r : roots) m = std::max(m, r.residual);
    return m;
}

RootSet find_roots(const Poly<BigComplex>& p, int bits, int max_iterations)
{
    if (p.degree() < 1) throw DomainError("root finding needs degree >= 1");
    if (bits < 53) throw DomainError("precision must be at least 53 bits");
    if (p.lead().is_zero()) throw DomainError("leading coefficient is zero");

    const int check_bits = 2 * bits;
    std::vector<BigComplex> exact;
    for (const auto& c : p.coeffs()) exact.push_back(with_bits(c, check_bits));

    RootSet out;
    out.degree = p.degree();
    out.precision_bits = bits;
    out.residual_bound = std::exp2(-bits / 2.0);

    // Roots at the origin are exact.
    std::size_t zeros = 0;
    while (exact[zeros].is_zero()) ++zeros;
    std::vector<BigComplex> c;
    for (std::size_t k = zeros; k < exact.size(); ++k) c.push_back(with_bits(exact[k], bits));
    const int n = static_cast<int>(c.size()) - 1;

    std::vector<BigComplex> z;
    for (const auto& s : initial_points(c)) z.emplace_back(s, bits);
    const BigFloat stop_step(std::exp2(-(bits - 12)), bits);
    const BigFloat stop_residual(std::exp2(-(bits - 8)), bits);
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    const int budget = max_iterations > 0 ? max_iterations : 200 + 20 * n;
    int it = 0;
    const auto all_done = [&] { return std::all_of(done.begin(), done.end(), [](bool d) { return d; }); };
    const BigComplex one(cplx(1.0), bits);
    while (n > 0 && !all_done()) {
        if (++it > budget) break;
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (done[ui]) continue;
            const Eval e = horner(c, z[ui]);
            if (e.p.is_zero() || !(relative_residual(c, z[ui]) > stop_residual)) {
                done[ui] = true;
                continue;
            }
            BigComplex s(bits);
            for (int j = 0; j < n; ++j)
                if (j != i) s += one / (z[ui] - z[static_cast<std::size_t>(j)]);
            const BigComplex ratio = e.p / e.dp;
            const BigComplex w = ratio / (one - ratio * s);
            z[ui] -= w;
            const BigFloat mag = abs(z[ui]);
            if (!(abs(w) > stop_step * (mag.is_zero() ? BigFloat(1.0, bits) : mag))) done[ui] = true;
        }
    }
    out.iterations = it;

    // Inclusion radii n |p(z_i)| / |lc prod_{j != i} (z_i - z_j)| and clustering.
    std::vector<double> radius(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        BigComplex prod = c.back();
        for (int j = 0; j < n; ++j)
            if (j != i) prod *= z[ui] - z[static_cast<std::size_t>(j)];
        const Eval e = horner(c, z[ui]);
        const BigFloat den = abs(prod);
        radius[ui] = den.is_zero() ? std::numeric_limits<double>::infinity() : (BigFloat(static_cast<double>(n), bits) * abs(e.p) / den).to_double();
    }
    std::vector<std::size_t> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t i = 0; i < parent.size(); ++i)
        for (std::size_t j = i + 1; j < parent.size(); ++j)
            if (abs(z[i] - z[j]).to_double() <= 2.0 * (radius[i] + radius[j])) parent[find_set(parent, i)] = find_set(parent, j);

    std::vector<std::vector<std::size_t>> groups(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) groups[find_set(parent, i)].push_back(i);

    if (zeros > 0) {
        Root r;
        r.value = BigComplex(check_bits);
        r.approx = 0.0;
        r.multiplicity = static_cast<int>(zeros);
        out.roots.push_back(r);
    }
    for (const auto& g : groups) {
        if (g.empty()) continue;
        Root r;
        BigComplex mean(bits);
        double rad = 0.0;
        for (std::size_t i : g) {
            mean += z[i];
            rad = std::max(rad, radius[i]);
        }
        mean = mean / BigComplex(cplx(static_cast<double>(g.size())), bits);
        if (g.size() > 1) mean = polish_cluster(exact, static_cast<int>(g.size()), with_bits(mean, check_bits));
        r.value = with_bits(mean, check_bits);
        r.approx = mean.to_complex();
        r.multiplicity = static_cast<int>(g.size());
        r.radius = rad;
        out.roots.push_back(r);
    }
    out.certified = true;
    for (auto& r : out.roots) {
        r.residual = relative_residual(exact, r.value).to_double();
        if (!(r.residual <= out.residual_bound)) out.certified = false;
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        const double tie = 1e-12 * std::max({1.0, std::abs(a.approx), std::abs(b.approx)});
        if (std::abs(a.approx.real() - b.approx.real()) > tie) return a.approx.real() < b.approx.real();
        return a.approx.imag() < b.approx.imag();
    });

    if (!all_done()) throw RootConvergenceError("Aberth iteration did not converge within " + std::to_string(budget) + " sweeps", out);
    return out;
}

std::string roots_csv(const RootSet& roots)
{
    std::ostringstream os;
    os << "re,im,residual\n";
    char buf[128];
    for (const auto& r : roots.roots)
        for (int k = 0; k < r.multiplicity; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.3e\n", r.approx.real(), r.approx.imag(), r.residual);
            os << buf;
        }
    return os.str();
}

// ----- limit density -----------------------------------------------------------

namespace {

const double c128 = std::sqrt(3.0) / (2.0 * std::acos(-1.0));

/// density on the ray r > 1, written without cancellation.
double ray_density(double r)
{
    const double a = std::cbrt(1.0 / (r - 1.0)), b = std::cbrt(1.0 / (r + 1.0));
    const double r2m1 = (r - 1.0) * (r + 1.0);
    return c128 / std::cbrt(r2m1) * 2.0 / (r2m1 * (a * a + a * b + b * b));
}

/// Folded mass density in u with r = 1 + u^3, 0 < u <= 1.
double near_weight(double u)
{
    const double k = std::cbrt(2.0 + u * u * u);
    return 6.0 * c128 / k * (1.0 - u / k);
}

/// Folded mass density in s with r = 1 / s, 0 < s <= 1/2.
double tail_weight(double s)
{
    const double a = std::cbrt(1.0 / (1.0 - s)), b = std::cbrt(1.0 / (1.0 + s));
    return 4.0 * c128 * std::pow(1.0 - s * s, -4.0 / 3.0) / (a * a + a * b + b * b);
}

double integrate(const std::function<double(double)>& f, double a, double b)
{
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-13);
}

double near_mass(double u) { return integrate(near_weight, 0.0, u); }
double tail_mass(double s) { return integrate(tail_weight, s, 0.5); }

}  // namespace

double density128(double x)
{
    const double r = std::abs(x);
    if (!(r > 1.0)) throw DomainError("the limit density lives on |x| > 1");
    return ray_density(r);
}

double density128_cdf(double r)
{
    if (std::isnan(r)) throw DomainError("cdf of NaN");
    if (r <= 1.0) return 0.0;
    if (r <= 2.0) return near_mass(std::cbrt(r - 1.0));
    const double inner = near_mass(1.0);
    if (std::isinf(r)) return inner + tail_mass(0.0);
    return inner + tail_mass(1.0 / r);
}

double density128_quantile(double q)
{
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    const double inner = near_mass(1.0);
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    if (q <= inner) {
        const auto f = [&](double u) { return near_mass(u) - q; };
        const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, 1.0, -q, inner - q, tol, iters);
        const double u = 0.5 * (lo + hi);
        return 1.0 + u * u * u;
    }
    const double total = inner + tail_mass(0.0);
    const auto f = [&](double s) { return inner + tail_mass(s) - q; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, 0.5, total - q, inner - q, tol, iters);
    return 1.0 / (0.5 * (lo + hi));
}

DensityProfile density_profile(int points, double r_max)
{
    if (points < 2 || !(r_max > 1.0)) throw DomainError("density profile needs at least two points and r_max > 1");
    DensityProfile p;
    const double lo = std::log(1e-8), hi = std::log(r_max - 1.0);
    for (int k = 0; k < points; ++k) {
        const double r = 1.0 + std::exp(lo + (hi - lo) * k / (points - 1));
        p.grid.push_back(r);
        p.density.push_back(ray_density(r));
        p.cdf.push_back(density128_cdf(r));
    }
    p.total_mass = density128_cdf(std::numeric_limits<double>::infinity());
    return p;
}

std::string cdf_csv(const DensityProfile& profile)
{
    std::ostringstream os;
    os << "x,cdf\n";
    char buf[96];
    for (std::size_t k = 0; k < profile.grid.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", profile.grid[k], profile.cdf[k]);
        os << buf;
    }
    return os.str();
}

double potential_from_density(const DensityProfile& profile, cplx z)
{
    if (std::abs(profile.total_mass - 1.0) > 1e-8) throw DomainError("density profile is not a unit measure");
    const double r0 = std::abs(z.real());
    if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z)) && r0 >= 1.0) throw DomainError("point lies on the support");

    boost::math::quadrature::tanh_sinh<double> ts;
    const auto both = [&](double r) { return std::log(std::abs(z - r)) + std::log(std::abs(z + r)); };
    const auto near = [&](double u) { return both(1.0 + u * u * u) * near_weight(u); };
    const auto tail = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double l = std::log(std::abs(s * z - 1.0)) + std::log(std::abs(s * z + 1.0)) - 2.0 * std::log(s);
        return l * tail_weight(s);
    };
    const auto piece = [&](const auto& f, double a, double b, double split) {
        if (split > a && split < b) return ts.integrate(f, a, split) + ts.integrate(f, split, b);
        return ts.integrate(f, a, b);
    };
    const double u0 = r0 > 1.0 ? std::cbrt(r0 - 1.0) : -1.0;
    const double s0 = r0 > 1.0 ? 1.0 / r0 : -1.0;
    // Each weight carries the folding factor 2 for the two rays.
    return -0.5 * (piece(near, 0.0, 1.0, u0) + piece(tail, 0.0, 0.5, s0));
}

ZeroStats zero_stats(const std::vector<cplx>& roots, const DensityProfile& profile, double imag_tol)
{
    if (roots.empty()) throw DomainError("no roots to compare");
    if (profile.grid.empty()) throw DomainError("empty density profile");
    std::vector<double> r;
    for (const auto& z : roots) {
        if (std::abs(z.imag()) > imag_tol * std::max(1.0, std::abs(z))) throw DomainError("complex root in a real-line comparison");
        r.push_back(std::abs(z.real()));
    }
    std::sort(r.begin(), r.end());
    ZeroStats st;
    st.count = static_cast<int>(r.size());
    const double n = static_cast<double>(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double f = density128_cdf(r[i]);
        st.ks_distance = std::max({st.ks_distance, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    double lo = 1.0;
    for (int k = 1; k <= 10; ++k) {
        const double hi = k == 10 ? std::numeric_limits<double>::infinity() : density128_quantile(0.1 * k);
        IntervalCount ic{lo, hi, 0, 0.1 * n};
        for (double x : r)
            if (x > lo && x <= hi) ++ic.count;
        st.intervals.push_back(ic);
        lo = hi;
    }
    return st;
}

ZeroStats zero_stats(const RootSet& roots, const DensityProfile& profile, double imag_tol)
{
    std::vector<cplx> all;
    for (const auto& r : roots.roots)
        for (int k = 0; k < r.multiplicity; ++k) all.push_back(r.approx);
    return zero_stats(all, profile, imag_tol);
}

}  // namespace hplab
