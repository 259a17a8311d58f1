#include "doctest.h"

#include "hplab/error.hpp"
#include "hplab/geometry.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

using namespace hplab;

namespace {

const double root3 = std::sqrt(3.0);
const cplx omega(-0.5, root3 / 2);

std::vector<cplx> cube_roots() { return {1.0, omega, std::conj(omega)}; }
std::vector<cplx> generic_triangle() { return {0.0, 1.0, cplx(0.0, 1.0)}; }

bool in_triangle(cplx p, const std::vector<cplx>& a)
{
    const auto side = [](cplx u, cplx v, cplx w) { return ((v - u) * std::conj(w - u)).imag(); };
    const double s1 = side(a[0], a[1], p), s2 = side(a[1], a[2], p), s3 = side(a[2], a[0], p);
    return (s1 > 0 && s2 > 0 && s3 > 0) || (s1 < 0 && s2 < 0 && s3 < 0);
}

struct Compact {
    ChebotarevPoint cp;
    TrajectorySet set;
};

Compact build(const std::vector<cplx>& a)
{
    Compact c{chebotarev_point(a), {}};
    c.set = trace_stahl(a, c.cp);
    return c;
}

cplx lambda_hat(const MeasureSample& s, cplx z)
{
    cplx sum = 0.0;
    for (std::size_t k = 0; k < s.nodes.size(); ++k) sum += s.weights[k] / (z - s.nodes[k]);
    return sum;
}

}  // namespace

TEST_CASE("chebotarev point of symmetric configurations")
{
    const auto cr = chebotarev_point(cube_roots());
    CHECK(std::abs(cr.v) < 1e-12);

    const auto eq = chebotarev_point({-1.0, 1.0, cplx(0.0, root3)});
    CHECK(std::abs(eq.v - cplx(0.0, 1.0 / root3)) < 1e-12);
}

TEST_CASE("chebotarev point of a generic triangle")
{
    const auto a = generic_triangle();
    const auto cp = chebotarev_point(a);
    CHECK(std::abs(cp.period_residuals[0]) < 1e-10);
    CHECK(std::abs(cp.period_residuals[1]) < 1e-10);
    CHECK(std::abs(cp.third_residual) < 1e-10);
    CHECK(in_triangle(cp.v, a));

    const cplx f = fermat_point(a);
    CHECK(in_triangle(f, a));
}

TEST_CASE("chebotarev point is affine equivariant")
{
    const std::vector<std::vector<cplx>> configs{generic_triangle(), {0.0, 1.0, cplx(0.3, 0.2)}, {2.0, cplx(-1.0, 0.5), cplx(0.2, -1.7)}};
    const std::vector<std::pair<cplx, cplx>> maps{{cplx(2.0, 1.0), cplx(-3.0, 0.5)}, {cplx(0.0, -0.5), cplx(1.0, 1.0)}, {-1.0, 0.0}};
    for (const auto& a : configs) {
        const cplx v = chebotarev_point(a).v;
        for (const auto& [s, t] : maps) {
            std::vector<cplx> b;
            for (const auto& p : a) b.push_back(s * p + t);
            CHECK(std::abs(chebotarev_point(b).v - (s * v + t)) < 1e-10 * std::abs(s));
        }
    }
}

TEST_CASE("chebotarev point rejects collinear input")
{
    CHECK_THROWS_AS(chebotarev_point({0.0, 1.0, 2.0}), DomainError);
}

TEST_CASE("cube roots give straight radial arcs")
{
    const auto c = build(cube_roots());
    REQUIRE(c.set.arcs.size() == 3);
    std::vector<int> hit;
    for (const auto& arc : c.set.arcs) {
        REQUIRE(arc.end_index >= 0);
        hit.push_back(arc.end_index);
        const cplx dir = c.set.qd.points[static_cast<std::size_t>(arc.end_index)];
        double dev = 0.0;
        for (const auto& p : arc.nodes) dev = std::max(dev, std::abs((p * std::conj(dir)).imag()));
        CHECK(dev < 1e-6);
        CHECK(arc.end_distance < 1e-8);
    }
    std::sort(hit.begin(), hit.end());
    CHECK(hit == std::vector<int>{0, 1, 2});
}

TEST_CASE("generic arcs reach each branch point once and form a tree")
{
    const auto c = build(generic_triangle());
    REQUIRE(c.set.arcs.size() == 3);
    std::vector<int> hit;
    for (const auto& arc : c.set.arcs) {
        hit.push_back(arc.end_index);
        CHECK(arc.end_kind == EndpointKind::branch_point);
        CHECK(arc.start_kind == EndpointKind::junction);
        CHECK(arc.end_distance < 1e-8);
        CHECK(std::abs(arc.nodes.front() - c.cp.v) < 1e-12);
    }
    std::sort(hit.begin(), hit.end());
    CHECK(hit == std::vector<int>{0, 1, 2});

    // Away from the junction the arcs keep a positive distance from each other.
    const double diam = c.set.qd.diameter();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            for (const auto& p : c.set.arcs[i].nodes)
                for (const auto& q : c.set.arcs[j].nodes)
                    if (std::abs(p - c.cp.v) > 0.05 * diam && std::abs(q - c.cp.v) > 0.05 * diam) gap = std::min(gap, std::abs(p - q));
    CHECK(gap > 1e-2 * diam);

    // Re Phi vanishes along every arc.
    for (const auto& arc : c.set.arcs)
        for (const auto& ph : arc.phi) CHECK(std::abs(ph.real()) < 1e-10);
}

TEST_CASE("trace is invariant under reordering the points")
{
    const auto a = generic_triangle();
    const auto base = build(a);
    const StahlMeasure m(base.set);
    std::vector<cplx> b{a[2], a[0], a[1]};
    const auto other = build(b);
    CHECK(std::abs(other.cp.v - base.cp.v) < 1e-12);
    double worst = 0.0;
    for (const auto& arc : other.set.arcs)
        for (const auto& p : arc.nodes) worst = std::max(worst, m.nearest(p).distance);
    CHECK(worst < 1e-7);
}

TEST_CASE("green function of a segment")
{
    const auto seg = segment_compact(-1.0, 1.0);
    const auto g2 = green_phi(seg, 2.0);
    CHECK(g2.g == doctest::Approx(std::log(2.0 + root3)).epsilon(1e-13));
    CHECK(std::abs(g2.phi_prime + 1.0 / root3) < 1e-13);

    for (cplx z : {cplx(0.3, 0.7), cplx(-2.5, -1.0), cplx(0.0, 4.0)}) {
        const cplx w = z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
        CHECK(green_phi(seg, z).g == doctest::Approx(std::log(std::abs(w))).epsilon(1e-12));
    }
    CHECK_THROWS_AS(green_phi(seg, 1.0), ClearanceError);
    CHECK_THROWS_AS(green_phi(seg, 0.25), ClearanceError);
}

TEST_CASE("green function behavior near S and at infinity")
{
    for (const auto& a : {cube_roots(), generic_triangle()}) {
        const auto c = build(a);
        const StahlMeasure m(c.set);
        for (int arc = 0; arc < 3; ++arc) {
            const cplx zeta = m.point(arc, 0.6);
            double prev = std::numeric_limits<double>::infinity();
            for (double eps : {1e-2, 1e-4, 1e-6}) {
                const double g = green_phi(c.set, zeta + cplx(0.0, eps) * std::abs(zeta - c.cp.v + 1.0)).g;
                CHECK(g > 0.0);
                CHECK(g < prev);
                prev = g;
            }
            CHECK(prev < 1e-5);
        }

        // phi' ~ -1/z at infinity and the Robin constant matches V on S.
        const cplx far = 1e6 * cplx(0.6, 0.8);
        const auto gv = green_phi(c.set, far);
        CHECK(std::abs(gv.phi_prime * far + 1.0) < 1e-5);
        const double robin = gv.g - std::log(std::abs(far));
        CHECK(std::abs(robin - m.potential(m.point(0, 0.5))) < 1e-4);

        // g + V is constant off S.
        const double level = green_phi(c.set, cplx(0.7, 1.3)).g + m.potential(cplx(0.7, 1.3));
        for (cplx z : {cplx(-2.0, 0.1), cplx(3.0, -4.0), cplx(0.2, -0.9)})
            CHECK(green_phi(c.set, z).g + m.potential(z) == doctest::Approx(level).epsilon(1e-10));
    }
}

TEST_CASE("equilibrium measure masses")
{
    const auto cr = build(cube_roots());
    const auto s = lambda_s_quadrature(cr.set, 64);
    CHECK(std::abs(s.total_mass - 1.0) < 1e-8);
    REQUIRE(s.arc_mass.size() == 3);
    for (double m : s.arc_mass) CHECK(std::abs(m - 1.0 / 3.0) < 1e-8);
    for (double w : s.weights) CHECK(w > 0.0);

    for (const auto& a : {generic_triangle(), std::vector<cplx>{1.0, -1.0, cplx(0.0, -1.0 / root3)}}) {
        const auto c = build(a);
        const auto t = lambda_s_quadrature(c.set, 64);
        CHECK(std::abs(t.total_mass - 1.0) < 1e-8);
        double w = 0.0;
        for (double x : t.weights) w += x;
        CHECK(std::abs(w - 1.0) < 1e-8);
    }

    const auto seg = lambda_s_quadrature(segment_compact(-1.0, 1.0), 32);
    CHECK(std::abs(seg.total_mass - 1.0) < 1e-12);
}

TEST_CASE("cauchy transform of the measure matches sqrt(q)")
{
    for (const auto& a : {cube_roots(), generic_triangle(), std::vector<cplx>{0.0, 1.0, cplx(0.3, 0.2)}}) {
        const auto c = build(a);
        const auto s = lambda_s_quadrature(c.set, 64);
        const StahlMeasure m(c.set);
        for (cplx z : {cplx(10.0), cplx(0.5, 2.0), cplx(-3.0, -1.0)}) {
            const cplx expect = -green_phi(c.set, z).phi_prime;
            CHECK(std::abs(lambda_hat(s, z) - expect) < 1e-6);
            CHECK(std::abs(m.cauchy(z) - expect) < 1e-10);
        }
    }
}

TEST_CASE("potential is constant on S")
{
    for (const auto& a : {cube_roots(), generic_triangle()}) {
        const auto c = build(a);
        const StahlMeasure m(c.set);
        const auto s = m.sample(16);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& z : s.nodes) {
            const double v = m.potential(z);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK((hi - lo) / std::abs(hi) < 1e-5);
    }
    const StahlMeasure seg(segment_compact(-1.0, 1.0));
    CHECK(seg.potential(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(seg.potential(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("chart interpolant agrees with the direct solve")
{
    const auto c = build(generic_triangle());
    const StahlMeasure m(c.set);
    for (int arc = 0; arc < 3; ++arc)
        for (double sigma = 0.02; sigma < 1.0; sigma += 0.07)
            CHECK(std::abs(m.point(arc, sigma) - m.solve_point(arc, m.arc_mass(arc) * std::pow(sigma, 3))) < 1e-12);
}

TEST_CASE("S-property")
{
    const StahlMeasure seg(segment_compact(-1.0, 1.0));
    const auto s0 = s_property_check(seg, 0.0, 1e-3);
    CHECK(s0.dplus == doctest::Approx(s0.dminus).epsilon(1e-12));
    CHECK(s0.dplus == doctest::Approx(-1.0).epsilon(1e-5));

    for (const auto& a : {cube_roots(), generic_triangle()}) {
        const auto c = build(a);
        const StahlMeasure m(c.set);
        for (int arc = 0; arc < 3; ++arc) {
            const cplx zeta = m.solve_point(arc, 0.5 * m.arc_mass(arc));
            const auto r = s_property_check(m, zeta, 1e-3);
            CHECK(std::abs(r.dplus - r.dminus) / std::abs(r.dplus) < 1e-3);
        }
    }

    const auto c = build(cube_roots());
    const StahlMeasure m(c.set);
    CHECK_THROWS_AS(s_property_check(m, m.point(0, 0.01), 1e-3), DomainError);
    CHECK_THROWS_AS(s_property_check(m, cplx(0.3, 0.3), 1e-3), DomainError);
}

TEST_CASE("trajectories export as JSON polylines")
{
    const auto c = build(generic_triangle());
    const auto j = nlohmann::json::parse(trajectories_json(c.set));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 3);
    for (std::size_t a = 0; a < 3; ++a) {
        REQUIRE(j[a].size() == c.set.arcs[a].nodes.size());
        for (std::size_t k = 0; k < j[a].size(); ++k) {
            REQUIRE(j[a][k].size() == 2);
            CHECK(j[a][k][0].get<double>() == c.set.arcs[a].nodes[k].real());
            CHECK(j[a][k][1].get<double>() == c.set.arcs[a].nodes[k].imag());
        }
    }
}
