#include "hplab/geometry.hpp"

#include "hplab/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hplab {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

cplx half_power(cplx z, double e)
{
    if (e == 0.5) return std::sqrt(z);
    if (e == -0.5) return 1.0 / std::sqrt(z);
    if (e == 0.0) return 1.0;
    return std::exp(e * std::log(z));
}

double segment_distance(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

/// Integral from `from` to `to` on the branch whose value at `from` is `s_from`.
struct Aligned {
    cplx value;
    cplx end_value;
};

Aligned aligned_step(const std::vector<RootFactor>& f, cplx from, cplx s_from, cplx to)
{
    const SegmentIntegral si = integrate_segment(f, from, to);
    const double sign = (si.start_value * std::conj(s_from)).real() >= 0.0 ? 1.0 : -1.0;
    return {sign * si.value, sign * si.end_value};
}

cplx aligned_sqrt(cplx q, cplx ref)
{
    const cplx s = std::sqrt(q);
    return (s * std::conj(ref)).real() >= 0.0 ? s : -s;
}

template <int N>
void gauss_rule(std::vector<double>& x, std::vector<double>& w)
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t k = 0; k < ab.size(); ++k) {
        x.push_back(ab[k]);
        w.push_back(wt[k]);
        if (ab[k] != 0.0) {
            x.push_back(-ab[k]);
            w.push_back(wt[k]);
        }
    }
}

/// Gauss-Legendre rule on [-1, 1].
void legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    switch (n) {
    case 8: gauss_rule<8>(x, w); break;
    case 16: gauss_rule<16>(x, w); break;
    case 32: gauss_rule<32>(x, w); break;
    case 48: gauss_rule<48>(x, w); break;
    case 64: gauss_rule<64>(x, w); break;
    case 96: gauss_rule<96>(x, w); break;
    case 128: gauss_rule<128>(x, w); break;
    default: throw DomainError("supported quadrature sizes are 8, 16, 32, 48, 64, 96, 128");
    }
}

}  // namespace

// ---------------------------------------------------------------------------

namespace {

bool inside_triangle(cplx p, cplx a, cplx b, cplx c)
{
    const auto side = [](cplx u, cplx v, cplx w) { return ((v - u) * std::conj(w - u)).imag(); };
    const double s1 = side(a, b, p), s2 = side(b, c, p), s3 = side(c, a, p);
    return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

SegmentIntegral integrate_direct(const std::vector<RootFactor>& factors, cplx p0, cplx p1, double tol);

}  // namespace

SegmentIntegral integrate_segment(const std::vector<RootFactor>& factors, cplx p0, cplx p1, double tol)
{
    const cplx d = p1 - p0;
    if (std::abs(d) == 0.0) {
        cplx val = 1.0;
        for (const auto& f : factors) val *= half_power(p0 - f.c, f.e);
        return {0.0, val, val};
    }
    const double eps = 1e-14 * std::max({1.0, std::abs(p0), std::abs(p1)});

    // A singular center close to the segment interior makes the integrand
    // nearly singular; route the path through the center instead.
    int near = -1;
    double best = 0.25 * std::abs(d);
    for (const auto& f : factors)
        if (std::abs(f.c - p0) <= eps) best = 0.0;
    for (std::size_t k = 0; k < factors.size(); ++k) {
        const cplx c = factors[k].c;
        if (std::abs(c - p0) <= eps || std::abs(c - p1) <= eps) continue;
        const double t = ((c - p0) * std::conj(d)).real() / std::norm(d);
        if (t <= 0.0 || t >= 1.0) continue;
        const double dist = std::abs(c - (p0 + t * d));
        if (dist < best) {
            best = dist;
            near = static_cast<int>(k);
        }
    }
    if (near >= 0) {
        const cplx c = factors[static_cast<std::size_t>(near)].c;
        bool clear = true;
        for (std::size_t k = 0; k < factors.size(); ++k)
            if (static_cast<int>(k) != near && std::abs(factors[k].c - c) > eps && inside_triangle(factors[k].c, p0, p1, c))
                clear = false;
        if (clear) {
            // Continuing from p0 through the triangle (p0, p1, c) fixes the branch
            // on both legs; align each leg at its midpoint.
            const auto continued = [&](cplx t) {
                cplx r = 1.0;
                for (const auto& f : factors) r *= half_power(p0 - f.c, f.e) * half_power((t - f.c) / (p0 - f.c), f.e);
                return r;
            };
            const auto leg = [&](cplx end) {
                SegmentIntegral l = integrate_direct(factors, c, end, tol);
                const cplx mid = 0.5 * (c + end);
                const cplx here = integrate_direct(factors, c, mid, tol).end_value;
                if ((here * std::conj(continued(mid))).real() < 0.0) {
                    l.value = -l.value;
                    l.end_value = -l.end_value;
                }
                return l;
            };
            const SegmentIntegral la = leg(p0), lb = leg(p1);
            SegmentIntegral out;
            out.value = lb.value - la.value;
            out.start_value = la.end_value;
            out.end_value = lb.end_value;
            return out;
        }
    }
    return integrate_direct(factors, p0, p1, tol);
}

namespace {

SegmentIntegral integrate_direct(const std::vector<RootFactor>& factors, cplx p0, cplx p1, double tol)
{
    const cplx d = p1 - p0;
    if (std::abs(d) == 0.0) {
        cplx val = 1.0;
        for (const auto& f : factors) val *= half_power(p0 - f.c, f.e);
        return {0.0, val, val};
    }
    const double eps = 1e-14 * std::max({1.0, std::abs(p0), std::abs(p1)});

    double e0 = 0.0, e1 = 0.0;
    cplx K = 1.0;
    std::vector<RootFactor> others;
    std::vector<cplx> denom;
    for (const auto& f : factors) {
        if (std::abs(f.c - p0) <= eps) {
            e0 += f.e;
            K *= half_power(d, f.e);
        } else if (std::abs(f.c - p1) <= eps) {
            e1 += f.e;
            K *= half_power(-d, f.e);
        } else {
            others.push_back(f);
            denom.push_back(p0 - f.c);
            K *= half_power(p0 - f.c, f.e);
        }
    }
    const double ps = 2.0 * e0 + 1.0, pc = 2.0 * e1 + 1.0;
    std::vector<cplx> step(others.size());
    for (std::size_t k = 0; k < others.size(); ++k) step[k] = d / denom[k];
    const auto integrand = [&](double theta) {
        const double sn = std::sin(theta), cs = std::cos(theta);
        cplx r = 1.0;
        for (std::size_t k = 0; k < others.size(); ++k) r *= half_power(1.0 + sn * sn * step[k], others[k].e);
        return 2.0 * std::pow(sn, ps) * std::pow(cs, pc) * r;
    };
    double err = 0.0;
    const cplx integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, pi / 2, 10, tol, &err);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    SegmentIntegral out;
    out.value = K * d * integral;
    out.start_value = e0 == 0.0 ? K : cplx(nan, nan);
    if (e1 == 0.0) {
        out.end_value = K;
        for (std::size_t k = 0; k < others.size(); ++k) out.end_value *= half_power(1.0 + step[k], others[k].e);
    } else {
        out.end_value = cplx(nan, nan);
    }
    return out;
}


}  // namespace
cplx QuadraticDifferential::q(cplx z) const
{
    cplx den = 1.0;
    for (const auto& a : points) den *= z - a;
    return (zero ? z - *zero : cplx(1.0)) / den;
}

double QuadraticDifferential::diameter() const
{
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, std::abs(points[i] - points[j]));
    return d;
}

std::vector<RootFactor> QuadraticDifferential::sqrt_factors(double zero_shift) const
{
    std::vector<RootFactor> f;
    for (const auto& a : points) f.push_back({a, -0.5});
    if (zero && 0.5 + zero_shift != 0.0) f.push_back({*zero, 0.5 + zero_shift});
    return f;
}

// ----- Chebotarev point --------------------------------------------------------

cplx fermat_point(const std::vector<cplx>& a)
{
    cplx x = 0.0;
    for (const auto& p : a) x += p;
    x /= static_cast<double>(a.size());
    double diam = 0.0;
    for (const auto& p : a)
        for (const auto& q : a) diam = std::max(diam, std::abs(p - q));
    for (int it = 0; it < 2000; ++it) {
        cplx num = 0.0;
        double den = 0.0;
        bool at_vertex = false;
        for (const auto& p : a) {
            const double r = std::abs(x - p);
            if (r < 1e-14 * diam) {
                at_vertex = true;
                break;
            }
            num += p / r;
            den += 1.0 / r;
        }
        if (at_vertex) break;
        const cplx next = num / den;
        const double change = std::abs(next - x);
        x = next;
        if (change < 1e-15 * diam) break;
    }
    return x;
}

namespace {

struct Periods {
    std::array<cplx, 3> value;
    std::array<cplx, 3> derivative;  // d/dv
};

Periods periods(const std::vector<cplx>& a, cplx v)
{
    QuadraticDifferential qd{a, v};
    const auto f = qd.sqrt_factors();
    const auto df = qd.sqrt_factors(-1.0);
    Periods p;
    for (std::size_t j = 0; j < 3; ++j) {
        p.value[j] = integrate_segment(f, v, a[j]).value;
        p.derivative[j] = -0.5 * integrate_segment(df, v, a[j]).value;
    }
    return p;
}

}  // namespace

ChebotarevPoint chebotarev_point(const std::vector<cplx>& a, double tol, int max_iterations)
{
    if (a.size() != 3) throw DomainError("the Chebotarev point needs exactly three points");
    double diam = 0.0;
    for (const auto& p : a)
        for (const auto& q : a) diam = std::max(diam, std::abs(p - q));
    const double area = 0.5 * std::abs(((a[1] - a[0]) * std::conj(a[2] - a[0])).imag());
    if (diam == 0.0 || area < 1e-8 * diam * diam) throw DomainError("points are collinear within tolerance");

    ChebotarevPoint out;
    cplx v = fermat_point(a);
    // keep the start off the vertices when an angle reaches 120 degrees
    cplx centroid = (a[0] + a[1] + a[2]) / 3.0;
    for (const auto& p : a)
        if (std::abs(v - p) < 1e-3 * diam) v = 0.9 * v + 0.1 * centroid;

    const auto residual = [](const Periods& p) { return std::hypot(p.value[0].real(), p.value[1].real()); };
    Periods cur = periods(a, v);
    const double scale = std::abs(cur.value[0]) + std::abs(cur.value[1]);
    int it = 0;
    for (; it < max_iterations && residual(cur) > tol * scale; ++it) {
        const cplx d0 = cur.derivative[0], d1 = cur.derivative[1];
        // Re(D dv) = Re D dx - Im D dy
        const double j00 = d0.real(), j01 = -d0.imag(), j10 = d1.real(), j11 = -d1.imag();
        const double det = j00 * j11 - j01 * j10;
        if (det == 0.0) throw ConvergenceError("singular Jacobian in the Chebotarev solve");
        const double f0 = cur.value[0].real(), f1 = cur.value[1].real();
        const cplx step(-(j11 * f0 - j01 * f1) / det, -(-j10 * f0 + j00 * f1) / det);
        double lambda = 1.0;
        Periods next;
        for (;;) {
            next = periods(a, v + lambda * step);
            if (residual(next) < residual(cur) || lambda < 1e-8) break;
            lambda /= 2;
        }
        if (residual(next) >= residual(cur)) throw ConvergenceError("Chebotarev Newton iteration stalled");
        v += lambda * step;
        cur = next;
        if (std::abs(lambda * step) < 1e-16 * diam) break;
    }
    if (residual(cur) > std::max(tol * scale, 1e-11 * scale)) throw ConvergenceError("Chebotarev Newton iteration did not converge");
    out.v = v;
    out.period_residuals = {cur.value[0].real(), cur.value[1].real()};
    out.third_residual = cur.value[2].real();
    out.iterations = it;
    return out;
}

// ----- trajectories ------------------------------------------------------------

namespace {

TrajectoryArc trace_arc(const QuadraticDifferential& qd, double theta, const TraceOptions& opts, TrajectorySet& stats)
{
    const double diam = qd.diameter();
    const cplx v = *qd.zero;
    const auto f = qd.sqrt_factors();

    TrajectoryArc arc;
    arc.start_kind = EndpointKind::junction;
    arc.nodes.push_back(v);
    arc.sqrt_q.push_back(0.0);
    arc.phi.push_back(0.0);

    cplx z = v + std::polar(opts.start_radius * diam, theta);
    SegmentIntegral first = integrate_segment(f, v, z);
    cplx s = first.end_value;
    cplx phi = first.value;
    const cplx heading = std::polar(1.0, theta);
    const double orient = ((heading * std::conj(I * std::conj(s))).real() >= 0.0) ? 1.0 : -1.0;

    const auto project = [&](cplx& zz, cplx& ss, cplx& pp) {
        for (int k = 0; k < 3; ++k) {
            const cplx n = std::conj(ss) / std::abs(ss);
            const double delta = -pp.real() / std::abs(ss);
            if (std::abs(delta) < 1e-15 * diam) break;
            const Aligned inc = aligned_step(f, zz, ss, zz + delta * n);
            zz += delta * n;
            pp += inc.value;
            ss = inc.end_value;
        }
    };
    project(z, s, phi);

    const auto direction = [&](cplx zz, cplx ref) {
        const cplx sq = aligned_sqrt(qd.q(zz), ref);
        return orient * I * std::conj(sq) / std::abs(sq);
    };

    double closest = std::numeric_limits<double>::infinity();
    for (int step = 0; step < opts.max_steps; ++step) {
        arc.nodes.push_back(z);
        arc.sqrt_q.push_back(s);
        arc.phi.push_back(phi);

        int j = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < qd.points.size(); ++k)
            if (std::abs(z - qd.points[k]) < dist) dist = std::abs(z - qd.points[k]), j = static_cast<int>(k);
        const bool arrived = dist < opts.end_tolerance * diam;
        // a trajectory that grazes a point and turns away has missed it
        const bool receding = closest < 1e-5 * diam && dist > closest;
        if (arrived || receding) {
            const cplx a = qd.points[static_cast<std::size_t>(j)];
            const Aligned last = aligned_step(f, z, s, a);
            arc.end_index = j;
            arc.end_distance = std::min(dist, closest);
            arc.end_kind = EndpointKind::branch_point;
            arc.nodes.push_back(a);
            arc.sqrt_q.push_back(0.0);
            arc.phi.push_back(phi + last.value);
            return arc;
        }
        closest = std::min(closest, dist);

        const double h = std::min(opts.step * diam, 0.3 * dist);
        const cplx k1 = direction(z, s);
        const cplx k2 = direction(z + 0.5 * h * k1, s);
        const cplx k3 = direction(z + 0.5 * h * k2, s);
        const cplx k4 = direction(z + h * k3, s);
        cplx znew = z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const Aligned inc = aligned_step(f, z, s, znew);
        cplx snew = inc.end_value;
        cplx phinew = phi + inc.value;
        project(znew, snew, phinew);

        const double len = std::abs(znew - z);
        stats.min_step = stats.steps == 0 ? len : std::min(stats.min_step, len);
        stats.max_step = std::max(stats.max_step, len);
        ++stats.steps;
        z = znew;
        s = snew;
        phi = phinew;
    }
    arc.end_kind = EndpointKind::open;
    throw ConvergenceError("trajectory did not reach a branch point within the step budget");
}

}  // namespace

TrajectorySet trace_stahl(const std::vector<cplx>& a, const ChebotarevPoint& cp, const TraceOptions& opts)
{
    if (a.size() != 3) throw DomainError("trace_stahl needs three points");
    TrajectorySet set;
    set.qd = QuadraticDifferential{a, cp.v};
    cplx av = 1.0;
    for (const auto& p : a) av *= cp.v - p;
    for (int k = 0; k < 3; ++k) {
        const double theta = pi / 3 + std::arg(av) / 3 + 2 * pi * k / 3;
        set.arcs.push_back(trace_arc(set.qd, theta, opts, set));
    }

    std::vector<int> hit(3, 0);
    for (const auto& arc : set.arcs) ++hit[static_cast<std::size_t>(arc.end_index)];
    for (int h : hit)
        if (h != 1) throw InconsistencyError("trajectories do not end at distinct branch points");

    const double diam = set.qd.diameter();
    for (std::size_t i = 0; i < set.arcs.size(); ++i)
        for (std::size_t j = i + 1; j < set.arcs.size(); ++j)
            for (const auto& p : set.arcs[i].nodes) {
                if (std::abs(p - cp.v) < 0.05 * diam) continue;
                const auto& other = set.arcs[j].nodes;
                for (std::size_t k = 0; k + 1 < other.size(); ++k)
                    if (segment_distance(p, other[k], other[k + 1]) < 1e-6 * diam)
                        throw InconsistencyError("trajectories meet away from the junction");
            }
    return set;
}

TrajectorySet segment_compact(cplx a1, cplx a2)
{
    TrajectorySet set;
    set.qd = QuadraticDifferential{{a1, a2}, std::nullopt};
    const auto f = set.qd.sqrt_factors();
    TrajectoryArc arc;
    arc.start_kind = EndpointKind::branch_point;
    arc.end_kind = EndpointKind::branch_point;
    arc.end_index = 1;
    const int n = 64;
    arc.nodes.push_back(a1);
    arc.sqrt_q.push_back(0.0);
    arc.phi.push_back(0.0);
    const SegmentIntegral first = integrate_segment(f, a1, a1 + (a2 - a1) / static_cast<double>(n));
    arc.nodes.push_back(a1 + (a2 - a1) / static_cast<double>(n));
    arc.sqrt_q.push_back(first.end_value);
    arc.phi.push_back(first.value);
    for (int k = 2; k <= n; ++k) {
        const cplx to = k == n ? a2 : a1 + (a2 - a1) * (static_cast<double>(k) / n);
        const Aligned inc = aligned_step(f, arc.nodes.back(), arc.sqrt_q.back(), to);
        arc.phi.push_back(arc.phi.back() + inc.value);
        arc.sqrt_q.push_back(k == n ? cplx(0.0) : inc.end_value);
        arc.nodes.push_back(to);
    }
    set.arcs.push_back(std::move(arc));
    return set;
}

std::string trajectories_json(const TrajectorySet& set)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& arc : set.arcs) {
        nlohmann::json line = nlohmann::json::array();
        for (const auto& p : arc.nodes) line.push_back({p.real(), p.imag()});
        out.push_back(std::move(line));
    }
    return out.dump();
}

// ----- Green's function --------------------------------------------------------

GreenValue green_phi(const TrajectorySet& set, cplx z)
{
    const auto& qd = set.qd;
    const double diam = qd.diameter();
    for (const auto& a : qd.points)
        if (std::abs(z - a) < 1e-9 * diam) throw ClearanceError("point coincides with a branch point");

    std::vector<cplx> singular = qd.points;
    if (qd.zero) singular.push_back(*qd.zero);
    std::size_t best = 0;
    double best_clear = -1.0;
    for (std::size_t j = 0; j < qd.points.size(); ++j) {
        double clear = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < singular.size(); ++k)
            if (k != j) clear = std::min(clear, segment_distance(singular[k], qd.points[j], z));
        if (clear > best_clear) best_clear = clear, best = j;
    }
    const SegmentIntegral si = integrate_segment(qd.sqrt_factors(), qd.points[best], z);
    const double u = si.value.real();
    if (std::abs(u) < 1e-13 * std::max(1.0, std::abs(si.value))) throw ClearanceError("point lies on the compact");
    GreenValue out;
    out.g = std::abs(u);
    out.phi_prime = -(u >= 0.0 ? si.end_value : -si.end_value);
    return out;
}

// ----- equilibrium measure -----------------------------------------------------

StahlMeasure::StahlMeasure(const TrajectorySet& set, int chart_degree) : set_(set)
{
    if (chart_degree < 8) throw DomainError("chart degree too small");
    for (int i = 0; i <= chart_degree; ++i) cheb_nodes_.push_back(0.5 * (1.0 - std::cos(pi * i / chart_degree)));
    for (int a = 0; a < static_cast<int>(set_.arcs.size()); ++a) {
        const auto& arc = set_.arcs[static_cast<std::size_t>(a)];
        Chart c;
        c.exponent = arc.start_kind == EndpointKind::junction ? 3 : 1;
        const cplx end = arc.phi.back();
        c.mass = std::abs(end) / pi;
        c.phi_sign = end / (I * pi * c.mass);
        charts_.push_back(c);
    }
    for (int a = 0; a < static_cast<int>(charts_.size()); ++a) {
        auto& c = charts_[static_cast<std::size_t>(a)];
        for (double s : cheb_nodes_) c.values.push_back(solve_point(a, c.mass * std::pow(s, c.exponent)));
    }
}

double StahlMeasure::total_mass() const
{
    double m = 0.0;
    for (const auto& c : charts_) m += c.mass;
    return m;
}

cplx StahlMeasure::solve_point(int a, double m) const
{
    const auto& arc = set_.arcs[static_cast<std::size_t>(a)];
    const auto& c = charts_[static_cast<std::size_t>(a)];
    if (m <= 0.0) return arc.nodes.front();
    if (m >= c.mass) return arc.nodes.back();
    const cplx to_mass = 1.0 / (c.phi_sign * I * pi);
    const auto coord = [&](cplx phi) { return (phi * to_mass).real(); };

    const std::size_t last = arc.nodes.size() - 1;
    std::size_t k = 0;
    while (k + 1 < last && coord(arc.phi[k + 1]) < m) ++k;
    const double t0 = coord(arc.phi[k]), t1 = coord(arc.phi[k + 1]);
    const double frac = t1 > t0 ? (m - t0) / (t1 - t0) : 0.5;
    cplx zeta = arc.nodes[k] + frac * (arc.nodes[k + 1] - arc.nodes[k]);

    std::size_t b = k;
    if (b == 0) b = 1;
    if (b >= last) b = last - 1;
    const double diam = set_.qd.diameter();
    const auto f = set_.qd.sqrt_factors();
    const cplx target = c.phi_sign * I * pi * m;
    for (int it = 0; it < 60; ++it) {
        const Aligned inc = aligned_step(f, arc.nodes[b], arc.sqrt_q[b], zeta);
        const cplx delta = (arc.phi[b] + inc.value - target) / inc.end_value;
        double lambda = 1.0;
        // keep the iterate near the arc
        while (std::abs(lambda * delta) > 0.1 * diam) lambda /= 2;
        zeta -= lambda * delta;
        if (std::abs(delta) < 1e-15 * diam) break;
    }
    return zeta;
}

cplx StahlMeasure::point(int a, double sigma) const
{
    const auto& vals = charts_[static_cast<std::size_t>(a)].values;
    const std::size_t n = cheb_nodes_.size();
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = sigma - cheb_nodes_[i];
        if (diff == 0.0) return vals[i];
        double w = (i % 2 == 0) ? 1.0 : -1.0;
        if (i == 0 || i + 1 == n) w *= 0.5;
        w /= diff;
        num += w * vals[i];
        den += w;
    }
    return num / den;
}

MeasureSample StahlMeasure::sample(int nodes_per_arc) const
{
    std::vector<double> x, w;
    legendre(nodes_per_arc, x, w);
    MeasureSample out;
    for (int a = 0; a < arc_count(); ++a) {
        const auto& c = charts_[static_cast<std::size_t>(a)];
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double s = 0.5 * (x[k] + 1.0);
            out.nodes.push_back(point(a, s));
            out.weights.push_back(0.5 * w[k] * c.mass * c.exponent * std::pow(s, c.exponent - 1));
            out.arc.push_back(a);
        }
        out.arc_mass.push_back(c.mass);
        out.total_mass += c.mass;
    }
    return out;
}

StahlMeasure::Nearest StahlMeasure::nearest_on(int a, cplx z) const
{
    const int grid = 256;
    double best_s = 0.0, best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double s = static_cast<double>(i) / grid;
        const double d = std::abs(z - point(a, s));
        if (d < best_d) best_d = d, best_s = s;
    }
    double lo = std::max(0.0, best_s - 1.0 / grid), hi = std::min(1.0, best_s + 1.0 / grid);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
        const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
        if (std::abs(z - point(a, m1)) < std::abs(z - point(a, m2)))
            hi = m2;
        else
            lo = m1;
    }
    const double s = 0.5 * (lo + hi);
    const double d = std::abs(z - point(a, s));
    if (d < best_d) best_d = d, best_s = s;
    return {a, best_s, best_d};
}

StahlMeasure::Nearest StahlMeasure::nearest(cplx z) const
{
    Nearest best{0, 0.0, std::numeric_limits<double>::infinity()};
    for (int a = 0; a < arc_count(); ++a) {
        const Nearest n = nearest_on(a, z);
        if (n.distance < best.distance) best = n;
    }
    return best;
}

double StahlMeasure::potential(cplx z) const
{
    const double diam = set_.qd.diameter();
    boost::math::quadrature::tanh_sinh<double> ts(12);
    double v = 0.0;
    for (int a = 0; a < arc_count(); ++a) {
        const auto& c = charts_[static_cast<std::size_t>(a)];
        const auto density = [&](double s) { return c.mass * c.exponent * std::pow(s, c.exponent - 1); };
        const auto integrand = [&](double s) {
            const double r = std::abs(z - point(a, s));
            return r > 0.0 ? -std::log(r) * density(s) : 0.0;
        };
        const Nearest near = nearest_on(a, z);
        if (near.distance > 0.2 * diam) {
            double err = 0.0;
            v += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 10, 1e-13, &err);
            continue;
        }
        if (near.sigma > 0.0) v += ts.integrate(integrand, 0.0, near.sigma, 1e-13);
        if (near.sigma < 1.0) v += ts.integrate(integrand, near.sigma, 1.0, 1e-13);
    }
    return v;
}

cplx StahlMeasure::cauchy(cplx z) const
{
    cplx out = 0.0;
    for (int a = 0; a < arc_count(); ++a) {
        const auto& c = charts_[static_cast<std::size_t>(a)];
        const auto integrand = [&](double s) { return c.mass * c.exponent * std::pow(s, c.exponent - 1) / (z - point(a, s)); };
        const Nearest near = nearest_on(a, z);
        double err = 0.0;
        using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
        if (near.sigma > 0.0) out += GK::integrate(integrand, 0.0, near.sigma, 15, 1e-13, &err);
        if (near.sigma < 1.0) out += GK::integrate(integrand, near.sigma, 1.0, 15, 1e-13, &err);
    }
    return out;
}

MeasureSample lambda_s_quadrature(const TrajectorySet& set, int nodes_per_arc)
{
    const MeasureSample s = StahlMeasure(set).sample(nodes_per_arc);
    for (double w : s.weights)
        if (!(w > 0.0)) throw InconsistencyError("non-positive quadrature weight");
    return s;
}

// ----- S-property ----------------------------------------------------------------

SPropertyResult s_property_check(const StahlMeasure& measure, cplx zeta, double h)
{
    const double diam = measure.trajectories().qd.diameter();
    const auto near = measure.nearest(zeta);
    if (near.distance > 1e-6 * diam) throw DomainError("point is not on S");

    // arclength position along the arc
    const int grid = 400;
    double total = 0.0, before = 0.0;
    cplx prev = measure.point(near.arc, 0.0);
    for (int i = 1; i <= grid; ++i) {
        const double s = static_cast<double>(i) / grid;
        const cplx p = measure.point(near.arc, s);
        total += std::abs(p - prev);
        if (s <= near.sigma) before += std::abs(p - prev);
        prev = p;
    }
    if (before < 0.1 * total || before > 0.9 * total) throw DomainError("point too close to an arc endpoint");

    const cplx z0 = measure.point(near.arc, near.sigma);
    const double ds = 1e-6;
    const cplx tangent = measure.point(near.arc, std::min(1.0, near.sigma + ds)) - measure.point(near.arc, std::max(0.0, near.sigma - ds));
    const cplx normal = I * tangent / std::abs(tangent);

    const double v0 = measure.potential(z0);
    const auto one_sided = [&](double sign, double step) {
        const double v1 = measure.potential(z0 + sign * step * normal);
        const double v2 = measure.potential(z0 + 2.0 * sign * step * normal);
        return (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * step);
    };
    SPropertyResult out;
    out.normal = normal;
    out.dplus = one_sided(1.0, h);
    out.dminus = one_sided(-1.0, h);
    const double check_plus = one_sided(1.0, h / 2);
    const double check_minus = one_sided(-1.0, h / 2);
    if (std::abs(check_plus - out.dplus) > 1e-2 * std::abs(out.dplus) || std::abs(check_minus - out.dminus) > 1e-2 * std::abs(out.dminus))
        throw ConvergenceError("finite-difference step too small for the quadrature accuracy");
    return out;
}

}  // namespace hplab
