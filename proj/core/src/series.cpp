#include "hplab/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hplab {

namespace {

std::vector<std::string> split_csv(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
    }
    return out;
}

QF parse_point(const std::string& tok)
{
    if (tok == "i") return QF::sqrt_of(-1);
    if (tok == "-i") return -QF::sqrt_of(-1);
    if (tok == "w") return QF(ratio(-1, 2), ratio(1, 2), -3);
    if (tok == "w2") return QF(ratio(-1, 2), ratio(-1, 2), -3);
    return QF::parse(tok);
}

double max_abs_point(const BranchConfig& cfg)
{
    double m = 0.0;
    for (const auto& a : cfg.points_c()) m = std::max(m, std::abs(a));
    return m;
}

double segment_distance(std::complex<double> p, std::complex<double> a, std::complex<double> b)
{
    const std::complex<double> d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

std::complex<double> unit(std::complex<double> z) { return z / std::abs(z); }

}  // namespace

void BranchConfig::validate(bool for_hermite_pade) const
{
    if (points.size() < 2) throw DomainError("a branch configuration needs at least two points");
    if (points.size() != exponents.size()) throw DomainError("points and exponents differ in length");
    (void)field();
    Rational sum(0);
    for (const auto& a : exponents) {
        sum += a;
        if (a.get_den() == 1) throw DomainError("integer exponent " + to_string(a));
        if (for_hermite_pade && abs(a) == Rational(1, 2)) throw DomainError("exponent +-1/2 is excluded for Hermite-Pade");
    }
    if (sum != 0) throw DomainError("exponents must sum to zero, got " + to_string(sum));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j]) throw DomainError("branch points must be distinct");
}

long BranchConfig::field() const
{
    long d = 0;
    for (const auto& a : points)
        if (!a.is_rational()) d = common_discriminant(d, a.d());
    return d;
}

std::vector<std::complex<double>> BranchConfig::points_c() const
{
    std::vector<std::complex<double>> out;
    for (const auto& a : points) out.push_back(a.to_complex());
    return out;
}

double BranchConfig::diameter() const
{
    const auto pts = points_c();
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, std::abs(pts[i] - pts[j]));
    return d;
}

BranchConfig BranchConfig::scaled(const Rational& k) const
{
    BranchConfig out = *this;
    for (auto& a : out.exponents) a *= k;
    return out;
}

BranchConfig BranchConfig::segment(const Rational& alpha)
{
    return BranchConfig{{QF(1), QF(-1)}, {alpha, Rational(-alpha)}};
}

BranchConfig BranchConfig::parse(const std::string& points, const std::string& exponents)
{
    BranchConfig cfg;
    for (const auto& tok : split_csv(points)) cfg.points.push_back(parse_point(tok));
    for (const auto& tok : split_csv(exponents)) cfg.exponents.push_back(parse_rational(tok));
    return cfg;
}

// ---------------------------------------------------------------------------

double clearance(const BranchConfig& cfg) { return 1e-3 * cfg.diameter(); }

std::complex<double> base_point(const BranchConfig& cfg, double direction_arg)
{
    const double r = 4.0 * max_abs_point(cfg) + 1.0;
    return std::polar(r, direction_arg);
}

BigComplex eval_f(const BranchConfig& cfg, const Path& path, const BigComplex& z)
{
    if (path.empty()) throw DomainError("empty evaluation path");
    const int bits = z.precision_bits();
    const int work = bits + 32;
    const auto pts = cfg.points_c();
    if (std::abs(path.front()) <= 2.0 * max_abs_point(cfg)) throw DomainError("path must start in the base region near infinity");

    // clearance along the double polyline, including the final leg to z
    const double clr = clearance(cfg);
    std::vector<std::complex<double>> poly = path;
    poly.push_back(z.to_complex());
    for (std::size_t k = 0; k + 1 < poly.size(); ++k)
        for (const auto& a : pts)
            if (segment_distance(a, poly[k], poly[k + 1]) < clr)
                throw ClearanceError("evaluation path passes within the clearance of a branch point");

    std::vector<BigComplex> a_big;
    for (const auto& a : cfg.points) a_big.push_back(embed(a, work));
    std::vector<BigComplex> verts;
    for (const auto& v : path) verts.emplace_back(v, work);
    verts.push_back(embed(z, work));

    const BigComplex one = from_rational_like(Rational(1), verts[0]);
    BigComplex logf(work);
    for (std::size_t j = 0; j < a_big.size(); ++j)
        logf += scale(log(one - a_big[j] / verts[0]), cfg.exponents[j]);
    for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
        if (abs(verts[k + 1] - verts[k]).is_zero()) continue;
        for (std::size_t j = 0; j < a_big.size(); ++j)
            logf += scale(log((verts[k + 1] - a_big[j]) / (verts[k] - a_big[j])), cfg.exponents[j]);
    }
    return embed(exp(logf), bits);
}

BigComplex eval_f(const BranchConfig& cfg, const BigComplex& z)
{
    const std::complex<double> zc = z.to_complex();
    const double theta = zc == 0.0 ? 0.0 : std::arg(zc);
    std::complex<double> base = base_point(cfg, theta);
    if (std::abs(base) < 2.0 * std::abs(zc)) base = std::polar(2.0 * std::abs(zc), theta);
    return eval_f(cfg, Path{base}, z);
}

// ---------------------------------------------------------------------------

namespace {

struct ArcLocation {
    std::size_t segment;  // zeta lies on nodes[segment] -> nodes[segment + 1]
    double distance;
};

ArcLocation locate(const Arc& arc, std::complex<double> zeta)
{
    ArcLocation best{0, std::abs(zeta - arc.nodes[0])};
    for (std::size_t k = 0; k + 1 < arc.nodes.size(); ++k) {
        const double d = segment_distance(zeta, arc.nodes[k], arc.nodes[k + 1]);
        if (d < best.distance) best = {k, d};
    }
    return best;
}

Path side_path(const BranchConfig& cfg, const Arc& arc, const ArcLocation& loc, std::complex<double> zeta, double h, double sigma)
{
    const auto& n = arc.nodes;
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> t0 = unit(n[1] - n[0]);

    std::complex<double> centroid(0.0, 0.0);
    for (const auto& a : cfg.points_c()) centroid += a;
    centroid /= static_cast<double>(cfg.size());
    std::complex<double> outward = n[0] - centroid;
    outward = std::abs(outward) > 1e-12 ? unit(outward) : -t0;
    const double reach = 4.0 * max_abs_point(cfg) + 1.0 + std::abs(n[0]);

    Path path;
    path.push_back(n[0] + reach * outward);
    path.push_back(n[0] - h * t0);
    path.push_back(n[0] + sigma * h * i * t0);
    for (std::size_t k = 1; k <= loc.segment; ++k) {
        const std::complex<double> t = unit(n[k + 1] - n[k - 1]);
        path.push_back(n[k] + sigma * h * i * t);
    }
    const std::complex<double> ts = unit(n[loc.segment + 1] - n[loc.segment]);
    path.push_back(zeta + sigma * h * i * ts);
    return path;
}

}  // namespace

BoundarySum boundary_sum(const BranchConfig& cfg, const Arc& arc, std::complex<double> zeta, const BigComplex& target)
{
    if (arc.nodes.size() < 2) throw DomainError("arc needs at least two nodes");
    const double diam = cfg.diameter();
    const double clr = clearance(cfg);
    const double to_start = std::abs(zeta - arc.nodes.front());
    const double to_end = std::abs(zeta - arc.nodes.back());
    if (to_start <= clr || to_end <= clr) throw DomainError("boundary point at an arc endpoint");
    const ArcLocation loc = locate(arc, zeta);
    if (loc.distance > 1e-6 * diam) throw DomainError("boundary point is not on the arc");

    const double h = std::min({0.01 * diam, 0.25 * to_start, 0.25 * to_end});
    BoundarySum out{BigComplex(target.precision_bits()), BigComplex(target.precision_bits()), BigComplex(target.precision_bits())};
    out.plus = eval_f(cfg, side_path(cfg, arc, loc, zeta, h, +1.0), target);
    out.minus = eval_f(cfg, side_path(cfg, arc, loc, zeta, h, -1.0), target);
    out.sum = out.plus + out.minus;
    return out;
}

BoundarySum boundary_sum(const BranchConfig& cfg, const Arc& arc, std::complex<double> zeta, int bits)
{
    return boundary_sum(cfg, arc, zeta, BigComplex(zeta, bits));
}

}  // namespace hplab
