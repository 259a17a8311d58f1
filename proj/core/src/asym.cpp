#include "hplab/asym.hpp"

#include "hplab/approx.hpp"
#include "hplab/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hplab {

TrajectorySet stahl_compact(const BranchConfig& cfg)
{
    const auto pts = cfg.points_c();
    if (pts.size() == 2) return segment_compact(pts[0], pts[1]);
    if (pts.size() == 3) return trace_stahl(pts, chebotarev_point(pts));
    throw DomainError("the compact is available for two or three branch points");
}

EquilibriumPotential::EquilibriumPotential(TrajectorySet set) : set_(std::move(set))
{
    const StahlMeasure m(set_);
    gamma_ = m.potential(m.point(0, 0.5));
}

double EquilibriumPotential::operator()(cplx z) const { return gamma_ - green_phi(set_, z).g; }

Path path_from_infinity(const BranchConfig& cfg, const TrajectorySet& set, cplx z)
{
    double reach = 0.0;
    for (const auto& a : cfg.points_c()) reach = std::max(reach, std::abs(a));
    const double far = 4.0 * reach + 1.0;
    const double diam = set.qd.diameter();

    std::vector<cplx> climb{z};
    cplx w = z;
    for (int it = 0; std::abs(w) <= far; ++it) {
        if (it > 10000) throw ConvergenceError("gradient path did not reach the base region");
        const GreenValue gv = green_phi(set, w);
        const cplx grad = std::conj(-gv.phi_prime);
        const double slope = std::abs(grad);
        const double h = std::min(0.5 * gv.g / slope, 0.25 * (std::abs(w) + diam));
        w += h * grad / slope;
        climb.push_back(w);
    }
    Path path;
    path.push_back(std::polar(std::max(far, 2.0 * std::abs(w)), std::arg(w)));
    for (auto it = climb.rbegin(); it != climb.rend() - 1; ++it) path.push_back(*it);
    return path;
}

cplx arc_probe(const Arc& arc, double fraction, double offset)
{
    const auto& nd = arc.nodes;
    if (nd.size() < 2) throw DomainError("arc needs at least two nodes");
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("arc fraction must lie in (0, 1)");
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < nd.size(); ++k) total += std::abs(nd[k + 1] - nd[k]);
    double want = fraction * total;
    for (std::size_t k = 0; k + 1 < nd.size(); ++k) {
        const cplx d = nd[k + 1] - nd[k];
        const double len = std::abs(d);
        if (want <= len || k + 2 == nd.size()) {
            const double t = len > 0.0 ? std::min(want / len, 1.0) : 0.0;
            return nd[k] + t * d + cplx(0.0, offset) * d / len;
        }
        want -= len;
    }
    return nd.back();
}

std::vector<Arc> stahl_arcs(const TrajectorySet& set)
{
    std::vector<Arc> out;
    for (const auto& arc : set.arcs) {
        Arc a{arc.nodes};
        if (arc.start_kind == EndpointKind::junction) std::reverse(a.nodes.begin(), a.nodes.end());
        out.push_back(std::move(a));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
T field_zero(const BranchConfig& cfg)
{
    if constexpr (std::is_same_v<T, QF>) {
        return QF(Rational(0), Rational(0), cfg.field());
    } else {
        (void)cfg;
        return T(0);
    }
}

template <class T>
BigComplex eval_big(const Poly<T>& p, const BigComplex& z)
{
    if (p.is_zero()) return BigComplex(z.precision_bits());
    return p.eval(z);
}

/// sum |c_k| |z|^k, the natural scale for judging cancellation.
template <class T>
double eval_scale(const Poly<T>& p, cplx z)
{
    double acc = 0.0;
    const double r = std::abs(z);
    for (int k = p.degree(); k >= 0; --k) acc = acc * r + std::abs(to_complex(p[k]));
    return acc;
}

template <class T>
PadeAsymTable pade_table(const BranchConfig& cfg, cplx z, const std::vector<int>& n_list, int bits)
{
    const EquilibriumPotential pot(stahl_compact(cfg));
    PadeAsymTable out;
    out.z = z;
    out.potential = pot(z);
    out.p_limit = std::exp(-out.potential);
    out.t_limit = std::exp(out.potential);

    const Path path = path_from_infinity(cfg, pot.compact(), z);
    const BigComplex zb(z, bits);
    const BigComplex fz = eval_f(cfg, path, zb);

    const int n_max = *std::max_element(n_list.begin(), n_list.end());
    const Laurent<T> f = expand_f(cfg, 2 * n_max + 10, field_zero<T>(cfg));
    for (int n : n_list) {
        if (n < 1) throw DomainError("Pade index must be positive");
        const HPSolution<T> sol = pade_solve(f, n);
        if (!normality_check(sol).normal) throw DomainError("abnormal Pade index n = " + std::to_string(n));
        const Poly<T>& p0 = sol.polys[0];
        const Poly<T>& p1 = sol.polys[1];
        const BigComplex lead = embed(p1.lead(), bits);
        const BigComplex cn = embed(sol.remainder.coeff(-(n + 1)), bits);

        const BigComplex a = eval_big(p0, zb);
        const BigComplex b = eval_big(p1, zb) * fz;
        const BigComplex t = a + b;
        const double size = std::max(abs(a).to_double(), abs(b).to_double());
        const double tn = abs(t).to_double();
        if (!(tn > std::ldexp(size, -(bits - 64)))) throw ConvergenceError("remainder cancels below the working precision at n = " + std::to_string(n));

        PadeAsymRow row;
        row.n = n;
        row.p_root = std::pow(abs(eval_big(p1, zb) / lead).to_double(), 1.0 / n);
        row.t_root = std::pow(abs(t / cn).to_double(), 1.0 / n);
        out.rows.push_back(row);
    }
    return out;
}

cplx arc_foot(const Arc& arc, cplx z)
{
    const auto& nd = arc.nodes;
    if (nd.size() < 2) throw DomainError("arc needs at least two nodes");
    cplx best = nd.front();
    for (std::size_t k = 0; k + 1 < nd.size(); ++k) {
        const cplx d = nd[k + 1] - nd[k];
        const double len2 = std::norm(d);
        const double t = len2 > 0.0 ? std::clamp(((z - nd[k]) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
        const cplx c = nd[k] + t * d;
        if (std::abs(c - z) < std::abs(best - z)) best = c;
    }
    return best;
}

}  // namespace

template <class T>
RatioCheck hp_ratio_check(const BranchConfig& cfg, const HPSolution<T>& sol, cplx probe, const Arc& arc, int bits)
{
    if (sol.kind() != 3) throw DomainError("Hermite-Pade solution expected");
    const int n = sol.n;
    const Poly<T>& q1 = sol.polys[1];
    const Poly<T>& q2 = sol.polys[2];
    RatioCheck out;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    if (!std::isfinite(probe.real()) || !std::isfinite(probe.imag())) {
        const T l2 = q2[n];
        if (is_zero(l2)) throw ClearanceError("Q_{n,2} has no degree-n term");
        out.ratio = to_complex(q1[n] / l2);
        out.target = cplx(nan, nan);
        out.relerr = nan;
        return out;
    }

    const BigComplex zb(probe, bits);
    const BigComplex v2 = eval_big(q2, zb);
    if (!(abs(v2).to_double() > std::ldexp(eval_scale(q2, probe), -bits / 2))) throw ClearanceError("Q_{n,2} vanishes at the probe");
    const BigComplex r = eval_big(q1, zb) / v2;

    // Continue f+ + f- from the foot of the probe on the arc.
    const BoundarySum bs = boundary_sum(cfg, arc, arc_foot(arc, probe), zb);

    out.ratio = r.to_complex();
    out.target = -bs.sum.to_complex();
    out.relerr = abs(r + bs.sum).to_double() / abs(bs.sum).to_double();
    return out;
}

template RatioCheck hp_ratio_check(const BranchConfig&, const HPSolution<Rational>&, cplx, const Arc&, int);
template RatioCheck hp_ratio_check(const BranchConfig&, const HPSolution<QF>&, cplx, const Arc&, int);

namespace {

template <class T>
RatioCheck ratio_check(const BranchConfig& cfg, int n, cplx probe, const Arc& arc, int bits)
{
    const Laurent<T> f = expand_f(cfg, 3 * n + 10, field_zero<T>(cfg));
    return hp_ratio_check(cfg, hp_solve(f, f * f, n), probe, arc, bits);
}

}  // namespace

PadeAsymTable pade_root_asym_check(const BranchConfig& cfg, cplx z, const std::vector<int>& n_list, int bits)
{
    if (n_list.empty()) throw DomainError("empty index list");
    if (bits < 64) throw DomainError("precision below 64 bits");
    cfg.validate();
    return cfg.rational_points() ? pade_table<Rational>(cfg, z, n_list, bits) : pade_table<QF>(cfg, z, n_list, bits);
}

RatioCheck hp_ratio_check(const BranchConfig& cfg, int n, cplx probe, const Arc& arc, int bits)
{
    if (n < 1) throw DomainError("index must be positive");
    cfg.validate(true);
    return cfg.rational_points() ? ratio_check<Rational>(cfg, n, probe, arc, bits) : ratio_check<QF>(cfg, n, probe, arc, bits);
}

// ---------------------------------------------------------------------------

namespace {

using Roots = std::array<cplx, 3>;

constexpr std::array<std::array<int, 3>, 6> kPerms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

double min_gap(const Roots& r)
{
    return std::min({std::abs(r[0] - r[1]), std::abs(r[0] - r[2]), std::abs(r[1] - r[2])});
}

/// The permutation of `found` closest to `predicted`, with its worst deviation.
std::pair<Roots, double> match(const Roots& found, const Roots& predicted)
{
    Roots best{};
    double best_err = std::numeric_limits<double>::infinity();
    for (const auto& perm : kPerms) {
        double e = 0.0;
        for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(found[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] - predicted[static_cast<std::size_t>(j)]));
        if (e < best_err) {
            best_err = e;
            for (int j = 0; j < 3; ++j) best[static_cast<std::size_t>(j)] = found[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
        }
    }
    return {best, best_err};
}

class Tracker {
public:
    Tracker(const CharacteristicCubic& cubic, cplx z0, const LgOptions& opts) : cubic_(&cubic), opts_(opts), z_(z0), p_(roots_at(z0))
    {
        guard(p_);
        note_vieta(z_, p_);
    }

    cplx z() const { return z_; }
    const Roots& roots() const { return p_; }
    Roots phi;
    Roots amp{};
    double vieta = 0.0;
    int steps = 0;

    void advance_to(cplx target)
    {
        const double total = std::abs(target - z_);
        if (total == 0.0) return;
        double h = std::min(opts_.max_step, total);
        while (std::abs(target - z_) > 0.0) {
            const cplx rest = target - z_;
            const double left = std::abs(rest);
            const bool last = h >= left;
            const cplx dz = last ? rest : rest * (h / left);
            if (try_step(dz, last ? target : z_ + dz)) {
                if (last) break;
                h = std::min(opts_.max_step, 1.5 * h);
            } else {
                h *= 0.5;
                if (h < 1e-14 * (1.0 + std::abs(z_))) throw ClearanceError("roots of the cubic cannot be separated along the path");
            }
        }
    }

private:
    Roots derivatives(cplx z, const Roots& p) const
    {
        Roots d;
        for (std::size_t j = 0; j < 3; ++j) d[j] = cubic_->root_derivative(z, p[j]);
        return d;
    }

    Roots amplitude_integrand(cplx z, const Roots& p) const
    {
        const Roots x = opts_.variant == AmplitudeVariant::second_derivative ? derivatives(z, p) : p;
        Roots out;
        for (std::size_t j = 0; j < 3; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < 3; ++k)
                if (k != j) s += x[j] / (p[j] - p[k]);
            out[j] = -s;
        }
        return out;
    }

    Roots roots_at(cplx z) const
    {
        try {
            return cubic_->roots(z);
        } catch (const DomainError&) {
            throw ClearanceError("path meets a singular point of the cubic");
        }
    }

    void guard(const Roots& p) const
    {
        double scale = 1.0;
        for (const auto& x : p) {
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw ClearanceError("root of the cubic escapes to infinity");
            scale = std::max(scale, std::abs(x));
        }
        if (min_gap(p) < opts_.clearance * scale) throw ClearanceError("two roots of the cubic collide");
    }

    void note_vieta(cplx z, const Roots& p)
    {
        const cplx r2 = cubic_->coefficients(z)[0];
        vieta = std::max(vieta, std::abs(p[0] + p[1] + p[2] + r2) / std::max(1.0, std::abs(r2)));
    }

    bool try_step(cplx dz, cplx z1)
    {
        const cplx zm = z_ + 0.5 * dz;
        const Roots d0 = derivatives(z_, p_);
        Roots pred_m, pred_1;
        for (std::size_t j = 0; j < 3; ++j) {
            pred_m[j] = p_[j] + 0.5 * dz * d0[j];
            pred_1[j] = p_[j] + dz * d0[j];
        }
        const auto [pm, em] = match(roots_at(zm), pred_m);
        const auto [p1, e1] = match(roots_at(z1), pred_1);
        const double gap = std::min({min_gap(p_), min_gap(pm), min_gap(p1)});
        if (em > 0.125 * gap || e1 > 0.25 * gap) return false;
        double scale = 0.0, moved = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            scale = std::max(scale, std::abs(p_[j]));
            moved = std::max(moved, std::abs(p1[j] - p_[j]));
        }
        if (moved > opts_.max_root_change * scale) return false;
        guard(pm);
        guard(p1);

        const Roots a0 = amplitude_integrand(z_, p_), am = amplitude_integrand(zm, pm), a1 = amplitude_integrand(z1, p1);
        for (std::size_t j = 0; j < 3; ++j) {
            phi[j] += dz / 6.0 * (p_[j] + 4.0 * pm[j] + p1[j]);
            amp[j] += dz / 6.0 * (a0[j] + 4.0 * am[j] + a1[j]);
        }
        note_vieta(zm, pm);
        note_vieta(z1, p1);
        z_ = z1;
        p_ = p1;
        ++steps;
        return true;
    }

    const CharacteristicCubic* cubic_;
    LgOptions opts_;
    cplx z_;
    Roots p_;
};

/// The coefficients of p(a + u) as a polynomial in u.
Poly<cplx> taylor_shift(const Poly<cplx>& p, cplx a)
{
    std::vector<cplx> c = p.coeffs();
    const auto n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = n - 1; k > i; --k) c[k - 1] += a * c[k];
    return Poly<cplx>(std::move(c));
}

/// int_a^{z0} p_j dz with z = a + (z0 - a) s^3, tracking s^2 p_j from s = 1 down to 0.
/// The cubic is re-expanded around a so that its coefficients keep their
/// relative accuracy as s approaches zero.
Roots branch_start(const CharacteristicCubic& original, cplx a, cplx z0, const Roots& p0)
{
    std::array<Poly<cplx>, 4> shifted;
    for (std::size_t k = 0; k < 4; ++k) shifted[k] = taylor_shift(original.scaled()[k], a);
    const CharacteristicCubic cubic(shifted, original.n());
    constexpr int panels = 64;
    const cplx d = z0 - a;
    const auto& gl = boost::math::quadrature::gauss<double, 7>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, 7>::weights();
    Roots g = p0;  // s^2 p at s = 1
    Roots out{};
    const auto scaled = [&](double s) {
        Roots r = cubic.roots(d * (s * s * s));
        for (auto& x : r) x *= s * s;
        return r;
    };
    for (int i = 0; i < panels; ++i) {
        const double hi = 1.0 - static_cast<double>(i) / panels;
        const double lo = 1.0 - static_cast<double>(i + 1) / panels;
        const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
        // Gauss nodes from the upper end down so each match is local.
        std::vector<std::pair<double, double>> nodes;
        for (std::size_t k = 0; k < gl.size(); ++k) {
            nodes.emplace_back(mid + half * gl[k], gw[k]);
            if (gl[k] != 0.0) nodes.emplace_back(mid - half * gl[k], gw[k]);
        }
        std::sort(nodes.begin(), nodes.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
        for (const auto& [s, w] : nodes) {
            g = match(scaled(s), g).first;
            for (std::size_t j = 0; j < 3; ++j) out[j] += w * half * 3.0 * d * g[j];
        }
        if (lo > 0.0) g = match(scaled(lo), g).first;
    }
    return out;
}

LgResult finish(const Tracker& tr, int n)
{
    LgResult out;
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return tr.phi[static_cast<std::size_t>(x)].real() > tr.phi[static_cast<std::size_t>(y)].real(); });
    out.sheets.z = tr.z();
    for (std::size_t s = 0; s < 3; ++s) {
        const auto j = static_cast<std::size_t>(order[s]);
        out.tracked[j] = static_cast<int>(s);
        out.sheets.phi_prime[s] = tr.roots()[j];
        out.sheets.phi[s] = tr.phi[j];
        out.sheets.re_phi[s] = tr.phi[j].real();
        out.log_amplitude[s] = tr.amp[j];
        out.log_w[s] = static_cast<double>(n) * tr.phi[j] + tr.amp[j];
    }
    const auto& r = out.sheets.re_phi;
    out.min_gap = std::min(r[0] - r[1], r[1] - r[2]);
    const double scale = std::max({1.0, std::abs(r[0]), std::abs(r[2])});
    out.strictly_ordered = out.min_gap > 1e-10 * scale;
    out.vieta_residual = tr.vieta;
    out.steps = tr.steps;
    return out;
}

Tracker start_tracker(const CharacteristicCubic& cubic, cplx z0, const LgOptions& opts)
{
    Tracker tr(cubic, z0, opts);
    tr.phi = opts.branch_point ? branch_start(cubic, *opts.branch_point, z0, tr.roots()) : opts.phi0;
    return tr;
}

}  // namespace

LgResult lg_eval(const CharacteristicCubic& cubic, const std::vector<cplx>& path, int n, const LgOptions& opts)
{
    if (path.empty()) throw DomainError("empty path");
    if (!(opts.max_step > 0.0)) throw DomainError("step must be positive");
    Tracker tr = start_tracker(cubic, path.front(), opts);
    for (std::size_t k = 1; k < path.size(); ++k) tr.advance_to(path[k]);
    return finish(tr, n);
}

std::vector<TiePoint> tie_locus(const CharacteristicCubic& cubic, cplx branch_point, const std::vector<double>& xs, double height, int samples,
                                double tol)
{
    if (samples < 2 || !(height > 0.0)) throw DomainError("need a positive height and at least two samples");
    LgOptions opts;
    opts.branch_point = branch_point;
    const cplx lift(0.0, height);

    // Labeled difference for the pair adjacent in sorted order at the state.
    const auto labeled = [](const Tracker& t) {
        std::array<double, 3> r{};
        for (std::size_t j = 0; j < 3; ++j) r[j] = t.phi[j].real();
        return r;
    };

    std::vector<TiePoint> out;
    for (double x : xs) {
        Tracker top = start_tracker(cubic, branch_point + 0.5 * lift, opts);
        top.advance_to(branch_point + lift);
        top.advance_to(cplx(x, height));

        std::vector<Tracker> states{top};
        std::vector<double> ys{height};
        for (int i = 1; i <= samples; ++i) {
            const double y = height - 2.0 * height * i / samples;
            Tracker next = states.back();
            next.advance_to(cplx(x, y));
            states.push_back(next);
            ys.push_back(y);
        }
        for (std::size_t i = 0; i + 1 < states.size(); ++i) {
            const auto ra = labeled(states[i]);
            const auto rb = labeled(states[i + 1]);
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = j + 1; k < 3; ++k) {
                    const double da = ra[j] - ra[k], db = rb[j] - rb[k];
                    if (da == 0.0 || (da > 0.0) == (db > 0.0)) continue;
                    Tracker lo_state = states[i];
                    double y_hi = ys[i], y_lo = ys[i + 1];
                    double d_hi = da;
                    while (y_hi - y_lo > tol) {
                        const double ym = 0.5 * (y_hi + y_lo);
                        Tracker m = lo_state;
                        m.advance_to(cplx(x, ym));
                        const auto rm = labeled(m);
                        const double dm = rm[j] - rm[k];
                        if ((dm > 0.0) == (d_hi > 0.0)) {
                            y_hi = ym;
                            d_hi = dm;
                            lo_state = m;
                        } else {
                            y_lo = ym;
                        }
                    }
                    const auto r = labeled(lo_state);
                    const std::size_t other = 3 - j - k;
                    const double pair_mean = 0.5 * (r[j] + r[k]);
                    out.push_back({x, 0.5 * (y_hi + y_lo), r[other] < pair_mean ? 0 : 1});
                }
        }
    }
    return out;
}

}  // namespace hplab
