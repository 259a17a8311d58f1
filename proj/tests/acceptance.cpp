// Acceptance run: one PASS/FAIL line per criterion, followed by indented detail lines.
// Usage: hplab_acceptance [artifact-dir]

#include "hplab/approx.hpp"
#include "hplab/asym.hpp"
#include "hplab/geometry.hpp"
#include "hplab/ode.hpp"
#include "hplab/recurrence.hpp"
#include "hplab/series.hpp"
#include "hplab/zeros.hpp"
#include "hplab_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

using namespace hplab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string summary;
    std::vector<std::string> details;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

/// Runs body(i) for i in [0, count) on all hardware threads.
void parallel(int count, const std::function<void(int)>& body)
{
    const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
    std::mutex m;
    int next = 0;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i;
                {
                    const std::lock_guard<std::mutex> lock(m);
                    if (next >= count || failure) return;
                    i = next++;
                }
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

Laurent<Rational> segment_series(const Rational& alpha, int order) { return expand_f(BranchConfig::segment(alpha), order, Rational(0)); }

std::string alpha_name(const Rational& a) { return to_string(a); }

// ---------------------------------------------------------------------------

Verdict exact_ode_identity()
{
    Verdict v;
    bool printed_ok = true, corrected_ok = true;
    int printed_zero = 0, total = 0;
    for (const Rational& alpha : {ratio(1, 6), ratio(1, 4), ratio(1, 3)}) {
        const auto cfg = BranchConfig::segment(alpha);
        const auto f = expand_f(cfg, 3 * 12 + 10, Rational(0));
        const Laurent<Rational> f2 = f * f;
        for (int n = 2; n <= 12; ++n) {
            const auto sol = hp_solve(f, f2, n);
            const auto printed = build_ode3_p2(n, alpha, Ode3Constants::published);
            const auto corrected = build_ode3_p2(n, alpha, Ode3Constants::annihilating);
            for (int j = 0; j < 3; ++j) {
                ++total;
                const bool p = verify_solution(printed, sol.polys[static_cast<std::size_t>(j)], j, cfg).is_zero();
                printed_zero += p ? 1 : 0;
                printed_ok = printed_ok && p;
                corrected_ok = corrected_ok && verify_solution(corrected, sol.polys[static_cast<std::size_t>(j)], j, cfg).is_zero();
            }
        }
    }
    v.pass = printed_ok;
    v.summary = fmt("printed operator annihilates %d/%d of Q_{n,j} f^j (alpha in {1/6,1/4,1/3}, n=2..12)", printed_zero, total);
    v.details.push_back(fmt("operator with w'-constant -(3n(n+1)+8a^2-2) and w-constant 6a n(n+1): residual identically zero in all %d cases: %s", total,
                            corrected_ok ? "yes" : "no"));
    return v;
}

Verdict ode_round_trip()
{
    Verdict v;
    int order3_printed = 0, order3_corrected = 0, order2 = 0, total = 0;
    for (const Rational& alpha : {ratio(1, 6), ratio(1, 4), ratio(1, 3)}) {
        const auto f = segment_series(alpha, 5 * 12 + 40);
        const Laurent<Rational> f2 = f * f;
        const Rational zero(0);
        for (int n = 2; n <= 12; ++n) {
            ++total;
            const auto hp = hp_solve(f, f2, n);
            const std::vector<Laurent<Rational>> s3{Laurent<Rational>::from_poly(hp.polys[0], f.low_known(), zero), hp.polys[1] * f, hp.polys[2] * f2};
            const auto sys3 = recover_ode(s3, 3, order3_profile(2), n);
            order3_printed += sys3.coeffs == build_ode3_p2(n, alpha, Ode3Constants::published).coeffs ? 1 : 0;
            order3_corrected += sys3.coeffs == build_ode3_p2(n, alpha, Ode3Constants::annihilating).coeffs ? 1 : 0;

            const auto pd = pade_solve(f, n);
            const std::vector<Laurent<Rational>> s2{Laurent<Rational>::from_poly(pd.polys[0], f.low_known(), zero), pd.polys[1] * f};
            order2 += recover_ode(s2, 2, order2_profile(2), n).coeffs == build_ode2_jacobi(n, alpha).coeffs ? 1 : 0;
        }
    }
    v.pass = order3_printed == total && order2 == total;
    v.summary = fmt("order 3 matches printed build_ode3_p2 %d/%d; order 2 matches Jacobi operator %d/%d", order3_printed, total, order2, total);
    v.details.push_back(fmt("order 3 matches the annihilating constants %d/%d", order3_corrected, total));
    return v;
}

// Roots of Q_{n,j} for alpha = 1/4 and n = 1..40, shared by criteria 3, 4 and 6.
struct ZeroTable {
    std::map<std::pair<int, int>, RootSet> roots;  // (n, j)
    std::map<int, int> degree0;
    int constants = 0;  // polynomials of degree 0, which have no zeros
};

ZeroTable zero_table(const Rational& alpha, const std::vector<int>& ns, const std::vector<int>& js, int bits)
{
    const int nmax = *std::max_element(ns.begin(), ns.end());
    const auto f = segment_series(alpha, 3 * nmax + 10);
    const Laurent<Rational> f2 = f * f;
    ZeroTable t;
    std::mutex m;
    // largest n first so the expensive solves start early
    std::vector<int> order(ns.rbegin(), ns.rend());
    parallel(static_cast<int>(order.size()), [&](int i) {
        const int n = order[static_cast<std::size_t>(i)];
        const auto sol = hp_solve(f, f2, n);
        for (int j : js) {
            const auto& q = sol.polys[static_cast<std::size_t>(j)];
            RootSet r;
            if (q.degree() >= 1) r = find_roots(q, bits);
            const std::lock_guard<std::mutex> lock(m);
            if (j == 0) t.degree0[n] = sol.polys[0].degree();
            if (q.degree() < 1) ++t.constants;
            t.roots[{n, j}] = std::move(r);
        }
    });
    return t;
}

Verdict zero_location(const ZeroTable& t)
{
    Verdict v;
    double worst_im = 0.0, min_re = std::numeric_limits<double>::infinity();
    int count = 0;
    bool certified = true;
    for (const auto& [key, rs] : t.roots) {
        if (rs.degree == 0) continue;
        certified = certified && rs.certified && rs.precision_bits >= 256;
        for (const auto& r : rs.roots) {
            count += r.multiplicity;
            worst_im = std::max(worst_im, std::abs(r.value.im().to_double()));
            min_re = std::min(min_re, std::abs(r.value.re().to_double()));
        }
    }
    v.pass = certified && worst_im < 1e-20 && min_re > 1.0;
    v.summary = fmt("%d roots of Q_{n,j}, n=1..40, j=0..2: max|Im| = %.3g, min|Re| = %.12f, all certified at >= 256 bits: %s", count, worst_im, min_re,
                    certified ? "yes" : "no");
    v.details.push_back(fmt("%d of the polynomials are nonzero constants (no zeros)", t.constants));
    return v;
}

Verdict limit_density(const ZeroTable& t, const DensityProfile& prof)
{
    Verdict v;
    std::array<double, 3> ks{};
    const std::array<int, 3> ns{10, 20, 40};
    for (int k = 0; k < 3; ++k) ks[static_cast<std::size_t>(k)] = zero_stats(t.roots.at({ns[static_cast<std::size_t>(k)], 0}), prof).ks_distance;
    const bool mass_ok = std::abs(prof.total_mass - 1.0) <= 1e-8;
    v.pass = mass_ok && ks[1] < ks[0] && ks[2] < ks[1] && ks[2] <= 0.1;
    v.summary = fmt("mass = %.12f; KS(Q_{n,0}) at n=10,20,40: %.4f, %.4f, %.4f", prof.total_mass, ks[0], ks[1], ks[2]);
    for (int j = 1; j <= 2; ++j)
        v.details.push_back(fmt("Q_{n,%d}: KS at n=10,20,40: %.4f, %.4f, %.4f", j, zero_stats(t.roots.at({10, j}), prof).ks_distance,
                                zero_stats(t.roots.at({20, j}), prof).ks_distance, zero_stats(t.roots.at({40, j}), prof).ks_distance));
    return v;
}

void alpha_independence(const DensityProfile& prof, std::vector<std::string>& out)
{
    for (const Rational& alpha : {ratio(1, 6), ratio(1, 3)}) {
        const auto t = zero_table(alpha, {10, 20, 40}, {0}, 256);
        out.push_back(fmt("alpha = %s: KS(Q_{n,0}) at n=10,20,40: %.4f, %.4f, %.4f", alpha_name(alpha).c_str(),
                          zero_stats(t.roots.at({10, 0}), prof).ks_distance, zero_stats(t.roots.at({20, 0}), prof).ks_distance,
                          zero_stats(t.roots.at({40, 0}), prof).ks_distance));
    }
}

Verdict pade_roots()
{
    Verdict v;
    const auto tab = pade_root_asym_check(BranchConfig::segment(ratio(1, 4)), 2.0, {20, 40, 60}, 512);
    const auto& last = tab.rows.back();
    const double ep = std::abs(last.p_root / tab.p_limit - 1.0), et = std::abs(last.t_root / tab.t_limit - 1.0);
    v.pass = last.n == 60 && ep <= 0.02 && et <= 0.02;
    v.summary = fmt("n=60: |P*|^(1/n) = %.6f vs %.6f (%.2f%%), |T*|^(1/n) = %.6f vs %.6f (%.2f%%)", last.p_root, tab.p_limit, 100 * ep, last.t_root,
                    tab.t_limit, 100 * et);
    for (const auto& r : tab.rows) v.details.push_back(fmt("n=%d: %.6f, %.6f", r.n, r.p_root, r.t_root));
    return v;
}

Verdict hp_potential(const ZeroTable& t, const DensityProfile& prof)
{
    Verdict v;
    const cplx z(0.0, 2.0);
    const double target = potential_from_density(prof, z);
    std::array<double, 2> est{}, err{};
    const std::array<int, 2> ns{20, 40};
    bool full_degree = true;
    for (int k = 0; k < 2; ++k) {
        const int n = ns[static_cast<std::size_t>(k)];
        full_degree = full_degree && t.degree0.at(n) == n;
        double s = 0.0;
        for (const auto& r : t.roots.at({n, 0}).roots) s += r.multiplicity * std::log(std::abs(z - r.approx));
        est[static_cast<std::size_t>(k)] = -s / n;
        err[static_cast<std::size_t>(k)] = std::abs(est[static_cast<std::size_t>(k)] / target - 1.0);
    }
    v.pass = full_degree && err[1] <= 0.05 && err[1] < err[0];
    v.summary = fmt("-(1/n)log|Q*_{n,0}(2i)| = %.6f (n=20), %.6f (n=40) vs V(2i) = %.6f; relative error %.2f%% -> %.2f%%", est[0], est[1], target,
                    100 * err[0], 100 * err[1]);
    return v;
}

Verdict recurrences()
{
    Verdict v;
    const int nmax = 20;
    const auto f = segment_series(ratio(1, 4), 2 * nmax + 24);
    std::vector<Poly<Rational>> den;
    std::vector<Laurent<Rational>> rem;
    for (int n = 0; n <= nmax; ++n) {
        const auto sol = pade_solve(f, n);
        den.push_back(sol.polys[1]);
        rem.push_back(sol.remainder);
    }
    const auto table = recurrence_table(den);
    int poly_zero = 0, rem_zero = 0, rem_total = 0;
    for (const auto& s : table.steps) {
        poly_zero += s.residual.is_zero() ? 1 : 0;
        if (s.n < 2) continue;
        ++rem_total;
        const auto r = remainder_recurrence_check(rem[static_cast<std::size_t>(s.n - 2)], rem[static_cast<std::size_t>(s.n - 1)],
                                                  rem[static_cast<std::size_t>(s.n)], s);
        rem_zero += std::all_of(r.coeffs().begin(), r.coeffs().end(), [](const Rational& c) { return c == 0; }) ? 1 : 0;
    }
    v.pass = poly_zero == static_cast<int>(table.steps.size()) && rem_zero == rem_total && table.steps.size() == static_cast<std::size_t>(nmax);
    v.summary = fmt("alpha=1/4, n<=20: polynomial residuals zero %d/%zu, remainder residuals zero %d/%d", poly_zero, table.steps.size(), rem_zero, rem_total);
    return v;
}

Verdict parameter_drift()
{
    Verdict v;
    const auto cfg = BranchConfig::parse("1,w,w2", "1/6,1/6,-1/3");
    std::vector<int> ns{8};
    for (int n = 12; n <= 32; ++n) ns.push_back(n);
    const auto f = expand_f(cfg, 5 * 32 + 40, QF(0));
    std::map<int, double> vn;
    std::mutex m;
    parallel(static_cast<int>(ns.size()), [&](int i) {
        const int n = ns[static_cast<std::size_t>(ns.size() - 1 - static_cast<std::size_t>(i))];
        const auto pd = pade_solve(f, n);
        const std::vector<Laurent<QF>> s{Laurent<QF>::from_poly(pd.polys[0], f.low_known(), QF(0)), pd.polys[1] * f};
        const auto par = extract_parameters(recover_ode(s, 2, order2_profile(3), n), cfg, cplx(0.0, 0.0));
        const std::lock_guard<std::mutex> lock(m);
        vn[n] = std::abs(par.v_n);
    });
    const auto slope = [&](const std::vector<int>& pts) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int n : pts) {
            const double x = std::log(n), y = std::log(vn.at(n));
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        const double k = pts.size();
        return (k * sxy - sx * sy) / (k * sxx - sx * sx);
    };
    const double s = slope({8, 16, 32});
    const bool decreasing = vn[16] < vn[8] && vn[32] < vn[16];
    v.pass = decreasing && s <= -0.5 && std::abs(s + 2.0 / 3.0) <= 0.3;
    v.summary = fmt("|v_n| at n=8,16,32: %.4e, %.4e, %.4e; decreasing: %s; log-log slope %.3f", vn[8], vn[16], vn[32], decreasing ? "yes" : "no", s);
    for (int r = 0; r < 3; ++r) {
        std::vector<int> cls;
        for (int n = 12; n <= 32; ++n)
            if (n % 3 == r) cls.push_back(n);
        v.details.push_back(fmt("n = %d mod 3, n = %d..%d: log-log slope %.3f", r, cls.front(), cls.back(), slope(cls)));
    }
    return v;
}

Verdict geometry()
{
    Verdict v;
    const auto pts = BranchConfig::parse("1,w,w2", "1/6,1/6,-1/3").points_c();
    const auto cheb = chebotarev_point(pts);
    const auto set = trace_stahl(pts, cheb);
    double dev = 0.0;
    for (const auto& arc : set.arcs) {
        const cplx dir = pts[static_cast<std::size_t>(arc.end_index)] / std::abs(pts[static_cast<std::size_t>(arc.end_index)]);
        for (const auto& z : arc.nodes) dev = std::max(dev, std::abs((z * std::conj(dir)).imag()));
    }
    const auto sample = lambda_s_quadrature(set, 64);
    double mass_err = 0.0;
    for (double mass : sample.arc_mass) mass_err = std::max(mass_err, std::abs(mass - 1.0 / 3.0));

    const StahlMeasure measure(set);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& z : measure.sample(16).nodes) {
        const double p = measure.potential(z);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    const double spread = (hi - lo) / std::abs(hi);
    double mismatch = 0.0;
    for (int arc = 0; arc < measure.arc_count(); ++arc) {
        const auto r = s_property_check(measure, measure.solve_point(arc, 0.5 * measure.arc_mass(arc)), 1e-3);
        mismatch = std::max(mismatch, std::abs(r.dplus - r.dminus) / std::abs(r.dplus));
    }
    v.pass = std::abs(cheb.v) <= 1e-10 && dev < 1e-6 && mass_err <= 1e-8 && spread < 1e-5 && mismatch < 1e-3 && sample.arc_mass.size() == 3;
    v.summary = fmt("|v| = %.2e, straightness %.2e, arc mass error %.2e, potential spread %.2e, S-property mismatch %.2e", std::abs(cheb.v), dev, mass_err,
                    spread, mismatch);
    return v;
}

Verdict ratio_limit(const fs::path& dir)
{
    Verdict v;
    hplab::cli::ExperimentConfig cfg;
    cfg.command = "figure4";
    cfg.n = {40};
    cfg.bits = 256;
    cfg.out_dir = (dir / "figure4").string();
    cfg.jobs = 3;
    hplab::cli::execute(cfg);
    std::ifstream in(dir / "figure4" / "fig4.json");
    const auto j = hplab::cli::Json::parse(in);
    const bool files = fs::exists(dir / "figure4" / "fig4.svg") && fs::exists(dir / "figure4" / "fig4_roots.csv");
    bool certified = true;
    int roots = 0;
    for (const auto& r : j["roots"]) {
        certified = certified && r["certified"].get<bool>();
        roots += r["count"].get<int>();
    }
    const auto& c0 = j["ratio_checks"][0];
    const double relerr = c0.contains("relerr") ? c0["relerr"].get<double>() : std::numeric_limits<double>::infinity();
    v.pass = files && certified && relerr <= 0.05;
    v.summary = fmt("n=40 over Q(sqrt(-3)): relerr %.2e next to the arc ending at 1; %d certified zeros; fig4.svg and fig4_roots.csv written: %s", relerr, roots,
                    files ? "yes" : "no");
    for (std::size_t k = 1; k < j["ratio_checks"].size(); ++k) {
        const auto& c = j["ratio_checks"][k];
        if (c.contains("relerr"))
            v.details.push_back(fmt("arc %zu: relerr %.2e", k, c["relerr"].get<double>()));
        else
            v.details.push_back(fmt("arc %zu: %s", k, c["error"].get<std::string>().c_str()));
    }
    const auto& out = j["zeros_outside_window"];
    v.details.push_back(fmt("zeros outside the plotted window (Q0, Q1, Q2): %d, %d, %d; artifacts in %s", out[0].get<int>(), out[1].get<int>(),
                            out[2].get<int>(), (dir / "figure4").string().c_str()));
    return v;
}

Verdict sheet_ordering()
{
    Verdict v;
    const auto cubic = limit_cubic_p2();
    std::vector<double> xs;
    for (double x = -2.9; x < 3.0; x += 0.2)
        if (std::abs(std::abs(x) - 1.0) > 0.05) xs.push_back(x);
    const auto ties = tie_locus(cubic, cplx(1.0), xs);
    double band = 0.0;
    for (const auto& t : ties) band = std::max(band, std::abs(t.y));
    const double margin = std::max(0.02, 10.0 * band);

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(-2.0, 2.0);
    LgOptions opts;
    opts.branch_point = cplx(1.0);
    int ordered = 0, tested = 0;
    double worst_vieta = 0.0, worst_gap = std::numeric_limits<double>::infinity();
    while (tested < 100) {
        const cplx z(re(rng), im(rng));
        if (std::abs(z.imag()) < margin || std::abs(z - 1.0) < 0.05 || std::abs(z + 1.0) < 0.05) continue;
        const double side = z.imag() > 0 ? 0.3 : -0.3;
        const std::vector<cplx> path{cplx(1.0, side), cplx(z.real(), side), z};
        const auto r = lg_eval(cubic, path, 10, opts);
        ++tested;
        ordered += r.strictly_ordered ? 1 : 0;
        worst_vieta = std::max(worst_vieta, r.vieta_residual);
        worst_gap = std::min(worst_gap, r.min_gap);
    }
    v.pass = ordered == tested && worst_vieta <= 1e-10;
    v.summary = fmt("%d/%d samples strictly ordered (smallest gap %.3e); worst Vieta residual %.2e", ordered, tested, worst_gap, worst_vieta);
    v.details.push_back(fmt("tie locus: %zu crossings on %zu vertical lines, all within |Im z| <= %.1e; samples keep |Im z| >= %.2f", ties.size(), xs.size(), band,
                            margin));
    return v;
}

}  // namespace

int main(int argc, char** argv)
{
    const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
    fs::create_directories(dir);
    int failed = 0;
    const auto report = [&](int id, const char* name, const std::function<Verdict()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = body();
        } catch (const std::exception& e) {
            v.pass = false;
            v.summary = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << v.summary << fmt(" (%.1f s)", secs) << '\n';
        for (const auto& d : v.details) std::cout << "        " << d << '\n';
        std::cout.flush();
    };

    report(1, "exact ODE identity", exact_ode_identity);
    report(2, "ODE round trip", ode_round_trip);

    const auto prof = density_profile(200);
    std::vector<int> all_n;
    for (int n = 1; n <= 40; ++n) all_n.push_back(n);
    std::optional<ZeroTable> zeros;
    const auto need_zeros = [&]() -> const ZeroTable& {
        if (!zeros) zeros = zero_table(ratio(1, 4), all_n, {0, 1, 2}, 256);
        return *zeros;
    };
    report(3, "zero location", [&] { return zero_location(need_zeros()); });
    report(4, "limit density", [&] {
        auto v = limit_density(need_zeros(), prof);
        alpha_independence(prof, v.details);
        return v;
    });
    report(5, "Pade root asymptotics", pade_roots);
    report(6, "HP potential asymptotics", [&] { return hp_potential(need_zeros(), prof); });
    report(7, "recurrences", recurrences);
    report(8, "parameter drift", parameter_drift);
    report(9, "geometry", geometry);
    report(10, "ratio limit", [&] { return ratio_limit(dir); });
    report(11, "sheet ordering", sheet_ordering);

    std::cout << (11 - failed) << "/11 criteria pass\n";
    return failed == 0 ? 0 : 1;
}
