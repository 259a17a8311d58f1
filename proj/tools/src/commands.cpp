#include "hplab_cli/commands.hpp"

#include "hplab/approx.hpp"
#include "hplab/asym.hpp"
#include "hplab/geometry.hpp"
#include "hplab/ode.hpp"
#include "hplab/recurrence.hpp"
#include "hplab/series.hpp"
#include "hplab/zeros.hpp"
#include "hplab_cli/artifacts.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#ifndef HPLAB_VERSION
#define HPLAB_VERSION "0.0.0"
#endif

namespace hplab::cli {

namespace fs = std::filesystem;

Json StageError::record() const
{
    Json j;
    j["error"] = {{"stage", stage_}, {"kind", kind_}, {"message", what()}, {"exit_code", code_}};
    return j;
}

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"series",     "pade",      "hp",         "zeros", "recurrence", "ode-recover",
                                                "ode-verify", "chebotarev", "trace", "density", "lg",         "figure4"};
    return names;
}

namespace {

const char* const kFig4Points = "1,-1,-1/3*sqrt(-3)";
const char* const kFig4Exponents = "1/3,1/3,-2/3";

// ----- stages and errors -----------------------------------------------------

template <class F>
auto stage(const std::string& name, F&& body) -> decltype(body())
{
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw StageError(name, "ConfigError", e.what(), 2);
    } catch (const DomainError& e) {
        throw StageError(name, "DomainError", e.what(), 3);
    } catch (const FieldMismatch& e) {
        throw StageError(name, "FieldMismatch", e.what(), 3);
    } catch (const ConvergenceError& e) {
        throw StageError(name, "ConvergenceError", e.what(), 4);
    } catch (const InconsistencyError& e) {
        throw StageError(name, "InconsistencyError", e.what(), 5);
    } catch (const ClearanceError& e) {
        throw StageError(name, "ClearanceError", e.what(), 6);
    } catch (const Json::exception& e) {
        throw StageError(name, "ConfigError", e.what(), 2);
    } catch (const std::exception& e) {
        throw StageError(name, "Error", e.what(), 1);
    }
}

/// Runs tasks[i] for every index with up to `jobs` threads; the first failure is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task)
{
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ----- serialization ---------------------------------------------------------

int digits_for(int bits) { return static_cast<int>(std::ceil(bits * 0.30103)) + 2; }

Json scalar_json(const Rational& x) { return to_string(x); }
Json scalar_json(const QF& x) { return x.to_string(); }
Json scalar_json(const BigComplex& x)
{
    const int d = digits_for(x.precision_bits());
    return Json::array({x.re().to_string(d), x.im().to_string(d)});
}

template <class T>
Json poly_json(const Poly<T>& p)
{
    Json a = Json::array();
    for (const auto& c : p.coeffs()) a.push_back(scalar_json(c));
    return a;
}

template <class T>
Json series_json(const Laurent<T>& s, int terms)
{
    Json a = Json::array();
    const int stop = std::max(s.low_known(), s.top() - terms + 1);
    for (int e = s.top(); e >= stop; --e) a.push_back({{"exponent", e}, {"value", scalar_json(s.coeff(e))}});
    return a;
}

/// `terms` coefficients of the remainder from its leading exponent downward.
template <class T>
Json leading_terms(const Laurent<T>& s, const std::optional<int>& order, int terms)
{
    Json a = Json::array();
    if (!order) return a;
    for (int e = -*order; e >= std::max(s.low_known(), -*order - terms + 1); --e) a.push_back({{"exponent", e}, {"value", scalar_json(s.coeff(e))}});
    return a;
}

Json header(const ExperimentConfig& cfg, const std::string& kind)
{
    Json j;
    j["generator"] = std::string("hplab ") + HPLAB_VERSION;
    j["kind"] = kind;
    j["config"] = cfg.to_json();
    return j;
}

template <class F>
Json with_field(const BranchConfig& b, F&& f)
{
    if (b.rational_points()) return f(Rational(0));
    return f(QF(Rational(0), Rational(0), b.field()));
}

std::optional<Rational> segment_alpha(const BranchConfig& b)
{
    if (b.size() != 2 || !(b.points[0] == QF(1)) || !(b.points[1] == QF(-1))) return std::nullopt;
    if (b.exponents[1] != -b.exponents[0]) return std::nullopt;
    return b.exponents[0];
}

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ----- solution helpers --------------------------------------------------------

template <class T>
Json solution_json(const ExperimentConfig& cfg, const HPSolution<T>& sol, const std::string& kind)
{
    Json j = header(cfg, kind);
    j["n"] = sol.n;
    j["field"] = cfg.branch().field();
    j["arithmetic"] = cfg.arithmetic;
    Json polys = Json::array();
    for (const auto& p : sol.polys) polys.push_back(poly_json(p));
    j["polynomials"] = polys;
    const auto order = remainder_order(sol);
    const Normality norm = normality_check(sol);
    j["remainder"] = {{"target_order", sol.target_order()}, {"order", order ? Json(*order) : Json(nullptr)}, {"leading", leading_terms(sol.remainder, order, 3)}};
    j["diagnostics"] = {{"normal", norm.normal},
                        {"defect", sol.diagnostics.defect},
                        {"precision_bits", sol.diagnostics.precision_bits},
                        {"residual", sol.diagnostics.residual}};
    return j;
}

template <class T>
HPSolution<T> solve_exact(const Laurent<T>& f, const Laurent<T>& f2, int n, int kind)
{
    return kind == 2 ? pade_solve(f, n) : hp_solve(f, f2, n);
}

struct Named {
    std::string name;
    std::string content;
};

/// Per-index task results, written in index order after all tasks finish.
void write_all(ArtifactSink& sink, const std::vector<std::vector<Named>>& outs)
{
    for (const auto& group : outs)
        for (const auto& a : group) sink.text(a.name, a.content);
}

// ----- commands ----------------------------------------------------------------

void cmd_series(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const BranchConfig b = cfg.branch();
    const int order = cfg.options.at("order").get<int>();
    if (order < 0) throw ConfigError("order must be nonnegative");
    Json j = stage("series", [&] {
        Json out = header(cfg, "series");
        out["order"] = order;
        if (cfg.arithmetic == "float") {
            out["coefficients"] = series_json(expand_f(b, order, BigComplex(cfg.bits)), order + 1);
        } else {
            out["coefficients"] = with_field(b, [&](auto like) { return series_json(expand_f(b, order, like), order + 1); });
        }
        return out;
    });
    sink.json("series.json", j);
}

void cmd_solve(const ExperimentConfig& cfg, ArtifactSink& sink, int kind)
{
    const BranchConfig b = cfg.branch();
    const std::string name = kind == 2 ? "pade" : "hp";
    std::vector<std::vector<Named>> outs(cfg.n.size());
    if (cfg.arithmetic == "float") {
        parallel_for(cfg.n.size(), cfg.jobs, [&](std::size_t i) {
            const int n = cfg.n[i];
            const auto sol = stage("solve", [&] { return solve_float(b, n, kind, FloatPolicy{cfg.bits, std::max(4096, cfg.bits)}); });
            outs[i].push_back({name + "_n" + std::to_string(n) + ".json", dump(solution_json(cfg, sol, name))});
        });
    } else {
        with_field(b, [&](auto like) {
            using T = decltype(like);
            const int order = (kind == 2 ? 2 : 3) * cfg.n_max() + 10;
            const auto f = stage("series", [&] { return expand_f(b, order, like); });
            const Laurent<T> f2 = kind == 3 ? Laurent<T>(f * f) : Laurent<T>();
            parallel_for(cfg.n.size(), cfg.jobs, [&](std::size_t i) {
                const int n = cfg.n[i];
                const auto sol = stage("solve", [&] { return solve_exact(f, f2, n, kind); });
                outs[i].push_back({name + "_n" + std::to_string(n) + ".json", dump(solution_json(cfg, sol, name))});
            });
            return Json();
        });
    }
    write_all(sink, outs);
}

Json zero_json(const RootSet& r)
{
    Json roots = Json::array();
    for (const auto& x : r.roots) {
        const int d = digits_for(r.precision_bits);
        roots.push_back({{"re", x.value.re().to_string(d)}, {"im", x.value.im().to_string(d)}, {"residual", x.residual}, {"multiplicity", x.multiplicity}});
    }
    return {{"degree", r.degree}, {"count", r.count()}, {"certified", r.certified}, {"precision_bits", r.precision_bits},
            {"residual_bound", r.residual_bound}, {"max_residual", r.max_residual()}, {"roots", roots}};
}

Json stats_json(const ZeroStats& st)
{
    Json iv = Json::array();
    for (const auto& c : st.intervals) iv.push_back({{"lo", c.lo}, {"hi", c.hi}, {"count", c.count}, {"expected", c.expected}});
    return {{"ks_distance", st.ks_distance}, {"count", st.count}, {"deciles", iv}};
}

void cmd_zeros(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const BranchConfig b = cfg.branch();
    const std::string kind_name = cfg.options.at("kind").get<std::string>();
    if (kind_name != "hp" && kind_name != "pade") throw ConfigError("kind must be 'hp' or 'pade'");
    const int kind = kind_name == "pade" ? 2 : 3;
    const int j = cfg.options.at("poly").get<int>();
    if (j < 0 || j >= kind) throw ConfigError("poly index out of range for " + kind_name);
    const std::string stats_mode = cfg.options.at("stats").get<std::string>();
    if (stats_mode != "auto" && stats_mode != "on" && stats_mode != "off") throw ConfigError("stats must be auto, on or off");
    const bool stats = stats_mode == "on" || (stats_mode == "auto" && kind == 3 && segment_alpha(b));
    const std::optional<DensityProfile> profile = stats ? std::optional<DensityProfile>(density_profile(64)) : std::nullopt;

    std::vector<std::vector<Named>> outs(cfg.n.size());
    const auto emit = [&](std::size_t i, const RootSet& r) {
        const int n = cfg.n[i];
        const std::string stem = "zeros_" + kind_name + "_n" + std::to_string(n) + "_q" + std::to_string(j);
        Json out = header(cfg, "zeros");
        out["n"] = n;
        out["poly"] = j;
        out["roots"] = zero_json(r);
        if (profile) out["limit_density"] = stage("density", [&] { return stats_json(zero_stats(r, *profile)); });
        outs[i].push_back({stem + ".csv", roots_csv(r)});
        outs[i].push_back({stem + ".json", dump(out)});
    };

    if (cfg.arithmetic == "float") {
        parallel_for(cfg.n.size(), cfg.jobs, [&](std::size_t i) {
            const auto sol = stage("solve", [&] { return solve_float(b, cfg.n[i], kind, FloatPolicy{cfg.bits, std::max(4096, cfg.bits)}); });
            emit(i, stage("roots", [&] { return find_roots(sol.polys[static_cast<std::size_t>(j)], cfg.bits); }));
        });
    } else {
        with_field(b, [&](auto like) {
            using T = decltype(like);
            const int order = (kind == 2 ? 2 : 3) * cfg.n_max() + 10;
            const auto f = stage("series", [&] { return expand_f(b, order, like); });
            const Laurent<T> f2 = kind == 3 ? Laurent<T>(f * f) : Laurent<T>();
            parallel_for(cfg.n.size(), cfg.jobs, [&](std::size_t i) {
                const auto sol = stage("solve", [&] { return solve_exact(f, f2, cfg.n[i], kind); });
                emit(i, stage("roots", [&] { return find_roots(sol.polys[static_cast<std::size_t>(j)], cfg.bits); }));
            });
            return Json();
        });
    }
    write_all(sink, outs);
}

void cmd_recurrence(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    if (cfg.arithmetic != "exact") throw ConfigError("recurrence checks run in exact arithmetic only");
    const BranchConfig b = cfg.branch();
    const int nmax = cfg.n_max();
    if (nmax < 2) throw ConfigError("recurrence needs n >= 2");
    Json j = with_field(b, [&](auto like) {
        using T = decltype(like);
        const auto f = stage("series", [&] { return expand_f(b, 2 * nmax + 24, like); });
        std::vector<Poly<T>> den;
        std::vector<Laurent<T>> rem;
        stage("solve", [&] {
            for (int n = 0; n <= nmax; ++n) {
                auto sol = pade_solve(f, n);
                den.push_back(sol.polys[1]);
                rem.push_back(sol.remainder);
            }
            return 0;
        });
        return stage("recurrence", [&] {
            const auto table = recurrence_table(den);
            Json steps = Json::array();
            bool all = true;
            for (const auto& s : table.steps) {
                bool rem_zero = true;
                if (s.n >= 2) {
                    const auto r = remainder_recurrence_check(rem[static_cast<std::size_t>(s.n - 2)], rem[static_cast<std::size_t>(s.n - 1)],
                                                              rem[static_cast<std::size_t>(s.n)], s);
                    for (const auto& c : r.coeffs()) rem_zero = rem_zero && is_zero(c);
                }
                all = all && s.residual.is_zero() && rem_zero;
                steps.push_back({{"n", s.n},
                                 {"b", scalar_json(s.b)},
                                 {"a2", scalar_json(s.a2)},
                                 {"polynomial_residual_zero", s.residual.is_zero()},
                                 {"remainder_residual_zero", rem_zero}});
            }
            Json out = header(cfg, "recurrence");
            out["n_max"] = nmax;
            out["exact"] = all;
            out["steps"] = steps;
            return out;
        });
    });
    sink.json("recurrence.json", j);
}

template <class T>
Json ode_json(const OdeSystem<T>& sys)
{
    Json c = Json::array();
    for (const auto& p : sys.coeffs) c.push_back(poly_json(p));
    return {{"order", sys.order}, {"n", sys.n}, {"defect", sys.defect}, {"coefficients_highest_derivative_first", c}};
}

void cmd_ode_recover(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    if (cfg.arithmetic != "exact") throw ConfigError("ODE recovery runs in exact arithmetic only");
    const BranchConfig b = cfg.branch();
    const int order = cfg.options.at("order").get<int>();
    if (order != 2 && order != 3) throw ConfigError("order must be 2 or 3");
    const int p = b.size();
    const auto alpha = segment_alpha(b);
    const std::optional<cplx> cheb = (order == 2 && p == 3) ? std::optional<cplx>(chebotarev_point(b.points_c()).v) : std::nullopt;

    std::vector<std::vector<Named>> outs(cfg.n.size());
    with_field(b, [&](auto like) {
        using T = decltype(like);
        const auto f = stage("series", [&] { return expand_f(b, 5 * cfg.n_max() + 40, like); });
        const Laurent<T> f2 = f * f;
        parallel_for(cfg.n.size(), cfg.jobs, [&](std::size_t i) {
            const int n = cfg.n[i];
            std::vector<Laurent<T>> sols;
            stage("solve", [&] {
                if (order == 2) {
                    const auto s = pade_solve(f, n);
                    sols = {Laurent<T>::from_poly(s.polys[0], f.low_known(), like), s.polys[1] * f};
                } else {
                    const auto s = hp_solve(f, f2, n);
                    sols = {Laurent<T>::from_poly(s.polys[0], f.low_known(), like), s.polys[1] * f, s.polys[2] * f2};
                }
                return 0;
            });
            Json out = stage("ode", [&] {
                const auto profile = order == 2 ? order2_profile(p) : order3_profile(p);
                const auto sys = recover_ode(sols, order, profile, n);
                Json o = header(cfg, "ode-recover");
                o["ode"] = ode_json(sys);
                o["degree_profile"] = profile;
                if constexpr (std::is_same_v<T, Rational>) {
                    if (alpha) {
                        if (order == 2) {
                            o["reference"] = {{"operator", "jacobi"}, {"matches", sys.coeffs == build_ode2_jacobi(n, *alpha).coeffs}};
                        } else {
                            o["reference"] = {{"operator", "explicit third order"},
                                              {"matches_annihilating", sys.coeffs == build_ode3_p2(n, *alpha, Ode3Constants::annihilating).coeffs},
                                              {"matches_published", sys.coeffs == build_ode3_p2(n, *alpha, Ode3Constants::published).coeffs}};
                        }
                    }
                }
                if (cheb) {
                    const auto par = extract_parameters(sys, b, *cheb);
                    o["parameters"] = {{"z_n", complex_json(par.z_n)},
                                       {"b_n", complex_json(par.b_n)},
                                       {"v_n", complex_json(par.v_n)},
                                       {"chebotarev", complex_json(*cheb)},
                                       {"v_distance", std::abs(par.v_n - *cheb)},
                                       {"lead_residual", par.lead_residual},
                                       {"pi1_residual", par.pi1_residual}};
                }
                if (order == 3 && p == 3) {
                    const auto fac = third_order_factors(sys, b);
                    o["factors"] = {{"H_remainder_zero", fac.H_remainder.is_zero()},
                                    {"c2_mismatch_zero", fac.c2_mismatch.is_zero()},
                                    {"H", poly_json(fac.H)},
                                    {"F", poly_json(fac.F)},
                                    {"G", poly_json(fac.G)}};
                }
                return o;
            });
            outs[i].push_back({"ode_recover_n" + std::to_string(n) + "_order" + std::to_string(order) + ".json", dump(out)});
        });
        return Json();
    });
    write_all(sink, outs);
}

void cmd_ode_verify(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    if (cfg.arithmetic != "exact") throw ConfigError("ODE verification runs in exact arithmetic only");
    const BranchConfig b = cfg.branch();
    const auto alpha = segment_alpha(b);
    if (!alpha) throw ConfigError("the explicit operators exist for the two-point configuration {1, -1} with exponents alpha, -alpha");
    const std::string which = cfg.options.at("constants").get<std::string>();
    std::vector<Ode3Constants> variants;
    if (which == "published" || which == "both") variants.push_back(Ode3Constants::published);
    if (which == "annihilating" || which == "both") variants.push_back(Ode3Constants::annihilating);
    if (variants.empty()) throw ConfigError("constants must be published, annihilating or both");

    const auto f = stage("series", [&] { return expand_f(b, 3 * cfg.n_max() + 10, Rational(0)); });
    const Laurent<Rational> f2 = f * f;
    std::vector<std::vector<Named>> outs(cfg.n.size());
    parallel_for(cfg.n.size(), cfg.jobs, [&](std::size_t i) {
        const int n = cfg.n[i];
        const auto hp = stage("solve", [&] { return hp_solve(f, f2, n); });
        const auto pd = stage("solve", [&] { return pade_solve(f, n); });
        Json out = stage("ode", [&] {
            Json o = header(cfg, "ode-verify");
            o["n"] = n;
            Json third = Json::object();
            for (auto v : variants) {
                const auto sys = build_ode3_p2(n, *alpha, v);
                Json per = Json::array();
                bool all = true;
                for (int j = 0; j < 3; ++j) {
                    const auto r = verify_solution(sys, hp.polys[static_cast<std::size_t>(j)], j, b);
                    all = all && r.is_zero();
                    per.push_back({{"j", j}, {"residual_zero", r.is_zero()}, {"residual_degree", r.is_zero() ? -1 : r.degree()}});
                }
                third[v == Ode3Constants::published ? "published" : "annihilating"] = {{"annihilates", all}, {"solutions", per}};
            }
            o["third_order"] = third;
            const auto jac = build_ode2_jacobi(n, *alpha);
            o["second_order"] = {{"annihilates",
                                  verify_solution(jac, pd.polys[0], 0, b).is_zero() && verify_solution(jac, pd.polys[1], 1, b).is_zero()}};
            return o;
        });
        outs[i].push_back({"ode_verify_n" + std::to_string(n) + ".json", dump(out)});
    });
    write_all(sink, outs);
}

void cmd_chebotarev(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const BranchConfig b = cfg.branch();
    Json j = stage("geometry", [&] {
        const auto pts = b.points_c();
        const auto v = chebotarev_point(pts);
        Json o = header(cfg, "chebotarev");
        Json p = Json::array();
        for (const auto& a : pts) p.push_back(complex_json(a));
        o["points"] = p;
        o["v"] = complex_json(v.v);
        o["fermat_point"] = complex_json(fermat_point(pts));
        o["period_residuals"] = v.period_residuals;
        o["third_residual"] = v.third_residual;
        o["iterations"] = v.iterations;
        return o;
    });
    sink.json("chebotarev.json", j);
}

std::string trajectories_csv(const TrajectorySet& set)
{
    std::string out = "arc,k,re,im\n";
    for (std::size_t a = 0; a < set.arcs.size(); ++a)
        for (std::size_t k = 0; k < set.arcs[a].nodes.size(); ++k)
            out += std::to_string(a) + "," + std::to_string(k) + "," + csv_number(set.arcs[a].nodes[k].real()) + "," +
                   csv_number(set.arcs[a].nodes[k].imag()) + "\n";
    return out;
}

const std::vector<std::string> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

void cmd_trace(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const BranchConfig b = cfg.branch();
    const double step = cfg.options.at("step").get<double>();
    if (!(step > 0.0 && step < 0.5)) throw ConfigError("step must lie in (0, 0.5)");
    const auto set = stage("geometry", [&] {
        const auto pts = b.points_c();
        if (pts.size() == 2) return segment_compact(pts[0], pts[1]);
        TraceOptions opts;
        opts.step = step;
        return trace_stahl(pts, chebotarev_point(pts), opts);
    });
    Json summary = header(cfg, "trace");
    if (set.qd.zero) summary["v"] = complex_json(*set.qd.zero);
    Json arcs = Json::array();
    for (const auto& a : set.arcs) arcs.push_back({{"end_index", a.end_index}, {"end_distance", a.end_distance}, {"nodes", a.nodes.size()}});
    summary["arcs"] = arcs;
    summary["steps"] = set.steps;

    SvgPlot plot("Critical trajectories of the quadratic differential");
    for (std::size_t a = 0; a < set.arcs.size(); ++a) plot.polyline(set.arcs[a].nodes, kPalette[a % kPalette.size()], 2.0);
    for (const auto& a : b.points_c()) plot.marker(a, "black", "");
    if (set.qd.zero) plot.marker(*set.qd.zero, "#d62728", "");

    sink.text("trajectories.json", trajectories_json(set) + "\n");
    sink.text("trajectories.csv", trajectories_csv(set));
    sink.json("trace.json", summary);
    sink.text("trace.svg", plot.render());
}

void cmd_density(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const int grid = cfg.options.at("grid").get<int>();
    const double r_max = cfg.options.at("r_max").get<double>();
    if (grid < 2 || !(r_max > 1.0)) throw ConfigError("density needs grid >= 2 and r_max > 1");
    const auto prof = stage("density", [&] { return density_profile(grid, r_max); });
    std::string csv = "x,density,cdf\n";
    std::vector<std::complex<double>> curve;
    for (std::size_t k = 0; k < prof.grid.size(); ++k) {
        csv += csv_number(prof.grid[k]) + "," + csv_number(prof.density[k]) + "," + csv_number(prof.cdf[k]) + "\n";
        curve.emplace_back(std::log10(prof.grid[k] - 1.0), std::log10(prof.density[k]));
    }
    Json j = header(cfg, "density");
    j["total_mass"] = prof.total_mass;
    j["grid_points"] = prof.grid.size();
    j["endpoint_constant"] = std::sqrt(3.0) / (2.0 * std::acos(-1.0)) * std::cbrt(0.5);
    j["data"] = "density.csv";

    SvgPlot plot("Limit zero density (folded, |x| > 1)");
    plot.equal_aspect(false);
    plot.axis_labels("log10(|x| - 1)", "log10 density");
    plot.polyline(curve, kPalette[0], 2.0);
    sink.text("density.csv", csv);
    sink.json("density.json", j);
    sink.text("density.svg", plot.render());
}

/// Characteristic cubic of the third-order operator recovered from [1, f, f^2] at index n.
CharacteristicCubic recovered_cubic(const BranchConfig& b, int n)
{
    const auto build = [&](auto like) {
        using T = decltype(like);
        const auto f = expand_f(b, 5 * n + 40, like);
        const Laurent<T> f2 = f * f;
        const auto s = hp_solve(f, f2, n);
        const std::vector<Laurent<T>> sols{Laurent<T>::from_poly(s.polys[0], f.low_known(), like), s.polys[1] * f, s.polys[2] * f2};
        return characteristic_cubic(recover_ode(sols, 3, order3_profile(b.size()), n));
    };
    if (b.rational_points()) return build(Rational(0));
    return build(QF(Rational(0), Rational(0), b.field()));
}

void cmd_lg(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const BranchConfig b = cfg.branch();
    const cplx z = complex_from_json(cfg.options.at("z"));
    const std::string cubic_kind = cfg.options.at("cubic").get<std::string>();
    const std::string variant = cfg.options.at("variant").get<std::string>();
    if (variant != "second" && variant != "first") throw ConfigError("variant must be 'second' or 'first'");
    if (cubic_kind != "limit" && cubic_kind != "ode") throw ConfigError("cubic must be 'limit' or 'ode'");
    const int n = cfg.n.empty() ? 20 : cfg.n.front();
    const auto alpha = segment_alpha(b);

    const CharacteristicCubic cubic = stage("ode", [&] {
        if (cubic_kind == "limit") {
            if (!alpha) throw ConfigError("the limit cubic is available for the two-point configuration");
            return limit_cubic_p2();
        }
        if (alpha) return characteristic_cubic(build_ode3_p2(n, *alpha, Ode3Constants::annihilating));
        return recovered_cubic(b, n);
    });

    LgOptions opts;
    opts.variant = variant == "second" ? AmplitudeVariant::second_derivative : AmplitudeVariant::first_derivative;
    opts.max_step = cfg.options.at("max_step").get<double>();
    std::vector<cplx> path;
    for (const auto& p : cfg.options.at("path")) path.push_back(complex_from_json(p));
    const cplx a1 = b.points_c().front();
    if (path.empty()) {
        const double side = z.imag() < 0.0 ? -1.0 : 1.0;
        const double lift = 0.15 * b.diameter();
        path = {a1 + cplx(0.0, side * lift), cplx(z.real(), a1.imag() + side * lift), z};
    }
    if (cubic_kind == "limit") opts.branch_point = a1;

    const auto r = stage("lg", [&] { return lg_eval(cubic, path, n, opts); });
    Json j = header(cfg, "lg");
    j["z"] = complex_json(z);
    j["n"] = n;
    j["cubic"] = cubic_kind;
    j["variant"] = variant;
    Json jp = Json::array();
    for (const auto& p : path) jp.push_back(complex_json(p));
    j["path"] = jp;
    j["base"] = cubic_kind == "limit" ? Json({{"branch_point", complex_json(a1)}}) : Json({{"start", complex_json(path.front())}, {"phi", 0}});
    Json sheets = Json::array();
    for (std::size_t s = 0; s < 3; ++s)
        sheets.push_back({{"phi_prime", complex_json(r.sheets.phi_prime[s])},
                          {"phi", complex_json(r.sheets.phi[s])},
                          {"re_phi", r.sheets.re_phi[s]},
                          {"log_amplitude", complex_json(r.log_amplitude[s])},
                          {"log_w", complex_json(r.log_w[s])}});
    j["sheets_by_re_phi_descending"] = sheets;
    j["strictly_ordered"] = r.strictly_ordered;
    j["min_gap"] = r.min_gap;
    j["vieta_residual"] = r.vieta_residual;
    j["steps"] = r.steps;
    sink.json("lg.json", j);
}

std::string fig4_csv(const std::vector<RootSet>& sets)
{
    std::string out = "poly,re,im,residual,multiplicity\n";
    for (std::size_t j = 0; j < sets.size(); ++j)
        for (const auto& r : sets[j].roots)
            out += std::to_string(j) + "," + csv_number(r.approx.real()) + "," + csv_number(r.approx.imag()) + "," + csv_number(r.residual) + "," +
                   std::to_string(r.multiplicity) + "\n";
    return out;
}

void cmd_figure4(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const BranchConfig b = cfg.branch();
    const int n = cfg.n.empty() ? 40 : cfg.n.front();
    const double offset = cfg.options.at("probe_offset").get<double>();
    const QF like(Rational(0), Rational(0), b.field());
    const auto sol = stage("solve", [&] {
        const auto f = expand_f(b, 3 * n + 10, like);
        return hp_solve(f, f * f, n);
    });
    std::vector<RootSet> roots(3);
    parallel_for(3, cfg.jobs, [&](std::size_t j) { roots[j] = stage("roots", [&] { return find_roots(sol.polys[j], cfg.bits); }); });
    const auto set = stage("geometry", [&] { return stahl_compact(b); });
    const auto arcs = stahl_arcs(set);

    Json checks = Json::array();
    stage("asym", [&] {
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            const cplx probe = arc_probe(arcs[a], 0.5, offset);
            Json c = {{"arc", a}, {"probe", complex_json(probe)}};
            try {
                const auto rc = hp_ratio_check(b, sol, probe, arcs[a], cfg.bits);
                c["ratio"] = complex_json(rc.ratio);
                c["target"] = complex_json(rc.target);
                c["relerr"] = rc.relerr;
            } catch (const ClearanceError& e) {
                c["error"] = e.what();
            }
            checks.push_back(c);
        }
        return 0;
    });

    Json j = header(cfg, "figure4");
    j["n"] = n;
    j["function"] = "(1 - z^2)^(1/3) (1 - i sqrt(3) z)^(-2/3)";
    if (set.qd.zero) j["chebotarev"] = complex_json(*set.qd.zero);
    Json polylines = Json::array();
    for (const auto& a : arcs) {
        Json line = Json::array();
        for (const auto& p : a.nodes) line.push_back(complex_json(p));
        polylines.push_back(line);
    }
    j["arcs"] = polylines;
    Json rj = Json::array();
    for (const auto& r : roots) rj.push_back(zero_json(r));
    j["roots"] = rj;
    j["ratio_checks"] = checks;
    j["data"] = "fig4_roots.csv";

    SvgPlot plot("Zeros of Q_{n,0}, Q_{n,1}, Q_{n,2} for [1, f, f^2], n = " + std::to_string(n));
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    for (const auto& a : arcs)
        for (const auto& z : a.nodes) x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real()), y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
    const double margin = 0.35 * std::max(x1 - x0, y1 - y0);
    x0 -= margin, x1 += margin, y0 -= margin, y1 += margin;
    plot.view(x0, x1, y0, y1);
    Json outside = Json::array();
    for (const auto& r : roots) {
        int count = 0;
        for (const auto& z : r.values()) count += (z.real() < x0 || z.real() > x1 || z.imag() < y0 || z.imag() > y1) ? 1 : 0;
        outside.push_back(count);
    }
    j["plot_window"] = {x0, x1, y0, y1};
    j["zeros_outside_window"] = outside;
    for (const auto& a : arcs) plot.polyline(a.nodes, "#999999", 1.5);
    const std::vector<std::string> labels{"Q_{n,0}", "Q_{n,1}", "Q_{n,2}"};
    for (std::size_t k = 0; k < 3; ++k) plot.points(roots[k].values(), kPalette[k], 2.5, labels[k]);
    for (const auto& a : b.points_c()) plot.marker(a, "black", "");

    sink.text("fig4_roots.csv", fig4_csv(roots));
    sink.json("fig4.json", j);
    sink.text("fig4.svg", plot.render());
}

void dispatch(const ExperimentConfig& cfg, ArtifactSink& sink);

}  // namespace

// ---------------------------------------------------------------------------

std::vector<fs::path> execute(ExperimentConfig cfg)
{
    stage("config", [&] {
        const auto& names = subcommands();
        if (std::find(names.begin(), names.end(), cfg.command) == names.end()) throw ConfigError("unknown subcommand '" + cfg.command + "'");
        if (cfg.command == "figure4" && cfg.points.empty()) {
            cfg.points = {"1", "-1", "-1/3*sqrt(-3)"};
            cfg.exponents = {"1/3", "1/3", "-2/3"};
        }
        if (cfg.command == "lg" && cfg.points.empty()) {
            cfg.points = {"1", "-1"};
            cfg.exponents = {"1/4", "-1/4"};
        }
        if ((cfg.command == "chebotarev" || cfg.command == "trace") && cfg.exponents.empty() && !cfg.points.empty()) {
            // the geometry ignores the exponents
            cfg.exponents.assign(cfg.points.size(), "1/3");
            cfg.exponents.back() = to_string(ratio(-static_cast<long>(cfg.points.size() - 1), 3));
        }
        if (cfg.bits == 0) cfg.bits = default_precision_bits();
        if (cfg.bits < 64) throw ConfigError("precision must be at least 64 bits");
        if (cfg.arithmetic != "exact" && cfg.arithmetic != "float") throw ConfigError("arithmetic must be 'exact' or 'float'");
        if (cfg.jobs < 1) throw ConfigError("jobs must be positive");
        for (int n : cfg.n)
            if (n < 1 && cfg.command != "recurrence") throw ConfigError("indices must be positive");
        const bool needs_n = cfg.command == "pade" || cfg.command == "hp" || cfg.command == "zeros" || cfg.command == "recurrence" ||
                             cfg.command == "ode-recover" || cfg.command == "ode-verify";
        if (needs_n && cfg.n.empty()) throw ConfigError(cfg.command + " needs --n");
        normalize_options(cfg);
        if (cfg.command != "density") cfg.branch();
        return 0;
    });

    ArtifactSink sink = stage("output", [&] { return ArtifactSink(cfg.out_dir); });
    const std::string& c = cfg.command;
    try {
        dispatch(cfg, sink);
    } catch (const ConfigError& e) {
        throw StageError("config", "ConfigError", e.what(), 2);
    } catch (const std::filesystem::filesystem_error& e) {
        throw StageError("output", "Error", e.what(), 1);
    }
    stage("output", [&] {
        sink.json(c + ".config.json", cfg.to_json());
        return 0;
    });
    return sink.written();
}

namespace {
void dispatch(const ExperimentConfig& cfg, ArtifactSink& sink)
{
    const std::string& c = cfg.command;
    if (c == "series") cmd_series(cfg, sink);
    else if (c == "pade") cmd_solve(cfg, sink, 2);
    else if (c == "hp") cmd_solve(cfg, sink, 3);
    else if (c == "zeros") cmd_zeros(cfg, sink);
    else if (c == "recurrence") cmd_recurrence(cfg, sink);
    else if (c == "ode-recover") cmd_ode_recover(cfg, sink);
    else if (c == "ode-verify") cmd_ode_verify(cfg, sink);
    else if (c == "chebotarev") cmd_chebotarev(cfg, sink);
    else if (c == "trace") cmd_trace(cfg, sink);
    else if (c == "density") cmd_density(cfg, sink);
    else if (c == "lg") cmd_lg(cfg, sink);
    else if (c == "figure4") cmd_figure4(cfg, sink);
}
}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Pade and Hermite-Pade experiments for algebraic functions", "hplab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("hplab ") + HPLAB_VERSION);

    struct Flags {
        std::string config, points, exponents, alpha, n, arithmetic, out;
        int bits = 0, jobs = 0;
        std::map<std::string, std::string> opts;
    } flags;

    const std::map<std::string, std::vector<std::pair<std::string, std::string>>> option_flags{
        {"series", {{"order", "Number of 1/z powers"}}},
        {"zeros", {{"kind", "hp or pade"}, {"poly", "Polynomial index j"}, {"stats", "auto, on or off"}}},
        {"ode-recover", {{"order", "ODE order (2 or 3)"}}},
        {"ode-verify", {{"constants", "published, annihilating or both"}}},
        {"trace", {{"step", "Step relative to the diameter"}}},
        {"density", {{"grid", "Grid points"}, {"r_max", "Largest |x|"}}},
        {"lg", {{"z", "End point re,im"}, {"cubic", "limit or ode"}, {"variant", "second or first"}, {"path", "Polyline x,y;x,y;..."}, {"max_step", "Step bound"}}},
        {"figure4", {{"probe_offset", "Probe distance from the arcs"}}},
    };

    for (const auto& name : subcommands()) {
        CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        sub->add_option("--config", flags.config, "JSON configuration file");
        sub->add_option("--points", flags.points, "Branch points, comma separated exact strings");
        sub->add_option("--exponents", flags.exponents, "Exponents, comma separated rationals");
        sub->add_option("--alpha", flags.alpha, "Shortcut for points 1,-1 with exponents alpha,-alpha");
        sub->add_option("--n", flags.n, "Index, range a:b[:step] or list");
        sub->add_option("--bits", flags.bits, "Float precision in bits");
        sub->add_option("--arithmetic", flags.arithmetic, "exact or float");
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--jobs", flags.jobs, "Parallel tasks over n");
        const auto it = option_flags.find(name);
        if (it != option_flags.end())
            for (const auto& [key, help] : it->second) {
                std::string flag = "--" + key;
                std::replace(flag.begin(), flag.end(), '_', '-');
                sub->add_option(flag, flags.opts[key], help);
            }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        const StageError se("config", "UsageError", e.what(), 2);
        err << se.record().dump() << '\n';
        return 2;
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        ExperimentConfig cfg = stage("config", [&] {
            ExperimentConfig c;
            if (!flags.config.empty()) {
                std::ifstream in(flags.config);
                if (!in) throw ConfigError("cannot read configuration file " + flags.config);
                Json j;
                try {
                    j = Json::parse(in);
                } catch (const Json::parse_error& e) {
                    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
                }
                c = ExperimentConfig::from_json(j);
            }
            c.command = command;
            if (!flags.alpha.empty()) {
                c.points = {"1", "-1"};
                c.exponents = {flags.alpha, to_string(Rational(-parse_rational(flags.alpha)))};
            }
            if (!flags.points.empty()) c.points = ExperimentConfig::from_json(Json{{"points", flags.points}}).points;
            if (!flags.exponents.empty()) c.exponents = ExperimentConfig::from_json(Json{{"exponents", flags.exponents}}).exponents;
            if (!flags.n.empty()) c.n = parse_n_list(flags.n);
            if (flags.bits != 0) c.bits = flags.bits;
            if (!flags.arithmetic.empty()) c.arithmetic = flags.arithmetic;
            if (!flags.out.empty()) c.out_dir = flags.out;
            if (flags.jobs != 0) c.jobs = flags.jobs;
            for (const auto& [key, value] : flags.opts)
                if (!value.empty()) c.options[key] = value;
            return c;
        });
        for (const auto& p : execute(std::move(cfg))) out << p.string() << '\n';
        return 0;
    } catch (const StageError& e) {
        err << e.record().dump() << '\n';
        return e.exit_code();
    }
}

}  // namespace hplab::cli
