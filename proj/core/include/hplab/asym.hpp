#pragma once

#include "hplab/approx.hpp"
#include "hplab/geometry.hpp"
#include "hplab/ode.hpp"
#include "hplab/series.hpp"

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace hplab {

/// The compact S for two points (a segment) or three points (Stahl arcs).
TrajectorySet stahl_compact(const BranchConfig& cfg);

/// V^{lambda_S}(z) = gamma_S - g_S(z), with gamma_S read off the potential on S.
class EquilibriumPotential {
public:
    explicit EquilibriumPotential(TrajectorySet set);

    double robin_constant() const { return gamma_; }
    const TrajectorySet& compact() const { return set_; }
    double operator()(cplx z) const;

private:
    TrajectorySet set_;
    double gamma_ = 0.0;
};

/// A polyline from a base point at infinity to z that climbs the Green
/// function, so it never crosses S. Usable as the path argument of eval_f.
Path path_from_infinity(const BranchConfig& cfg, const TrajectorySet& set, cplx z);

struct PadeAsymRow {
    int n = 0;
    double p_root = 0.0;  // |P*_{n,1}(z)|^{1/n}
    double t_root = 0.0;  // |T*_n(z)|^{1/n}, T*_n = T_n / C_n with T_n = C_n z^{-n-1} + ...
};

struct PadeAsymTable {
    cplx z;
    double potential = 0.0;
    double p_limit = 0.0;  // e^{-V}
    double t_limit = 0.0;  // e^{V}
    std::vector<PadeAsymRow> rows;
};

/// Throws DomainError on an abnormal index, ConvergenceError if T_n(z) cancels
/// below the working precision.
PadeAsymTable pade_root_asym_check(const BranchConfig& cfg, cplx z, const std::vector<int>& n_list, int bits = 512);

/// The arcs of S oriented from each branch point towards the junction (or from a_1 to a_2).
std::vector<Arc> stahl_arcs(const TrajectorySet& set);

/// The point at `fraction` of the arc length, moved by `offset` along the left normal.
cplx arc_probe(const Arc& arc, double fraction = 0.5, double offset = 0.0);

struct RatioCheck {
    cplx ratio;   // Q_{n,1} / Q_{n,2} at the probe
    cplx target;  // -(f+ + f-) continued to the probe; NaN at infinity
    double relerr = 0.0;
};

/// Q_{n,1}/Q_{n,2}(probe) against -(f+ + f-) continued from the closest point of
/// `arc`. A probe at infinity (any infinite component) returns the ratio of
/// leading coefficients. Throws ClearanceError when Q_{n,2}(probe) is negligible.
RatioCheck hp_ratio_check(const BranchConfig& cfg, int n, cplx probe, const Arc& arc, int bits = 256);

/// The same check on an existing exact solution (T = Rational or QF).
template <class T>
RatioCheck hp_ratio_check(const BranchConfig& cfg, const HPSolution<T>& sol, cplx probe, const Arc& arc, int bits = 256);

enum class AmplitudeVariant {
    second_derivative,  // sum phi''_j / (phi'_j - phi'_k)
    first_derivative,   // sum phi'_j / (phi'_j - phi'_k)
};

struct SheetValues {
    cplx z;
    /// Sorted by Re phi, largest first.
    std::array<cplx, 3> phi_prime{};
    std::array<cplx, 3> phi{};
    std::array<double, 3> re_phi{};
};

struct LgOptions {
    AmplitudeVariant variant = AmplitudeVariant::second_derivative;
    /// When set, path.front() lies next to this branch point of the cubic and
    /// phi starts from zero there (the short singular piece is integrated from
    /// a local power law). Otherwise phi starts at `phi0` in the root order of
    /// cubic.roots(path.front()).
    std::optional<cplx> branch_point;
    std::array<cplx, 3> phi0{};
    double max_step = 1e-2;
    /// Largest root movement per step, relative to the largest root.
    double max_root_change = 0.02;
    /// Minimal admissible root gap relative to the root scale.
    double clearance = 1e-9;
};

struct LgResult {
    SheetValues sheets;
    /// Same order as sheets: -int sum_k X_j / (phi'_j - phi'_k) from path.front().
    std::array<cplx, 3> log_amplitude{};
    /// n phi_j + log_amplitude_j.
    std::array<cplx, 3> log_w{};
    /// Root order along the path: tracked[j] is the sheet index of the j-th root of cubic.roots(path.front()).
    std::array<int, 3> tracked{};
    bool strictly_ordered = false;
    double min_gap = 0.0;          // smallest gap between sorted Re phi at the end
    double vieta_residual = 0.0;   // max |sum phi' + r2| / max(1, |r2|) over all nodes
    int steps = 0;
};

/// Tracks the three roots of the cubic continuously along `path` and integrates
/// phi and the LG amplitude. Throws ClearanceError when two roots come within
/// the clearance of each other.
LgResult lg_eval(const CharacteristicCubic& cubic, const std::vector<cplx>& path, int n, const LgOptions& opts = {});

struct TiePoint {
    double x = 0.0;
    double y = 0.0;
    /// 0 when the upper two Re phi values tie, 1 for the lower two.
    int pair = 0;
};

/// Points where two Re phi values coincide on vertical lines Re z = x, found by
/// bisection between y = +height and y = -height. The sheets are continued from
/// `branch_point` along a path that stays above the real axis.
std::vector<TiePoint> tie_locus(const CharacteristicCubic& cubic, cplx branch_point, const std::vector<double>& xs, double height = 0.5,
                                int samples = 40, double tol = 1e-6);

}  // namespace hplab
