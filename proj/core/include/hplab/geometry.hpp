#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace hplab {

using cplx = std::complex<double>;

/// (t - c)^e with e = +-1/2.
struct RootFactor {
    cplx c;
    double e;
};

struct SegmentIntegral {
    cplx value;
    cplx start_value;  // integrand at p0 (meaningful only when p0 is not a factor center)
    cplx end_value;    // integrand at p1 (likewise)
};

/// Integral of prod (t - c_k)^{e_k} along the straight segment p0 -> p1 on a
/// branch that is continuous along the segment. Centers may coincide with
/// either endpoint; the resulting square-root endpoint behavior is absorbed
/// by the substitution s = sin^2(theta).
SegmentIntegral integrate_segment(const std::vector<RootFactor>& factors, cplx p0, cplx p1, double tol = 1e-13);

/// q(z) = (z - v) / A(z) for three points, or 1 / A(z) for two.
struct QuadraticDifferential {
    std::vector<cplx> points;
    std::optional<cplx> zero;

    cplx q(cplx z) const;
    double diameter() const;
    /// Factors of sqrt(q), optionally with the zero's exponent shifted by `zero_shift`.
    std::vector<RootFactor> sqrt_factors(double zero_shift = 0.0) const;
};

struct ChebotarevPoint {
    cplx v;
    std::array<double, 2> period_residuals{};
    /// Re of the remaining period, reported as a consistency check.
    double third_residual = 0.0;
    int iterations = 0;
};

/// Fermat-Torricelli point by Weiszfeld iteration.
cplx fermat_point(const std::vector<cplx>& a);

/// Solves Re int_v^{a_j} sqrt((t-v)/A(t)) dt = 0 (j = 1, 2) by damped Newton
/// from the Fermat point. Throws DomainError for near-collinear input and
/// ConvergenceError if Newton stalls.
ChebotarevPoint chebotarev_point(const std::vector<cplx>& a, double tol = 1e-13, int max_iterations = 60);

enum class EndpointKind { branch_point, junction, open };

struct TrajectoryArc {
    std::vector<cplx> nodes;
    /// Tracked value of sqrt(q) at each node (zero at the endpoints).
    std::vector<cplx> sqrt_q;
    /// Phi(node) = int_{start}^{node} sqrt(q) along the arc.
    std::vector<cplx> phi;
    EndpointKind start_kind = EndpointKind::junction;
    EndpointKind end_kind = EndpointKind::branch_point;
    int end_index = -1;        // index of the branch point reached
    double end_distance = 0;   // distance from the last traced node to that point
};

struct TrajectorySet {
    QuadraticDifferential qd;
    std::vector<TrajectoryArc> arcs;
    int steps = 0;
    double min_step = 0.0;
    double max_step = 0.0;
};

struct TraceOptions {
    double step = 0.01;          // relative to the diameter
    double end_tolerance = 5e-9; // relative to the diameter
    double start_radius = 1e-3;  // relative to the diameter
    int max_steps = 20000;
};

/// Three critical trajectories from v, one per sector. Throws
/// ConvergenceError when an arc does not reach a branch point, and
/// InconsistencyError when the arcs do not end at distinct points or meet away from v.
TrajectorySet trace_stahl(const std::vector<cplx>& a, const ChebotarevPoint& v, const TraceOptions& opts = {});

/// The two-point compact: the segment [a1, a2] as a single arc.
TrajectorySet segment_compact(cplx a1, cplx a2);

/// Polylines as a JSON array of arrays of [re, im] pairs.
std::string trajectories_json(const TrajectorySet& set);

struct GreenValue {
    double g = 0.0;
    cplx phi_prime;
};

/// Green's function of the complement of S with pole at infinity, and
/// phi'(z) = -sqrt(q(z)) on the branch with phi' ~ -1/z at infinity.
/// Throws ClearanceError when z is within 1e-9 * diameter of a branch point
/// or lies on S itself (g below 1e-13).
GreenValue green_phi(const TrajectorySet& set, cplx z);

struct MeasureSample {
    std::vector<cplx> nodes;
    std::vector<double> weights;
    std::vector<int> arc;
    std::vector<double> arc_mass;
    double total_mass = 0.0;
};

/// Equilibrium measure of S, parameterized per arc by sigma in [0, 1] with
/// mass coordinate m = M sigma^k (k = 3 from the junction, 1 from a branch
/// point), which makes the arc point an analytic function of sigma. The
/// map is stored as a Chebyshev interpolant.
class StahlMeasure {
public:
    explicit StahlMeasure(const TrajectorySet& set, int chart_degree = 96);

    const TrajectorySet& trajectories() const { return set_; }
    int arc_count() const { return static_cast<int>(charts_.size()); }
    double arc_mass(int arc) const { return charts_[static_cast<std::size_t>(arc)].mass; }
    double total_mass() const;

    /// Point of the arc at chart parameter sigma.
    cplx point(int arc, double sigma) const;
    /// Exact solve of Phi(zeta) = i pi m (bypassing the interpolant).
    cplx solve_point(int arc, double mass_coordinate) const;

    /// Gauss-Legendre nodes in sigma, weights are masses.
    MeasureSample sample(int nodes_per_arc = 64) const;

    /// V(z) = int log(1/|z - zeta|) dlambda(zeta), accurate on and near S.
    double potential(cplx z) const;
    /// int dlambda(zeta) / (z - zeta).
    cplx cauchy(cplx z) const;

    struct Nearest {
        int arc;
        double sigma;
        double distance;
    };
    Nearest nearest(cplx z) const;
    Nearest nearest_on(int arc, cplx z) const;

private:
    struct Chart {
        int exponent = 1;
        double mass = 0.0;
        cplx phi_sign;  // maps Phi along the arc to i * pi * m
        std::vector<cplx> values;
    };

    TrajectorySet set_;
    std::vector<Chart> charts_;
    std::vector<double> cheb_nodes_;
};

/// Convenience wrapper matching the sample-based description.
MeasureSample lambda_s_quadrature(const TrajectorySet& set, int nodes_per_arc = 64);

struct SPropertyResult {
    double dplus = 0.0;
    double dminus = 0.0;
    cplx normal;  // unit normal pointing to the + side
};

/// One-sided normal derivatives of V at zeta on S (second-order one-sided
/// differences at h and 2h). Throws DomainError if zeta is off S or within
/// 10% of the arc length from an endpoint, and ConvergenceError when the
/// estimates at h and h/2 disagree by more than 1%.
SPropertyResult s_property_check(const StahlMeasure& measure, cplx zeta, double h);

}  // namespace hplab
