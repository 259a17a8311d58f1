#pragma once

#include "hplab/error.hpp"
#include "hplab/poly.hpp"
#include "hplab/scalar.hpp"

#include <complex>
#include <string>
#include <vector>

namespace hplab {

struct Root {
    BigComplex value;
    std::complex<double> approx;
    /// |p(r)| / sum |c_k| |r|^k, evaluated at twice the working precision.
    double residual = 0.0;
    /// Weierstrass inclusion radius at the final iterate.
    double radius = 0.0;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<Root> roots;
    int degree = 0;
    int precision_bits = 0;   // working precision that produced the roots
    double residual_bound = 0.0;
    bool certified = false;
    int iterations = 0;

    /// Number of roots counted with multiplicity.
    int count() const;
    std::vector<std::complex<double>> values() const;
    double max_residual() const;
};

/// Thrown when no precision in the escalation budget yields certified roots.
class RootConvergenceError : public ConvergenceError {
public:
    RootConvergenceError(const std::string& what, RootSet best) : ConvergenceError(what), best_(std::move(best)) {}
    const RootSet& best() const { return best_; }

private:
    RootSet best_;
};

/// Aberth iteration at `bits`. Each root must satisfy
/// |p(r)| <= 2^{-bits/2} sum |c_k| |r|^k when re-evaluated at 2*bits; roots
/// whose inclusion discs overlap are merged into one cluster with a multiplicity.
/// Coefficients are taken as given; see the template overload for exact input.
RootSet find_roots(const Poly<BigComplex>& p, int bits, int max_iterations = 0);

/// Exact coefficients are embedded at the working precision, doubling it
/// (at most `escalations` times) until the residual certificate holds.
template <class T>
RootSet find_roots(const Poly<T>& p, int bits, int escalations = 3)
{
    if (p.degree() < 1) throw DomainError("root finding needs degree >= 1");
    std::string last;
    RootSet best;
    for (int attempt = 0, b = bits; attempt <= escalations; ++attempt, b *= 2) {
        std::vector<BigComplex> c;
        c.reserve(p.coeffs().size());
        for (const auto& x : p.coeffs()) c.push_back(embed(x, 2 * b));
        try {
            RootSet r = find_roots(Poly<BigComplex>(std::move(c)), b);
            if (r.certified) return r;
            best = std::move(r);
        } catch (const RootConvergenceError& e) {
            best = e.best();
            last = e.what();
        }
    }
    throw RootConvergenceError("roots not certified after precision escalation" + (last.empty() ? "" : ": " + last), best);
}

std::string roots_csv(const RootSet& roots);

/// sqrt(3)/(2 pi) (x^2-1)^{-1/3} ((|x|-1)^{-1/3} - (|x|+1)^{-1/3}), |x| > 1.
double density128(double x);
/// Mass of the density on {1 < |x| <= r}, by quadrature.
double density128_cdf(double r);
/// Inverse of density128_cdf on (0, 1).
double density128_quantile(double q);

struct DensityProfile {
    std::vector<double> grid;     // r > 1, the density being even
    std::vector<double> density;
    std::vector<double> cdf;      // folded: mass of {1 < |x| <= r}
    double total_mass = 0.0;
};

/// Tabulates the density and its folded CDF on a grid with log-spaced r - 1.
DensityProfile density_profile(int points = 200, double r_max = 1e4);

std::string cdf_csv(const DensityProfile& profile);

/// V(z) = -int log|z - x| rho(x) dx for the limit density. Throws DomainError on the support.
double potential_from_density(const DensityProfile& profile, std::complex<double> z);

struct IntervalCount {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    double expected = 0.0;
};

struct ZeroStats {
    double ks_distance = 0.0;
    int count = 0;
    std::vector<IntervalCount> intervals;  // deciles of the limit distribution
};

/// Kolmogorov-Smirnov distance between the folded empirical distribution of
/// real roots and the limit CDF. Throws DomainError for an empty set or for
/// roots with |Im r| > imag_tol * max(1, |r|).
ZeroStats zero_stats(const std::vector<std::complex<double>>& roots, const DensityProfile& profile, double imag_tol = 1e-10);
ZeroStats zero_stats(const RootSet& roots, const DensityProfile& profile, double imag_tol = 1e-10);

}  // namespace hplab
