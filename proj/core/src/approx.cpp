#include "hplab/approx.hpp"

#include <cmath>

namespace hplab {

HPSolution<BigComplex> solve_float(const BranchConfig& cfg, int n, int kind, const FloatPolicy& policy)
{
    if (kind != 2 && kind != 3) throw DomainError("kind must be 2 (Pade) or 3 (Hermite-Pade)");
    cfg.validate(kind == 3);
    const int order = kind == 2 ? 2 * n + 2 : 4 * n + 4;
    for (int bits = policy.start_bits;; bits *= 2) {
        const BigComplex like(bits);
        const auto f = expand_f(cfg, order, like);
        HPSolution<BigComplex> sol = kind == 2 ? pade_solve(f, n) : hp_solve(f, expand_power(f, 2), n);
        // float_nullspace reports |Mx| / max|x|; the matrix entries are O(1) up to growth in the series
        double scale = 1.0;
        for (const auto& c : f.coeffs()) scale = std::max(scale, abs(c).to_double());
        const double bound = std::ldexp(scale, -bits / 2);
        if (sol.diagnostics.residual <= bound || bits * 2 > policy.cap_bits) {
            if (sol.diagnostics.residual > bound)
                throw ConvergenceError("float solve did not reach its residual bound at " + std::to_string(bits) + " bits");
            return sol;
        }
    }
}

}  // namespace hplab
