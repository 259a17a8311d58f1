#include "hplab/ode.hpp"

#include <cmath>

namespace hplab {

OdeSystem<Rational> build_ode2_jacobi(int n, const Rational& alpha)
{
    OdeSystem<Rational> sys;
    sys.order = 2;
    sys.n = n;
    sys.coeffs = {
        Poly<Rational>{Rational(-1), Rational(0), Rational(1)},
        Poly<Rational>{Rational(-2 * alpha), Rational(2)},
        Poly<Rational>{Rational(-n * (n + 1))},
    };
    return sys;
}

OdeSystem<Rational> build_ode3_p2(int n, const Rational& alpha, Ode3Constants constants)
{
    const bool published = constants == Ode3Constants::published;
    const Poly<Rational> a{Rational(-1), Rational(0), Rational(1)};
    const Poly<Rational> shift{Rational(-alpha), Rational(1)};
    const long nl = n;
    OdeSystem<Rational> sys;
    sys.order = 3;
    sys.n = n;
    sys.coeffs.push_back(a * a);
    sys.coeffs.push_back(a * shift * Rational(6));
    sys.coeffs.push_back(-Poly<Rational>{Rational(-(3 * nl * (nl + 1)) - 8 * alpha * alpha + (published ? 10 : 2)), Rational(12 * alpha),
                                         Rational(3 * (nl - 1) * (nl + 2))});
    sys.coeffs.push_back(Poly<Rational>{Rational(2 * alpha * (3 * nl * (nl + 1) - (published ? 8 : 0))), Rational(2 * nl * (nl * nl - 1))});
    return sys;
}

DegreeProfile order2_profile(int p) { return {2 * p - 2, 2 * p - 3, 2 * p - 4}; }

DegreeProfile order3_profile(int p) { return {5 * p - 6, 5 * p - 7, 5 * p - 8, 5 * p - 9}; }

// ---------------------------------------------------------------------------

namespace {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

cplx eval(const Poly<cplx>& p, cplx z) { return p.eval(z); }

}  // namespace

std::array<cplx, 3> solve_cubic(cplx a, cplx b, cplx c)
{
    // Depressed cubic via Cardano, then Newton polishing in extended precision.
    const cplx shift = -a / 3.0;
    const cplx p = b - a * a / 3.0;
    const cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const cplx disc = q * q / 4.0 + p * p * p / 27.0;
    const cplx s = std::sqrt(disc);
    cplx u3 = -q / 2.0 + s;
    if (std::abs(-q / 2.0 - s) > std::abs(u3)) u3 = -q / 2.0 - s;
    const cplx u = std::pow(u3, 1.0 / 3.0);
    const cplx w(-0.5, std::sqrt(3.0) / 2.0);
    std::array<cplx, 3> r;
    for (int k = 0; k < 3; ++k) {
        const cplx uk = u * std::pow(w, k);
        const cplx vk = std::abs(uk) > 0.0 ? -p / (3.0 * uk) : cplx(0.0);
        r[static_cast<std::size_t>(k)] = uk + vk + shift;
    }
    const lcplx A(a), B(b), C(c);
    for (auto& x : r) {
        lcplx y(x);
        for (int it = 0; it < 4; ++it) {
            const lcplx f = ((y + A) * y + B) * y + C;
            const lcplx df = (3.0L * y + 2.0L * A) * y + B;
            if (std::abs(df) == 0.0L) break;
            const lcplx step = f / df;
            y -= step;
            if (std::abs(step) <= 1e-19L * std::abs(y)) break;
        }
        x = cplx(y);
    }
    return r;
}

std::array<cplx, 3> CharacteristicCubic::coefficients(cplx z) const
{
    const cplx d = eval(p_[3], z);
    if (d == 0.0) throw DomainError("characteristic cubic degenerates at a zero of its leading coefficient");
    return {eval(p_[2], z) / d, eval(p_[1], z) / d, eval(p_[0], z) / d};
}

std::array<cplx, 3> CharacteristicCubic::roots(cplx z) const
{
    const auto r = coefficients(z);
    return solve_cubic(r[0], r[1], r[2]);
}

cplx CharacteristicCubic::root_derivative(cplx z, cplx p) const
{
    cplx fz(0.0), fp(0.0), pk(1.0);
    for (int k = 0; k <= 3; ++k) {
        fz += eval(p_[static_cast<std::size_t>(k)].derivative(), z) * pk;
        if (k >= 1) fp += static_cast<double>(k) * eval(p_[static_cast<std::size_t>(k)], z) * std::pow(p, k - 1);
        pk *= p;
    }
    return -fz / fp;
}

cplx CharacteristicCubic::discriminant(cplx z) const
{
    const cplx a = eval(p_[3], z), b = eval(p_[2], z), c = eval(p_[1], z), d = eval(p_[0], z);
    return b * b * c * c - 4.0 * a * c * c * c - 4.0 * b * b * b * d - 27.0 * a * a * d * d + 18.0 * a * b * c * d;
}

CharacteristicCubic limit_cubic_p2()
{
    using P = Poly<cplx>;
    const P a{cplx(-1), cplx(0), cplx(1)};
    return CharacteristicCubic({P{cplx(0), cplx(2)}, a * cplx(-3), P{}, a * a}, 0);
}

}  // namespace hplab
