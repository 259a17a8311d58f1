#include "hplab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace hplab {

namespace {

// ----- integer ring Z -------------------------------------------------------

struct IntRing {
    using Elem = mpz_class;
    static bool zero(const Elem& x) { return sgn(x) == 0; }
    static std::size_t size(const Elem& x) { return mpz_sizeinbase(x.get_mpz_t(), 2); }
    static Elem mul_sub(const Elem& p, const Elem& a, const Elem& q, const Elem& b)
    {
        mpz_class r = p * a;
        mpz_submul(r.get_mpz_t(), q.get_mpz_t(), b.get_mpz_t());
        return r;
    }
    static void divexact(Elem& x, const Elem& d) { mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t()); }
};

// ----- Z[sqrt d], d < 0 -----------------------------------------------------

struct ZD {
    mpz_class a;  // rational part
    mpz_class b;  // coefficient of sqrt(d)
};

struct QuadRing {
    using Elem = ZD;
    long d = 0;

    static bool zero(const Elem& x) { return sgn(x.a) == 0 && sgn(x.b) == 0; }
    static std::size_t size(const Elem& x)
    {
        return std::max(mpz_sizeinbase(x.a.get_mpz_t(), 2), mpz_sizeinbase(x.b.get_mpz_t(), 2));
    }
    Elem mul(const Elem& x, const Elem& y) const
    {
        return {x.a * y.a + d * (x.b * y.b), x.a * y.b + x.b * y.a};
    }
    Elem mul_sub(const Elem& p, const Elem& a, const Elem& q, const Elem& b) const
    {
        Elem l = mul(p, a);
        const Elem r = mul(q, b);
        l.a -= r.a;
        l.b -= r.b;
        return l;
    }
    void divexact(Elem& x, const Elem& y) const
    {
        // x / y = x * conj(y) / N(y) with N(y) = y.a^2 - d y.b^2 a positive integer.
        const mpz_class n = y.a * y.a - d * (y.b * y.b);
        Elem t = mul(x, Elem{y.a, -y.b});
        mpz_divexact(x.a.get_mpz_t(), t.a.get_mpz_t(), n.get_mpz_t());
        mpz_divexact(x.b.get_mpz_t(), t.b.get_mpz_t(), n.get_mpz_t());
    }
};

// ----- fraction-free row echelon form ---------------------------------------

template <class Ring>
struct Echelon {
    std::vector<std::vector<typename Ring::Elem>> rows;
    std::vector<int> pivot_cols;
};

template <class Ring>
Echelon<Ring> bareiss(std::vector<std::vector<typename Ring::Elem>> a, int cols, const Ring& ring)
{
    using Elem = typename Ring::Elem;
    const int rows = static_cast<int>(a.size());
    Echelon<Ring> out;
    Elem prev;
    bool have_prev = false;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int best = -1;
        std::size_t best_size = std::numeric_limits<std::size_t>::max();
        for (int i = r; i < rows; ++i) {
            const auto& x = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            if (Ring::zero(x)) continue;
            const std::size_t s = Ring::size(x);
            if (s < best_size) {
                best = i;
                best_size = s;
            }
        }
        if (best < 0) continue;
        std::swap(a[static_cast<std::size_t>(r)], a[static_cast<std::size_t>(best)]);
        const auto& piv_row = a[static_cast<std::size_t>(r)];
        const Elem piv = piv_row[static_cast<std::size_t>(c)];
        for (int i = r + 1; i < rows; ++i) {
            auto& row = a[static_cast<std::size_t>(i)];
            const Elem lead = row[static_cast<std::size_t>(c)];
            for (int j = c + 1; j < cols; ++j) {
                auto& x = row[static_cast<std::size_t>(j)];
                x = ring.mul_sub(piv, x, lead, piv_row[static_cast<std::size_t>(j)]);
                if (have_prev) ring.divexact(x, prev);
            }
            row[static_cast<std::size_t>(c)] = Elem{};
        }
        prev = piv;
        have_prev = true;
        out.pivot_cols.push_back(c);
        ++r;
    }
    a.resize(static_cast<std::size_t>(r));
    out.rows = std::move(a);
    return out;
}

template <class F, class Ring, class ToField>
std::vector<std::vector<F>> back_substitute(const Echelon<Ring>& e, int cols, ToField to_field, const F& zero, const F& one)
{
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (int c : e.pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;

    std::vector<std::vector<F>> basis;
    for (int free = 0; free < cols; ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        std::vector<F> x(static_cast<std::size_t>(cols), zero);
        x[static_cast<std::size_t>(free)] = one;
        for (int k = static_cast<int>(e.pivot_cols.size()) - 1; k >= 0; --k) {
            const int pc = e.pivot_cols[static_cast<std::size_t>(k)];
            if (pc > free) continue;  // later pivots stay zero for this free column
            const auto& row = e.rows[static_cast<std::size_t>(k)];
            F acc = zero;
            for (int j = pc + 1; j < cols; ++j) {
                const auto& coef = row[static_cast<std::size_t>(j)];
                if (Ring::zero(coef) || is_zero(x[static_cast<std::size_t>(j)])) continue;
                acc += to_field(coef) * x[static_cast<std::size_t>(j)];
            }
            x[static_cast<std::size_t>(pc)] = -acc / to_field(row[static_cast<std::size_t>(pc)]);
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

mpz_class lcm_of(const mpz_class& a, const mpz_class& b)
{
    mpz_class r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

}  // namespace

Nullspace<Rational> exact_nullspace(const Matrix<Rational>& m)
{
    std::vector<std::vector<mpz_class>> a(static_cast<std::size_t>(m.rows()));
    for (int r = 0; r < m.rows(); ++r) {
        mpz_class l = 1;
        for (int c = 0; c < m.cols(); ++c) l = lcm_of(l, m(r, c).get_den());
        auto& row = a[static_cast<std::size_t>(r)];
        row.reserve(static_cast<std::size_t>(m.cols()));
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c).get_num() * (l / m(r, c).get_den()));
    }
    const auto e = bareiss(std::move(a), m.cols(), IntRing{});
    Nullspace<Rational> out;
    out.rank = static_cast<int>(e.pivot_cols.size());
    out.basis = back_substitute<Rational>(e, m.cols(), [](const mpz_class& z) { return Rational(z); }, Rational(0), Rational(1));
    return out;
}

Nullspace<QF> exact_nullspace(const Matrix<QF>& m)
{
    long d = 0;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) d = common_discriminant(d, m(r, c).d());

    if (d == 0) {
        Matrix<Rational> q(m.rows(), m.cols(), Rational(0));
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) q(r, c) = m(r, c).re();
        const auto ns = exact_nullspace(q);
        Nullspace<QF> out;
        out.rank = ns.rank;
        for (const auto& v : ns.basis) {
            std::vector<QF> w;
            for (const auto& x : v) w.emplace_back(x);
            out.basis.push_back(std::move(w));
        }
        return out;
    }

    std::vector<std::vector<ZD>> a(static_cast<std::size_t>(m.rows()));
    for (int r = 0; r < m.rows(); ++r) {
        mpz_class l = 1;
        for (int c = 0; c < m.cols(); ++c) {
            l = lcm_of(l, m(r, c).re().get_den());
            l = lcm_of(l, m(r, c).im().get_den());
        }
        auto& row = a[static_cast<std::size_t>(r)];
        for (int c = 0; c < m.cols(); ++c) {
            const QF& x = m(r, c);
            row.push_back({x.re().get_num() * (l / x.re().get_den()), x.im().get_num() * (l / x.im().get_den())});
        }
    }
    const QuadRing ring{d};
    const auto e = bareiss(std::move(a), m.cols(), ring);
    Nullspace<QF> out;
    out.rank = static_cast<int>(e.pivot_cols.size());
    const QF zero(Rational(0), Rational(0), d);
    const QF one(Rational(1), Rational(0), d);
    out.basis = back_substitute<QF>(e, m.cols(), [d](const ZD& z) { return QF(Rational(z.a), Rational(z.b), d); }, zero, one);
    return out;
}

// ----- floating point -------------------------------------------------------

namespace {

BigFloat norm2(const std::vector<BigComplex>& v, int bits)
{
    BigFloat s(bits);
    for (const auto& x : v) s = s + x.re() * x.re() + x.im() * x.im();
    return s;
}

}  // namespace

Nullspace<BigComplex> float_nullspace(const Matrix<BigComplex>& m, double tol_log2)
{
    const int rows = m.rows();
    const int cols = m.cols();
    int bits = std::numeric_limits<int>::max();
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) bits = std::min(bits, m(r, c).precision_bits());
    if (rows == 0 || cols == 0) bits = 53;

    // Column-major working copy.
    std::vector<std::vector<BigComplex>> a(static_cast<std::size_t>(cols));
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) a[static_cast<std::size_t>(c)].push_back(m(r, c));
    std::vector<int> perm(static_cast<std::size_t>(cols));
    for (int c = 0; c < cols; ++c) perm[static_cast<std::size_t>(c)] = c;

    BigFloat max_norm(bits);
    for (const auto& col : a) {
        const BigFloat n = norm2(col, bits);
        if (max_norm < n) max_norm = n;
    }
    BigFloat tol2 = max_norm;
    mpfr_mul_2si(tol2.get(), tol2.get(), static_cast<long>(std::lround(2 * tol_log2)), MPFR_RNDN);

    int rank = 0;
    const int steps = std::min(rows, cols);
    for (int k = 0; k < steps; ++k) {
        // pivot: largest remaining column norm
        int best = k;
        BigFloat best_norm(bits);
        for (int c = k; c < cols; ++c) {
            BigFloat n(bits);
            const auto& col = a[static_cast<std::size_t>(c)];
            for (int r = k; r < rows; ++r) n = n + col[static_cast<std::size_t>(r)].re() * col[static_cast<std::size_t>(r)].re() +
                                               col[static_cast<std::size_t>(r)].im() * col[static_cast<std::size_t>(r)].im();
            if (best_norm < n) {
                best_norm = n;
                best = c;
            }
        }
        if (!(tol2 < best_norm)) break;
        std::swap(a[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(best)]);
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(best)]);

        // Householder reflector for column k, rows k..
        auto& x = a[static_cast<std::size_t>(k)];
        const BigFloat alpha_abs = sqrt(best_norm);
        const BigComplex& xk = x[static_cast<std::size_t>(k)];
        const BigFloat xk_abs = abs(xk);
        BigComplex phase = xk_abs.is_zero() ? from_rational_like(Rational(1), xk) : BigComplex(xk.re() / xk_abs, xk.im() / xk_abs);
        const BigComplex alpha = -(phase * BigComplex(alpha_abs, BigFloat(bits)));
        std::vector<BigComplex> v(x.begin() + k, x.end());
        v[0] = v[0] - alpha;
        const BigFloat vn = norm2(v, bits);
        if (!vn.is_zero()) {
            const BigFloat two(2.0, bits);
            for (int c = k; c < cols; ++c) {
                auto& col = a[static_cast<std::size_t>(c)];
                BigComplex dot(bits);
                for (std::size_t i = 0; i < v.size(); ++i) dot += v[i].conj() * col[static_cast<std::size_t>(k) + i];
                const BigComplex s = BigComplex(dot.re() * two / vn, dot.im() * two / vn);
                for (std::size_t i = 0; i < v.size(); ++i) col[static_cast<std::size_t>(k) + i] -= v[i] * s;
            }
        }
        ++rank;
    }

    // R = [R11 R12]; nullspace columns are P [-R11^{-1} R12; I].
    Nullspace<BigComplex> out;
    out.rank = rank;
    out.precision_bits = bits;
    const BigComplex zero(bits);
    for (int f = rank; f < cols; ++f) {
        std::vector<BigComplex> y(static_cast<std::size_t>(cols), zero);
        y[static_cast<std::size_t>(f)] = from_rational_like(Rational(1), zero);
        for (int i = rank - 1; i >= 0; --i) {
            BigComplex acc = a[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)];
            for (int j = i + 1; j < rank; ++j) acc += a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = -(acc / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
        }
        std::vector<BigComplex> x(static_cast<std::size_t>(cols), zero);
        for (int c = 0; c < cols; ++c) x[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])] = y[static_cast<std::size_t>(c)];
        out.basis.push_back(std::move(x));
    }

    double worst = 0.0;
    for (const auto& x : out.basis) {
        BigFloat xmax(bits);
        for (const auto& xi : x) {
            const BigFloat t = abs(xi);
            if (xmax < t) xmax = t;
        }
        for (const auto& r : apply(m, x)) worst = std::max(worst, (abs(r) / xmax).to_double());
    }
    out.residual = worst;
    return out;
}

}  // namespace hplab
