#pragma once

// Arithmetic backends: exact rationals (GMP), exact elements of Q(sqrt(d))
// for negative square-free d, and MPFR-backed complex floats that carry
// their precision as data.

#include <gmpxx.h>
#include <mpfr.h>

#include <complex>
#include <string>
#include <string_view>

namespace hplab {

using Rational = mpq_class;

/// Parses "p/q" or "p" (optional sign). Decimal points and exponents are rejected.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
/// n/d in canonical form (mpq_class(n, d) alone does not reduce).
inline Rational ratio(long n, long d)
{
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline Rational zero_like(const Rational&) { return Rational(0); }
inline Rational from_rational_like(const Rational& q, const Rational&) { return q; }
inline std::complex<double> to_complex(const Rational& q) { return {q.get_d(), 0.0}; }

/// True for d < 0 with |d| square-free.
bool is_valid_discriminant(long d);

/// Exact element re + im*sqrt(d) of Q(sqrt(d)), d < 0 square-free.
///
/// d == 0 marks a plain rational that can be combined with any field; a
/// nonzero im requires d != 0. Combining elements with two different
/// nonzero d throws FieldMismatch.
class QF {
public:
    QF() = default;
    QF(long n) : re_(n) {}  // NOLINT(google-explicit-constructor)
    QF(Rational re) : re_(std::move(re)) { re_.canonicalize(); }  // NOLINT(google-explicit-constructor)
    QF(Rational re, Rational im, long d);

    /// sqrt(d) itself.
    static QF sqrt_of(long d);
    /// Parses the serialized form "p/q+r/s*sqrt(d)" (also "p/q", "r/s*sqrt(d)", "-sqrt(d)").
    static QF parse(std::string_view text);

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    long d() const { return d_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_rational() const { return sgn(im_) == 0; }

    QF conj() const;
    /// Field norm re^2 - d*im^2 (nonnegative for d < 0).
    Rational norm() const;
    QF inv() const;

    QF& operator+=(const QF& o);
    QF& operator-=(const QF& o);
    QF& operator*=(const QF& o);
    QF& operator/=(const QF& o);

    friend QF operator+(QF a, const QF& b) { return a += b; }
    friend QF operator-(QF a, const QF& b) { return a -= b; }
    friend QF operator*(QF a, const QF& b) { return a *= b; }
    friend QF operator/(QF a, const QF& b) { return a /= b; }
    QF operator-() const;

    friend bool operator==(const QF& a, const QF& b);
    friend bool operator!=(const QF& a, const QF& b) { return !(a == b); }

    std::string to_string() const;
    std::complex<double> to_complex() const;

private:
    Rational re_{0};
    Rational im_{0};
    long d_ = 0;
};

/// Common field of two operands, or FieldMismatch.
long common_discriminant(long a, long b);

inline bool is_zero(const QF& x) { return x.is_zero(); }
inline QF zero_like(const QF& x) { return QF(Rational(0), Rational(0), x.d()); }
inline QF from_rational_like(const Rational& q, const QF& x) { return QF(q, Rational(0), x.d()); }
inline std::complex<double> to_complex(const QF& x) { return x.to_complex(); }
inline std::string to_string(const QF& x) { return x.to_string(); }

/// RAII wrapper around an MPFR number. Binary operations round to the
/// smaller of the two operand precisions.
class BigFloat {
public:
    explicit BigFloat(int bits = 53);
    BigFloat(double x, int bits);
    BigFloat(const Rational& q, int bits);
    BigFloat(const BigFloat& o);
    BigFloat(BigFloat&& o) noexcept;
    BigFloat& operator=(const BigFloat& o);
    BigFloat& operator=(BigFloat&& o) noexcept;
    ~BigFloat();

    int bits() const { return static_cast<int>(mpfr_get_prec(v_)); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string to_string(int digits = 20) const;
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    mpfr_srcptr get() const { return v_; }
    mpfr_ptr get() { return v_; }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b);
    BigFloat operator-() const;

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return b < a; }

private:
    mpfr_t v_;
};

BigFloat sqrt(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat cos(const BigFloat& x);
BigFloat atan2(const BigFloat& y, const BigFloat& x);
BigFloat abs(const BigFloat& x);
BigFloat hypot(const BigFloat& x, const BigFloat& y);
BigFloat pi(int bits);

/// Complex number with MPFR parts; precision_bits() is the working precision.
class BigComplex {
public:
    explicit BigComplex(int bits = 53) : re_(bits), im_(bits) {}
    BigComplex(BigFloat re, BigFloat im);
    BigComplex(std::complex<double> z, int bits) : re_(z.real(), bits), im_(z.imag(), bits) {}

    int precision_bits() const { return re_.bits() < im_.bits() ? re_.bits() : im_.bits(); }
    const BigFloat& re() const { return re_; }
    const BigFloat& im() const { return im_; }
    std::complex<double> to_complex() const { return {re_.to_double(), im_.to_double()}; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b);
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b);
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b);
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b);
    BigComplex operator-() const { return {-re_, -im_}; }
    BigComplex& operator+=(const BigComplex& o) { return *this = *this + o; }
    BigComplex& operator-=(const BigComplex& o) { return *this = *this - o; }
    BigComplex& operator*=(const BigComplex& o) { return *this = *this * o; }
    BigComplex& operator/=(const BigComplex& o) { return *this = *this / o; }

    BigComplex conj() const { return {re_, -im_}; }

private:
    BigFloat re_;
    BigFloat im_;
};

BigFloat abs(const BigComplex& z);
BigFloat arg(const BigComplex& z);
BigComplex exp(const BigComplex& z);
/// Principal logarithm.
BigComplex log(const BigComplex& z);
/// Principal square root.
BigComplex sqrt(const BigComplex& z);
BigComplex scale(const BigComplex& z, const Rational& q);

inline bool is_zero(const BigComplex& z) { return z.is_zero(); }
inline BigComplex zero_like(const BigComplex& z) { return BigComplex(z.precision_bits()); }
BigComplex from_rational_like(const Rational& q, const BigComplex& z);
inline std::complex<double> to_complex(const BigComplex& z) { return z.to_complex(); }

inline bool is_zero(const std::complex<double>& z) { return z == 0.0; }
inline std::complex<double> zero_like(const std::complex<double>&) { return {}; }
inline std::complex<double> from_rational_like(const Rational& q, const std::complex<double>&) { return {q.get_d(), 0.0}; }
inline std::complex<double> to_complex(const std::complex<double>& z) { return z; }

/// Correctly rounded embedding into the complex floats; bits >= 53.
BigComplex embed(const QF& x, int bits);
BigComplex embed(const Rational& x, int bits);
inline BigComplex embed(const std::complex<double>& x, int bits) { return BigComplex(x, bits); }
inline BigComplex embed(const BigComplex& x, int bits)
{
    return {BigFloat(x.re()) * BigFloat(1.0, bits), BigFloat(x.im()) * BigFloat(1.0, bits)};
}

}  // namespace hplab
