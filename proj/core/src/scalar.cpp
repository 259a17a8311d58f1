#include "hplab/scalar.hpp"

#include "hplab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace hplab {

namespace {

bool is_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    std::string_view s = trim(text);
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto slash = s.find('/');
    const std::string_view num = s.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
    if (!is_digits(num) || !is_digits(den))
        throw DomainError("not an exact rational: '" + std::string(text) + "'");
    Rational q;
    q.get_num() = mpz_class(std::string(num));
    q.get_den() = mpz_class(std::string(den));
    if (q.get_den() == 0) throw DomainError("zero denominator: '" + std::string(text) + "'");
    q.canonicalize();
    if (negative) q = -q;
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

bool is_valid_discriminant(long d)
{
    if (d >= 0) return false;
    const long m = -d;
    for (long p = 2; p * p <= m; ++p)
        if (m % (p * p) == 0) return false;
    return true;
}

long common_discriminant(long a, long b)
{
    if (a == 0) return b;
    if (b == 0 || a == b) return a;
    throw FieldMismatch("mixing Q(sqrt(" + std::to_string(a) + ")) with Q(sqrt(" + std::to_string(b) + "))");
}

QF::QF(Rational re, Rational im, long d) : re_(std::move(re)), im_(std::move(im)), d_(d)
{
    re_.canonicalize();
    im_.canonicalize();
    if (d_ != 0 && !is_valid_discriminant(d_))
        throw DomainError("discriminant must be negative and square-free, got " + std::to_string(d_));
    if (d_ == 0 && sgn(im_) != 0) throw DomainError("nonzero sqrt(d) coefficient without a field");
}

QF QF::sqrt_of(long d) { return QF(Rational(0), Rational(1), d); }

QF QF::parse(std::string_view text)
{
    std::string_view s = trim(text);
    const auto at = s.find("sqrt(");
    if (at == std::string_view::npos) return QF(parse_rational(s));

    const auto close = s.find(')', at);
    if (close == std::string_view::npos || !trim(s.substr(close + 1)).empty())
        throw DomainError("malformed quadratic-field literal: '" + std::string(text) + "'");
    const std::string_view dtext = s.substr(at + 5, close - at - 5);
    const Rational dq = parse_rational(dtext);
    if (dq.get_den() != 1 || !dq.get_num().fits_slong_p())
        throw DomainError("discriminant must be an integer: '" + std::string(text) + "'");
    const long d = dq.get_num().get_si();

    std::string_view prefix = trim(s.substr(0, at));
    if (!prefix.empty() && prefix.back() == '*') prefix.remove_suffix(1);
    prefix = trim(prefix);

    std::size_t split = std::string_view::npos;
    for (std::size_t i = prefix.size(); i-- > 1;) {
        if ((prefix[i] == '+' || prefix[i] == '-') && prefix[i - 1] != '/') {
            split = i;
            break;
        }
    }
    Rational re(0);
    std::string_view im_text = prefix;
    if (split != std::string_view::npos) {
        re = parse_rational(prefix.substr(0, split));
        im_text = prefix.substr(split);
    }
    Rational im;
    if (im_text.empty() || im_text == "+")
        im = 1;
    else if (im_text == "-")
        im = -1;
    else
        im = parse_rational(im_text);
    return QF(re, im, d);
}

QF QF::conj() const { return QF(re_, -im_, d_); }

Rational QF::norm() const { return Rational(re_ * re_ - Rational(d_) * im_ * im_); }

QF QF::inv() const
{
    if (is_zero()) throw DomainError("inversion of zero");
    const Rational n = norm();
    return QF(Rational(re_ / n), Rational(-im_ / n), d_);
}

QF& QF::operator+=(const QF& o)
{
    d_ = common_discriminant(d_, o.d_);
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

QF& QF::operator-=(const QF& o)
{
    d_ = common_discriminant(d_, o.d_);
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

QF& QF::operator*=(const QF& o)
{
    d_ = common_discriminant(d_, o.d_);
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rational re = re_ * o.re_ + Rational(d_) * im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

QF& QF::operator/=(const QF& o)
{
    d_ = common_discriminant(d_, o.d_);
    if (sgn(o.im_) == 0) {
        if (sgn(o.re_) == 0) throw DomainError("division by zero");
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    return *this *= o.inv();
}

QF QF::operator-() const { return QF(Rational(-re_), Rational(-im_), d_); }

bool operator==(const QF& a, const QF& b)
{
    common_discriminant(a.d_, b.d_);
    return a.re_ == b.re_ && a.im_ == b.im_;
}

std::string QF::to_string() const
{
    if (d_ == 0) return re_.get_str();
    std::string out = re_.get_str();
    out += sgn(im_) < 0 ? "-" : "+";
    out += Rational(abs(im_)).get_str();
    out += "*sqrt(" + std::to_string(d_) + ")";
    return out;
}

std::complex<double> QF::to_complex() const
{
    const double im = d_ == 0 ? 0.0 : im_.get_d() * std::sqrt(static_cast<double>(-d_));
    return {re_.get_d(), im};
}

// ---------------------------------------------------------------------------

BigFloat::BigFloat(int bits)
{
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(double x, int bits)
{
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, x, MPFR_RNDN);
}

BigFloat::BigFloat(const Rational& q, int bits)
{
    mpfr_init2(v_, bits);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& o)
{
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept
{
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& o)
{
    if (this != &o) {
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept
{
    mpfr_swap(v_, o.v_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

std::string BigFloat::to_string(int digits) const
{
    char* raw = nullptr;
    mpfr_asprintf(&raw, "%.*Rg", digits, v_);
    std::string out(raw);
    mpfr_free_str(raw);
    return out;
}

namespace {

int min_bits(const BigFloat& a, const BigFloat& b) { return std::min(a.bits(), b.bits()); }

template <class Op>
BigFloat binary(const BigFloat& a, const BigFloat& b, Op op)
{
    BigFloat r(min_bits(a, b));
    op(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

template <class Op>
BigFloat unary(const BigFloat& a, Op op)
{
    BigFloat r(a.bits());
    op(r.get(), a.get(), MPFR_RNDN);
    return r;
}

}  // namespace

BigFloat operator+(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_add); }
BigFloat operator-(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_sub); }
BigFloat operator*(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_mul); }
BigFloat operator/(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_div); }
BigFloat BigFloat::operator-() const { return unary(*this, mpfr_neg); }

BigFloat sqrt(const BigFloat& x) { return unary(x, mpfr_sqrt); }
BigFloat log(const BigFloat& x) { return unary(x, mpfr_log); }
BigFloat exp(const BigFloat& x) { return unary(x, mpfr_exp); }
BigFloat sin(const BigFloat& x) { return unary(x, mpfr_sin); }
BigFloat cos(const BigFloat& x) { return unary(x, mpfr_cos); }
BigFloat abs(const BigFloat& x) { return unary(x, mpfr_abs); }
BigFloat atan2(const BigFloat& y, const BigFloat& x) { return binary(y, x, mpfr_atan2); }
BigFloat hypot(const BigFloat& x, const BigFloat& y) { return binary(x, y, mpfr_hypot); }

BigFloat pi(int bits)
{
    BigFloat r(bits);
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

// ---------------------------------------------------------------------------

BigComplex::BigComplex(BigFloat re, BigFloat im) : re_(std::move(re)), im_(std::move(im))
{
    // Parts always share one precision.
    if (re_.bits() != im_.bits()) {
        const int bits = std::min(re_.bits(), im_.bits());
        BigFloat r(bits), i(bits);
        mpfr_set(r.get(), re_.get(), MPFR_RNDN);
        mpfr_set(i.get(), im_.get(), MPFR_RNDN);
        re_ = std::move(r);
        im_ = std::move(i);
    }
}

BigComplex operator+(const BigComplex& a, const BigComplex& b) { return {a.re_ + b.re_, a.im_ + b.im_}; }
BigComplex operator-(const BigComplex& a, const BigComplex& b) { return {a.re_ - b.re_, a.im_ - b.im_}; }

BigComplex operator*(const BigComplex& a, const BigComplex& b)
{
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}

BigComplex operator/(const BigComplex& a, const BigComplex& b)
{
    if (b.is_zero()) throw DomainError("complex division by zero");
    // Smith's algorithm keeps the intermediate quotient bounded.
    if (!(abs(b.re_) < abs(b.im_))) {
        const BigFloat r = b.im_ / b.re_;
        const BigFloat den = b.re_ + b.im_ * r;
        return {(a.re_ + a.im_ * r) / den, (a.im_ - a.re_ * r) / den};
    }
    const BigFloat r = b.re_ / b.im_;
    const BigFloat den = b.re_ * r + b.im_;
    return {(a.re_ * r + a.im_) / den, (a.im_ * r - a.re_) / den};
}

BigFloat abs(const BigComplex& z) { return hypot(z.re(), z.im()); }
BigFloat arg(const BigComplex& z) { return atan2(z.im(), z.re()); }

BigComplex exp(const BigComplex& z)
{
    const BigFloat m = exp(z.re());
    return {m * cos(z.im()), m * sin(z.im())};
}

BigComplex log(const BigComplex& z)
{
    if (z.is_zero()) throw DomainError("log of zero");
    return {log(abs(z)), arg(z)};
}

BigComplex sqrt(const BigComplex& z)
{
    if (z.is_zero()) return z;
    const BigFloat m = abs(z);
    const BigFloat two(2.0, z.precision_bits());
    BigFloat t = sqrt((m + abs(z.re())) / two);
    if (z.re().sign() >= 0) return {t, z.im() / (two * t)};
    BigFloat im = z.im().sign() < 0 ? -t : t;
    return {abs(z.im()) / (two * t), im};
}

BigComplex scale(const BigComplex& z, const Rational& q)
{
    const BigFloat s(q, z.precision_bits());
    return {z.re() * s, z.im() * s};
}

BigComplex from_rational_like(const Rational& q, const BigComplex& z)
{
    return {BigFloat(q, z.precision_bits()), BigFloat(z.precision_bits())};
}

BigComplex embed(const Rational& x, int bits)
{
    if (bits < 53) throw DomainError("precision below 53 bits");
    return {BigFloat(x, bits), BigFloat(bits)};
}

BigComplex embed(const QF& x, int bits)
{
    if (bits < 53) throw DomainError("precision below 53 bits");
    BigFloat im(bits);
    if (x.d() != 0 && !x.is_rational()) {
        BigFloat root(bits + 32);
        mpfr_set_si(root.get(), -x.d(), MPFR_RNDN);
        mpfr_sqrt(root.get(), root.get(), MPFR_RNDN);
        mpfr_mul_q(root.get(), root.get(), x.im().get_mpq_t(), MPFR_RNDN);
        mpfr_set(im.get(), root.get(), MPFR_RNDN);
    }
    return {BigFloat(x.re(), bits), std::move(im)};
}

}  // namespace hplab
