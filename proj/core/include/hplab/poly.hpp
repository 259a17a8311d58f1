#pragma once

#include "hplab/error.hpp"
#include "hplab/scalar.hpp"

#include <algorithm>
#include <complex>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace hplab {

/// Dense univariate polynomial, coefficients in ascending order. The zero
/// polynomial has no coefficients and degree -1.
template <class T>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

    static Poly constant(T c) { return Poly(std::vector<T>{std::move(c)}); }
    /// z - root
    static Poly linear_root(const T& root)
    {
        return Poly(std::vector<T>{-root, from_rational_like(Rational(1), root)});
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<T>& coeffs() const { return c_; }
    const T& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    const T& lead() const
    {
        if (c_.empty()) throw DomainError("leading coefficient of the zero polynomial");
        return c_.back();
    }
    /// Coefficient of z^i, zero outside the stored range.
    T coeff(int i, const T& like) const
    {
        if (i < 0 || i > degree()) return zero_like(like);
        return c_[static_cast<std::size_t>(i)];
    }

    Poly derivative() const
    {
        if (c_.size() <= 1) return {};
        std::vector<T> d;
        d.reserve(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * from_rational_like(Rational(static_cast<long>(i)), c_[i]));
        return Poly(std::move(d));
    }

    template <class U>
    U eval(const U& z) const
    {
        if (c_.empty()) return zero_like(z);
        U acc = lift(c_.back(), z);
        for (std::size_t i = c_.size() - 1; i-- > 0;) acc = acc * z + lift(c_[i], z);
        return acc;
    }

    Poly monic() const
    {
        const T inv = from_rational_like(Rational(1), lead()) / lead();
        return *this * inv;
    }

    Poly& operator+=(const Poly& o)
    {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), zero_like(o.c_.back()));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o)
    {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), zero_like(o.c_.back()));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const
    {
        Poly r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b)
    {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> r(a.c_.size() + b.c_.size() - 1, zero_like(a.c_[0]));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (hplab::is_zero(a.c_[i])) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(r));
    }
    friend Poly operator*(Poly a, const T& s)
    {
        for (auto& x : a.c_) x *= s;
        a.trim();
        return a;
    }
    friend Poly operator*(const T& s, Poly a) { return std::move(a) * s; }

    /// Quotient and remainder by a nonzero divisor (field coefficients).
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b)
    {
        if (b.is_zero()) throw DomainError("polynomial division by zero");
        if (a.degree() < b.degree()) return {Poly{}, a};
        std::vector<T> rem = a.c_;
        std::vector<T> quo(static_cast<std::size_t>(a.degree() - b.degree() + 1), zero_like(a.c_[0]));
        const int db = b.degree();
        for (int k = a.degree() - db; k >= 0; --k) {
            T q = rem[static_cast<std::size_t>(k + db)] / b.lead();
            if (hplab::is_zero(q)) continue;
            for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k + j)] -= q * b.c_[static_cast<std::size_t>(j)];
            quo[static_cast<std::size_t>(k)] = std::move(q);
        }
        rem.resize(static_cast<std::size_t>(db));
        return {Poly(std::move(quo)), Poly(std::move(rem))};
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    template <class U, class Map>
    Poly<U> map(Map&& f) const
    {
        std::vector<U> out;
        out.reserve(c_.size());
        for (const auto& x : c_) out.push_back(f(x));
        return Poly<U>(std::move(out));
    }

private:
    void trim()
    {
        while (!c_.empty() && hplab::is_zero(c_.back())) c_.pop_back();
    }

    template <class U>
    static U lift(const T& x, const U& like)
    {
        if constexpr (std::is_same_v<U, T>) {
            (void)like;
            return x;
        } else if constexpr (std::is_same_v<U, BigComplex>) {
            return embed(x, like.precision_bits());
        } else {
            return U(to_complex(x));
        }
    }

    std::vector<T> c_;
};

template <class T>
std::string to_string(const Poly<T>& p)
{
    if (p.is_zero()) return "0";
    std::string out;
    for (int i = p.degree(); i >= 0; --i) {
        if (is_zero(p[i])) continue;
        if (!out.empty()) out += " + ";
        out += "(" + to_string(p[i]) + ")";
        if (i > 0) out += "*z^" + std::to_string(i);
    }
    return out;
}

/// prod (z - root_j)
template <class T>
Poly<T> from_roots(const std::vector<T>& roots, const T& like)
{
    Poly<T> p = Poly<T>::constant(from_rational_like(Rational(1), like));
    for (const auto& r : roots) p = p * Poly<T>::linear_root(r);
    return p;
}

}  // namespace hplab
