#pragma once

#include "hplab/poly.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace hplab {

/// Truncated Laurent expansion at infinity:
///     sum_{k=0}^{size-1} coeffs[k] * z^(top-k)  +  O(z^(top-size)).
///
/// An expansion of a function holomorphic at infinity has top == 0, so that
/// coeffs[k] multiplies z^-k and the truncation order is size-1.
template <class T>
class Laurent {
public:
    Laurent() = default;
    Laurent(int top, std::vector<T> coeffs) : top_(top), c_(std::move(coeffs)) {}

    /// Polynomial viewed as an exact series, padded with zeros down to z^low.
    static Laurent from_poly(const Poly<T>& p, int low, const T& like)
    {
        const int top = std::max(p.degree(), low);
        std::vector<T> c;
        for (int e = top; e >= low; --e) c.push_back(p.coeff(e, like));
        return Laurent(top, std::move(c));
    }

    int top() const { return top_; }
    int size() const { return static_cast<int>(c_.size()); }
    const std::vector<T>& coeffs() const { return c_; }
    /// Lowest exponent whose coefficient is known exactly.
    int low_known() const { return top_ - size() + 1; }
    /// Truncation order in powers of 1/z.
    int order() const { return -low_known(); }

    /// Coefficient of z^e; zero above top, error below the truncation.
    T coeff(int e) const
    {
        if (c_.empty()) throw DomainError("coefficient of an empty series");
        if (e > top_) return zero_like(c_[0]);
        if (e < low_known()) throw DomainError("coefficient below truncation order");
        return c_[static_cast<std::size_t>(top_ - e)];
    }

    /// Coefficient of z^-k (the c_k of an expansion at infinity).
    T operator[](int k) const { return coeff(-k); }

    /// Largest exponent with a nonzero coefficient; empty if every known coefficient vanishes.
    std::optional<int> leading_exponent() const
    {
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (!is_zero(c_[k])) return top_ - static_cast<int>(k);
        return std::nullopt;
    }

    /// Leading order in powers of 1/z, i.e. -leading_exponent().
    std::optional<int> valuation() const
    {
        auto e = leading_exponent();
        if (!e) return std::nullopt;
        return -*e;
    }

    Laurent derivative() const
    {
        std::vector<T> d;
        d.reserve(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k)
            d.push_back(c_[k] * from_rational_like(Rational(top_ - static_cast<int>(k)), c_[k]));
        return Laurent(top_ - 1, std::move(d));
    }

    /// Keeps exponents >= low.
    Laurent truncated(int low) const
    {
        const int keep = std::clamp(top_ - low + 1, 0, size());
        return Laurent(top_, std::vector<T>(c_.begin(), c_.begin() + keep));
    }

    friend Laurent operator*(const Laurent& s, const Poly<T>& p)
    {
        if (p.is_zero() || s.c_.empty()) return Laurent(s.top_, std::vector<T>(s.c_.size(), zero_like(s.c_.at(0))));
        const int d = p.degree();
        const int top = s.top_ + d;
        const int low = s.low_known() + d;
        std::vector<T> out;
        out.reserve(static_cast<std::size_t>(top - low + 1));
        for (int e = top; e >= low; --e) {
            T acc = zero_like(s.c_[0]);
            for (int i = 0; i <= d; ++i) {
                const int k = s.top_ - (e - i);
                if (k < 0 || k >= s.size() || is_zero(p[i])) continue;
                acc += p[i] * s.c_[static_cast<std::size_t>(k)];
            }
            out.push_back(std::move(acc));
        }
        return Laurent(top, std::move(out));
    }
    friend Laurent operator*(const Poly<T>& p, const Laurent& s) { return s * p; }

    friend Laurent operator*(const Laurent& a, const Laurent& b)
    {
        const int top = a.top_ + b.top_;
        const int low = std::max(a.low_known() + b.top_, b.low_known() + a.top_);
        std::vector<T> out;
        for (int e = top; e >= low; --e) {
            T acc = zero_like(a.c_.at(0));
            const int n = top - e;
            for (int i = 0; i <= n; ++i) {
                if (i >= a.size() || n - i >= b.size()) continue;
                acc += a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(n - i)];
            }
            out.push_back(std::move(acc));
        }
        return Laurent(top, std::move(out));
    }

    friend Laurent operator*(Laurent a, const T& s)
    {
        for (auto& x : a.c_) x *= s;
        return a;
    }

    friend Laurent operator+(const Laurent& a, const Laurent& b) { return combine(a, b, false); }
    friend Laurent operator-(const Laurent& a, const Laurent& b) { return combine(a, b, true); }

    /// Formal quotient a/b; b's leading coefficient must be nonzero.
    friend Laurent operator/(const Laurent& a, const Laurent& b)
    {
        const auto lb = b.leading_exponent();
        if (!lb) throw DomainError("series division by zero");
        const Laurent bn = b.truncated(b.low_known());
        const int shift = b.top_ - *lb;
        std::vector<T> bc(bn.c_.begin() + shift, bn.c_.end());
        // quotient known to min(a.size, bc.size) terms
        const int terms = std::min(a.size(), static_cast<int>(bc.size()));
        std::vector<T> q;
        q.reserve(static_cast<std::size_t>(terms));
        for (int k = 0; k < terms; ++k) {
            T acc = a.c_[static_cast<std::size_t>(k)];
            for (int i = 1; i <= k; ++i) acc -= bc[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(k - i)];
            q.push_back(acc / bc[0]);
        }
        return Laurent(a.top_ - *lb, std::move(q));
    }

    friend bool operator==(const Laurent& a, const Laurent& b) { return a.top_ == b.top_ && a.c_ == b.c_; }

    template <class U, class Map>
    Laurent<U> map(Map&& f) const
    {
        std::vector<U> out;
        out.reserve(c_.size());
        for (const auto& x : c_) out.push_back(f(x));
        return Laurent<U>(top_, std::move(out));
    }

private:
    static Laurent combine(const Laurent& a, const Laurent& b, bool subtract)
    {
        const int top = std::max(a.top_, b.top_);
        const int low = std::max(a.low_known(), b.low_known());
        const T& like = a.c_.empty() ? b.c_.at(0) : a.c_[0];
        std::vector<T> out;
        for (int e = top; e >= low; --e) {
            T x = e > a.top_ ? zero_like(like) : a.coeff(e);
            if (e <= b.top_) {
                if (subtract)
                    x -= b.coeff(e);
                else
                    x += b.coeff(e);
            }
            out.push_back(std::move(x));
        }
        return Laurent(top, std::move(out));
    }

    int top_ = 0;
    std::vector<T> c_;
};

template <class T>
using LaurentSeries = Laurent<T>;

}  // namespace hplab
