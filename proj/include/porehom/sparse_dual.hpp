#pragma once

// Forward-mode automatic differentiation with sparse derivative vectors.
//
// Every residual in the library is written once as a template over the scalar
// type. Evaluating it with `double` gives the residual; evaluating it with
// `SparseDual` gives the residual together with one exact Jacobian row per
// entry, which is how all sparse systems here are assembled.

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cmath>
#include <utility>

namespace porehom::ad {

class SparseDual {
public:
    struct Entry {
        int index;
        double value;
    };
    // Stencils here touch at most a few dozen unknowns; most rows fit inline.
    using Gradient = boost::container::small_vector<Entry, 8>;

    SparseDual() = default;
    // Implicit so that constants mix freely with active variables.
    SparseDual(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)

    static SparseDual variable(double value, int index)
    {
        SparseDual x(value);
        x.grad_.push_back({index, 1.0});
        return x;
    }

    double value() const { return value_; }
    const Gradient& derivatives() const { return grad_; }

    SparseDual& operator+=(const SparseDual& o) { return *this = *this + o; }
    SparseDual& operator-=(const SparseDual& o) { return *this = *this - o; }
    SparseDual& operator*=(const SparseDual& o) { return *this = *this * o; }
    SparseDual& operator/=(const SparseDual& o) { return *this = *this / o; }

    SparseDual& operator+=(double c) { value_ += c; return *this; }
    SparseDual& operator-=(double c) { value_ -= c; return *this; }
    SparseDual& operator*=(double c)
    {
        value_ *= c;
        for (auto& e : grad_) e.value *= c;
        return *this;
    }
    SparseDual& operator/=(double c) { return *this *= 1.0 / c; }

    friend SparseDual operator-(SparseDual a)
    {
        a *= -1.0;
        return a;
    }

    friend SparseDual operator+(const SparseDual& a, const SparseDual& b)
    {
        return combine(a.value_ + b.value_, a, 1.0, b, 1.0);
    }
    friend SparseDual operator-(const SparseDual& a, const SparseDual& b)
    {
        return combine(a.value_ - b.value_, a, 1.0, b, -1.0);
    }
    friend SparseDual operator*(const SparseDual& a, const SparseDual& b)
    {
        return combine(a.value_ * b.value_, a, b.value_, b, a.value_);
    }
    friend SparseDual operator/(const SparseDual& a, const SparseDual& b)
    {
        const double inv = 1.0 / b.value_;
        const double q = a.value_ * inv;
        return combine(q, a, inv, b, -q * inv);
    }

    friend SparseDual operator+(SparseDual a, double c) { a += c; return a; }
    friend SparseDual operator+(double c, SparseDual a) { a += c; return a; }
    friend SparseDual operator-(SparseDual a, double c) { a -= c; return a; }
    friend SparseDual operator-(double c, SparseDual a)
    {
        a *= -1.0;
        a += c;
        return a;
    }
    friend SparseDual operator*(SparseDual a, double c) { a *= c; return a; }
    friend SparseDual operator*(double c, SparseDual a) { a *= c; return a; }
    friend SparseDual operator/(SparseDual a, double c) { a /= c; return a; }
    friend SparseDual operator/(double c, const SparseDual& b)
    {
        const double q = c / b.value_;
        return b.scaled(q, -q / b.value_);
    }

    // f(x) with f(x.value) = fx and f'(x.value) = dfx.
    SparseDual scaled(double fx, double dfx) const
    {
        SparseDual r(fx);
        r.grad_.resize(grad_.size(), boost::container::default_init);
        for (std::size_t k = 0; k < grad_.size(); ++k) r.grad_[k] = {grad_[k].index, dfx * grad_[k].value};
        return r;
    }

private:
    static SparseDual combine(double value, const SparseDual& a, double ca, const SparseDual& b, double cb)
    {
        SparseDual r(value);
        const std::size_t na = a.grad_.size();
        const std::size_t nb = b.grad_.size();
        r.grad_.resize(na + nb, boost::container::default_init);
        Entry* out = r.grad_.data();
        const Entry* ia = a.grad_.data();
        const Entry* ea = ia + na;
        const Entry* ib = b.grad_.data();
        const Entry* eb = ib + nb;
        while (ia != ea && ib != eb) {
            if (ia->index < ib->index) {
                *out++ = {ia->index, ca * ia->value};
                ++ia;
            } else if (ib->index < ia->index) {
                *out++ = {ib->index, cb * ib->value};
                ++ib;
            } else {
                *out++ = {ia->index, ca * ia->value + cb * ib->value};
                ++ia;
                ++ib;
            }
        }
        for (; ia != ea; ++ia) *out++ = {ia->index, ca * ia->value};
        for (; ib != eb; ++ib) *out++ = {ib->index, cb * ib->value};
        r.grad_.resize(static_cast<std::size_t>(out - r.grad_.data()), boost::container::default_init);
        return r;
    }

    double value_ = 0.0;
    Gradient grad_;  // sorted by index, unique
};

inline double value_of(double x) { return x; }
inline double value_of(const SparseDual& x) { return x.value(); }

inline SparseDual sqrt(const SparseDual& x)
{
    const double s = std::sqrt(x.value());
    return x.scaled(s, s > 0.0 ? 0.5 / s : 0.0);
}

inline SparseDual exp(const SparseDual& x)
{
    const double e = std::exp(x.value());
    return x.scaled(e, e);
}

inline SparseDual abs(const SparseDual& x)
{
    return x.value() < 0.0 ? -x : x;
}

using std::abs;
using std::exp;
using std::sqrt;

/// Picks `a` when the plain value of `s` is non-negative, `b` otherwise.
/// Used for upwinding; the branch is taken on values only.
template <class T>
const T& upwind(double s, const T& a, const T& b)
{
    return s >= 0.0 ? a : b;
}

}  // namespace porehom::ad
