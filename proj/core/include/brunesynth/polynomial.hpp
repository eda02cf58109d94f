#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "brunesynth/errors.hpp"

namespace brunesynth {

// Dense real polynomial, coefficients stored lowest power first.
// No automatic trimming: callers that know a leading term cancels say so with drop_top().
template <class T>
class Poly {
public:
    Poly() : c_{T(0)} {}
    Poly(std::initializer_list<T> c) : c_(c) {
        if (c_.empty()) c_.push_back(T(0));
    }
    explicit Poly(std::vector<T> c) : c_(std::move(c)) {
        if (c_.empty()) c_.push_back(T(0));
    }

    static Poly monomial(std::size_t n, const T& coef = T(1)) {
        std::vector<T> c(n + 1, T(0));
        c[n] = coef;
        return Poly(std::move(c));
    }

    std::size_t degree() const { return c_.size() - 1; }
    const T& operator[](std::size_t i) const { return c_[i]; }
    T& operator[](std::size_t i) { return c_[i]; }
    const T& lead() const { return c_.back(); }
    const std::vector<T>& coeffs() const { return c_; }

    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const T& x) { return x == T(0); });
    }

    template <class S>
    S eval(const S& s) const {
        S r = S(c_.back());
        for (std::size_t i = c_.size() - 1; i-- > 0;) r = r * s + S(c_[i]);
        return r;
    }

    // p(s) and p'(s) together.
    template <class S>
    std::pair<S, S> eval_with_derivative(const S& s) const {
        S p = S(c_.back());
        S dp = S(T(0));
        for (std::size_t i = c_.size() - 1; i-- > 0;) {
            dp = dp * s + p;
            p = p * s + S(c_[i]);
        }
        return {p, dp};
    }

    Poly derivative() const {
        if (c_.size() == 1) return Poly{T(0)};
        std::vector<T> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<long>(i));
        return Poly(std::move(d));
    }

    // Multiply by s^k.
    Poly shift(std::size_t k = 1) const {
        std::vector<T> c(k, T(0));
        c.insert(c.end(), c_.begin(), c_.end());
        return Poly(std::move(c));
    }

    // Remove the highest coefficient (caller asserts it is a known cancellation).
    Poly drop_top() const {
        if (c_.size() == 1) return Poly{T(0)};
        return Poly(std::vector<T>(c_.begin(), c_.end() - 1));
    }

    // Remove the constant coefficient and divide by s.
    Poly drop_bottom() const {
        if (c_.size() == 1) return Poly{T(0)};
        return Poly(std::vector<T>(c_.begin() + 1, c_.end()));
    }

    // Strip exactly-zero leading coefficients.
    Poly normalized() const {
        std::size_t n = c_.size();
        while (n > 1 && c_[n - 1] == T(0)) --n;
        return Poly(std::vector<T>(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(n)));
    }

    template <class U>
    Poly<U> cast() const {
        std::vector<U> c;
        c.reserve(c_.size());
        for (const auto& x : c_) c.push_back(U(x));
        return Poly<U>(std::move(c));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const T& k) {
        Poly r = a;
        for (auto& x : r.c_) x *= k;
        return r;
    }
    friend Poly operator*(const T& k, const Poly& a) { return a * k; }

    // Long division; b's leading coefficient must be nonzero.
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        if (b.lead() == T(0)) throw NumericalError("polynomial division by zero leading coefficient");
        if (a.degree() < b.degree()) return {Poly{T(0)}, a};
        std::vector<T> rem = a.c_;
        std::vector<T> q(a.degree() - b.degree() + 1, T(0));
        for (std::size_t i = q.size(); i-- > 0;) {
            q[i] = rem[i + b.degree()] / b.lead();
            for (std::size_t j = 0; j <= b.degree(); ++j) rem[i + j] -= q[i] * b.c_[j];
        }
        rem.resize(std::max<std::size_t>(b.degree(), 1));
        if (b.degree() == 0) rem.assign(1, T(0));
        return {Poly(std::move(q)), Poly(std::move(rem))};
    }

private:
    std::vector<T> c_;
};

// Sum of |c_i| * r^i: the natural magnitude scale of p on the circle |s| = r.
template <class T>
T magnitude_on_circle(const Poly<T>& p, const T& r) {
    using std::abs;
    T acc = T(0);
    T rp = T(1);
    for (std::size_t i = 0; i <= p.degree(); ++i) {
        acc += abs(p[i]) * rp;
        rp *= r;
    }
    return acc;
}

}  // namespace brunesynth
