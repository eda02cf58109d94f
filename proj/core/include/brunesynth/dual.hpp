#pragma once

namespace brunesynth {

// Forward-mode dual number: value + derivative. Enough arithmetic for ladder recursions.
template <class V>
struct Dual {
    V v{};
    V d{};

    Dual() = default;
    Dual(const V& value, const V& deriv) : v(value), d(deriv) {}
    Dual(double x) : v(x), d(0.0) {}  // NOLINT: constants lift implicitly
    explicit Dual(const V& value) : v(value), d(0.0) {}

    static Dual variable(const V& value) { return {value, V(1.0)}; }

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
    friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
    friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
    friend Dual operator/(const Dual& a, const Dual& b) {
        return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
};

}  // namespace brunesynth
