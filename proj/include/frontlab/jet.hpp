#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace frontlab {

/// Thrown when an elementary function is evaluated outside its real
/// domain (log of a non-positive base value, sqrt of a negative one,
/// division by zero, abs at zero, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Truncated Taylor expansion of a scalar function of (u,v) at an
/// implicit base point, up to total order 3.
///
/// Coefficients are stored as plain partial derivatives: coeff(i,j) is
/// d^(i+j) f / du^i dv^j evaluated at the base point (not divided by
/// factorials). Arithmetic satisfies the Leibniz rule exactly at the
/// coefficient level.
class Jet2 {
public:
    static constexpr int kMaxOrder = 3;
    static constexpr int kCoeffs = 10;  // triangular count for order 3

    Jet2() : order_(0) { c_.fill(0.0); }
    explicit Jet2(int order) : order_(check_order(order)) { c_.fill(0.0); }

    static Jet2 constant(double value, int order) {
        Jet2 j(order);
        j.c_[0] = value;
        return j;
    }
    /// Jet of the coordinate u at base value a.
    static Jet2 variable_u(double a, int order) {
        Jet2 j(order);
        j.c_[0] = a;
        if (order >= 1) j.c_[idx(1, 0)] = 1.0;
        return j;
    }
    /// Jet of the coordinate v at base value b.
    static Jet2 variable_v(double b, int order) {
        Jet2 j(order);
        j.c_[0] = b;
        if (order >= 1) j.c_[idx(0, 1)] = 1.0;
        return j;
    }

    int order() const { return order_; }
    double value() const { return c_[0]; }

    /// Partial derivative d^(i+j)/du^i dv^j at the base point.
    double d(int i, int j) const {
        if (i < 0 || j < 0 || i + j > order_) return 0.0;
        return c_[idx(i, j)];
    }
    void set(int i, int j, double value) { c_[idx(i, j)] = value; }

    /// Truncation to a lower order (identity if k >= order).
    Jet2 truncated(int k) const {
        if (k >= order_) return *this;
        Jet2 r(k);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j) r.c_[idx(i, j)] = c_[idx(i, j)];
        return r;
    }

    /// Jet of du f, one order lower.
    Jet2 d_du() const {
        Jet2 r(order_ > 0 ? order_ - 1 : 0);
        for (int i = 0; i <= r.order_; ++i)
            for (int j = 0; i + j <= r.order_; ++j)
                r.c_[idx(i, j)] = d(i + 1, j);
        return r;
    }
    /// Jet of dv f, one order lower.
    Jet2 d_dv() const {
        Jet2 r(order_ > 0 ? order_ - 1 : 0);
        for (int i = 0; i <= r.order_; ++i)
            for (int j = 0; i + j <= r.order_; ++j)
                r.c_[idx(i, j)] = d(i, j + 1);
        return r;
    }

    Jet2 operator-() const {
        Jet2 r = *this;
        for (double& x : r.c_) x = -x;
        return r;
    }

    friend Jet2 operator+(const Jet2& a, const Jet2& b) {
        Jet2 r(std::max(a.order_, b.order_));
        for (int k = 0; k < kCoeffs; ++k) r.c_[k] = a.c_[k] + b.c_[k];
        return r;
    }
    friend Jet2 operator-(const Jet2& a, const Jet2& b) {
        Jet2 r(std::max(a.order_, b.order_));
        for (int k = 0; k < kCoeffs; ++k) r.c_[k] = a.c_[k] - b.c_[k];
        return r;
    }
    friend Jet2 operator*(const Jet2& a, const Jet2& b);
    friend Jet2 operator/(const Jet2& a, const Jet2& b);

    friend Jet2 operator+(const Jet2& a, double s) { return a + constant(s, a.order_); }
    friend Jet2 operator+(double s, const Jet2& a) { return a + s; }
    friend Jet2 operator-(const Jet2& a, double s) { return a - constant(s, a.order_); }
    friend Jet2 operator-(double s, const Jet2& a) { return constant(s, a.order_) - a; }
    friend Jet2 operator*(const Jet2& a, double s) {
        Jet2 r = a;
        for (double& x : r.c_) x *= s;
        return r;
    }
    friend Jet2 operator*(double s, const Jet2& a) { return a * s; }
    friend Jet2 operator/(const Jet2& a, double s) { return a * (1.0 / s); }
    friend Jet2 operator/(double s, const Jet2& a);

    /// Composition g -> f(g) from the value and first three derivatives
    /// of a univariate f at g's base value.
    Jet2 compose(double f0, double f1, double f2, double f3) const;

    static int idx(int i, int j) {
        // (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) (3,0) (2,1) (1,2) (0,3)
        const int n = i + j;
        return n * (n + 1) / 2 + j;
    }

private:
    static int check_order(int order) {
        if (order < 0 || order > kMaxOrder)
            throw std::invalid_argument("Jet2: order must be in 0..3");
        return order;
    }

    std::array<double, kCoeffs> c_;
    int order_;
};

Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 tan(const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);
Jet2 sqrt(const Jet2& a);
Jet2 atan(const Jet2& a);
Jet2 abs(const Jet2& a);
/// Integer power via repeated Leibniz multiplication (exact for
/// polynomial inputs); negative exponents go through the reciprocal.
Jet2 pow(const Jet2& a, long long n);
/// Real power, defined for positive base values only.
Jet2 pow(const Jet2& a, const Jet2& b);

}  // namespace frontlab
