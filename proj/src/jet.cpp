#include "frontlab/jet.hpp"

#include <cmath>

namespace frontlab {

namespace {
double binom(int n, int k) {
    static const double table[4][4] = {
        {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    return table[n][k];
}
}  // namespace

Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r(std::max(a.order_, b.order_));
    const int n = r.order_;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
            // Leibniz: d^(i,j)(fg) = sum binom(i,p) binom(j,q) f^(p,q) g^(i-p,j-q)
            double acc = 0.0;
            for (int p = 0; p <= i; ++p) {
                for (int q = 0; q <= j; ++q) {
                    acc += binom(i, p) * binom(j, q) * a.d(p, q) * b.d(i - p, j - q);
                }
            }
            r.c_[Jet2::idx(i, j)] = acc;
        }
    }
    return r;
}

Jet2 Jet2::compose(double f0, double f1, double f2, double f3) const {
    // f(g) = f0 + f1 h + f2/2 h^2 + f3/6 h^3 with h = g - g(0), h nilpotent.
    Jet2 h = *this;
    h.c_[0] = 0.0;
    Jet2 r = Jet2::constant(f0, order_);
    if (order_ >= 1) r = r + f1 * h;
    if (order_ >= 2) {
        Jet2 h2 = h * h;
        r = r + (f2 / 2.0) * h2;
        if (order_ >= 3) r = r + (f3 / 6.0) * (h2 * h);
    }
    return r;
}

Jet2 operator/(const Jet2& a, const Jet2& b) {
    const double x = b.value();
    if (x == 0.0) throw DomainError("division by zero at the base point");
    const double ix = 1.0 / x;
    Jet2 inv = b.compose(ix, -ix * ix, 2.0 * ix * ix * ix, -6.0 * ix * ix * ix * ix);
    return a * inv;
}

Jet2 operator/(double s, const Jet2& a) {
    return Jet2::constant(s, a.order()) / a;
}

Jet2 sin(const Jet2& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return a.compose(s, c, -s, -c);
}

Jet2 cos(const Jet2& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return a.compose(c, -s, -c, s);
}

Jet2 tan(const Jet2& a) {
    const double c = std::cos(a.value());
    if (c == 0.0) throw DomainError("tan at a pole");
    const double t = std::tan(a.value());
    const double t1 = 1.0 + t * t;
    return a.compose(t, t1, 2.0 * t * t1, 2.0 * t1 * (1.0 + 3.0 * t * t));
}

Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.value());
    return a.compose(e, e, e, e);
}

Jet2 log(const Jet2& a) {
    const double x = a.value();
    if (x <= 0.0) throw DomainError("log of a non-positive value");
    const double ix = 1.0 / x;
    return a.compose(std::log(x), ix, -ix * ix, 2.0 * ix * ix * ix);
}

Jet2 sqrt(const Jet2& a) {
    const double x = a.value();
    if (x < 0.0) throw DomainError("sqrt of a negative value");
    if (x == 0.0 && a.order() > 0)
        throw DomainError("sqrt is not differentiable at zero");
    const double s = std::sqrt(x);
    if (a.order() == 0) return Jet2::constant(s, 0);
    const double is = 1.0 / s;
    return a.compose(s, 0.5 * is, -0.25 * is / x, 0.375 * is / (x * x));
}

Jet2 atan(const Jet2& a) {
    const double x = a.value();
    const double w = 1.0 / (1.0 + x * x);
    return a.compose(std::atan(x), w, -2.0 * x * w * w,
                     (6.0 * x * x - 2.0) * w * w * w);
}

Jet2 abs(const Jet2& a) {
    const double x = a.value();
    if (x > 0.0) return a;
    if (x < 0.0) return -a;
    if (a.order() == 0) return Jet2::constant(0.0, 0);
    throw DomainError("abs is not differentiable at zero");
}

Jet2 pow(const Jet2& a, long long n) {
    if (n < 0) return 1.0 / pow(a, -n);
    Jet2 r = Jet2::constant(1.0, a.order());
    for (long long k = 0; k < n; ++k) r = r * a;
    return r;
}

Jet2 pow(const Jet2& a, const Jet2& b) {
    // Non-constant exponents and non-integer constant exponents require a
    // positive base: a^b = exp(b log a).
    bool exponent_constant = true;
    for (int i = 0; i <= b.order(); ++i)
        for (int j = 0; i + j <= b.order(); ++j)
            if ((i || j) && b.d(i, j) != 0.0) exponent_constant = false;
    if (exponent_constant) {
        const double e = b.value();
        if (e == std::floor(e) && std::fabs(e) <= 64.0)
            return pow(a, static_cast<long long>(e));
    }
    if (a.value() <= 0.0)
        throw DomainError("pow with non-integer exponent needs a positive base");
    return exp(b * log(a));
}

}  // namespace frontlab
