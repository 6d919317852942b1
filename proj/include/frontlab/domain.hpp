#pragma once

#include <cmath>
#include <stdexcept>

namespace frontlab {

struct Vec2d {
    double u = 0.0;
    double v = 0.0;
};

inline Vec2d operator+(Vec2d a, Vec2d b) { return {a.u + b.u, a.v + b.v}; }
inline Vec2d operator-(Vec2d a, Vec2d b) { return {a.u - b.u, a.v - b.v}; }
inline Vec2d operator*(double s, Vec2d a) { return {s * a.u, s * a.v}; }
inline double dot(Vec2d a, Vec2d b) { return a.u * b.u + a.v * b.v; }
inline double cross(Vec2d a, Vec2d b) { return a.u * b.v - a.v * b.u; }
inline double norm(Vec2d a) { return std::hypot(a.u, a.v); }

/// Parameter domain: a closed axis-aligned rectangle or a flat torus
/// with given periods (fundamental domain [0,Pu) x [0,Pv)).
class ParamDomain {
public:
    enum class Kind { Rectangle, FlatTorus };

    static ParamDomain rectangle(double u0, double u1, double v0, double v1) {
        if (!(u1 > u0) || !(v1 > v0))
            throw std::invalid_argument("rectangle ranges must have positive length");
        ParamDomain d;
        d.kind_ = Kind::Rectangle;
        d.u0_ = u0; d.u1_ = u1; d.v0_ = v0; d.v1_ = v1;
        return d;
    }
    static ParamDomain flat_torus(double u_period, double v_period) {
        if (!(u_period > 0.0) || !(v_period > 0.0))
            throw std::invalid_argument("torus periods must be positive");
        ParamDomain d;
        d.kind_ = Kind::FlatTorus;
        d.u0_ = 0.0; d.u1_ = u_period; d.v0_ = 0.0; d.v1_ = v_period;
        return d;
    }

    Kind kind() const { return kind_; }
    bool compact() const { return kind_ == Kind::FlatTorus; }
    double u_min() const { return u0_; }
    double u_max() const { return u1_; }
    double v_min() const { return v0_; }
    double v_max() const { return v1_; }
    double u_extent() const { return u1_ - u0_; }
    double v_extent() const { return v1_ - v0_; }
    double scale() const { return std::max(u_extent(), v_extent()); }

    bool contains(Vec2d p, double tol = 0.0) const {
        if (kind_ == Kind::FlatTorus) return true;
        return p.u >= u0_ - tol && p.u <= u1_ + tol && p.v >= v0_ - tol && p.v <= v1_ + tol;
    }

    /// Torus coordinates are wrapped into the fundamental domain;
    /// rectangle points pass through unchanged.
    Vec2d wrap(Vec2d p) const {
        if (kind_ == Kind::Rectangle) return p;
        auto wrap1 = [](double x, double lo, double period) {
            double y = std::fmod(x - lo, period);
            if (y < 0) y += period;
            return lo + y;
        };
        return {wrap1(p.u, u0_, u_extent()), wrap1(p.v, v0_, v_extent())};
    }

    /// Shortest displacement from a to b (accounting for wrapping).
    Vec2d displacement(Vec2d a, Vec2d b) const {
        Vec2d d = b - a;
        if (kind_ == Kind::FlatTorus) {
            auto reduce = [](double x, double period) {
                double y = std::fmod(x, period);
                if (y > period / 2) y -= period;
                if (y < -period / 2) y += period;
                return y;
            };
            d.u = reduce(d.u, u_extent());
            d.v = reduce(d.v, v_extent());
        }
        return d;
    }

    double distance(Vec2d a, Vec2d b) const { return norm(displacement(a, b)); }

private:
    Kind kind_ = Kind::Rectangle;
    double u0_ = 0, u1_ = 1, v0_ = 0, v1_ = 1;
};

}  // namespace frontlab
