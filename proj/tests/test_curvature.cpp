#include <cmath>

#include "doctest.h"
#include "frontlab/curvature.hpp"
#include "frontlab/singular.hpp"

using namespace frontlab;

namespace {

const char* kSpherePatch = R"([surface]
name = sphere-patch
domain = rectangle
u_range = -1 1
v_range = 0 1
x = cos(u)*cos(v)
y = cos(u)*sin(v)
z = sin(u)
nu_x = cos(u)*cos(v)
nu_y = cos(u)*sin(v)
nu_z = sin(u)
)";

const char* kCuspidalEdge = R"([surface]
name = cuspidal-edge
domain = rectangle
u_range = -1 1
v_range = -1 1
x = u^2
y = u^3
z = v
nu_x = 3*u / sqrt(9*u^2 + 4)
nu_y = -2 / sqrt(9*u^2 + 4)
nu_z = 0
)";

const char* kSwallowtail = R"([surface]
name = swallowtail
domain = rectangle
u_range = -1 1
v_range = -1 1
x = 3*u^4 + u^2*v
y = 4*u^3 + 2*u*v
z = v
nu_x = 1 / sqrt(1 + u^2 + u^4)
nu_y = -u / sqrt(1 + u^2 + u^4)
nu_z = u^2 / sqrt(1 + u^2 + u^4)
)";

// same surface with nu negated (co-orientation reversal)
const char* kSwallowtailNeg = R"([surface]
name = swallowtail-neg
domain = rectangle
u_range = -1 1
v_range = -1 1
x = 3*u^4 + u^2*v
y = 4*u^3 + 2*u*v
z = v
nu_x = -1 / sqrt(1 + u^2 + u^4)
nu_y = u / sqrt(1 + u^2 + u^4)
nu_z = -u^2 / sqrt(1 + u^2 + u^4)
)";

// same surface with u and v swapped (domain orientation reversal)
const char* kSwallowtailSwap = R"([surface]
name = swallowtail-swap
domain = rectangle
u_range = -1 1
v_range = -1 1
x = 3*v^4 + v^2*u
y = 4*v^3 + 2*v*u
z = u
nu_x = 1 / sqrt(1 + v^2 + v^4)
nu_y = -v / sqrt(1 + v^2 + v^4)
nu_z = v^2 / sqrt(1 + v^2 + v^4)
)";

std::shared_ptr<BundleView> view_of(const char* text) { return make_view(load_spec(text)); }

// kappa_s of f_SW at the parabola point (u0, -6u0^2), built without tracing.
double sw_kappa_s(const BundleView& v, double u0, bool swap_uv, double tdir) {
    Vec2d p = swap_uv ? Vec2d{-6 * u0 * u0, u0} : Vec2d{u0, -6 * u0 * u0};
    Vec2d t = swap_uv ? Vec2d{-12 * u0, 1} : Vec2d{1, -12 * u0};
    t = (tdir / norm(t)) * t;
    SingularSample s;
    s.p = p;
    s.tangent = t;
    s.eta = null_direction(v, p);
    Vec2d canonical = cross(s.tangent, s.eta) >= 0 ? s.eta : -1.0 * s.eta;
    Vec2d g = v.grad_lambda(p);
    s.dlambda_eta = dot(g, canonical);
    return singular_curvature(v, s);
}

// Brioschi curvature of the first fundamental form by central differences.
double brioschi_K(const BundleView& v, Vec2d p, double h) {
    auto E = [&](double du, double dv) {
        Mat2 I = v.first_fundamental_form({p.u + du, p.v + dv});
        return Vec3(I(0, 0), I(0, 1), I(1, 1));
    };
    Vec3 c = E(0, 0);
    Vec3 cu = (E(h, 0) - E(-h, 0)) / (2 * h), cv = (E(0, h) - E(0, -h)) / (2 * h);
    Vec3 cuu = (E(h, 0) - 2 * c + E(-h, 0)) / (h * h);
    Vec3 cvv = (E(0, h) - 2 * c + E(0, -h)) / (h * h);
    Vec3 cuv = (E(h, h) - E(h, -h) - E(-h, h) + E(-h, -h)) / (4 * h * h);
    double Ev = cv[0], Eu = cu[0], Gv = cv[2], Gu = cu[2], Fu = cu[1], Fv = cv[1];
    double EE = c[0], FF = c[1], GG = c[2];
    Eigen::Matrix3d m1, m2;
    m1 << -0.5 * cvv[0] + cuv[1] - 0.5 * cuu[2], 0.5 * Eu, Fu - 0.5 * Ev,
          Fv - 0.5 * Gu, EE, FF,
          0.5 * Gv, FF, GG;
    m2 << 0, 0.5 * Ev, 0.5 * Gu,
          0.5 * Ev, EE, FF,
          0.5 * Gu, FF, GG;
    double den = EE * GG - FF * FF;
    return (m1.determinant() - m2.determinant()) / (den * den);
}

}  // namespace

TEST_CASE("unit sphere patch: K = 1 everywhere") {
    auto v = view_of(kSpherePatch);
    for (double u : {-0.8, -0.2, 0.4})
        for (double vv : {0.1, 0.6, 0.9}) {
            GaussianDensity g = gaussian_density(*v, {u, vv});
            CHECK_FALSE(g.near_singular);
            CHECK(g.K == doctest::Approx(1.0).epsilon(1e-10));
            // lambda = -cos u with this chart ordering
            CHECK(g.lambda == doctest::Approx(-std::cos(u)).epsilon(1e-12));
        }
}

TEST_CASE("latitude circles: |kappa_hat| = |tan u0|, equator is a geodesic") {
    auto v = view_of(kSpherePatch);
    for (double u0 : {0.0, 0.3, -0.5, 1.0}) {
        GeodesicCurvature g = geodesic_curvature(*v, {u0, 0.5}, {0, 1}, {0, 0});
        CHECK(std::abs(g.kappa_hat) == doctest::Approx(std::abs(std::tan(u0))).epsilon(1e-10));
        CHECK(g.dtau_dt == doctest::Approx(std::cos(u0)).epsilon(1e-12));
        // M- here (lambda < 0): kappa_tilde = -kappa_hat
        CHECK(g.kappa_tilde == doctest::Approx(-g.kappa_hat));
    }
    CHECK_THROWS_AS(geodesic_curvature(*view_of(kCuspidalEdge), {0.0, 0.2}, {0, 1}, {0, 0}),
                    OnSingularSet);
}

TEST_CASE("cuspidal edge: kappa_s vanishes along the straight singular image") {
    auto v = view_of(kCuspidalEdge);
    SingularLocus l = trace_singular_set(*v);
    REQUIRE(l.curves.size() == 1);
    std::vector<double> ks = singular_curvature(*v, l.curves[0]);
    for (double k : ks) CHECK(std::abs(k) < 1e-10);
}

TEST_CASE("kappa_s invariance under parameter, co-orientation, chart reversal") {
    auto v = view_of(kSwallowtail);
    auto vneg = view_of(kSwallowtailNeg);
    auto vswap = view_of(kSwallowtailSwap);
    for (double u0 : {-0.35, -0.1, 0.15, 0.3}) {
        double base = sw_kappa_s(*v, u0, false, +1);
        CHECK(sw_kappa_s(*v, u0, false, -1) == doctest::Approx(base).epsilon(1e-9));
        CHECK(sw_kappa_s(*vneg, u0, false, +1) == doctest::Approx(base).epsilon(1e-9));
        CHECK(sw_kappa_s(*vswap, u0, true, +1) == doctest::Approx(base).epsilon(1e-9));
        CHECK(base != doctest::Approx(0.0));  // non-trivial invariance
    }
}

TEST_CASE("kappa_s measure stays bounded toward the A3 point while kappa_s blows up") {
    auto v = view_of(kSwallowtail);
    double prev_ks = 0;
    for (double u0 : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        Vec2d p{u0, -6 * u0 * u0};
        SingularSample s;
        s.p = p;
        s.tangent = (1.0 / norm(Vec2d{1, -12 * u0})) * Vec2d{1, -12 * u0};
        s.eta = null_direction(*v, p);
        Vec2d canonical = cross(s.tangent, s.eta) >= 0 ? s.eta : -1.0 * s.eta;
        s.dlambda_eta = dot(v->grad_lambda(p), canonical);
        double ks = std::abs(singular_curvature(*v, s));
        double meas = std::abs(singular_curvature_measure(*v, s));
        CHECK(ks > prev_ks);  // monotone growth toward the peak
        CHECK(meas < 10.0);
        prev_ks = ks;
    }
}

TEST_CASE("gaussian_density matches Brioschi curvature away from the singular set") {
    auto v = view_of(kSwallowtail);
    for (Vec2d p : {Vec2d{0.4, 0.5}, Vec2d{-0.5, 0.3}, Vec2d{0.3, -0.2}}) {
        GaussianDensity g = gaussian_density(*v, p);
        REQUIRE_FALSE(g.near_singular);
        double kb = brioschi_K(*v, p, 1e-4);
        CHECK(g.K == doctest::Approx(kb).epsilon(1e-4));
    }
    auto sp = view_of(kSpherePatch);
    CHECK(brioschi_K(*sp, {0.2, 0.5}, 1e-4) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("connection form: curl of omega equals the smooth density K*lambda") {
    auto v = view_of(kSwallowtail);
    double h = 1e-5;
    for (Vec2d p : {Vec2d{0.2, 0.1}, Vec2d{-0.4, 0.3}, Vec2d{0.0, 0.0}}) {
        Vec3 ref(0, 0, 1);  // z-axis stays clear of nu = (1,-u,u^2)/s on this window
        double dv_wu = (connection_form(*v, {p.u, p.v + h}, ref).u -
                        connection_form(*v, {p.u, p.v - h}, ref).u) / (2 * h);
        double du_wv = (connection_form(*v, {p.u + h, p.v}, ref).v -
                        connection_form(*v, {p.u - h, p.v}, ref).v) / (2 * h);
        double klam = v->curvature_density_jet(p, 0).value();
        CHECK(du_wv - dv_wu == doctest::Approx(klam).epsilon(1e-5));
    }
}

TEST_CASE("intrinsic connection form is returned verbatim") {
    const char* ctb = R"([ctb]
name = c
domain = rectangle
u_range = -1 1
v_range = -1 1
p11 = 1
p12 = 0
p21 = 0
p22 = 1
omega_u = u*v
omega_v = u^2
)";
    auto v = view_of(ctb);
    Vec2d w = connection_form(*v, {0.3, 0.7});
    CHECK(w.u == doctest::Approx(0.21));
    CHECK(w.v == doctest::Approx(0.09));
    // K*lambda = du omega_v - dv omega_u = 2u - u
    CHECK(v->curvature_density_jet({0.3, 0.7}, 0).value() == doctest::Approx(0.3));
}
