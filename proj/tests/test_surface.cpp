#include <cmath>

#include "doctest.h"
#include "frontlab/surface.hpp"

using namespace frontlab;

namespace {

const char* kCuspidalEdge = R"(# cuspidal edge
[surface]
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

const char* kIdentityCTB = R"([ctb]
name = trivial
domain = rectangle
u_range = -1 1
v_range = -1 1
p11 = 1
p12 = 0
p21 = 0
p22 = 1
omega_u = 0
omega_v = 0
)";

}  // namespace

TEST_CASE("frontal spec loads and evaluates lambda = u*sqrt(9u^2+4)") {
    SurfaceSpec spec = load_spec(kCuspidalEdge);
    auto view = make_view(spec);
    CHECK(view->name() == "cuspidal-edge");
    CHECK(view->ambient_dim() == 3);
    for (double u : {-0.7, -0.2, 0.0, 0.31, 0.9}) {
        for (double v : {-0.5, 0.25}) {
            double expected = u * std::sqrt(9 * u * u + 4);
            CHECK(view->lambda({u, v}) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    // grad lambda at the singular line: d(lambda)/du = sqrt(4) = 2 at u=0
    Vec2d g = view->grad_lambda({0.0, 0.3});
    CHECK(g.u == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g.v == doctest::Approx(0.0));
}

TEST_CASE("frontal invariants are validated on load") {
    // nu not orthogonal to f_u
    const char* bad = R"([surface]
name = bad
domain = rectangle
u_range = -1 1
v_range = -1 1
x = u^2
y = u^3
z = v
nu_x = 0
nu_y = 1
nu_z = 0
)";
    CHECK_THROWS_AS(load_spec(bad), FrontalViolation);
    // nu not unit
    const char* bad2 = R"([surface]
name = bad2
domain = rectangle
u_range = -1 1
v_range = -1 1
x = u^2
y = u^3
z = v
nu_x = 3*u
nu_y = -2
nu_z = 0
)";
    CHECK_THROWS_AS(load_spec(bad2), FrontalViolation);
}

TEST_CASE("spec parser rejects malformed input") {
    CHECK_THROWS_AS(load_spec("[surface]\nname = x\nname = y\n"), SpecError);  // duplicate key
    CHECK_THROWS_AS(load_spec("[surface]\nbogus_key = 1\n"), SpecError);
    CHECK_THROWS_AS(load_spec("[nosuch]\n"), SpecError);
    CHECK_THROWS_AS(load_spec("[surface]\nname = x\n"), SpecError);  // missing components
}

TEST_CASE("spec round-trips through write_spec") {
    SurfaceSpec spec = load_spec(kCuspidalEdge);
    SurfaceSpec again = load_spec(write_spec(spec));
    auto v1 = make_view(spec);
    auto v2 = make_view(again);
    for (double u : {-0.6, 0.1, 0.8})
        for (double v : {-0.9, 0.4})
            CHECK(v1->lambda({u, v}) == doctest::Approx(v2->lambda({u, v})).epsilon(1e-14));
}

TEST_CASE("identity intrinsic bundle: lambda = 1, K*lambda = 0, compatible") {
    SurfaceSpec spec = load_spec(kIdentityCTB);
    auto view = make_view(spec);
    CHECK(view->ambient_dim() == 2);
    CHECK(view->lambda({0.3, -0.4}) == doctest::Approx(1.0));
    CHECK(view->curvature_density_jet({0.3, -0.4}, 0).value() == doctest::Approx(0.0));
    const auto& ctb = std::get<IntrinsicCTB>(spec);
    CHECK(check_compatibility(ctb) < 1e-12);
}

TEST_CASE("incompatible connection form is detected") {
    const char* bad = R"([ctb]
name = bad
domain = rectangle
u_range = -1 1
v_range = -1 1
p11 = 1
p12 = 0
p21 = 0
p22 = 1
omega_u = v
omega_v = 0
)";
    SurfaceSpec spec = load_spec(bad);
    const auto& ctb = std::get<IntrinsicCTB>(spec);
    // D_u psi(dv) - D_v psi(du) = omega_u * J * psi(dv) - ... ~ |v| on the grid
    CHECK(check_compatibility(ctb) > 0.1);
}

TEST_CASE("frontal converts to an intrinsic bundle with the same lambda") {
    SurfaceSpec spec = load_spec(kCuspidalEdge);
    const auto& s = std::get<FrontalSurface>(spec);
    IntrinsicCTB ctb = frontal_to_intrinsic(s, Vec3(0, 0, 1));
    CHECK(check_compatibility(ctb) < 1e-7);
    auto fv = make_view(spec);
    IntrinsicView iv(ctb);
    for (double u : {-0.8, -0.3, 0.0, 0.2, 0.7})
        for (double v : {-0.6, 0.0, 0.5})
            CHECK(iv.lambda({u, v}) == doctest::Approx(fv->lambda({u, v})).epsilon(1e-9));
}

TEST_CASE("first fundamental form matches psi^T psi") {
    SurfaceSpec spec = load_spec(kCuspidalEdge);
    auto view = make_view(spec);
    Vec2d p{0.4, -0.2};
    Mat2 I = view->first_fundamental_form(p);
    // f_u = (2u, 3u^2, 0), f_v = (0,0,1)
    double u = p.u;
    CHECK(I(0, 0) == doctest::Approx(4 * u * u + 9 * u * u * u * u));
    CHECK(I(0, 1) == doctest::Approx(0.0));
    CHECK(I(1, 1) == doctest::Approx(1.0));
}
