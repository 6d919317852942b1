#include "doctest.h"
#include "frontlab/expr.hpp"
#include "frontlab/jet.hpp"

#include <cmath>
#include <random>

using namespace frontlab;

TEST_CASE("coordinate jets") {
    Jet2 u = Jet2::variable_u(0.0, 1);
    CHECK(u.value() == 0.0);
    CHECK(u.d(1, 0) == 1.0);
    CHECK(u.d(0, 1) == 0.0);

    Jet2 ua = Jet2::variable_u(2.5, 3);
    CHECK(ua.value() == 2.5);
    CHECK(ua.d(1, 0) == 1.0);
    CHECK(ua.d(2, 0) == 0.0);
}

TEST_CASE("u^2*v jet at (1,2) order 2") {
    Jet2 u = Jet2::variable_u(1.0, 2);
    Jet2 v = Jet2::variable_v(2.0, 2);
    Jet2 j = u * u * v;
    CHECK(j.value() == doctest::Approx(2.0));
    CHECK(j.d(1, 0) == doctest::Approx(4.0));
    CHECK(j.d(0, 1) == doctest::Approx(1.0));
    CHECK(j.d(2, 0) == doctest::Approx(4.0));  // 2v, raw partial (not Taylor-scaled)
    CHECK(j.d(1, 1) == doctest::Approx(2.0));
    CHECK(j.d(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("sqrt(1+u^2) jet at origin") {
    Jet2 u = Jet2::variable_u(0.0, 2);
    Jet2 j = sqrt(1.0 + u * u);
    CHECK(j.value() == doctest::Approx(1.0));
    CHECK(j.d(1, 0) == doctest::Approx(0.0));
    CHECK(j.d(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("Leibniz rule holds exactly for polynomial products") {
    // (u + 2v)^3 expanded coefficient by coefficient
    Jet2 u = Jet2::variable_u(0.0, 3);
    Jet2 v = Jet2::variable_v(0.0, 3);
    Jet2 s = u + 2.0 * v;
    Jet2 j = s * s * s;
    CHECK(j.d(3, 0) == doctest::Approx(6.0));       // 3! * 1
    CHECK(j.d(2, 1) == doctest::Approx(12.0));      // 2!*1! * 3*2
    CHECK(j.d(1, 2) == doctest::Approx(24.0));
    CHECK(j.d(0, 3) == doctest::Approx(48.0));
}

TEST_CASE("division and reciprocal") {
    Jet2 u = Jet2::variable_u(1.0, 3);
    Jet2 j = 1.0 / u;
    CHECK(j.value() == doctest::Approx(1.0));
    CHECK(j.d(1, 0) == doctest::Approx(-1.0));
    CHECK(j.d(2, 0) == doctest::Approx(2.0));
    CHECK(j.d(3, 0) == doctest::Approx(-6.0));
    CHECK_THROWS_AS(1.0 / Jet2::variable_u(0.0, 1), DomainError);
}

TEST_CASE("elementary functions against closed forms") {
    Jet2 u = Jet2::variable_u(0.3, 3);
    Jet2 s = sin(u);
    CHECK(s.value() == doctest::Approx(std::sin(0.3)));
    CHECK(s.d(1, 0) == doctest::Approx(std::cos(0.3)));
    CHECK(s.d(2, 0) == doctest::Approx(-std::sin(0.3)));
    CHECK(s.d(3, 0) == doctest::Approx(-std::cos(0.3)));

    Jet2 t = tan(u);
    double tv = std::tan(0.3);
    CHECK(t.d(1, 0) == doctest::Approx(1 + tv * tv));

    Jet2 a = atan(u);
    CHECK(a.d(1, 0) == doctest::Approx(1.0 / 1.09));

    CHECK_THROWS_AS(log(Jet2::variable_u(-1.0, 1)), DomainError);
    CHECK_THROWS_AS(sqrt(Jet2::variable_u(-1.0, 1)), DomainError);
    CHECK_THROWS_AS(abs(Jet2::variable_u(0.0, 1)), DomainError);
}

TEST_CASE("order truncation consistency") {
    Expr e = parse("sin(u*v) + exp(u - v^2)");
    for (int k = 0; k <= 3; ++k) {
        Jet2 full = eval_jet(e, 0.4, -0.2, 3);
        Jet2 low = eval_jet(e, 0.4, -0.2, k);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j)
                CHECK(full.d(i, j) == doctest::Approx(low.d(i, j)).epsilon(1e-13));
    }
}

TEST_CASE("jet derivatives match central finite differences") {
    // fixed random expressions exercised away from domain boundaries
    const char* exprs[] = {
        "sin(u)*cos(v)",       "exp(u*v) - u^3",      "sqrt(4 + u^2 + v^2)",
        "atan(u - v)",         "log(2 + sin(u) + v)", "u^4 - 3*u^2*v + v^2",
        "tan(u/2)*v",          "(1 + u^2)^1.5",       "cos(u)^2/(2 + v)",
        "exp(-u^2 - v^2)*sin(3*u)",
    };
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> pick(-0.8, 0.8);
    const double h = 1e-5;
    for (const char* text : exprs) {
        Expr e = parse(text);
        for (int trial = 0; trial < 10; ++trial) {
            double u = pick(rng), v = pick(rng);
            Jet2 j = eval_jet(e, u, v, 2);
            double fu = (eval(e, u + h, v) - eval(e, u - h, v)) / (2 * h);
            double fv = (eval(e, u, v + h) - eval(e, u, v - h)) / (2 * h);
            CHECK(std::fabs(j.d(1, 0) - fu) < 1e-6);
            CHECK(std::fabs(j.d(0, 1) - fv) < 1e-6);
            double fuu = (eval(e, u + h, v) - 2 * eval(e, u, v) + eval(e, u - h, v)) / (h * h);
            CHECK(std::fabs(j.d(2, 0) - fuu) < 1e-4);
        }
    }
}

TEST_CASE("deterministic evaluation") {
    Expr e = parse("sin(u)*exp(v)/(1 + u^2)");
    Jet2 a = eval_jet(e, 0.123456, -0.7, 3);
    Jet2 b = eval_jet(e, 0.123456, -0.7, 3);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) CHECK(a.d(i, j) == b.d(i, j));
}
