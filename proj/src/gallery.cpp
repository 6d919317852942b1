#include "frontlab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <sstream>

#include "frontlab/curvature.hpp"
#include "frontlab/integrate.hpp"
#include "frontlab/sectors.hpp"

namespace frontlab {

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Reference: return "reference";
        case Provenance::Trivial: return "trivial";
        case Provenance::Derived: return "derived";
    }
    return "?";
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Ctx {
    std::shared_ptr<BundleView> view;
    SingularLocus locus;
};

/// Thrown by checks; the runner records `observed` on the result.
struct CheckFail {
    std::string observed;
};

void require(bool ok, const std::string& observed) {
    if (!ok) throw CheckFail{observed};
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

using Check = std::function<void(Ctx&)>;

struct Expectation {
    std::string label;
    Provenance prov;
    Check run;
};

struct Entry {
    std::string name;
    std::string spec;
    TraceOptions topt;
    std::vector<Expectation> checks;
};

// ------------------------------------------------------------ geometry

double dist_point_segment(Vec2d p, Vec2d a, Vec2d b) {
    Vec2d d = b - a;
    double len2 = dot(d, d);
    double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    Vec2d q = a + t * d;
    return norm(p - q);
}

/// max over traced samples of dist(sample), plus max over `targets` of the
/// distance to the traced polylines (coverage).
double max_sample_dist(const SingularLocus& locus, const std::function<double(Vec2d)>& dist) {
    double worst = 0;
    for (const auto& c : locus.curves)
        for (const auto& s : c.samples) worst = std::max(worst, dist(s.p));
    return worst;
}

double coverage_dist(const SingularLocus& locus, const std::vector<Vec2d>& targets) {
    double worst = 0;
    for (Vec2d t : targets) {
        double best = 1e300;
        for (const auto& c : locus.curves)
            for (size_t k = 0; k + 1 < c.samples.size(); ++k)
                best = std::min(best,
                                dist_point_segment(t, c.samples[k].p, c.samples[k + 1].p));
        worst = std::max(worst, best);
    }
    return worst;
}

double dist_to_vaxis(Vec2d p) { return std::abs(p.u); }
double dist_to_uaxis(Vec2d p) { return std::abs(p.v); }

/// Distance to the parabola v = -6u^2 (golden-section over the parameter).
double dist_to_parabola(Vec2d p) {
    auto f = [&](double x) {
        double du = x - p.u, dv = -6 * x * x - p.v;
        return du * du + dv * dv;
    };
    double a = -0.5, b = 0.5;
    // bracket the best of 64 coarse samples
    double bx = a, bf = f(a);
    for (int i = 1; i <= 64; ++i) {
        double x = a + (b - a) * i / 64.0;
        if (f(x) < bf) { bf = f(x); bx = x; }
    }
    double lo = bx - (b - a) / 64, hi = bx + (b - a) / 64;
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = f(x1); }
        else { lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = f(x2); }
    }
    return std::sqrt(f((lo + hi) / 2));
}

double dist_to_line(Vec2d p, double a, double b) {
    // line a*u + b*v = 0
    return std::abs(a * p.u + b * p.v) / std::hypot(a, b);
}

const SingularPointReport& single_point_at_origin(Ctx& c) {
    require(c.locus.points.size() == 1,
            std::to_string(c.locus.points.size()) + " special points");
    const auto& r = c.locus.points[0];
    require(norm(r.point) < 1e-6, "point at (" + fmt(r.point.u) + ", " + fmt(r.point.v) + ")");
    return r;
}

// ------------------------------------------------------------- entries

// The wavy-parallel-torus expressions are assembled from pieces: base
// torus with revolution-dependent tube radius r(v) = 1 + 0.2 sin 3v,
// exact unit normal obtained from the closed-form cross product, offset
// along it by t = -0.75 (the normal is shared by the offset surface).
std::string wavy_spec() {
    std::string R = "(1 + 0.2*sin(3*v))";
    std::string RP = "(0.6*cos(3*v))";
    std::string RHO = "(2 + " + R + "*cos(u))";
    std::string Q = "sqrt(" + RHO + "^2 + " + RP + "^2)";
    std::string nx = "(" + RHO + "*cos(u)*cos(v) + " + RP + "*sin(v))/" + Q;
    std::string ny = "(" + RHO + "*cos(u)*sin(v) - " + RP + "*cos(v))/" + Q;
    std::string nz = RHO + "*sin(u)/" + Q;
    std::string t = "(-0.75)";
    std::string s = "[surface]\nname = wavy-parallel-torus\ndomain = flat_torus\n";
    s += "u_period = 6.283185307179586\nv_period = 6.283185307179586\n";
    s += "x = " + RHO + "*cos(v) + " + t + "*(" + nx + ")\n";
    s += "y = " + RHO + "*sin(v) + " + t + "*(" + ny + ")\n";
    s += "z = " + R + "*sin(u) + " + t + "*(" + nz + ")\n";
    s += "nu_x = " + nx + "\nnu_y = " + ny + "\nnu_z = " + nz + "\n";
    return s;
}

std::vector<Entry> build_entries() {
    std::vector<Entry> es;

    // ---- cuspidal-edge: f = (u^2, u^3, v), nu = (3u, -2, 0)/sqrt(9u^2+4)
    {
        Entry e;
        e.name = "cuspidal-edge";
        e.spec = R"([surface]
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
        e.checks.push_back({"singular set is the v-axis", Provenance::Reference, [](Ctx& c) {
            require(c.locus.curves.size() == 1,
                    std::to_string(c.locus.curves.size()) + " curves");
            double d = max_sample_dist(c.locus, dist_to_vaxis);
            require(d < 1e-6, "sample off the axis by " + fmt(d));
            std::vector<Vec2d> targets;
            for (int i = 0; i <= 20; ++i) targets.push_back({0, -1 + 0.1 * i});
            double cov = coverage_dist(c.locus, targets);
            require(cov < 0.05, "axis not covered (gap " + fmt(cov) + ")");
        }});
        e.checks.push_back({"every singular point is A2 with null direction along u",
                            Provenance::Reference, [](Ctx& c) {
            require(c.locus.points.empty(),
                    std::to_string(c.locus.points.size()) + " special points");
            for (const auto& s : c.locus.curves[0].samples) {
                require(std::abs(s.eta.v) < 1e-6, "eta = (" + fmt(s.eta.u) + ", " +
                                                      fmt(s.eta.v) + ")");
                require(std::abs(cross(s.tangent, s.eta)) > 0.9,
                        "transversality " + fmt(cross(s.tangent, s.eta)));
            }
        }});
        e.checks.push_back({"kappa_s vanishes along the edge", Provenance::Trivial, [](Ctx& c) {
            auto ks = singular_curvature(*c.view, c.locus.curves[0]);
            double worst = 0;
            for (double k : ks) worst = std::max(worst, std::abs(k));
            require(worst < 1e-9, "max |kappa_s| = " + fmt(worst));
        }});
        es.push_back(std::move(e));
    }

    // ---- swallowtail: f = (3u^4+u^2 v, 4u^3+2uv, v).
    // nu is derived by normalizing f_u x f_v = 2(6u^2+v) * (1, -u, u^2).
    {
        Entry e;
        e.name = "swallowtail";
        e.spec = R"([surface]
name = swallowtail
domain = rectangle
u_range = -0.4 0.4
v_range = -1 1
x = 3*u^4 + u^2*v
y = 4*u^3 + 2*u*v
z = v
nu_x = 1 / sqrt(1 + u^2 + u^4)
nu_y = -u / sqrt(1 + u^2 + u^4)
nu_z = u^2 / sqrt(1 + u^2 + u^4)
)";
        e.checks.push_back({"singular set is the parabola 6u^2 + v = 0",
                            Provenance::Reference, [](Ctx& c) {
            require(!c.locus.curves.empty(), "no curves traced");
            double d = max_sample_dist(c.locus, dist_to_parabola);
            require(d < 1e-6, "sample off the parabola by " + fmt(d));
            std::vector<Vec2d> targets;
            for (int i = 0; i <= 16; ++i) {
                double u = -0.38 + 0.76 * i / 16.0;
                targets.push_back({u, -6 * u * u});
            }
            double cov = coverage_dist(c.locus, targets);
            require(cov < 0.05, "parabola not covered (gap " + fmt(cov) + ")");
        }});
        e.checks.push_back({"origin is an A3 point", Provenance::Reference, [](Ctx& c) {
            const auto& r = single_point_at_origin(c);
            require(r.verdict == Verdict::A3, std::string(verdict_name(r.verdict)));
        }});
        e.checks.push_back({"the A3 point is a positive peak with sector angles 2pi and 0",
                            Provenance::Reference, [](Ctx& c) {
            PeakSectorReport rep = sector_angles(*c.view, c.locus, 0);
            verify_theorem_A(rep);
            require(rep.sign == PeakSign::Positive, peak_sign_name(rep.sign));
            require(rep.alpha_plus == 2 * kPi && rep.alpha_minus == 0,
                    "alpha+ = " + fmt(rep.alpha_plus) + ", alpha- = " + fmt(rep.alpha_minus));
        }});
        es.push_back(std::move(e));
    }

    // ---- cuspidal-crosscap: f = (u, v^2, u v^3); not a front, but the
    // singular curve still consists of A2 points of the bundle map.
    {
        Entry e;
        e.name = "cuspidal-crosscap";
        e.spec = R"([surface]
name = cuspidal-crosscap
domain = rectangle
u_range = -1 1
v_range = -1 1
x = u
y = v^2
z = u*v^3
nu_x = -2*v^3 / sqrt(4 + 9*u^2*v^2 + 4*v^6)
nu_y = -3*u*v / sqrt(4 + 9*u^2*v^2 + 4*v^6)
nu_z = 2 / sqrt(4 + 9*u^2*v^2 + 4*v^6)
)";
        e.checks.push_back({"singular set is the u-axis", Provenance::Reference, [](Ctx& c) {
            require(c.locus.curves.size() == 1,
                    std::to_string(c.locus.curves.size()) + " curves");
            double d = max_sample_dist(c.locus, dist_to_uaxis);
            require(d < 1e-6, "sample off the axis by " + fmt(d));
        }});
        e.checks.push_back({"all singular points are A2, including the origin",
                            Provenance::Reference, [](Ctx& c) {
            require(c.locus.points.empty(),
                    std::to_string(c.locus.points.size()) + " special points");
            auto r = classify_point(*c.view, {0, 0}, c.locus);
            require(r.verdict == Verdict::A2, std::string(verdict_name(r.verdict)));
        }});
        es.push_back(std::move(e));
    }

    // ---- double-swallowtail: f = (2u^3 - uv^2, 3u^4 - u^2 v^2, v)
    {
        Entry e;
        e.name = "double-swallowtail";
        e.spec = R"([surface]
name = double-swallowtail
domain = rectangle
u_range = -1 1
v_range = -1 1
x = 2*u^3 - u*v^2
y = 3*u^4 - u^2*v^2
z = v
nu_x = -2*u / sqrt(1 + 4*u^2 + 4*u^4*v^2)
nu_y = 1 / sqrt(1 + 4*u^2 + 4*u^4*v^2)
nu_z = -2*u^2*v / sqrt(1 + 4*u^2 + 4*u^4*v^2)
)";
        const double s6 = std::sqrt(6.0);
        e.checks.push_back({"singular set is the line pair v = +-sqrt(6) u",
                            Provenance::Reference, [s6](Ctx& c) {
            double d = max_sample_dist(c.locus, [s6](Vec2d p) {
                return std::min(dist_to_line(p, s6, -1), dist_to_line(p, s6, 1));
            });
            require(d < 1e-6, "sample off the lines by " + fmt(d));
            std::vector<Vec2d> targets;
            for (int i = 1; i <= 8; ++i) {
                double v = 0.9 * i / 8.0;
                targets.push_back({v / s6, v});
                targets.push_back({-v / s6, v});
                targets.push_back({v / s6, -v});
                targets.push_back({-v / s6, -v});
            }
            double cov = coverage_dist(c.locus, targets);
            require(cov < 0.05, "lines not covered (gap " + fmt(cov) + ")");
        }});
        e.checks.push_back({"origin is a degenerate peak with four branches",
                            Provenance::Reference, [](Ctx& c) {
            const auto& r = single_point_at_origin(c);
            require(r.verdict == Verdict::DegeneratePeak,
                    std::string(verdict_name(r.verdict)));
            require(r.branch_count == 4, std::to_string(r.branch_count) + " branches");
        }});
        e.checks.push_back({"sector angles are (0, 0, pi, pi) with the zero sectors positive",
                            Provenance::Reference, [](Ctx& c) {
            PeakSectorReport rep = sector_angles(*c.view, c.locus, 0);
            std::vector<int> mult;
            for (const auto& s : rep.sectors) mult.push_back(s.angle_multiple);
            std::sort(mult.begin(), mult.end());
            require(mult == std::vector<int>{0, 0, 1, 1},
                    "sector multiples not (0,0,1,1)");
            for (const auto& s : rep.sectors)
                require(s.angle_multiple == 0 ? s.sign > 0 : s.sign < 0,
                        "sector of angle " + std::to_string(s.angle_multiple) +
                            "*pi has sign " + std::to_string(s.sign));
            require(rep.alpha_plus == 0 && rep.alpha_minus == 2 * kPi,
                    "alpha+ = " + fmt(rep.alpha_plus) + ", alpha- = " + fmt(rep.alpha_minus));
        }});
        e.checks.push_back({"interior angles satisfy the peak angle identity",
                            Provenance::Derived, [](Ctx& c) {
            verify_theorem_A(sector_angles(*c.view, c.locus, 0));
        }});
        es.push_back(std::move(e));
    }

    // ---- cuspidal-lips: f = (3u^4 + 2u^2 v^2, 4u^3 + 4u v^2, v);
    // f_u x f_v = 4(3u^2+v^2) * (1, -u, 4u^2 v), singular only at the origin.
    {
        Entry e;
        e.name = "cuspidal-lips";
        e.spec = R"([surface]
name = cuspidal-lips
domain = rectangle
u_range = -0.8 0.8
v_range = -0.8 0.8
x = 3*u^4 + 2*u^2*v^2
y = 4*u^3 + 4*u*v^2
z = v
nu_x = 1 / sqrt(1 + u^2 + 16*u^4*v^2)
nu_y = -u / sqrt(1 + u^2 + 16*u^4*v^2)
nu_z = 4*u^2*v / sqrt(1 + u^2 + 16*u^4*v^2)
)";
        e.checks.push_back({"the singular set is the single point at the origin",
                            Provenance::Reference, [](Ctx& c) {
            require(c.locus.curves.empty(),
                    std::to_string(c.locus.curves.size()) + " curves");
            const auto& r = single_point_at_origin(c);
            require(r.verdict == Verdict::IsolatedPeak,
                    std::string(verdict_name(r.verdict)));
        }});
        e.checks.push_back({"the isolated peak has one full sector of angle 2pi",
                            Provenance::Reference, [](Ctx& c) {
            PeakSectorReport rep = sector_angles(*c.view, c.locus, 0);
            require(rep.sectors.size() == 1 && rep.sectors[0].angle_multiple == 2,
                    std::to_string(rep.sectors.size()) + " sectors");
            verify_theorem_A(rep);
        }});
        es.push_back(std::move(e));
    }

    // ---- scherbak: f = (u^3 + u^2 v, 6u^5 + 5u^4 v, v);
    // f_u = u(3u+2v)(1, 10u^2, 0), so the singular set is two lines.
    {
        Entry e;
        e.name = "scherbak";
        e.spec = R"([surface]
name = scherbak
domain = rectangle
u_range = -1 1
v_range = -1 1
x = u^3 + u^2*v
y = 6*u^5 + 5*u^4*v
z = v
nu_x = 10*u^2 / sqrt(1 + 100*u^4 + 25*u^8)
nu_y = -1 / sqrt(1 + 100*u^4 + 25*u^8)
nu_z = -5*u^4 / sqrt(1 + 100*u^4 + 25*u^8)
)";
        e.checks.push_back({"singular set is the transversal line pair u = 0 and 3u + 2v = 0",
                            Provenance::Reference, [](Ctx& c) {
            double d = max_sample_dist(c.locus, [](Vec2d p) {
                return std::min(std::abs(p.u), dist_to_line(p, 3, 2));
            });
            require(d < 1e-6, "sample off the lines by " + fmt(d));
            std::vector<Vec2d> targets;
            for (int i = 1; i <= 8; ++i) {
                double s = 0.9 * i / 8.0;
                targets.push_back({0, s});
                targets.push_back({0, -s});
                double u = 0.6 * i / 8.0;
                targets.push_back({u, -1.5 * u});
                targets.push_back({-u, 1.5 * u});
            }
            double cov = coverage_dist(c.locus, targets);
            require(cov < 0.05, "lines not covered (gap " + fmt(cov) + ")");
        }});
        e.checks.push_back({"origin is a degenerate peak with four branches",
                            Provenance::Derived, [](Ctx& c) {
            const auto& r = single_point_at_origin(c);
            require(r.verdict == Verdict::DegeneratePeak,
                    std::string(verdict_name(r.verdict)));
            require(r.branch_count == 4, std::to_string(r.branch_count) + " branches");
        }});
        e.checks.push_back({"interior angles satisfy the peak angle identity",
                            Provenance::Derived, [](Ctx& c) {
            verify_theorem_A(sector_angles(*c.view, c.locus, 0));
        }});
        es.push_back(std::move(e));
    }

    // ---- tangent developable of the (3,4,5)-curve, f = c(u) + v*X(u) with
    // c = (u^3, u^4, u^5), X = (3, 4u, 5u^2); f_u x f_v = -2v(10u^2, -15u, 6),
    // nu derived by normalizing the constant-direction factor.
    {
        Entry e;
        e.name = "tangent-developable-345";
        e.spec = R"([surface]
name = tangent-developable-345
domain = rectangle
u_range = -0.8 0.8
v_range = -0.8 0.8
x = u^3 + 3*v
y = u^4 + 4*u*v
z = u^5 + 5*u^2*v
nu_x = -10*u^2 / sqrt(100*u^4 + 225*u^2 + 36)
nu_y = 15*u / sqrt(100*u^4 + 225*u^2 + 36)
nu_z = -6 / sqrt(100*u^4 + 225*u^2 + 36)
)";
        e.checks.push_back({"singular set is the edge-of-regression line v = 0",
                            Provenance::Reference, [](Ctx& c) {
            require(!c.locus.curves.empty(), "no curves traced");
            double d = max_sample_dist(c.locus, dist_to_uaxis);
            require(d < 1e-6, "sample off the line by " + fmt(d));
        }});
        e.checks.push_back({"origin is a non-degenerate peak but not an A3 point",
                            Provenance::Reference, [](Ctx& c) {
            const auto& r = single_point_at_origin(c);
            require(r.verdict == Verdict::NonDegeneratePeak,
                    std::string(verdict_name(r.verdict)));
        }});
        e.checks.push_back({"interior angles satisfy the peak angle identity",
                            Provenance::Derived, [](Ctx& c) {
            verify_theorem_A(sector_angles(*c.view, c.locus, 0));
        }});
        es.push_back(std::move(e));
    }

    // ---- torus-immersed: regular torus, R = 2, r = 1, inward normal.
    {
        Entry e;
        e.name = "torus-immersed";
        e.spec = R"([surface]
name = torus-immersed
domain = flat_torus
u_period = 6.283185307179586
v_period = 6.283185307179586
x = (2 + cos(u)) * cos(v)
y = (2 + cos(u)) * sin(v)
z = sin(u)
nu_x = -cos(u) * cos(v)
nu_y = -cos(u) * sin(v)
nu_z = -sin(u)
)";
        e.checks.push_back({"the singular set is empty", Provenance::Trivial, [](Ctx& c) {
            require(c.locus.curves.empty() && c.locus.points.empty(),
                    std::to_string(c.locus.curves.size()) + " curves, " +
                        std::to_string(c.locus.points.size()) + " points");
        }});
        e.checks.push_back({"total curvature and Euler-form integrals vanish",
                            Provenance::Derived, [](Ctx& c) {
            GBReport g = verify_global_GB(*c.view, 64);
            require(g.pass, "global check failed");
            require(std::abs(g.KdA.value) < 1e-7, "KdA = " + fmt(g.KdA.value));
            require(std::abs(g.chi_E) < 1e-7, "chi_E = " + fmt(g.chi_E));
        }});
        es.push_back(std::move(e));
    }

    // ---- parallel-torus: parallel surface at distance 0.6 of a torus with
    // the egg-shaped tube profile (3 + cos u, 2 sin u + 0.15 sin 2u); the
    // profile curvature crosses 1/0.6 at four u-values, giving four
    // cuspidal-edge circles. (A circular tube cannot: its constant profile
    // curvature puts the second focal sheet on the revolution axis, which
    // produces cone points rather than cuspidal edges.)
    {
        Entry e;
        e.name = "parallel-torus";
        e.spec = R"([surface]
name = parallel-torus
domain = flat_torus
u_period = 6.283185307179586
v_period = 6.283185307179586
x = (3 + cos(u) - 0.6*(2*cos(u) + 0.3*cos(2*u))/sqrt(sin(u)^2 + (2*cos(u) + 0.3*cos(2*u))^2)) * cos(v)
y = (3 + cos(u) - 0.6*(2*cos(u) + 0.3*cos(2*u))/sqrt(sin(u)^2 + (2*cos(u) + 0.3*cos(2*u))^2)) * sin(v)
z = 2*sin(u) + 0.15*sin(2*u) - 0.6*sin(u)/sqrt(sin(u)^2 + (2*cos(u) + 0.3*cos(2*u))^2)
nu_x = -(2*cos(u) + 0.3*cos(2*u)) * cos(v) / sqrt(sin(u)^2 + (2*cos(u) + 0.3*cos(2*u))^2)
nu_y = -(2*cos(u) + 0.3*cos(2*u)) * sin(v) / sqrt(sin(u)^2 + (2*cos(u) + 0.3*cos(2*u))^2)
nu_z = -sin(u) / sqrt(sin(u)^2 + (2*cos(u) + 0.3*cos(2*u))^2)
)";
        e.checks.push_back({"singular set is four cuspidal-edge circles",
                            Provenance::Derived, [](Ctx& c) {
            require(c.locus.points.empty(),
                    std::to_string(c.locus.points.size()) + " special points");
            require(c.locus.curves.size() == 4,
                    std::to_string(c.locus.curves.size()) + " curves");
            const double expect[4] = {1.1318, 1.5951, 4.6880, 5.1514};
            std::vector<double> got;
            for (const auto& cv : c.locus.curves) {
                require(cv.closed(), "open curve");
                double u0 = cv.samples.front().p.u;
                for (const auto& s : cv.samples)
                    require(std::abs(s.p.u - u0) < 1e-6, "circle not at constant u");
                for (const auto& s : cv.samples)
                    require(std::abs(cross(s.tangent, s.eta)) > 0.5,
                            "null direction not transversal");
                got.push_back(c.view->domain().wrap(cv.samples.front().p).u);
            }
            std::sort(got.begin(), got.end());
            for (int i = 0; i < 4; ++i)
                require(std::abs(got[i] - expect[i]) < 1e-3,
                        "circle at u = " + fmt(got[i]));
        }});
        e.checks.push_back({"global curvature identity balances with a nonzero singular term",
                            Provenance::Derived, [](Ctx& c) {
            GBReport g = verify_global_GB(*c.view, 96);
            require(g.pass, "global check failed (residual " + fmt(g.residual_eq_A) + ")");
            require(std::abs(g.kappa_s.value) > 0.2,
                    "kappa_s integral = " + fmt(g.kappa_s.value));
        }});
        es.push_back(std::move(e));
    }

    // ---- wavy-parallel-torus
    {
        Entry e;
        e.name = "wavy-parallel-torus";
        e.spec = wavy_spec();
        e.topt.seed_grid = 96;
        e.checks.push_back({"singular set is three loops broken by six swallowtail points",
                            Provenance::Derived, [](Ctx& c) {
            require(c.locus.points.size() == 6,
                    std::to_string(c.locus.points.size()) + " special points");
            for (const auto& p : c.locus.points)
                require(p.verdict == Verdict::A3, std::string(verdict_name(p.verdict)));
            require(c.locus.curves.size() == 6,
                    std::to_string(c.locus.curves.size()) + " curves");
            for (const auto& cv : c.locus.curves)
                require(cv.start_end == CurveEnd::Peak && cv.finish_end == CurveEnd::Peak,
                        "curve end not at a peak");
        }});
        e.checks.push_back({"each swallowtail satisfies the peak angle identity",
                            Provenance::Derived, [](Ctx& c) {
            for (int k = 0; k < (int)c.locus.points.size(); ++k) {
                PeakSectorReport rep = sector_angles(*c.view, c.locus, k);
                verify_theorem_A(rep);
                require(rep.alpha_plus + rep.alpha_minus == 2 * kPi,
                        "angle sum " + fmt(rep.alpha_plus + rep.alpha_minus));
            }
        }});
        e.checks.push_back({"the integer Euler identity holds", Provenance::Derived, [](Ctx& c) {
            GBReport g = verify_global_GB(*c.view, 96);
            require(g.pass, "global check failed (residual " + fmt(g.residual_eq_B) + ")");
            require(std::abs(g.chi_E) < 0.05, "chi_E = " + fmt(g.chi_E));
            long chi = std::lround(g.chi_E);
            long rhs = g.euler.chi_plus - g.euler.chi_minus + g.P_plus - g.P_minus;
            require(chi == rhs, "chi_E rounds to " + std::to_string(chi) + " but sum is " +
                                    std::to_string(rhs));
        }});
        es.push_back(std::move(e));
    }
    return es;
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> es = build_entries();
    return es;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : entries())
        if (e.name == name) return e;
    throw UnknownEntry(name);
}

}  // namespace

std::vector<std::string> gallery_list() {
    std::vector<std::string> names;
    for (const auto& e : entries()) names.push_back(e.name);
    return names;
}

std::string gallery_spec(const std::string& name) { return find_entry(name).spec; }

GalleryReport gallery_run(const std::string& name) {
    const Entry& e = find_entry(name);
    GalleryReport rep;
    rep.name = e.name;
    Ctx ctx;
    std::string setup_error;
    try {
        ctx.view = make_view(load_spec(e.spec));
        ctx.locus = trace_singular_set(*ctx.view, e.topt);
    } catch (const std::exception& ex) {
        setup_error = ex.what();
    }
    for (const auto& chk : e.checks) {
        ExpectationResult r;
        r.label = chk.label;
        r.provenance = chk.prov;
        if (!setup_error.empty()) {
            r.passed = false;
            r.observed = "setup failed: " + setup_error;
        } else {
            try {
                chk.run(ctx);
                r.passed = true;
            } catch (const CheckFail& f) {
                r.passed = false;
                r.observed = f.observed;
            } catch (const std::exception& ex) {
                r.passed = false;
                r.observed = std::string("error: ") + ex.what();
            }
        }
        rep.results.push_back(std::move(r));
    }
    return rep;
}

std::vector<GalleryReport> gallery_run_all() {
    const auto& es = entries();
    std::vector<std::future<GalleryReport>> futs;
    for (const auto& e : es)
        futs.push_back(std::async(std::launch::async,
                                  [&e] { return gallery_run(e.name); }));
    std::vector<GalleryReport> out;
    for (auto& f : futs) out.push_back(f.get());
    return out;
}

}  // namespace frontlab
