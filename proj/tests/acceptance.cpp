// Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "frontlab/curvature.hpp"
#include "frontlab/expr.hpp"
#include "frontlab/gallery.hpp"
#include "frontlab/integrate.hpp"
#include "frontlab/sectors.hpp"

using namespace frontlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int n, const char* title, bool pass, const std::string& detail) {
    std::printf("%s -- %d. %s (%s)\n", pass ? "PASS" : "FAIL", n, title, detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::shared_ptr<BundleView> gview(const std::string& name) {
    return make_view(load_spec(gallery_spec(name)));
}

// kappa_s at the swallowtail parabola point (u0, -6 u0^2) on any view of
// that surface, built without tracing.
double sw_kappa_s(const BundleView& v, double u0, bool swap_uv, double tdir) {
    Vec2d p = swap_uv ? Vec2d{-6 * u0 * u0, u0} : Vec2d{u0, -6 * u0 * u0};
    Vec2d t = swap_uv ? Vec2d{-12 * u0, 1} : Vec2d{1, -12 * u0};
    t = (tdir / norm(t)) * t;
    SingularSample s;
    s.p = p;
    s.tangent = t;
    s.eta = null_direction(v, p);
    Vec2d canonical = cross(s.tangent, s.eta) >= 0 ? s.eta : -1.0 * s.eta;
    s.dlambda_eta = dot(v.grad_lambda(p), canonical);
    return singular_curvature(v, s);
}

// ---- 1. gallery classification suite --------------------------------

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    int checked = 0, failed = 0;
    std::string first_fail;
    for (const char* name : {"cuspidal-edge", "swallowtail", "cuspidal-crosscap",
                             "double-swallowtail", "cuspidal-lips", "scherbak",
                             "tangent-developable-345"}) {
        GalleryReport rep = gallery_run(name);
        for (const auto& r : rep.results) {
            ++checked;
            if (!r.passed) {
                ++failed;
                if (first_fail.empty())
                    first_fail = rep.name + ": " + r.label + " [" + r.observed + "]";
            }
        }
    }
    double secs = seconds_since(t0);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d expectations, %d failed, %.1f s%s%s", checked, failed,
                  secs, first_fail.empty() ? "" : "; first: ", first_fail.c_str());
    report(1, "gallery classification suite in under 30 s", failed == 0 && secs < 30.0, buf);
}

// ---- 2. interior angle identity at every gallery peak ----------------

void criterion_2() {
    int peaks = 0, bad = 0;
    std::string detail;
    for (const char* name : {"swallowtail", "double-swallowtail", "cuspidal-lips", "scherbak",
                             "tangent-developable-345", "wavy-parallel-torus"}) {
        auto view = gview(name);
        TraceOptions topt;
        if (std::string(name) == "wavy-parallel-torus") topt.seed_grid = 96;
        SingularLocus locus = trace_singular_set(*view, topt);
        for (int k = 0; k < (int)locus.points.size(); ++k) {
            ++peaks;
            try {
                PeakSectorReport rep = sector_angles(*view, locus, k, 1e-6);
                double sum = rep.alpha_plus + rep.alpha_minus;
                double diff = rep.alpha_plus - rep.alpha_minus;
                bool ok = sum == 2 * kPi &&
                          (diff == 2 * kPi || diff == 0.0 || diff == -2 * kPi);
                if (!ok) {
                    ++bad;
                    detail = std::string(name) + ": sum " + std::to_string(sum) + " diff " +
                             std::to_string(diff);
                }
            } catch (const std::exception& e) {
                ++bad;
                detail = std::string(name) + ": " + e.what();
            }
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d peaks, %d violations%s%s", peaks, bad,
                  detail.empty() ? "" : "; ", detail.c_str());
    report(2, "alpha+ + alpha- = 2pi and alpha+ - alpha- in {-2pi,0,2pi} at every peak",
           peaks >= 11 && bad == 0, buf);
}

// ---- 3. immersed torus: both global integrals vanish -----------------

void criterion_3() {
    auto view = gview("torus-immersed");
    auto t0 = std::chrono::steady_clock::now();
    GBReport g = verify_global_GB(*view, 128);
    double secs = seconds_since(t0);
    bool pass = std::abs(g.KdA.value) < 1e-7 && std::abs(g.chi_E) < 1e-7 && secs < 10.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "|KdA| = %.2e, |chi_E| = %.2e, %.1f s",
                  std::abs(g.KdA.value), std::abs(g.chi_E), secs);
    report(3, "immersed torus: total curvature and Euler form vanish in under 10 s", pass, buf);
}

// ---- 4. parallel torus: 0 = KdA + 2 kappa_s within budget -------------

void criterion_4() {
    auto view = gview("parallel-torus");
    auto run = [&](int grid) {
        TraceOptions t;
        t.seed_grid = grid / 2;
        return verify_global_GB(*view, grid, t);
    };
    GBReport g1 = run(128);
    auto t0 = std::chrono::steady_clock::now();
    GBReport g2 = run(256);
    double secs = seconds_since(t0);
    double est = g2.KdA.error + 2 * g2.kappa_s.error;
    bool within = g2.residual_eq_A < std::max(1e-3, 10 * est);
    // the quadrature is adaptive, so both residuals saturate at the
    // roundoff floor of the O(5) alternating sums; accept "still at the
    // floor" as the refinement check when a 4x decrease is unobservable
    double floor = 1e-12;
    bool decreasing = g2.residual_eq_A <= std::max(g1.residual_eq_A / 4, floor);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "residual %.2e -> %.2e on doubling (floor %.0e), estimate %.2e, %.1f s",
                  g1.residual_eq_A, g2.residual_eq_A, floor, est, secs);
    report(4, "parallel torus: |KdA + 2 kappa_s| within budget, refining under doubling",
           within && decreasing && secs < 120.0, buf);
}

// ---- 5. wavy parallel torus: integer Euler identity -------------------

void criterion_5() {
    auto view = gview("wavy-parallel-torus");
    TraceOptions topt;
    topt.seed_grid = 96;
    GBReport g = verify_global_GB(*view, 96, topt);
    long chi = std::lround(g.chi_E);
    long rhs = g.euler.chi_plus - g.euler.chi_minus + g.P_plus - g.P_minus;
    bool near_int = std::abs(g.chi_E - (double)chi) < 0.05;
    const auto* fv = dynamic_cast<const FrontalView*>(view.get());
    double deg = gauss_map_degree(fv->surface());
    bool deg_ok = std::abs(g.chi_E - 2 * deg) < 0.05;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "chi_E = %.2e, chi+ - chi- + #P+ - #P- = %ld, 2 deg(nu) = %.2e", g.chi_E,
                  rhs, 2 * deg);
    report(5, "wavy torus: chi_E integer identity and Gauss map degree",
           near_int && chi == rhs && deg_ok, buf);
}

// ---- 6. local Gauss-Bonnet on six admissible triangles ----------------

void criterion_6() {
    auto fc = gview("cuspidal-edge");
    auto fsw = gview("swallowtail");
    TraceOptions coarse, fine;
    coarse.seed_grid = 32;
    fine.seed_grid = 128;
    SingularLocus fc_c = trace_singular_set(*fc, coarse), fc_f = trace_singular_set(*fc, fine);
    SingularLocus sw_c = trace_singular_set(*fsw, coarse), sw_f = trace_singular_set(*fsw, fine);
    struct Case {
        const BundleView* v;
        const SingularLocus *lc, *lf;
        Triangle tri;
    };
    std::vector<Case> cases = {
        {fc.get(), &fc_c, &fc_f, {{0.2, -0.5}, {0.8, -0.5}, {0.5, 0.4}}},     // off Sigma
        {fc.get(), &fc_c, &fc_f, {{0, -0.3}, {0.4, 0}, {0, 0.3}}},            // edge on Sigma
        {fc.get(), &fc_c, &fc_f, {{-0.3, -0.3}, {0.4, -0.25}, {0.05, 0.4}}},  // Sigma inside
        {fsw.get(), &sw_c, &sw_f, {{0.1, 0.5}, {0.35, 0.5}, {0.2, 0.9}}},     // off Sigma
        {fsw.get(), &sw_c, &sw_f, {{0.2, -0.9}, {0.38, -0.75}, {0.28, -0.2}}},  // Sigma inside
        {fsw.get(), &sw_c, &sw_f, {{-0.38, -0.95}, {-0.2, -0.9}, {-0.3, -0.3}}},
    };
    int bad = 0;
    double worst = 0;
    std::string detail;
    for (size_t i = 0; i < cases.size(); ++i) {
        try {
            LocalGBReport rc = verify_local_GB(*cases[i].v, cases[i].tri, *cases[i].lc);
            LocalGBReport rf = verify_local_GB(*cases[i].v, cases[i].tri, *cases[i].lf);
            bool within = std::abs(rf.residual) < std::max(1e-4, 10 * rf.error_estimate);
            bool decreasing = std::abs(rf.residual) <= std::abs(rc.residual) + 1e-12;
            worst = std::max(worst, std::abs(rf.residual));
            if (!within || !decreasing) {
                ++bad;
                detail = "triangle " + std::to_string(i) + ": " +
                         std::to_string(rc.residual) + " -> " + std::to_string(rf.residual);
            }
        } catch (const std::exception& e) {
            ++bad;
            detail = "triangle " + std::to_string(i) + ": " + e.what();
        }
    }
    char buf[220];
    std::snprintf(buf, sizeof(buf), "6 triangles, worst |residual| %.2e, %d failed%s%s", worst,
                  bad, detail.empty() ? "" : "; ", detail.c_str());
    report(6, "local Gauss-Bonnet on six admissible triangles, refining with trace density",
           bad == 0, buf);
}

// ---- 7. kappa_s invariance --------------------------------------------

// the swallowtail with the co-orientation reversed
const char* kSwallowtailNeg = R"([surface]
name = swallowtail-neg
domain = rectangle
u_range = -0.4 0.4
v_range = -1 1
x = 3*u^4 + u^2*v
y = 4*u^3 + 2*u*v
z = v
nu_x = -1 / sqrt(1 + u^2 + u^4)
nu_y = u / sqrt(1 + u^2 + u^4)
nu_z = -u^2 / sqrt(1 + u^2 + u^4)
)";

// the swallowtail with u and v swapped (orientation-reversing chart change)
const char* kSwallowtailSwap = R"([surface]
name = swallowtail-swap
domain = rectangle
u_range = -1 1
v_range = -0.4 0.4
x = 3*v^4 + v^2*u
y = 4*v^3 + 2*v*u
z = u
nu_x = 1 / sqrt(1 + v^2 + v^4)
nu_y = -v / sqrt(1 + v^2 + v^4)
nu_z = v^2 / sqrt(1 + v^2 + v^4)
)";

void criterion_7() {
    auto v = gview("swallowtail");
    auto vneg = make_view(load_spec(kSwallowtailNeg));
    auto vswap = make_view(load_spec(kSwallowtailSwap));
    double worst = 0;
    for (double u0 : {-0.35, -0.1, 0.15, 0.3}) {
        double base = sw_kappa_s(*v, u0, false, +1);
        worst = std::max(worst, std::abs(sw_kappa_s(*v, u0, false, -1) - base));
        worst = std::max(worst, std::abs(sw_kappa_s(*vneg, u0, false, +1) - base));
        worst = std::max(worst, std::abs(sw_kappa_s(*vswap, u0, true, +1) - base));
        if (std::abs(base) < 1e-3) worst = 1;  // the invariance must be non-trivial
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "max deviation %.2e", worst);
    report(7, "kappa_s invariant under parameter, co-orientation, chart reversal", worst < 1e-9,
           buf);
}

// ---- 8. bounded measure, unbounded kappa_s at the A3 point ------------

void criterion_8() {
    auto v = gview("swallowtail");
    std::vector<double> meas, ks;
    for (int k = 0; k <= 14; ++k) {
        double u0 = 0.2 / (1 << k);
        Vec2d p{u0, -6 * u0 * u0};
        SingularSample s;
        s.p = p;
        Vec2d t{1, -12 * u0};
        s.tangent = (1.0 / norm(t)) * t;
        s.eta = null_direction(*v, p);
        Vec2d canonical = cross(s.tangent, s.eta) >= 0 ? s.eta : -1.0 * s.eta;
        s.dlambda_eta = dot(v->grad_lambda(p), canonical);
        ks.push_back(std::abs(singular_curvature(*v, s)));
        meas.push_back(std::abs(singular_curvature_measure(*v, s)));
    }
    double cauchy = 0;
    for (size_t i = meas.size() - 3; i < meas.size(); ++i)
        cauchy = std::max(cauchy, std::abs(meas[i] - meas[i - 1]));
    int growth = 0;
    for (size_t i = 1; i < ks.size(); ++i)
        if (ks[i] > ks[i - 1]) ++growth;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "measure Cauchy residual %.2e, kappa_s grew on %d/14 halvings to %.1e",
                  cauchy, growth, ks.back());
    report(8, "kappa_s measure converges at the A3 point while kappa_s blows up",
           cauchy < 1e-5 && growth >= 14, buf);
}

// ---- 9. intrinsic-mode parity ------------------------------------------

void criterion_9() {
    double worst_lambda = 0, worst_ks = 0, worst_compat = 0;
    bool class_ok = true;
    for (const char* name : {"cuspidal-edge", "swallowtail"}) {
        SurfaceSpec spec = load_spec(gallery_spec(name));
        const auto& fs = std::get<FrontalSurface>(spec);
        IntrinsicCTB ctb = frontal_to_intrinsic(fs, Vec3(0, 0, 1));
        worst_compat = std::max(worst_compat, check_compatibility(ctb));
        auto fvw = make_view(spec);
        auto ivw = make_view(SurfaceSpec{ctb});
        const ParamDomain& dom = fvw->domain();
        for (int i = 0; i <= 16; ++i)
            for (int j = 0; j <= 16; ++j) {
                Vec2d p{dom.u_min() + dom.u_extent() * i / 16.0,
                        dom.v_min() + dom.v_extent() * j / 16.0};
                worst_lambda = std::max(worst_lambda,
                                        std::abs(fvw->lambda(p) - ivw->lambda(p)));
            }
        SingularLocus fl = trace_singular_set(*fvw), il = trace_singular_set(*ivw);
        if (fl.points.size() != il.points.size() || fl.curves.size() != il.curves.size())
            class_ok = false;
        for (size_t k = 0; k < std::min(fl.points.size(), il.points.size()); ++k)
            if (fl.points[k].verdict != il.points[k].verdict) class_ok = false;
        if (std::string(name) == "swallowtail") {
            for (double u0 : {-0.35, -0.1, 0.15, 0.3})
                worst_ks = std::max(worst_ks, std::abs(sw_kappa_s(*fvw, u0, false, 1) -
                                                       sw_kappa_s(*ivw, u0, false, 1)));
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "max |dlambda| %.2e, |dkappa_s| %.2e, compatibility %.2e, verdicts %s",
                  worst_lambda, worst_ks, worst_compat, class_ok ? "match" : "MISMATCH");
    report(9, "intrinsic pipeline reproduces the extrinsic one",
           worst_lambda < 1e-7 && worst_ks < 1e-7 && worst_compat < 1e-7 && class_ok, buf);
}

// ---- 10. jets against central finite differences -----------------------

std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth == 0 ? 2 : 8);
    std::uniform_real_distribution<double> cval(0.3, 2.5);
    switch (pick(rng)) {
        case 0: return "u";
        case 1: return "v";
        case 2: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", cval(rng));
            return buf;
        }
        case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
        case 5: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
        case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 7: return "cos(" + random_expr(rng, depth - 1) + ")";
        // keep denominators bounded away from zero
        case 8: return "(" + random_expr(rng, depth - 1) + " / (2 + (" +
                        random_expr(rng, depth - 1) + ")^2))";
    }
    return "u";
}

void criterion_10() {
    std::mt19937 rng(20240517);
    std::uniform_real_distribution<double> pt(-1.2, 1.2);
    int tested = 0, bad = 0;
    double worst = 0;
    while (tested < 100) {
        std::string text = random_expr(rng, 3);
        double u = pt(rng), v = pt(rng);
        Expr e = parse(text);
        Jet2 j = eval_jet(e, u, v, 2);
        if (!std::isfinite(j.value()) || std::abs(j.value()) > 1e3) continue;
        ++tested;
        auto f = [&](double du, double dv) { return eval(e, u + du, v + dv); };
        double h1 = 1e-5, h2 = 1e-4;
        double fd[5] = {
            (f(h1, 0) - f(-h1, 0)) / (2 * h1),
            (f(0, h1) - f(0, -h1)) / (2 * h1),
            (f(h2, 0) - 2 * f(0, 0) + f(-h2, 0)) / (h2 * h2),
            (f(h2, h2) - f(h2, -h2) - f(-h2, h2) + f(-h2, -h2)) / (4 * h2 * h2),
            (f(0, h2) - 2 * f(0, 0) + f(0, -h2)) / (h2 * h2),
        };
        double ad[5] = {j.d(1, 0), j.d(0, 1), j.d(2, 0), j.d(1, 1), j.d(0, 2)};
        for (int k = 0; k < 5; ++k) {
            double err = std::abs(ad[k] - fd[k]) / std::max(1.0, std::abs(ad[k]));
            worst = std::max(worst, err);
            if (err > 1e-6) ++bad;
        }
    }
    char buf[140];
    std::snprintf(buf, sizeof(buf), "100 expressions, worst relative deviation %.2e, %d bad",
                  worst, bad);
    report(10, "automatic jets match central differences to 1e-6", bad == 0, buf);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures) std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
