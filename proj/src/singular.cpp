#include "frontlab/singular.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

namespace frontlab {

namespace {

Eigen::MatrixXd psi_matrix(const BundleView& view, Vec2d p) {
    Vec3 pu, pv;
    view.psi_vectors(p, pu, pv);
    Eigen::MatrixXd m(view.ambient_dim(), 2);
    for (int i = 0; i < view.ambient_dim(); ++i) {
        m(i, 0) = pu[i];
        m(i, 1) = pv[i];
    }
    return m;
}

Vec2d rot90(Vec2d g) { return {-g.v, g.u}; }

Vec2d normalized(Vec2d x) {
    double n = norm(x);
    return n > 0 ? (1.0 / n) * x : x;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::A2: return "A2";
        case Verdict::A3: return "A3";
        case Verdict::NonDegeneratePeak: return "NonDegeneratePeak";
        case Verdict::DegeneratePeak: return "DegeneratePeak";
        case Verdict::IsolatedPeak: return "IsolatedPeak";
        case Verdict::Unclassified: return "Unclassified";
    }
    return "?";
}

std::vector<std::pair<int, bool>> SingularLocus::branches_at(int k) const {
    std::vector<std::pair<int, bool>> out;
    for (int c = 0; c < static_cast<int>(curves.size()); ++c) {
        if (curves[c].start_end == CurveEnd::Peak && curves[c].start_peak == k)
            out.emplace_back(c, true);
        if (curves[c].finish_end == CurveEnd::Peak && curves[c].finish_peak == k)
            out.emplace_back(c, false);
    }
    return out;
}

std::pair<double, Vec2d> area_density(const BundleView& view, Vec2d p) {
    Jet2 j = view.lambda_jet(p, 1);
    return {j.value(), {j.d(1, 0), j.d(0, 1)}};
}

std::pair<double, double> psi_singular_values(const BundleView& view, Vec2d p) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi_matrix(view, p));
    return {svd.singularValues()(0), svd.singularValues()(1)};
}

Vec2d null_direction(const BundleView& view, Vec2d p, double tol_rank_rel) {
    Eigen::MatrixXd m = psi_matrix(view, p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    double s0 = svd.singularValues()(0);
    if (s0 < tol_rank_rel * std::max(1.0, m.norm())) throw RankZero(p);
    Eigen::Vector2d k = svd.matrixV().col(1);
    Vec2d eta{k(0), k(1)};
    double lead = std::abs(eta.u) >= std::abs(eta.v) ? eta.u : eta.v;
    if (lead < 0) eta = -1.0 * eta;
    return eta;
}

namespace {

// Predictor-corrector tracer for {lambda = 0} with peak detection.
struct Tracer {
    const BundleView& view;
    TraceOptions opt;
    ParamDomain dom;
    double geom;          // domain scale
    double lambda_scale;  // max |lambda| on the survey grid
    double grad_scale;    // max |grad lambda| on the survey grid
    double psi_scale;     // max |psi| on the survey grid
    double tol_zero, tol_grad, tol_iso, h_max, h_min;

    struct RawCurve {
        std::vector<SingularSample> samples;
        CurveEnd start_end = CurveEnd::Boundary;
        CurveEnd finish_end = CurveEnd::Boundary;
    };
    std::vector<RawCurve> raw;
    std::vector<Vec2d> cloud;       // wrapped accepted samples, for dedup
    std::vector<Vec2d> peak_seeds;  // converged critical points with lambda = 0

    explicit Tracer(const BundleView& v, const TraceOptions& o) : view(v), opt(o), dom(v.domain()) {
        geom = dom.scale();
        survey();
        tol_zero = std::max(opt.tol_on_curve_rel * lambda_scale, 1e-14 * lambda_scale);
        tol_grad = opt.tol_nondeg_rel * grad_scale;
        tol_iso = std::max(opt.tol_iso_rel * lambda_scale, 1e-13 * lambda_scale);
        h_max = opt.step_factor * geom / opt.seed_grid;
        h_min = 1e-4 * h_max;
    }

    void survey() {
        lambda_scale = grad_scale = psi_scale = 0.0;
        int n = opt.seed_grid;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                Vec2d p = node(i, j);
                auto [lam, g] = area_density(view, p);
                lambda_scale = std::max(lambda_scale, std::abs(lam));
                grad_scale = std::max(grad_scale, norm(g));
                Eigen::MatrixXd m = psi_matrix(view, p);
                psi_scale = std::max(psi_scale, m.norm());
            }
        }
        if (lambda_scale == 0) lambda_scale = 1.0;
        if (grad_scale == 0) grad_scale = 1.0;
        if (psi_scale == 0) psi_scale = 1.0;
    }

    Vec2d node(int i, int j) const {
        int n = opt.seed_grid;
        return {dom.u_min() + dom.u_extent() * i / n, dom.v_min() + dom.v_extent() * j / n};
    }

    // Newton iteration toward lambda = 0 along grad lambda.
    std::optional<Vec2d> correct(Vec2d p) const {
        for (int it = 0; it < 50; ++it) {
            auto [lam, g] = area_density(view, p);
            if (std::abs(lam) <= tol_zero) return p;
            double g2 = dot(g, g);
            if (std::sqrt(g2) < tol_grad) return std::nullopt;
            Vec2d step = (-lam / g2) * g;
            if (norm(step) > 2 * h_max) return std::nullopt;
            p = p + step;
        }
        return std::nullopt;
    }

    Vec2d tangent_at(Vec2d p, Vec2d ref) const {
        Vec2d t = normalized(rot90(view.grad_lambda(p)));
        if (dot(t, ref) < 0) t = -1.0 * t;
        return t;
    }

    Vec2d eta_at(Vec2d p, Vec2d ref) const {
        Vec2d e = null_direction(view, p, opt.tol_rank_rel);
        if (dot(e, ref) < 0) e = -1.0 * e;
        return e;
    }

    // Newton on grad lambda = 0; accepts only critical points on the zero set.
    std::optional<Vec2d> refine_peak(Vec2d p) const {
        for (int it = 0; it < 60; ++it) {
            Jet2 j = view.lambda_jet(p, 2);
            Vec2d g{j.d(1, 0), j.d(0, 1)};
            if (norm(g) <= std::max(1e-12, 1e-10 * grad_scale)) {
                if (std::abs(view.lambda(p)) <= tol_iso && dom.contains(p, 1e-12 * geom))
                    return p;
                return std::nullopt;
            }
            Eigen::Matrix2d h;
            h << j.d(2, 0), j.d(1, 1), j.d(1, 1), j.d(0, 2);
            if (std::abs(h.determinant()) < 1e-14 * grad_scale * grad_scale / (geom * geom))
                return std::nullopt;
            Eigen::Vector2d s = h.colPivHouseholderQr().solve(Eigen::Vector2d(-g.u, -g.v));
            Vec2d step{s(0), s(1)};
            double n = norm(step);
            if (n > 2 * h_max) step = (2 * h_max / n) * step;
            p = p + step;
        }
        return std::nullopt;
    }

    bool near_cloud(Vec2d p, double r) const {
        Vec2d w = dom.wrap(p);
        for (const Vec2d& q : cloud)
            if (dom.distance(w, q) < r) return true;
        return false;
    }

    bool near_peak_seed(Vec2d p, double r, Vec2d* hit = nullptr) const {
        for (const Vec2d& q : peak_seeds) {
            if (dom.distance(dom.wrap(p), dom.wrap(q)) < r) {
                if (hit) *hit = q;
                return true;
            }
        }
        return false;
    }

    SingularSample make_sample(double t, Vec2d p, Vec2d tan) const {
        SingularSample s;
        s.t = t;
        s.p = p;
        s.lambda = view.lambda(p);
        s.tangent = tan;
        try {
            s.eta = null_direction(view, p, opt.tol_rank_rel);
        } catch (const RankZero&) {
            s.eta = Vec2d{0, 0};  // fixed up by the continuity pass
        }
        s.psi_speed = view.psi_of(p, tan).norm();
        return s;
    }

    // One adaptive continuation step. Returns false when the curve ends
    // (the endpoint sample has already been appended).
    bool step(RawCurve& c, Vec2d& cur, Vec2d& tan, double& h, double& t, CurveEnd& end_kind,
              Vec2d p0, Vec2d t0, bool& closed) {
        // Degenerate-point watch: lambda-critical points sitting on the
        // zero set ahead of the trace terminate the branch.
        auto [lam_c, g_c] = area_density(view, cur);
        (void)lam_c;
        if (norm(g_c) < 0.2 * grad_scale || near_peak_seed(cur, 2.5 * h_max)) {
            Vec2d hit;
            if (near_peak_seed(cur, 1.5 * h_max, &hit)) {
                return end_at_peak(c, cur, tan, t, end_kind, hit);
            }
            if (auto pk = refine_peak(cur)) {
                if (dom.distance(dom.wrap(*pk), dom.wrap(cur)) <= 1.5 * h_max)
                    return end_at_peak(c, cur, tan, t, end_kind, *pk);
            }
        }
        while (true) {
            Vec2d pred = cur + h * tan;
            std::optional<Vec2d> q = correct(pred);
            if (!q) {
                if (h > h_min) {
                    h = std::max(h_min, h / 2);
                    continue;
                }
                // Corrector keeps failing: almost certainly a peak ahead.
                if (auto pk = refine_peak(pred))
                    return end_at_peak(c, cur, tan, t, end_kind, *pk);
                throw NewtonDivergence(pred);
            }
            if (dom.kind() == ParamDomain::Kind::Rectangle && !dom.contains(*q)) {
                land_on_boundary(c, cur, tan, h, t);
                end_kind = CurveEnd::Boundary;
                return false;
            }
            Vec2d tn = tangent_at(*q, tan);
            double turn = std::acos(std::clamp(dot(tn, tan), -1.0, 1.0));
            if (turn > 0.35 && h > h_min) {
                h = std::max(h_min, h / 2);
                continue;
            }
            t += norm(*q - cur);
            cur = *q;
            tan = tn;
            c.samples.push_back(make_sample(t, cur, tan));
            if (turn < 0.05) h = std::min(2 * h, h_max);
            // Loop closure in wrapped coordinates.
            if (c.samples.size() >= 5 && t > 3 * h_max &&
                dom.distance(dom.wrap(cur), dom.wrap(p0)) < 1.2 * h_max && dot(tan, t0) > 0.5) {
                double dt = dom.distance(dom.wrap(cur), dom.wrap(p0));
                Vec2d closing = cur + dom.displacement(dom.wrap(cur), dom.wrap(p0));
                c.samples.push_back(make_sample(t + dt, closing, tangent_at(closing, tan)));
                closed = true;
                return false;
            }
            return true;
        }
    }

    bool end_at_peak(RawCurve& c, Vec2d cur, Vec2d tan, double t, CurveEnd& end_kind, Vec2d pk) {
        if (!near_peak_seed(pk, 0.25 * h_max)) peak_seeds.push_back(pk);
        Vec2d hit;
        near_peak_seed(pk, 0.25 * h_max, &hit);  // snap to the registered copy
        Vec2d shifted = cur + dom.displacement(dom.wrap(cur), dom.wrap(hit));
        double dt = norm(shifted - cur);
        if (dt > 1e-12 * geom)
            c.samples.push_back(make_sample(t + dt, shifted, normalized(shifted - cur)));
        else if (!c.samples.empty())
            c.samples.back().p = shifted;
        (void)tan;
        end_kind = CurveEnd::Peak;
        return false;
    }

    void land_on_boundary(RawCurve& c, Vec2d cur, Vec2d tan, double h, double t) {
        // Bisect the step length between the last inside point and the exit.
        double lo = 0, hi = h;
        Vec2d inside = cur;
        for (int it = 0; it < 50; ++it) {
            double mid = (lo + hi) / 2;
            std::optional<Vec2d> q = correct(cur + mid * tan);
            if (q && dom.contains(*q)) {
                lo = mid;
                inside = *q;
            } else {
                hi = mid;
            }
        }
        // Snap to the nearest violated edge and re-solve lambda = 0 along it.
        Vec2d exit = cur + hi * tan;
        Vec2d b = inside;
        auto solve_edge = [&](bool fix_u, double val) {
            // 1D bisection in the free coordinate around the landing spot.
            auto lam1 = [&](double s) {
                return view.lambda(fix_u ? Vec2d{val, s} : Vec2d{s, val});
            };
            double s0 = fix_u ? inside.v : inside.u;
            double w = 2 * h_max;
            double a = s0 - w, bb = s0 + w;
            if (lam1(a) * lam1(bb) < 0) {
                for (int it = 0; it < 80; ++it) {
                    double m = (a + bb) / 2;
                    if (lam1(a) * lam1(m) <= 0) bb = m; else a = m;
                }
                s0 = (a + bb) / 2;
            }
            return fix_u ? Vec2d{val, s0} : Vec2d{s0, val};
        };
        if (exit.u < dom.u_min()) b = solve_edge(true, dom.u_min());
        else if (exit.u > dom.u_max()) b = solve_edge(true, dom.u_max());
        else if (exit.v < dom.v_min()) b = solve_edge(false, dom.v_min());
        else if (exit.v > dom.v_max()) b = solve_edge(false, dom.v_max());
        double dt = norm(b - cur);
        if (dt > 1e-12 * geom) c.samples.push_back(make_sample(t + dt, b, normalized(b - cur)));
    }

    struct DirResult {
        std::vector<SingularSample> samples;
        CurveEnd end = CurveEnd::Boundary;
        bool closed = false;
    };

    DirResult trace_dir(Vec2d p0, Vec2d dir) {
        DirResult r;
        RawCurve c;
        Vec2d cur = p0, tan = dir;
        double h = h_max, t = 0;
        c.samples.push_back(make_sample(0, p0, dir));
        CurveEnd end_kind = CurveEnd::Boundary;
        for (int steps = 0; steps < 20000; ++steps) {
            bool more = false;
            bool closed = false;
            more = step(c, cur, tan, h, t, end_kind, p0, dir, closed);
            if (closed) {
                r.closed = true;
                break;
            }
            if (!more) break;
            if (steps == 19999) throw NewtonDivergence(cur);
        }
        r.samples = std::move(c.samples);
        r.end = end_kind;
        return r;
    }

    void trace_from(Vec2d seed) {
        std::optional<Vec2d> on = correct(seed);
        if (!on) return;
        if (near_cloud(*on, 0.75 * h_max)) return;
        Vec2d g = view.grad_lambda(*on);
        if (norm(g) < tol_grad) {
            if (auto pk = refine_peak(*on))
                if (!near_peak_seed(*pk, 0.25 * h_max)) peak_seeds.push_back(*pk);
            return;
        }
        Vec2d t0 = normalized(rot90(g));
        DirResult fwd = trace_dir(*on, t0);
        RawCurve c;
        if (fwd.closed) {
            c.samples = std::move(fwd.samples);
            c.start_end = c.finish_end = CurveEnd::Loop;
        } else {
            DirResult bwd = trace_dir(*on, -1.0 * t0);
            // Stitch: reversed backward part, then the forward part.
            double tb = bwd.samples.back().t;
            for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it) {
                SingularSample s = *it;
                s.t = tb - s.t;
                s.tangent = -1.0 * s.tangent;
                c.samples.push_back(s);
            }
            for (size_t k = 1; k < fwd.samples.size(); ++k) {
                SingularSample s = fwd.samples[k];
                s.t += tb;
                c.samples.push_back(s);
            }
            c.start_end = bwd.end;
            c.finish_end = fwd.end;
        }
        for (const auto& s : c.samples) cloud.push_back(dom.wrap(s.p));
        raw.push_back(std::move(c));
    }

    void seed_all() {
        int n = opt.seed_grid;
        bool torus = dom.kind() == ParamDomain::Kind::FlatTorus;
        int imax = torus ? n - 1 : n;
        auto lam_at = [&](int i, int j) { return view.lambda(node(i, j)); };
        // Node seeds (exact zeros), then segment sign changes.
        for (int i = 0; i <= imax; ++i)
            for (int j = 0; j <= imax; ++j)
                if (std::abs(lam_at(i, j)) <= tol_zero) trace_from(node(i, j));
        auto segment = [&](Vec2d a, Vec2d b, double la, double lb) {
            if (la * lb >= 0) return;
            for (int it = 0; it < 60; ++it) {
                Vec2d m = 0.5 * (a + b);
                double lm = view.lambda(m);
                if (la * lm <= 0) { b = m; lb = lm; } else { a = m; la = lm; }
            }
            trace_from(0.5 * (a + b));
        };
        for (int i = 0; i <= imax; ++i) {
            for (int j = 0; j <= imax; ++j) {
                Vec2d p = node(i, j);
                double lp = lam_at(i, j);
                if (i < n) segment(p, node(i + 1, j), lp, lam_at(i + 1, j));
                if (j < n) segment(p, node(i, j + 1), lp, lam_at(i, j + 1));
                if (torus && i == n - 1) segment(p, node(n, j), lp, lam_at(n, j));
                if (torus && j == n - 1) segment(p, node(i, n), lp, lam_at(i, n));
            }
        }
    }

    // Continuity pass: orient eta along each curve and fill dlambda_eta
    // against the canonical eta ({tangent, eta} positive).
    void orient_curve(RawCurve& c) const {
        for (size_t k = 0; k < c.samples.size(); ++k) {
            SingularSample& s = c.samples[k];
            if (norm(s.eta) == 0 && k > 0) s.eta = c.samples[k - 1].eta;
            if (k == 0) {
                if (cross(s.tangent, s.eta) < 0) s.eta = -1.0 * s.eta;
            } else if (dot(s.eta, c.samples[k - 1].eta) < 0) {
                s.eta = -1.0 * s.eta;
            }
            Vec2d canonical = cross(s.tangent, s.eta) >= 0 ? s.eta : -1.0 * s.eta;
            s.dlambda_eta = dot(view.grad_lambda(s.p), canonical);
        }
    }

    // --- Special points along traced curves (A3 / non-degenerate peaks) ---

    // Walk distance s along the curve from p (substepped predictor-corrector).
    std::pair<Vec2d, Vec2d> advance(Vec2d p, Vec2d tan, double s) const {
        double left = std::abs(s);
        double sgn = s >= 0 ? 1.0 : -1.0;
        Vec2d cur = p, t = sgn * tan;
        while (left > 0) {
            double h = std::min(left, h_max / 2);
            std::optional<Vec2d> q = correct(cur + h * t);
            if (!q) throw NewtonDivergence(cur);
            t = tangent_at(*q, t);
            left -= h;
            cur = *q;
        }
        return {cur, sgn * t};
    }

    double F_at(Vec2d p, Vec2d tan_ref, Vec2d eta_ref) const {
        Vec2d t = tangent_at(p, tan_ref);
        Vec2d e = eta_at(p, eta_ref);
        return cross(t, e);
    }

    struct Special {
        size_t curve;
        double t;  // arclength along the curve
        Vec2d p;
        Verdict verdict;
        double F;
        double dFdt;
    };

    std::vector<Special> scan_curve(const RawCurve& c, size_t ci) const {
        std::vector<Special> out;
        const auto& ss = c.samples;
        if (ss.size() < 3) return out;
        std::vector<double> F(ss.size());
        double fmax = 0;
        for (size_t k = 0; k < ss.size(); ++k) {
            F[k] = cross(ss[k].tangent, ss[k].eta);
            fmax = std::max(fmax, std::abs(F[k]));
        }
        if (fmax == 0) fmax = 1;
        auto locate = [&](size_t k, bool sign_change) -> std::optional<Special> {
            Vec2d base = ss[k].p;
            Vec2d tan = ss[k].tangent;
            Vec2d eta = ss[k].eta;
            double lo = 0, hi = ss[k + 1].t - ss[k].t;
            double s_star;
            if (sign_change) {
                double flo = F[k];
                for (int it = 0; it < 60; ++it) {
                    double m = (lo + hi) / 2;
                    double fm = F_at(advance(base, tan, m).first, tan, eta);
                    if (flo * fm <= 0) hi = m; else { lo = m; flo = fm; }
                }
                s_star = (lo + hi) / 2;
            } else {
                // local |F| minimum: golden-section over two sample gaps
                double a = -(ss[k].t - ss[k - 1].t), b = ss[k + 1].t - ss[k].t;
                const double gr = 0.6180339887498949;
                double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
                double f1 = std::abs(F_at(advance(base, tan, x1).first, tan, eta));
                double f2 = std::abs(F_at(advance(base, tan, x2).first, tan, eta));
                for (int it = 0; it < 60; ++it) {
                    if (f1 < f2) {
                        b = x2; x2 = x1; f2 = f1;
                        x1 = b - gr * (b - a);
                        f1 = std::abs(F_at(advance(base, tan, x1).first, tan, eta));
                    } else {
                        a = x1; x1 = x2; f1 = f2;
                        x2 = a + gr * (b - a);
                        f2 = std::abs(F_at(advance(base, tan, x2).first, tan, eta));
                    }
                }
                s_star = (a + b) / 2;
            }
            auto [p_star, t_star] = advance(base, tan, s_star);
            double f0 = F_at(p_star, t_star, eta);
            double d = 1e-5 * geom;
            double fp = F_at(advance(p_star, t_star, d).first, t_star, eta);
            double fm = F_at(advance(p_star, t_star, -d).first, t_star, eta);
            double dF = (fp - fm) / (2 * d);
            if (std::abs(f0) > opt.tol_transv) return std::nullopt;
            Special sp;
            sp.curve = ci;
            sp.t = ss[k].t + s_star;
            sp.p = p_star;
            sp.F = f0;
            sp.dFdt = dF;
            if (std::abs(dF) > opt.tol_a3) {
                sp.verdict = Verdict::A3;
            } else {
                auto [s0, s1] = psi_singular_values(view, p_star);
                bool rank1 = s0 > opt.tol_rank_rel * psi_scale && s1 <= opt.tol_rank_rel * psi_scale + 1e-7 * psi_scale;
                sp.verdict = rank1 ? Verdict::NonDegeneratePeak : Verdict::Unclassified;
            }
            return sp;
        };
        for (size_t k = 0; k + 1 < ss.size(); ++k) {
            bool interior_lo = k > 0 || c.start_end == CurveEnd::Loop;
            if (F[k] * F[k + 1] < 0) {
                if (auto sp = locate(k, true)) out.push_back(*sp);
            } else if (interior_lo && k + 2 < ss.size() && std::abs(F[k]) < 0.1 * fmax &&
                       std::abs(F[k]) <= std::abs(F[k - 1 < ss.size() ? k - 1 : 0]) &&
                       std::abs(F[k]) <= std::abs(F[k + 1]) && k >= 1) {
                if (auto sp = locate(k, false)) {
                    // suppress duplicates of an adjacent sign-change hit
                    bool dup = false;
                    for (const auto& e : out)
                        if (std::abs(e.t - sp->t) < h_max) dup = true;
                    if (!dup) out.push_back(*sp);
                }
            }
        }
        // De-duplicate specials closer than one step.
        std::sort(out.begin(), out.end(), [](const Special& a, const Special& b) { return a.t < b.t; });
        std::vector<Special> uniq;
        for (const auto& s : out)
            if (uniq.empty() || s.t - uniq.back().t > h_max) uniq.push_back(s);
        return uniq;
    }

    // --- assembly ---

    SingularLocus finish() {
        for (auto& c : raw) orient_curve(c);

        std::vector<Special> specials;
        for (size_t ci = 0; ci < raw.size(); ++ci)
            for (auto& s : scan_curve(raw[ci], ci)) specials.push_back(s);

        SingularLocus locus;
        locus.lambda_scale = lambda_scale;
        locus.grad_scale = grad_scale;

        // Point registry: trace-end peak seeds first, then on-curve specials.
        auto find_point = [&](Vec2d p) {
            for (size_t k = 0; k < locus.points.size(); ++k)
                if (dom.distance(dom.wrap(p), dom.wrap(locus.points[k].point)) < 0.3 * h_max)
                    return static_cast<int>(k);
            return -1;
        };
        for (const Vec2d& pk : peak_seeds) {
            SingularPointReport r;
            r.point = dom.wrap(pk);
            r.lambda = view.lambda(pk);
            r.grad_lambda_norm = norm(view.grad_lambda(pk));
            auto [s0, s1] = psi_singular_values(view, pk);
            r.rank = (s0 > opt.tol_rank_rel * psi_scale) + (s1 > opt.tol_rank_rel * psi_scale);
            locus.points.push_back(r);
        }
        for (const Special& sp : specials) {
            if (find_point(sp.p) >= 0) continue;
            SingularPointReport r;
            r.point = dom.wrap(sp.p);
            r.verdict = sp.verdict;
            r.lambda = view.lambda(sp.p);
            r.grad_lambda_norm = norm(view.grad_lambda(sp.p));
            auto [s0, s1] = psi_singular_values(view, sp.p);
            r.rank = (s0 > opt.tol_rank_rel * psi_scale) + (s1 > opt.tol_rank_rel * psi_scale);
            r.transversality = sp.F;
            r.transversality_rate = sp.dFdt;
            locus.points.push_back(r);
        }

        // Split curves at on-curve specials; rebase t per piece.
        for (size_t ci = 0; ci < raw.size(); ++ci) {
            RawCurve& c = raw[ci];
            std::vector<Special> here;
            for (const auto& s : specials)
                if (s.curve == ci) here.push_back(s);
            if (here.empty()) {
                emit_piece(locus, c.samples, c.start_end, c.finish_end, find_point);
                continue;
            }
            std::vector<SingularSample> ss = c.samples;
            if (c.start_end == CurveEnd::Loop) rotate_loop(ss, here);
            std::vector<double> cuts;
            for (const auto& s : here) cuts.push_back(s.t);
            std::vector<Vec2d> cut_pts;
            for (const auto& s : here) cut_pts.push_back(s.p);
            split_at(locus, ss, cuts, cut_pts, c.start_end, c.finish_end, find_point);
        }

        // Branch counts, then verdicts for the trace-end peaks.
        for (size_t k = 0; k < locus.points.size(); ++k) {
            auto br = locus.branches_at(static_cast<int>(k));
            locus.points[k].branch_count = static_cast<int>(br.size());
            SingularPointReport& r = locus.points[k];
            if (r.verdict != Verdict::Unclassified) continue;
            if (r.grad_lambda_norm > tol_grad) continue;  // set by specials otherwise
            if (r.rank == 1 && branches_all_A2(locus, static_cast<int>(k))) {
                r.verdict = r.branch_count > 0 ? Verdict::DegeneratePeak : Verdict::IsolatedPeak;
            } else {
                r.note = r.rank != 1 ? "rank != 1" : "incident branch not A2";
            }
        }

        isolated_peaks(locus);
        return locus;
    }

    bool branches_all_A2(const SingularLocus& locus, int k) const {
        for (auto [ci, at_start] : locus.branches_at(k)) {
            const auto& ss = locus.curves[ci].samples;
            if (ss.size() < 3) continue;
            // check transversality a few steps away from the peak
            size_t idx = at_start ? std::min<size_t>(4, ss.size() - 1)
                                  : ss.size() - 1 - std::min<size_t>(4, ss.size() - 1);
            if (std::abs(cross(ss[idx].tangent, ss[idx].eta)) <= opt.tol_transv) return false;
        }
        return true;
    }

    void emit_piece(SingularLocus& locus, std::vector<SingularSample> ss, CurveEnd se, CurveEnd fe,
                    const std::function<int(Vec2d)>& find_point) const {
        if (ss.size() < 2) return;
        SingularCurve sc;
        double t0 = ss.front().t;
        for (auto& s : ss) s.t -= t0;
        sc.samples = std::move(ss);
        sc.start_end = se;
        sc.finish_end = fe;
        if (se == CurveEnd::Peak) sc.start_peak = find_point(sc.samples.front().p);
        if (fe == CurveEnd::Peak) sc.finish_peak = find_point(sc.samples.back().p);
        locus.curves.push_back(std::move(sc));
    }

    // Rotate a closed loop's sample list so it starts at the first cut.
    void rotate_loop(std::vector<SingularSample>& ss, std::vector<Special>& here) const {
        // samples: p_0 .. p_n with p_n = p_0 + shift (covering coords)
        Vec2d shift = ss.back().p - ss.front().p;
        double total = ss.back().t;
        double tcut = here.front().t;
        size_t k0 = 0;
        while (k0 + 1 < ss.size() && ss[k0 + 1].t <= tcut) ++k0;
        std::vector<SingularSample> rot;
        SingularSample at = make_sample(0, here.front().p, ss[k0].tangent);
        rot.push_back(at);
        // Drop original samples that coincide with the cut point: the exact
        // cut sample replaces them, and their eta/measure data is unusable
        // right on a peak.
        auto near_cut = [&](Vec2d q) {
            return dom.distance(dom.wrap(q), dom.wrap(here.front().p)) < 1e-7 * geom;
        };
        for (size_t k = k0 + 1; k + 1 <= ss.size() - 1; ++k) {
            if (near_cut(ss[k].p)) continue;
            SingularSample s = ss[k];
            s.t -= tcut;
            rot.push_back(s);
        }
        for (size_t k = 0; k <= k0; ++k) {
            if (near_cut(ss[k].p)) continue;
            SingularSample s = ss[k];
            s.p = s.p + shift;
            s.t += total - tcut;
            rot.push_back(s);
        }
        SingularSample closing = make_sample(total, here.front().p + shift, ss[k0].tangent);
        rot.push_back(closing);
        orient_rot(rot);
        ss = std::move(rot);
        double t0 = here.front().t;
        for (auto& s : here) s.t -= t0;
        here.front().t = 0;
        // the loop start also counts as a cut at t = 0 handled by caller cuts
    }

    void orient_rot(std::vector<SingularSample>& ss) const {
        for (size_t k = 0; k < ss.size(); ++k) {
            SingularSample& s = ss[k];
            if (k == 0) {
                if (cross(s.tangent, s.eta) < 0) s.eta = -1.0 * s.eta;
            } else if (dot(s.eta, ss[k - 1].eta) < 0) {
                s.eta = -1.0 * s.eta;
            }
            Vec2d canonical = cross(s.tangent, s.eta) >= 0 ? s.eta : -1.0 * s.eta;
            s.dlambda_eta = dot(view.grad_lambda(s.p), canonical);
        }
    }

    void split_at(SingularLocus& locus, const std::vector<SingularSample>& ss,
                  const std::vector<double>& cuts, const std::vector<Vec2d>& cut_pts,
                  CurveEnd se, CurveEnd fe, const std::function<int(Vec2d)>& find_point) const {
        bool loop = se == CurveEnd::Loop;
        std::vector<double> tcuts = cuts;
        std::vector<Vec2d> pcuts = cut_pts;
        if (loop) {
            // rotate_loop already placed the first cut at t = 0 / t = total
            if (!tcuts.empty() && std::abs(tcuts.front()) < 1e-12) {
                // keep; the first and last piece boundaries are the loop ends
            }
        }
        size_t k = 0;
        size_t nc = tcuts.size();
        std::vector<SingularSample> piece;
        size_t cut_idx = loop ? 1 : 0;  // for loops the t=0 cut is the start itself
        CurveEnd piece_start = loop ? CurveEnd::Peak : se;
        piece.push_back(ss[0]);
        for (k = 1; k < ss.size(); ++k) {
            while (cut_idx < nc && ss[k].t > tcuts[cut_idx] + 1e-12) {
                // close the current piece at the cut point
                SingularSample cut_s = make_sample(tcuts[cut_idx], pcuts[cut_idx],
                                                   piece.back().tangent);
                if (dot(cut_s.eta, piece.back().eta) < 0) cut_s.eta = -1.0 * cut_s.eta;
                Vec2d canonical = cross(cut_s.tangent, cut_s.eta) >= 0 ? cut_s.eta : -1.0 * cut_s.eta;
                cut_s.dlambda_eta = dot(view.grad_lambda(cut_s.p), canonical);
                if (dom.distance(dom.wrap(piece.back().p), dom.wrap(cut_s.p)) > 1e-12 * geom ||
                    piece.size() == 1)
                    piece.push_back(cut_s);
                emit_piece(locus, piece, piece_start, CurveEnd::Peak, find_point);
                piece.clear();
                piece.push_back(cut_s);
                piece_start = CurveEnd::Peak;
                ++cut_idx;
            }
            if (!piece.empty() &&
                dom.distance(dom.wrap(piece.back().p), dom.wrap(ss[k].p)) < 1e-9 * geom)
                continue;
            piece.push_back(ss[k]);
        }
        emit_piece(locus, piece, piece_start, loop ? CurveEnd::Peak : fe, find_point);
    }

    void isolated_peaks(SingularLocus& locus) {
        int n = opt.seed_grid;
        bool torus = dom.kind() == ParamDomain::Kind::FlatTorus;
        // |lambda| strict local minima over interior nodes, away from curves
        auto lam_abs = [&](int i, int j) {
            if (!torus && (i < 0 || i > n || j < 0 || j > n)) return 1e300;
            return std::abs(view.lambda(node(i, j)));
        };
        for (int i = 0; i <= (torus ? n - 1 : n); ++i) {
            for (int j = 0; j <= (torus ? n - 1 : n); ++j) {
                double c = lam_abs(i, j);
                if (c > 0.05 * lambda_scale) continue;
                bool min = true;
                for (int di = -1; di <= 1 && min; ++di)
                    for (int dj = -1; dj <= 1 && min; ++dj)
                        if (di || dj) min = lam_abs(i + di, j + dj) >= c;
                if (!min) continue;
                Vec2d p = node(i, j);
                if (near_cloud(p, 1.5 * h_max)) continue;
                auto pk = refine_peak(p);
                if (!pk) continue;
                if (near_cloud(*pk, 1.5 * h_max)) continue;
                bool known = false;
                for (const auto& r : locus.points)
                    if (dom.distance(dom.wrap(*pk), dom.wrap(r.point)) < 0.5 * h_max) known = true;
                if (known) continue;
                // sign-definite lambda on a surrounding circle
                double r0 = 0.5 * h_max;
                int sgn = 0;
                bool definite = true;
                for (int m = 0; m < 64 && definite; ++m) {
                    double a = 2 * M_PI * m / 64;
                    double lam = view.lambda(*pk + Vec2d{r0 * std::cos(a), r0 * std::sin(a)});
                    int s = lam > 0 ? 1 : lam < 0 ? -1 : 0;
                    if (s == 0) definite = false;
                    else if (sgn == 0) sgn = s;
                    else if (s != sgn) definite = false;
                }
                if (!definite) continue;
                SingularPointReport r;
                r.point = dom.wrap(*pk);
                r.lambda = view.lambda(*pk);
                r.grad_lambda_norm = norm(view.grad_lambda(*pk));
                auto [s0, s1] = psi_singular_values(view, *pk);
                r.rank = (s0 > opt.tol_rank_rel * psi_scale) + (s1 > opt.tol_rank_rel * psi_scale);
                r.verdict = r.rank == 1 ? Verdict::IsolatedPeak : Verdict::Unclassified;
                if (r.rank != 1) r.note = "isolated zero with rank != 1";
                locus.points.push_back(r);
            }
        }
    }
};

}  // namespace

SingularLocus trace_singular_set(const BundleView& view, const TraceOptions& opt) {
    Tracer tr(view, opt);
    tr.seed_all();
    return tr.finish();
}

SingularPointReport classify_point(const BundleView& view, Vec2d p, const SingularLocus& locus,
                                   const TraceOptions& opt) {
    Tracer tr(view, opt);
    SingularPointReport r;
    r.point = p;
    auto [lam, g] = area_density(view, p);
    r.lambda = lam;
    r.grad_lambda_norm = norm(g);
    auto [s0, s1] = psi_singular_values(view, p);
    r.rank = (s0 > opt.tol_rank_rel * tr.psi_scale) + (s1 > opt.tol_rank_rel * tr.psi_scale);
    if (std::abs(lam) > tr.tol_zero * 10) {
        r.note = "not on the singular set";
        return r;
    }
    // Match against the traced special points first.
    for (const auto& q : locus.points) {
        if (view.domain().distance(view.domain().wrap(p), q.point) < 0.3 * tr.h_max) {
            SingularPointReport out = q;
            out.point = p;
            return out;
        }
    }
    if (r.grad_lambda_norm > tr.tol_grad && r.rank == 1) {
        Vec2d tan = tr.tangent_at(p, rot90(g));
        Vec2d eta = null_direction(view, p, opt.tol_rank_rel);
        double F = cross(tan, eta);
        r.transversality = F;
        if (std::abs(F) > opt.tol_transv) {
            r.verdict = Verdict::A2;
        } else {
            double d = 1e-5 * tr.geom;
            double fp = tr.F_at(tr.advance(p, tan, d).first, tan, eta);
            double fm = tr.F_at(tr.advance(p, tan, -d).first, tan, eta);
            r.transversality_rate = (fp - fm) / (2 * d);
            r.verdict = std::abs(r.transversality_rate) > opt.tol_a3 ? Verdict::A3
                                                                     : Verdict::NonDegeneratePeak;
        }
    }
    return r;
}

}  // namespace frontlab
