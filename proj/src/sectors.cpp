#include "frontlab/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frontlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2d rot90(Vec2d g) { return {-g.v, g.u}; }

// Newton step onto {lambda = 0} along grad lambda.
Vec2d correct_to_curve(const BundleView& view, Vec2d p, double lambda_scale) {
    for (int it = 0; it < 8; ++it) {
        Jet2 j = view.lambda_jet(p, 1);
        double l = j.value();
        if (std::abs(l) < 1e-14 * lambda_scale) return p;
        Vec2d g{j.d(1, 0), j.d(0, 1)};
        double g2 = dot(g, g);
        if (g2 == 0.0) throw NewtonDivergence(p);
        p = p - (l / g2) * g;
    }
    if (std::abs(view.lambda(p)) > 1e-10 * lambda_scale) throw NewtonDivergence(p);
    return p;
}

// Point on the branch polyline at chart distance s from the given end,
// projected back onto the singular set.
Vec2d point_at_distance(const BundleView& view, const SingularCurve& branch, bool at_start,
                        double s, double lambda_scale) {
    const auto& sm = branch.samples;
    int n = static_cast<int>(sm.size());
    double cum = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        Vec2d a = at_start ? sm[k].p : sm[n - 1 - k].p;
        Vec2d b = at_start ? sm[k + 1].p : sm[n - 2 - k].p;
        double seg = norm(b - a);
        if (cum + seg >= s) {
            double f = seg > 0 ? (s - cum) / seg : 0.0;
            return correct_to_curve(view, a + f * (b - a), lambda_scale);
        }
        cum += seg;
    }
    Vec2d last = at_start ? sm[n - 1].p : sm[0].p;
    return correct_to_curve(view, last, lambda_scale);
}

Vec3 unit_psi(const BundleView& view, Vec2d p, Vec2d dir) {
    Vec3 w = view.psi_of(p, dir);
    double nw = w.norm();
    if (nw == 0.0) throw RankZero(p);
    return w / nw;
}

}  // namespace

EInitialVector initial_vector(const BundleView& view, const SingularCurve& branch,
                              bool at_start, double tol_angle) {
    const auto& sm = branch.samples;
    if (sm.size() < 3) throw std::invalid_argument("branch too short for initial vector");
    Vec2d peak = at_start ? sm.front().p : sm.back().p;
    double poly_len = 0.0;
    for (size_t k = 0; k + 1 < sm.size(); ++k) poly_len += norm(sm[k + 1].p - sm[k].p);
    double lambda_scale = 1e-6;
    for (size_t k = 0; k < sm.size(); k += std::max<size_t>(1, sm.size() / 8))
        lambda_scale = std::max(lambda_scale,
                                norm(view.grad_lambda(sm[k].p)) * view.domain().scale());

    // Dyadic walk toward the peak; Richardson-extrapolate the unit image
    // direction (convergence is first order in the distance).
    std::vector<Vec3> psi_seq;
    std::vector<Vec2d> tan_seq;
    EInitialVector out;
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    std::vector<Vec3> rich;
    std::vector<Vec2d> rich_tan;
    double s0 = 0.4 * poly_len;
    int max_j = 48;
    for (int j = 0; j < max_j; ++j) {
        double s = s0 * std::pow(0.5, j);
        if (s < 1e-12 * view.domain().scale()) break;
        Vec2d q = point_at_distance(view, branch, at_start, s, lambda_scale);
        Vec2d g = view.grad_lambda(q);
        Vec2d T = rot90(g);
        double nT = norm(T);
        if (nT == 0.0) throw NewtonDivergence(q);
        T = (1.0 / nT) * T;
        if (dot(T, q - peak) < 0) T = -1.0 * T;
        psi_seq.push_back(unit_psi(view, q, T));
        tan_seq.push_back(T);
        if (j >= 1) {
            Vec3 r = (2.0 * psi_seq[j] - psi_seq[j - 1]).normalized();
            Vec2d rt = 2.0 * tan_seq[j] - tan_seq[j - 1];
            rt = (1.0 / norm(rt)) * rt;
            rich.push_back(r);
            rich_tan.push_back(rt);
            if (rich.size() >= 2) {
                double res = (rich.back() - rich[rich.size() - 2]).norm();
                out.residual_history.push_back(res);
                if (res < best) {
                    best = res;
                    best_j = static_cast<int>(rich.size()) - 1;
                }
                if (res < 0.05 * tol_angle) break;
                // Stalled on the floating-point noise floor: keep the best.
                if (out.residual_history.size() > 6 && res > 4 * best) break;
            }
        }
    }
    if (best_j < 0 || best > tol_angle) throw NoLimit(best_j < 0 ? 1.0 : best);
    out.psi_dir = rich[best_j];
    out.tangent = rich_tan[best_j];
    out.cauchy_residual = best;
    return out;
}

EInitialVector initial_vector(const BundleView& view, Vec2d p, Vec2d cdot) {
    EInitialVector out;
    out.psi_dir = unit_psi(view, p, cdot);
    out.tangent = (1.0 / norm(cdot)) * cdot;
    out.cauchy_residual = 0.0;
    return out;
}

double angle_between_initial_vectors(const Vec3& a, const Vec3& b, bool at_peak,
                                     double tol_angle) {
    double theta = std::atan2(a.cross(b).norm(), a.dot(b));
    if (!at_peak) return theta;
    if (theta < tol_angle) return 0.0;
    if (std::abs(theta - kPi) < tol_angle) return kPi;
    throw SnapFailure(theta);
}

namespace {

// Stable sign of lambda probed along a frame direction, shrinking the
// radius until three consecutive dyadic probes agree.
int probe_sign(const BundleView& view, Vec2d p, Vec2d dir, double r0, double lambda_scale) {
    int last = 0, run = 0;
    for (int k = 0; k < 40; ++k) {
        double r = r0 * std::pow(0.5, k);
        double l = view.lambda(p + r * dir);
        if (std::abs(l) < 1e-13 * lambda_scale) { run = 0; continue; }
        int s = l > 0 ? 1 : -1;
        run = (s == last) ? run + 1 : 1;
        last = s;
        if (run >= 3) return s;
    }
    throw NewtonDivergence(p);
}

}  // namespace

PeakSectorReport sector_angles(const BundleView& view, const SingularLocus& locus,
                               int point_index, double tol_angle) {
    const SingularPointReport& pr = locus.points.at(point_index);
    // A3-points are themselves non-degenerate peaks.
    if (pr.verdict != Verdict::A3 && pr.verdict != Verdict::NonDegeneratePeak &&
        pr.verdict != Verdict::DegeneratePeak && pr.verdict != Verdict::IsolatedPeak)
        throw std::invalid_argument("sector_angles: point is not a peak");

    PeakSectorReport rep;
    rep.peak = pr.point;

    // Eigenframe of the first fundamental form: the kernel of psi is the
    // small-eigenvalue direction (the u-axis of a g-coordinate system).
    Mat2 I = view.first_fundamental_form(pr.point);
    Eigen::SelfAdjointEigenSolver<Mat2> es(I);
    Eigen::Vector2d eu = es.eigenvectors().col(0);  // smallest eigenvalue
    if (std::abs(eu.x()) >= std::abs(eu.y()) ? eu.x() < 0 : eu.y() < 0) eu = -eu;
    rep.axis_u = {eu.x(), eu.y()};
    rep.axis_v = rot90(rep.axis_u);

    double radius0 = 0.05 * view.domain().scale();

    auto incident = locus.branches_at(point_index);
    if (incident.empty()) {
        // Isolated peak: a single sector filling a punctured neighbourhood.
        int s = probe_sign(view, pr.point, {1, 0}, radius0, locus.lambda_scale);
        SectorInfo sec;
        sec.angle_multiple = 2;
        sec.sign = s;
        sec.from_angle = 0;
        sec.to_angle = 2 * kPi;
        rep.sectors.push_back(sec);
        (s > 0 ? rep.alpha_plus : rep.alpha_minus) = 2 * kPi;
        rep.sign = s > 0 ? PeakSign::Positive : PeakSign::Negative;
        rep.m = 0;
        return rep;
    }

    Vec3 psi_ev = unit_psi(view, pr.point, rep.axis_v);
    for (auto [ci, at_start] : incident) {
        BranchInfo b;
        b.curve = ci;
        b.at_start = at_start;
        b.initial = initial_vector(view, locus.curves[ci], at_start, tol_angle);
        b.tangent = b.initial.tangent;
        b.frame_angle = std::atan2(dot(b.tangent, rep.axis_v), dot(b.tangent, rep.axis_u));
        if (b.frame_angle < 0) b.frame_angle += 2 * kPi;
        // Upper/lower class: the limit image direction is +-psi(dv), the
        // sign being the side of the u-axis the branch lies on.
        double c = b.initial.psi_dir.dot(psi_ev);
        if (std::abs(c) < 0.5) throw SnapFailure(std::acos(std::clamp(c, -1.0, 1.0)));
        b.cls = c > 0 ? 1 : -1;
        rep.branches.push_back(b);
    }
    std::sort(rep.branches.begin(), rep.branches.end(),
              [](const BranchInfo& a, const BranchInfo& b) { return a.frame_angle < b.frame_angle; });
    int n = static_cast<int>(rep.branches.size());
    for (int i = 0; i < n; ++i) {
        double d = rep.branches[(i + 1) % n].frame_angle - rep.branches[i].frame_angle;
        if (i + 1 == n) d += 2 * kPi;
        if (d < 1e-7) throw TangentAmbiguity(pr.point);
    }

    // One sector between consecutive branches. The interior angle is pi
    // times the number of kernel-axis rays (+u and -u) the sector contains;
    // when a branch is tangent to a ray its one-sidedness decides which of
    // the two adjacent sectors the ray lands in.
    std::vector<int> ray_count(n, 0);
    double coincide_tol = 1e-5;
    for (double phi : {0.0, kPi}) {
        int hit = -1;
        for (int i = 0; i < n; ++i) {
            double d = std::abs(rep.branches[i].frame_angle - phi);
            d = std::min(d, std::abs(d - 2 * kPi));
            if (d < coincide_tol) { hit = i; break; }
        }
        if (hit >= 0) {
            // The ray lies on the opposite side of the branch from its class;
            // the ccw-adjacent sector sits on the +v side at phi=0, the -v
            // side at phi=pi.
            int ccw_side = (phi == 0.0) ? 1 : -1;
            int idx = (ccw_side == -rep.branches[hit].cls) ? hit : (hit + n - 1) % n;
            ray_count[idx]++;
        } else {
            for (int i = 0; i < n; ++i) {
                double a = rep.branches[i].frame_angle;
                double b = rep.branches[(i + 1) % n].frame_angle;
                if (i + 1 == n) b += 2 * kPi;
                double f = phi;
                if (f < a) f += 2 * kPi;
                if (f > a && f < b) { ray_count[i]++; break; }
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        SectorInfo sec;
        sec.from_angle = rep.branches[i].frame_angle;
        sec.to_angle = rep.branches[(i + 1) % n].frame_angle;
        if (i + 1 == n) sec.to_angle += 2 * kPi;
        sec.angle_multiple = ray_count[i];
        double mid = 0.5 * (sec.from_angle + sec.to_angle);
        Vec2d dir = std::cos(mid) * rep.axis_u + std::sin(mid) * rep.axis_v;
        sec.sign = probe_sign(view, pr.point, dir, radius0, locus.lambda_scale);
        rep.sectors.push_back(sec);
        (sec.sign > 0 ? rep.alpha_plus : rep.alpha_minus) += sec.angle_multiple * kPi;
    }
    rep.m = n / 2;
    double d = rep.alpha_plus - rep.alpha_minus;
    rep.sign = d > 1e-9 ? PeakSign::Positive : (d < -1e-9 ? PeakSign::Negative : PeakSign::Null);
    return rep;
}

TheoremAResult verify_theorem_A(const PeakSectorReport& report) {
    TheoremAResult r;
    r.sum = report.alpha_plus + report.alpha_minus;
    r.diff = report.alpha_plus - report.alpha_minus;
    bool sum_ok = std::abs(r.sum - 2 * kPi) < 1e-12;
    bool diff_ok = std::abs(r.diff) < 1e-12 || std::abs(std::abs(r.diff) - 2 * kPi) < 1e-12;
    r.pass = sum_ok && diff_ok;
    if (!r.pass) throw TheoremAViolation(r.sum, r.diff);
    return r;
}

const char* peak_sign_name(PeakSign s) {
    switch (s) {
        case PeakSign::Positive: return "positive";
        case PeakSign::Null: return "null";
        case PeakSign::Negative: return "negative";
    }
    return "?";
}

}  // namespace frontlab
