#pragma once

#include <string>
#include <vector>

#include "frontlab/surface.hpp"

namespace frontlab {

class RankZero : public std::runtime_error {
public:
    explicit RankZero(Vec2d p)
        : std::runtime_error("psi has rank 0 at (" + std::to_string(p.u) + ", " +
                             std::to_string(p.v) + ")"),
          point(p) {}
    Vec2d point;
};

class NewtonDivergence : public std::runtime_error {
public:
    explicit NewtonDivergence(Vec2d p)
        : std::runtime_error("corrector failed to converge near (" + std::to_string(p.u) +
                             ", " + std::to_string(p.v) + ")"),
          point(p) {}
    Vec2d point;
};

struct TraceOptions {
    int seed_grid = 64;
    double step_factor = 0.5;        // max step = step_factor * scale / seed_grid
    double tol_on_curve_rel = 1e-10; // |lambda| <= rel * lambda scale on samples
    double tol_nondeg_rel = 1e-6;    // |grad lambda| threshold relative to grad scale
    double tol_transv = 1e-6;
    double tol_a3 = 1e-6;
    double tol_rank_rel = 1e-8;
    double tol_iso_rel = 1e-9;       // |lambda| at an isolated zero candidate
};

struct SingularSample {
    double t = 0.0;        // cumulative chart arclength along the trace
    Vec2d p;               // covering coordinates (not wrapped on a torus)
    double lambda = 0.0;
    Vec2d tangent;         // unit trace direction
    Vec2d eta;             // unit null direction, continuous along the curve
    double dlambda_eta = 0.0;  // with eta re-oriented so {tangent, eta} is positive
    double psi_speed = 0.0;    // |psi(tangent)| = dtau/dt
};

enum class CurveEnd { Boundary, Loop, Peak };

enum class Verdict { A2, A3, NonDegeneratePeak, DegeneratePeak, IsolatedPeak, Unclassified };

const char* verdict_name(Verdict v);

struct SingularCurve {
    std::vector<SingularSample> samples;
    CurveEnd start_end = CurveEnd::Boundary;
    CurveEnd finish_end = CurveEnd::Boundary;
    int start_peak = -1;   // index into SingularLocus::points when end is Peak
    int finish_peak = -1;
    bool closed() const { return start_end == CurveEnd::Loop; }
    double length() const { return samples.empty() ? 0.0 : samples.back().t; }
};

struct SingularPointReport {
    Vec2d point;
    Verdict verdict = Verdict::Unclassified;
    double lambda = 0.0;
    double grad_lambda_norm = 0.0;
    int rank = -1;
    double transversality = 0.0;       // gamma-dot wedge eta
    double transversality_rate = 0.0;  // d/dt of the above along the curve
    int branch_count = 0;              // incident curve ends (2m(p))
    std::string note;
};

struct SingularLocus {
    std::vector<SingularCurve> curves;       // split at peaks and A3 points
    std::vector<SingularPointReport> points; // special points (non-A2)
    double lambda_scale = 1.0;
    double grad_scale = 1.0;

    /// Curve-end indices incident to point k, each as (curve, at_start).
    std::vector<std::pair<int, bool>> branches_at(int k) const;
};

/// lambda and its gradient.
std::pair<double, Vec2d> area_density(const BundleView& view, Vec2d p);

/// Unit kernel direction of psi at a rank-1 point; deterministic sign
/// (first nonzero component positive). Throws RankZero when psi vanishes.
Vec2d null_direction(const BundleView& view, Vec2d p, double tol_rank_rel = 1e-8);

/// Both singular values of the chart matrix of psi.
std::pair<double, double> psi_singular_values(const BundleView& view, Vec2d p);

/// Trace all branches of {lambda = 0} and classify their special points.
SingularLocus trace_singular_set(const BundleView& view, const TraceOptions& opt = {});

/// Classification of a single located singular point given the traced locus.
SingularPointReport classify_point(const BundleView& view, Vec2d p, const SingularLocus& locus,
                                   const TraceOptions& opt = {});

}  // namespace frontlab
