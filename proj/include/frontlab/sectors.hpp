#pragma once

#include <string>
#include <vector>

#include "frontlab/singular.hpp"

namespace frontlab {

class NoLimit : public std::runtime_error {
public:
    explicit NoLimit(double residual)
        : std::runtime_error("initial-vector extrapolation stalled (residual " +
                             std::to_string(residual) + ")"),
          residual(residual) {}
    double residual;
};

class SnapFailure : public std::runtime_error {
public:
    explicit SnapFailure(double angle)
        : std::runtime_error("angle at peak not near 0 or pi: " + std::to_string(angle)),
          angle(angle) {}
    double angle;
};

class TangentAmbiguity : public std::runtime_error {
public:
    explicit TangentAmbiguity(Vec2d p)
        : std::runtime_error("two branches share an initial tangent at (" +
                             std::to_string(p.u) + ", " + std::to_string(p.v) + ")") {}
};

struct EInitialVector {
    Vec3 psi_dir = Vec3::Zero();  // unit limit of psi(gamma-dot)/|psi(gamma-dot)|
    Vec2d tangent;                // unit chart tangent limit, pointing away from the peak
    double cauchy_residual = 0.0;
    std::vector<double> residual_history;
};

/// E-initial vector of a singular branch at its peak end.
EInitialVector initial_vector(const BundleView& view, const SingularCurve& branch,
                              bool at_start, double tol_angle = 1e-6);

/// E-initial vector of a transversal C^1 arc leaving p with velocity cdot
/// (psi(cdot) != 0 at a rank-1 peak, so no limit process is needed).
EInitialVector initial_vector(const BundleView& view, Vec2d p, Vec2d cdot);

/// Angle arccos<a,b> in [0,pi]; at a peak only {0,pi} can occur, so the raw
/// value is snapped when within tol (throws SnapFailure otherwise).
double angle_between_initial_vectors(const Vec3& a, const Vec3& b, bool at_peak = true,
                                     double tol_angle = 1e-6);

enum class PeakSign { Positive, Null, Negative };

struct SectorInfo {
    int angle_multiple = 0;  // interior angle = angle_multiple * pi, in {0,1,2}
    int sign = 0;            // sgn(lambda) inside
    double from_angle = 0;   // bounding branch directions in the eigenframe
    double to_angle = 0;
};

struct BranchInfo {
    int curve = -1;
    bool at_start = true;
    Vec2d tangent;      // away from the peak, chart coordinates
    double frame_angle = 0;  // direction angle in the eigenframe
    int cls = 0;        // +1 upper, -1 lower (g-coordinate class)
    EInitialVector initial;
};

struct PeakSectorReport {
    Vec2d peak;
    Vec2d axis_u, axis_v;  // eigenframe of I_p: axis_u spans the kernel
    std::vector<BranchInfo> branches;  // in cyclic order
    std::vector<SectorInfo> sectors;
    double alpha_plus = 0, alpha_minus = 0;
    PeakSign sign = PeakSign::Null;
    int m = 0;  // branch pairs; isolated peak has m = 0
};

/// Sector decomposition and interior angles at locus.points[point_index]
/// (must be a peak verdict).
PeakSectorReport sector_angles(const BundleView& view, const SingularLocus& locus,
                               int point_index, double tol_angle = 1e-6);

class TheoremAViolation : public std::runtime_error {
public:
    TheoremAViolation(double sum, double diff)
        : std::runtime_error("interior angles violate alpha+ + alpha- = 2pi: sum " +
                             std::to_string(sum) + ", diff " + std::to_string(diff)) {}
};

struct TheoremAResult {
    double sum = 0;       // alpha_+ + alpha_-
    double diff = 0;      // alpha_+ - alpha_-
    bool pass = false;    // sum == 2pi and diff in {-2pi, 0, 2pi}
};

/// Checks alpha+ + alpha- = 2pi and alpha+ - alpha- in {-2pi, 0, 2pi};
/// throws TheoremAViolation on failure.
TheoremAResult verify_theorem_A(const PeakSectorReport& report);

const char* peak_sign_name(PeakSign s);

}  // namespace frontlab
