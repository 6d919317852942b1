#pragma once

#include <string>
#include <vector>

#include "frontlab/sectors.hpp"
#include "frontlab/singular.hpp"

namespace frontlab {

class ErrorBudgetExceeded : public std::runtime_error {
public:
    ErrorBudgetExceeded(double target, double achieved)
        : std::runtime_error("quadrature error " + std::to_string(achieved) +
                             " exceeds budget " + std::to_string(target)),
          target(target), achieved(achieved) {}
    double target, achieved;
};

class EndpointDivergence : public std::runtime_error {
public:
    explicit EndpointDivergence(double residual)
        : std::runtime_error("singular-curvature density fails the Cauchy test at a peak "
                             "endpoint (residual " + std::to_string(residual) + ")") {}
};

class GraphInconsistency : public std::runtime_error {
public:
    explicit GraphInconsistency(const std::string& what) : std::runtime_error(what) {}
};

class HypothesisViolation : public std::runtime_error {
public:
    HypothesisViolation(std::string what, std::vector<Vec2d> pts)
        : std::runtime_error(std::move(what)), points(std::move(pts)) {}
    std::vector<Vec2d> points;
};

class NotAdmissible : public std::runtime_error {
public:
    explicit NotAdmissible(const std::string& why) : std::runtime_error(why) {}
};

enum class TwoForm { KdA, KdAhat };

struct QCell {
    double u0, u1, v0, v1;
    int sign = 0;     // sgn(lambda) on the cell when uncut
    bool cut = false;  // the singular set meets the (slightly expanded) cell
};

struct CellDecomposition {
    std::vector<QCell> cells;
    int grid = 0;
    std::vector<double> u_lines, v_lines;  // grid lines, snapped to peaks
};

/// Conforming grid over the domain with peak coordinates pinned to grid
/// lines; cells tagged by sign or as cut by the traced singular set.
CellDecomposition decompose(const BundleView& view, const SingularLocus& locus, int grid);

struct Estimate {
    double value = 0;
    double error = 0;
};

/// Quadrature of K dA (sgn(lambda) * Klambda, split along the singular
/// set inside cut cells) or K dAhat (the smooth density Klambda).
Estimate integrate_2form(const BundleView& view, const CellDecomposition& dec, TwoForm form,
                         double error_budget = 0.0 /* 0 = unlimited */);

/// Integral of kappa_s dtau over all traced singular curves. Peak
/// endpoint densities come from a Cauchy-tested extrapolation.
Estimate integrate_singular_curvature(const BundleView& view, const SingularLocus& locus);

struct EulerData {
    int chi_M = 0, chi_plus = 0, chi_minus = 0, chi_sigma = 0;
    int V = 0, E = 0, F = 0;  // CW counts of the traced singular graph
    std::vector<int> m;       // branch-pair count per locus point
    bool identity_ok = false; // chi(M) = chi(M+) + chi(M-) + chi(Sigma)
    bool sigma_ok = false;    // chi(Sigma) = sum over peaks of (1 - m(p))
};

EulerData euler_characteristics(const BundleView& view, const CellDecomposition& dec,
                                const SingularLocus& locus);

struct GBReport {
    Estimate KdA, KdAhat, kappa_s;
    double chi_E = 0;  // (1/2pi) * KdAhat
    int P_plus = 0, P_minus = 0;
    EulerData euler;
    double residual_eq_A = 0, budget_eq_A = 0;
    double residual_eq_B = 0, budget_eq_B = 0;
    bool pass = false;
    std::vector<PeakSectorReport> peaks;
};

/// Global Gauss-Bonnet verdict on a compact (flat-torus) domain:
/// 2 pi chi(M) = int K dA + 2 int kappa_s dtau and
/// chi_E = chi(M+) - chi(M-) + #P+ - #P-.
GBReport verify_global_GB(const BundleView& view, int grid = 128,
                          const TraceOptions& topt = {});

struct Triangle {
    Vec2d A, B, C;  // straight chart edges, (A,B,C) positively oriented
};

struct LocalGBReport {
    double angle_A = 0, angle_B = 0, angle_C = 0;
    double boundary_integral = 0;  // kappa_g-tilde (kappa_s on singular edges)
    double area_integral = 0;      // K dA over the triangle
    double singular_integral = 0;  // kappa_s over Sigma in the interior
    double residual = 0;           // angle sum - pi - all three integrals
    double error_estimate = 0;
};

/// Local Gauss-Bonnet formula on an admissible triangle:
/// angle(A)+angle(B)+angle(C) - pi
///   = int_boundary kappa_g-tilde dtau + int K dA + 2 int kappa_s dtau.
LocalGBReport verify_local_GB(const BundleView& view, const Triangle& tri,
                              const SingularLocus& locus);

}  // namespace frontlab
