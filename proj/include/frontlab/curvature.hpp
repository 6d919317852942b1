#pragma once

#include <vector>

#include "frontlab/singular.hpp"
#include "frontlab/surface.hpp"

namespace frontlab {

class NotA2 : public std::runtime_error {
public:
    NotA2(Vec2d p, double transversality)
        : std::runtime_error("sample at (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                             ") is not A2 (|gamma-dot wedge eta| = " +
                             std::to_string(transversality) + ")"),
          point(p) {}
    Vec2d point;
};

class OnSingularSet : public std::runtime_error {
public:
    explicit OnSingularSet(Vec2d p)
        : std::runtime_error("arc touches the singular set at (" + std::to_string(p.u) + ", " +
                             std::to_string(p.v) + ")"),
          point(p) {}
    Vec2d point;
};

struct GaussianDensity {
    double K_lambda = 0.0;  // smooth density: K dA-hat = K_lambda du dv
    double lambda = 0.0;
    bool near_singular = false;
    double K = 0.0;  // valid only when !near_singular
};

/// K*lambda from the smooth route (frontal: det(nu_u,nu_v,nu); intrinsic:
/// curl of omega); K = K_lambda/lambda only when |lambda| > tol_sing.
GaussianDensity gaussian_density(const BundleView& view, Vec2d p, double tol_sing = 1e-10);

/// kappa_s at one trace sample: sgn(dlambda(eta)) * mu(psi(T), D_t psi(T)) / |psi(T)|^3.
/// The second-derivative part of the curve drops out of mu on the singular
/// set (psi(gamma-ddot) lies in the rank-1 image), so only the tangent is needed.
double singular_curvature(const BundleView& view, const SingularSample& s);

/// The measure density kappa_s * dtau/dt = sgn(dlambda(eta)) * mu(a, D_t a)/|a|^2;
/// stays bounded at peak endpoints where kappa_s itself diverges.
double singular_curvature_measure(const BundleView& view, const SingularSample& s);

/// Per-sample kappa_s along a traced curve. Interior samples must be A2
/// (|gamma-dot wedge eta| > tol_transv) and sgn(dlambda(eta)) must be
/// constant over them; endpoint samples may sit on peaks and are exempt.
std::vector<double> singular_curvature(const BundleView& view, const SingularCurve& curve,
                                       double tol_transv = 1e-6);

struct GeodesicCurvature {
    double kappa_hat = 0.0;    // E-geodesic curvature
    double kappa_tilde = 0.0;  // sgn(lambda) * kappa_hat (geometric curvature)
    double lambda = 0.0;
    double dtau_dt = 0.0;  // |psi(cdot)|
};

/// Geodesic curvature of a regular C^2 arc through p with velocity cdot and
/// acceleration cddot (arbitrary parametrization). Throws OnSingularSet when
/// |lambda| <= tol_sing.
GeodesicCurvature geodesic_curvature(const BundleView& view, Vec2d p, Vec2d cdot, Vec2d cddot,
                                     double tol_sing = 1e-10);

/// Connection form coefficients (omega_u, omega_v) at p. Intrinsic inputs
/// return their omega verbatim; frontals use the frame e1 = normalized
/// projection of reference onto nu-perp, e2 = nu x e1, omega(X) = -<D_X e1, e2>.
Vec2d connection_form(const BundleView& view, Vec2d p, const Vec3& reference = Vec3(1, 0, 0));

}  // namespace frontlab
