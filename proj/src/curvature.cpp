#include "frontlab/curvature.hpp"

#include <cmath>

namespace frontlab {

namespace {

// psi(cdot) and its plain parameter derivative along a curve with velocity
// cdot and acceleration cddot, from order-1 psi jets.
void psi_along(const BundleView& view, Vec2d p, Vec2d cdot, Vec2d cddot, Vec3& a, Vec3& adot) {
    std::array<Jet2, 3> pu, pv;
    view.psi_jets(p, 1, pu, pv);
    a = Vec3::Zero();
    adot = Vec3::Zero();
    for (int i = 0; i < view.ambient_dim(); ++i) {
        a[i] = pu[i].value() * cdot.u + pv[i].value() * cdot.v;
        double du_i = (pu[i].d(1, 0) * cdot.u + pu[i].d(0, 1) * cdot.v) * cdot.u +
                      (pv[i].d(1, 0) * cdot.u + pv[i].d(0, 1) * cdot.v) * cdot.v;
        adot[i] = du_i + pu[i].value() * cddot.u + pv[i].value() * cddot.v;
    }
}

double mu_a_Da(const BundleView& view, Vec2d p, Vec2d cdot, Vec2d cddot, Vec3& a) {
    Vec3 adot;
    psi_along(view, p, cdot, cddot, a, adot);
    Vec3 Da = view.covariant_deriv(p, cdot, a, adot);
    return view.mu(p, a, Da);
}

}  // namespace

GaussianDensity gaussian_density(const BundleView& view, Vec2d p, double tol_sing) {
    GaussianDensity g;
    g.K_lambda = view.curvature_density_jet(p, 0).value();
    g.lambda = view.lambda(p);
    g.near_singular = std::abs(g.lambda) <= tol_sing;
    if (!g.near_singular) g.K = g.K_lambda / g.lambda;
    return g;
}

double singular_curvature(const BundleView& view, const SingularSample& s) {
    Vec3 a;
    // gamma-ddot is omitted: psi(gamma-ddot) lies in the rank-1 image
    // spanned by psi(gamma-dot), so it cannot contribute to mu.
    double m = mu_a_Da(view, s.p, s.tangent, {0, 0}, a);
    double n = a.norm();
    double sgn = s.dlambda_eta >= 0 ? 1.0 : -1.0;
    return sgn * m / (n * n * n);
}

double singular_curvature_measure(const BundleView& view, const SingularSample& s) {
    Vec3 a;
    double m = mu_a_Da(view, s.p, s.tangent, {0, 0}, a);
    double n = a.norm();
    double sgn = s.dlambda_eta >= 0 ? 1.0 : -1.0;
    return sgn * m / (n * n);
}

std::vector<double> singular_curvature(const BundleView& view, const SingularCurve& curve,
                                       double tol_transv) {
    const auto& ss = curve.samples;
    std::vector<double> out(ss.size());
    int sign_seen = 0;
    for (size_t k = 0; k < ss.size(); ++k) {
        bool endpoint = k == 0 || k + 1 == ss.size();
        double transv = std::abs(cross(ss[k].tangent, ss[k].eta));
        if (!endpoint) {
            if (transv <= tol_transv) throw NotA2(ss[k].p, transv);
            int sgn = ss[k].dlambda_eta > 0 ? 1 : ss[k].dlambda_eta < 0 ? -1 : 0;
            // dlambda(eta) != 0 at A2 points and cannot flip along one branch
            if (sgn != 0 && sign_seen != 0 && sgn != sign_seen)
                throw std::logic_error("sgn(dlambda(eta)) flipped along an A2 branch");
            if (sgn != 0) sign_seen = sgn;
        }
        out[k] = singular_curvature(view, ss[k]);
    }
    return out;
}

GeodesicCurvature geodesic_curvature(const BundleView& view, Vec2d p, Vec2d cdot, Vec2d cddot,
                                     double tol_sing) {
    GeodesicCurvature g;
    g.lambda = view.lambda(p);
    if (std::abs(g.lambda) <= tol_sing) throw OnSingularSet(p);
    Vec3 a;
    double m = mu_a_Da(view, p, cdot, cddot, a);
    double n = a.norm();
    g.dtau_dt = n;
    g.kappa_hat = m / (n * n * n);
    g.kappa_tilde = g.lambda > 0 ? g.kappa_hat : -g.kappa_hat;
    return g;
}

Vec2d connection_form(const BundleView& view, Vec2d p, const Vec3& reference) {
    if (const auto* iv = dynamic_cast<const IntrinsicView*>(&view)) return iv->omega(p);
    const auto& fv = dynamic_cast<const FrontalView&>(view);
    std::array<Jet2, 3> nu;
    fv.nu_jets(p, 1, nu);
    // e1 = (r - <r,nu>nu)/|..|, e2 = nu x e1, omega(X) = -<d_X e1, e2>
    // (D is the tangential projection, and e2 _|_ nu kills the normal part).
    Vec3 n, nu_u, nu_v;
    for (int i = 0; i < 3; ++i) {
        n[i] = nu[i].value();
        nu_u[i] = nu[i].d(1, 0);
        nu_v[i] = nu[i].d(0, 1);
    }
    double rn = reference.dot(n);
    Vec3 w = reference - rn * n;
    double wl = w.norm();
    if (wl < 0.1) throw std::runtime_error("frame reference too aligned with nu");
    Vec3 e1 = w / wl;
    Vec3 e2 = n.cross(e1);
    // d_X w = -(r . d_X nu) nu - (r . nu) d_X nu ; d_X e1 = d_X w/|w| + (d|w| term)||e1
    auto omega_along = [&](const Vec3& dn) {
        Vec3 dw = -(reference.dot(dn)) * n - rn * dn;
        // the |w|' term is parallel to e1 and drops out against e2
        return -dw.dot(e2) / wl;
    };
    return {omega_along(nu_u), omega_along(nu_v)};
}

}  // namespace frontlab
