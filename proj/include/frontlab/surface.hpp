#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "frontlab/domain.hpp"
#include "frontlab/expr.hpp"

namespace frontlab {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

/// A sampled frontal invariant (|nu|=1 or df _|_ nu) failed.
class FrontalViolation : public std::runtime_error {
public:
    FrontalViolation(Vec2d p, const std::string& which, double magnitude);
    Vec2d point;
    std::string which;
    double magnitude;
};

/// Extrinsic input model: f : domain -> R^3 with unit normal field nu.
struct FrontalSurface {
    std::string name;
    ParamDomain domain{ParamDomain::rectangle(-1, 1, -1, 1)};
    std::array<Expr, 3> f;
    std::array<Expr, 3> nu;
};

/// Intrinsic input model: the bundle map psi written in a fixed positive
/// orthonormal frame {e1,e2}, psi(du) = (P11,P21), psi(dv) = (P12,P22),
/// plus the connection form omega = omega_u du + omega_v dv.
struct IntrinsicCTB {
    std::string name;
    ParamDomain domain{ParamDomain::rectangle(-1, 1, -1, 1)};
    std::array<std::array<Expr, 2>, 2> P;
    Expr omega_u;
    Expr omega_v;
};

using SurfaceSpec = std::variant<FrontalSurface, IntrinsicCTB>;

/// Parse the line-oriented surface-spec format ([surface] / [ctb]
/// sections, key = value). Frontal invariants are spot-checked on a
/// 33x33 grid; violations throw FrontalViolation.
SurfaceSpec load_spec(const std::string& file_bytes);
SurfaceSpec load_spec_file(const std::string& path);
std::string write_spec(const SurfaceSpec& spec);

/// Sample check of |nu|=1 and <f_u,nu>=<f_v,nu>=0; throws on failure.
void validate_frontal(const FrontalSurface& s, int grid = 33,
                      double tol_unit = 1e-9, double tol_perp = 1e-9);

/// Max over an n x n grid of |D_u psi(dv) - D_v psi(du)| (the coherence
/// condition, with zero bracket for coordinate fields).
double check_compatibility(const IntrinsicCTB& ctb, int grid = 33);

/// Uniform evaluation interface over both input models. Fiber vectors
/// are handed out in ambient components: R^3 for a frontal (the fiber
/// is nu-perp inside R^3), frame components (dim 2) for an intrinsic
/// bundle. The fiber metric is the Euclidean dot product either way.
class BundleView {
public:
    virtual ~BundleView() = default;

    virtual const ParamDomain& domain() const = 0;
    virtual int ambient_dim() const = 0;
    virtual const std::string& name() const = 0;

    /// Signed area density and its derivatives (order <= 2).
    virtual Jet2 lambda_jet(Vec2d p, int order) const = 0;
    /// The smooth density K*lambda (order <= 2).
    virtual Jet2 curvature_density_jet(Vec2d p, int order) const = 0;
    /// Component jets of psi(du) and psi(dv) (order <= 2).
    virtual void psi_jets(Vec2d p, int order, std::array<Jet2, 3>& pu,
                          std::array<Jet2, 3>& pv) const = 0;
    /// Co-orientation 2-form on the fiber at p.
    virtual double mu(Vec2d p, const Vec3& x, const Vec3& y) const = 0;
    /// Covariant derivative along a curve through p with velocity pdot,
    /// given a section value and its plain parameter derivative.
    virtual Vec3 covariant_deriv(Vec2d p, Vec2d pdot, const Vec3& a,
                                 const Vec3& adot) const = 0;

    double lambda(Vec2d p) const { return lambda_jet(p, 0).value(); }
    Vec2d grad_lambda(Vec2d p) const {
        Jet2 j = lambda_jet(p, 1);
        return {j.d(1, 0), j.d(0, 1)};
    }
    /// psi(du), psi(dv) as ambient vectors.
    void psi_vectors(Vec2d p, Vec3& pu, Vec3& pv) const;
    Vec3 psi_of(Vec2d p, Vec2d tangent) const;
    /// First fundamental form ds^2 = psi^T psi in the chart basis.
    Mat2 first_fundamental_form(Vec2d p) const;
};

class FrontalView final : public BundleView {
public:
    explicit FrontalView(FrontalSurface s);

    const ParamDomain& domain() const override { return surface_.domain; }
    int ambient_dim() const override { return 3; }
    const std::string& name() const override { return surface_.name; }
    Jet2 lambda_jet(Vec2d p, int order) const override;
    Jet2 curvature_density_jet(Vec2d p, int order) const override;
    void psi_jets(Vec2d p, int order, std::array<Jet2, 3>& pu,
                  std::array<Jet2, 3>& pv) const override;
    double mu(Vec2d p, const Vec3& x, const Vec3& y) const override;
    Vec3 covariant_deriv(Vec2d p, Vec2d pdot, const Vec3& a,
                         const Vec3& adot) const override;

    Vec3 normal(Vec2d p) const;
    /// Component jets of f itself (order <= 3).
    void f_jets(Vec2d p, int order, std::array<Jet2, 3>& out) const;
    void nu_jets(Vec2d p, int order, std::array<Jet2, 3>& out) const;
    const FrontalSurface& surface() const { return surface_; }

private:
    FrontalSurface surface_;
};

class IntrinsicView final : public BundleView {
public:
    explicit IntrinsicView(IntrinsicCTB c);

    const ParamDomain& domain() const override { return ctb_.domain; }
    int ambient_dim() const override { return 2; }
    const std::string& name() const override { return ctb_.name; }
    Jet2 lambda_jet(Vec2d p, int order) const override;
    Jet2 curvature_density_jet(Vec2d p, int order) const override;
    void psi_jets(Vec2d p, int order, std::array<Jet2, 3>& pu,
                  std::array<Jet2, 3>& pv) const override;
    double mu(Vec2d p, const Vec3& x, const Vec3& y) const override;
    Vec3 covariant_deriv(Vec2d p, Vec2d pdot, const Vec3& a,
                         const Vec3& adot) const override;

    /// Connection form coefficients (omega_u, omega_v) at p.
    Vec2d omega(Vec2d p) const;
    const IntrinsicCTB& ctb() const { return ctb_; }

private:
    IntrinsicCTB ctb_;
};

std::shared_ptr<BundleView> make_view(const SurfaceSpec& spec);

/// Rewrite a frontal in intrinsic frame form: e1 = normalized projection
/// of the reference vector r onto nu-perp, e2 = nu x e1. The reference
/// must stay well separated from nu on the whole domain (checked on a
/// sample grid; |proj| > 0.1 required).
IntrinsicCTB frontal_to_intrinsic(const FrontalSurface& s, const Vec3& reference);

/// (1/4pi) integral of det(nu_u, nu_v, nu) over a compact domain.
double gauss_map_degree(const FrontalSurface& s, int grid = 96);

}  // namespace frontlab
