#include "frontlab/surface.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace frontlab {

FrontalViolation::FrontalViolation(Vec2d p, const std::string& w, double m)
    : std::runtime_error("frontal invariant \"" + w + "\" violated at (" +
                         std::to_string(p.u) + ", " + std::to_string(p.v) +
                         "), magnitude " + std::to_string(m)),
      point(p),
      which(w),
      magnitude(m) {}

namespace {

Jet2 det3(const std::array<Jet2, 3>& a, const std::array<Jet2, 3>& b,
          const std::array<Jet2, 3>& c) {
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
           a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

void BundleView::psi_vectors(Vec2d p, Vec3& pu, Vec3& pv) const {
    std::array<Jet2, 3> ju, jv;
    psi_jets(p, 0, ju, jv);
    pu = Vec3(ju[0].value(), ju[1].value(), ju[2].value());
    pv = Vec3(jv[0].value(), jv[1].value(), jv[2].value());
}

Vec3 BundleView::psi_of(Vec2d p, Vec2d tangent) const {
    Vec3 pu, pv;
    psi_vectors(p, pu, pv);
    return tangent.u * pu + tangent.v * pv;
}

Mat2 BundleView::first_fundamental_form(Vec2d p) const {
    Vec3 pu, pv;
    psi_vectors(p, pu, pv);
    Mat2 g;
    g << pu.dot(pu), pu.dot(pv), pv.dot(pu), pv.dot(pv);
    return g;
}

// ---- FrontalView ---------------------------------------------------------

FrontalView::FrontalView(FrontalSurface s) : surface_(std::move(s)) {}

void FrontalView::f_jets(Vec2d p, int order, std::array<Jet2, 3>& out) const {
    Vec2d q = surface_.domain.wrap(p);
    for (int k = 0; k < 3; ++k) out[k] = eval_jet(surface_.f[k], q.u, q.v, order);
}

void FrontalView::nu_jets(Vec2d p, int order, std::array<Jet2, 3>& out) const {
    Vec2d q = surface_.domain.wrap(p);
    for (int k = 0; k < 3; ++k) out[k] = eval_jet(surface_.nu[k], q.u, q.v, order);
}

Jet2 FrontalView::lambda_jet(Vec2d p, int order) const {
    std::array<Jet2, 3> f, nu, fu, fv;
    f_jets(p, std::min(order + 1, 3), f);
    nu_jets(p, order, nu);
    for (int k = 0; k < 3; ++k) {
        fu[k] = f[k].d_du();
        fv[k] = f[k].d_dv();
    }
    return det3(fu, fv, nu).truncated(order);
}

Jet2 FrontalView::curvature_density_jet(Vec2d p, int order) const {
    std::array<Jet2, 3> nu, nuu, nuv;
    nu_jets(p, std::min(order + 1, 3), nu);
    for (int k = 0; k < 3; ++k) {
        nuu[k] = nu[k].d_du();
        nuv[k] = nu[k].d_dv();
    }
    std::array<Jet2, 3> nut;
    for (int k = 0; k < 3; ++k) nut[k] = nu[k].truncated(order);
    return det3(nuu, nuv, nut).truncated(order);
}

void FrontalView::psi_jets(Vec2d p, int order, std::array<Jet2, 3>& pu,
                           std::array<Jet2, 3>& pv) const {
    std::array<Jet2, 3> f;
    f_jets(p, std::min(order + 1, 3), f);
    for (int k = 0; k < 3; ++k) {
        pu[k] = f[k].d_du();
        pv[k] = f[k].d_dv();
    }
}

Vec3 FrontalView::normal(Vec2d p) const {
    std::array<Jet2, 3> nu;
    nu_jets(p, 0, nu);
    return Vec3(nu[0].value(), nu[1].value(), nu[2].value());
}

double FrontalView::mu(Vec2d p, const Vec3& x, const Vec3& y) const {
    return x.cross(y).dot(normal(p));
}

Vec3 FrontalView::covariant_deriv(Vec2d p, Vec2d /*pdot*/, const Vec3& /*a*/,
                                  const Vec3& adot) const {
    // Tangential part of the ambient derivative.
    Vec3 n = normal(p);
    return adot - adot.dot(n) * n;
}

// ---- IntrinsicView --------------------------------------------------------

IntrinsicView::IntrinsicView(IntrinsicCTB c) : ctb_(std::move(c)) {}

Jet2 IntrinsicView::lambda_jet(Vec2d p, int order) const {
    Vec2d q = ctb_.domain.wrap(p);
    Jet2 p11 = eval_jet(ctb_.P[0][0], q.u, q.v, order);
    Jet2 p12 = eval_jet(ctb_.P[0][1], q.u, q.v, order);
    Jet2 p21 = eval_jet(ctb_.P[1][0], q.u, q.v, order);
    Jet2 p22 = eval_jet(ctb_.P[1][1], q.u, q.v, order);
    return p11 * p22 - p12 * p21;
}

Jet2 IntrinsicView::curvature_density_jet(Vec2d p, int order) const {
    // d(omega) = K dA-hat, so K*lambda = du omega_v - dv omega_u.
    Vec2d q = ctb_.domain.wrap(p);
    Jet2 wu = eval_jet(ctb_.omega_u, q.u, q.v, std::min(order + 1, 3));
    Jet2 wv = eval_jet(ctb_.omega_v, q.u, q.v, std::min(order + 1, 3));
    return (wv.d_du() - wu.d_dv()).truncated(order);
}

void IntrinsicView::psi_jets(Vec2d p, int order, std::array<Jet2, 3>& pu,
                             std::array<Jet2, 3>& pv) const {
    Vec2d q = ctb_.domain.wrap(p);
    pu[0] = eval_jet(ctb_.P[0][0], q.u, q.v, order);
    pu[1] = eval_jet(ctb_.P[1][0], q.u, q.v, order);
    pu[2] = Jet2::constant(0.0, order);
    pv[0] = eval_jet(ctb_.P[0][1], q.u, q.v, order);
    pv[1] = eval_jet(ctb_.P[1][1], q.u, q.v, order);
    pv[2] = Jet2::constant(0.0, order);
}

double IntrinsicView::mu(Vec2d /*p*/, const Vec3& x, const Vec3& y) const {
    return x[0] * y[1] - x[1] * y[0];
}

Vec2d IntrinsicView::omega(Vec2d p) const {
    Vec2d q = ctb_.domain.wrap(p);
    return {eval(ctb_.omega_u, q.u, q.v), eval(ctb_.omega_v, q.u, q.v)};
}

Vec3 IntrinsicView::covariant_deriv(Vec2d p, Vec2d pdot, const Vec3& a,
                                    const Vec3& adot) const {
    // D e1 = -omega e2, D e2 = omega e1.
    Vec2d w = omega(p);
    const double wt = w.u * pdot.u + w.v * pdot.v;
    return Vec3(adot[0] + wt * a[1], adot[1] - wt * a[0], 0.0);
}

std::shared_ptr<BundleView> make_view(const SurfaceSpec& spec) {
    if (std::holds_alternative<FrontalSurface>(spec))
        return std::make_shared<FrontalView>(std::get<FrontalSurface>(spec));
    return std::make_shared<IntrinsicView>(std::get<IntrinsicCTB>(spec));
}

// ---- validation -----------------------------------------------------------

void validate_frontal(const FrontalSurface& s, int grid, double tol_unit, double tol_perp) {
    FrontalView view(s);
    const ParamDomain& d = s.domain;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            // interior-shifted samples so rectangle corners with removable
            // degeneracies do not trip expression domain errors
            double fu = (i + 0.5) / grid, fv = (j + 0.5) / grid;
            Vec2d p{d.u_min() + fu * d.u_extent(), d.v_min() + fv * d.v_extent()};
            Vec3 n = view.normal(p);
            if (std::fabs(n.norm() - 1.0) > tol_unit)
                throw FrontalViolation(p, "|nu| = 1", std::fabs(n.norm() - 1.0));
            Vec3 pu, pv;
            view.psi_vectors(p, pu, pv);
            if (std::fabs(pu.dot(n)) > tol_perp)
                throw FrontalViolation(p, "<f_u, nu> = 0", std::fabs(pu.dot(n)));
            if (std::fabs(pv.dot(n)) > tol_perp)
                throw FrontalViolation(p, "<f_v, nu> = 0", std::fabs(pv.dot(n)));
        }
    }
}

double check_compatibility(const IntrinsicCTB& ctb, int grid) {
    const ParamDomain& d = ctb.domain;
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            double fu = (i + 0.5) / grid, fv = (j + 0.5) / grid;
            double u = d.u_min() + fu * d.u_extent();
            double v = d.v_min() + fv * d.v_extent();
            Jet2 p11 = eval_jet(ctb.P[0][0], u, v, 1);
            Jet2 p12 = eval_jet(ctb.P[0][1], u, v, 1);
            Jet2 p21 = eval_jet(ctb.P[1][0], u, v, 1);
            Jet2 p22 = eval_jet(ctb.P[1][1], u, v, 1);
            double wu = eval(ctb.omega_u, u, v);
            double wv = eval(ctb.omega_v, u, v);
            // D_u psi(dv) - D_v psi(du), frame components
            double r1 = p12.d(1, 0) + wu * p22.value() - (p11.d(0, 1) + wv * p21.value());
            double r2 = p22.d(1, 0) - wu * p12.value() - (p21.d(0, 1) - wv * p11.value());
            worst = std::max(worst, std::hypot(r1, r2));
        }
    }
    return worst;
}

double gauss_map_degree(const FrontalSurface& s, int grid) {
    if (!s.domain.compact())
        throw std::invalid_argument("gauss_map_degree requires a compact (flat torus) domain");
    FrontalView view(s);
    // composite 4-point Gauss per cell; integrand det(nu_u, nu_v, nu) is smooth
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    const double hu = s.domain.u_extent() / grid, hv = s.domain.v_extent() / grid;
    double total = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double cu = s.domain.u_min() + (i + 0.5) * hu;
            const double cv = s.domain.v_min() + (j + 0.5) * hv;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    total += gw[a] * gw[b] *
                             view.curvature_density_jet(
                                     {cu + 0.5 * hu * gx[a], cv + 0.5 * hv * gx[b]}, 0)
                                 .value() *
                             0.25 * hu * hv;
        }
    }
    return total / (4.0 * M_PI);
}

// ---- spec format -----------------------------------------------------------

namespace {

struct RawSpec {
    std::string section;
    std::map<std::string, std::string> keys;
};

RawSpec parse_raw(const std::string& bytes) {
    RawSpec raw;
    std::istringstream in(bytes);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        std::string body = line.substr(first, last - first + 1);
        if (body.empty() || body[0] == '#') continue;
        if (body.front() == '[' && body.back() == ']') {
            if (!raw.section.empty())
                throw SpecError("line " + std::to_string(lineno) + ": multiple section headers");
            raw.section = body.substr(1, body.size() - 2);
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw SpecError("line " + std::to_string(lineno) + ": expected key = value");
        auto strip = [](std::string s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = strip(body.substr(0, eq));
        std::string value = strip(body.substr(eq + 1));
        if (key.empty()) throw SpecError("line " + std::to_string(lineno) + ": empty key");
        if (raw.keys.count(key))
            throw SpecError("line " + std::to_string(lineno) + ": duplicate key \"" + key + "\"");
        raw.keys[key] = value;
    }
    if (raw.section.empty()) throw SpecError("missing [surface] or [ctb] section header");
    return raw;
}

std::pair<double, double> parse_range(const std::string& value, const std::string& key) {
    std::istringstream in(value);
    double a, b;
    char sep = ' ';
    if (!(in >> a)) throw SpecError("bad " + key + ": \"" + value + "\"");
    in >> std::ws;
    if (in.peek() == ',') in >> sep;
    if (!(in >> b)) throw SpecError("bad " + key + ": \"" + value + "\"");
    return {a, b};
}

double parse_number(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        double x = std::stod(value, &used);
        while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used]))) ++used;
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw SpecError("bad number for " + key + ": \"" + value + "\"");
    }
}

ParamDomain parse_domain(std::map<std::string, std::string>& keys) {
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = keys.find(key);
        if (it == keys.end()) return std::nullopt;
        std::string v = it->second;
        keys.erase(it);
        return v;
    };
    auto kind = take("domain");
    if (!kind) throw SpecError("missing key \"domain\"");
    if (*kind == "rectangle") {
        auto ur = take("u_range"), vr = take("v_range");
        if (!ur || !vr) throw SpecError("rectangle domain needs u_range and v_range");
        auto [u0, u1] = parse_range(*ur, "u_range");
        auto [v0, v1] = parse_range(*vr, "v_range");
        return ParamDomain::rectangle(u0, u1, v0, v1);
    }
    if (*kind == "flat_torus") {
        auto up = take("u_period"), vp = take("v_period");
        if (!up || !vp) throw SpecError("flat_torus domain needs u_period and v_period");
        return ParamDomain::flat_torus(parse_number(*up, "u_period"),
                                       parse_number(*vp, "v_period"));
    }
    throw SpecError("domain must be rectangle or flat_torus, got \"" + *kind + "\"");
}

Expr parse_field(std::map<std::string, std::string>& keys, const std::string& key) {
    auto it = keys.find(key);
    if (it == keys.end()) throw SpecError("missing key \"" + key + "\"");
    std::string text = it->second;
    keys.erase(it);
    try {
        return parse(text);
    } catch (const std::exception& e) {
        throw SpecError("key \"" + key + "\": " + e.what());
    }
}

}  // namespace

SurfaceSpec load_spec(const std::string& file_bytes) {
    RawSpec raw = parse_raw(file_bytes);
    auto keys = raw.keys;
    std::string name = "unnamed";
    if (auto it = keys.find("name"); it != keys.end()) {
        name = it->second;
        keys.erase(it);
    }
    if (raw.section == "surface") {
        FrontalSurface s;
        s.name = name;
        s.domain = parse_domain(keys);
        s.f = {parse_field(keys, "x"), parse_field(keys, "y"), parse_field(keys, "z")};
        s.nu = {parse_field(keys, "nu_x"), parse_field(keys, "nu_y"), parse_field(keys, "nu_z")};
        if (!keys.empty()) throw SpecError("unknown key \"" + keys.begin()->first + "\"");
        validate_frontal(s);
        return s;
    }
    if (raw.section == "ctb") {
        IntrinsicCTB c;
        c.name = name;
        c.domain = parse_domain(keys);
        c.P[0][0] = parse_field(keys, "p11");
        c.P[0][1] = parse_field(keys, "p12");
        c.P[1][0] = parse_field(keys, "p21");
        c.P[1][1] = parse_field(keys, "p22");
        c.omega_u = parse_field(keys, "omega_u");
        c.omega_v = parse_field(keys, "omega_v");
        if (!keys.empty()) throw SpecError("unknown key \"" + keys.begin()->first + "\"");
        return c;
    }
    throw SpecError("unknown section [" + raw.section + "]");
}

SurfaceSpec load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_spec(buf.str());
}

std::string write_spec(const SurfaceSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    auto domain_block = [&](const ParamDomain& d) {
        if (d.kind() == ParamDomain::Kind::FlatTorus) {
            os << "domain = flat_torus\n";
            os << "u_period = " << d.u_extent() << "\n";
            os << "v_period = " << d.v_extent() << "\n";
        } else {
            os << "domain = rectangle\n";
            os << "u_range = " << d.u_min() << " " << d.u_max() << "\n";
            os << "v_range = " << d.v_min() << " " << d.v_max() << "\n";
        }
    };
    if (std::holds_alternative<FrontalSurface>(spec)) {
        const auto& s = std::get<FrontalSurface>(spec);
        os << "[surface]\n" << "name = " << s.name << "\n";
        domain_block(s.domain);
        const char* fk[3] = {"x", "y", "z"};
        const char* nk[3] = {"nu_x", "nu_y", "nu_z"};
        for (int k = 0; k < 3; ++k) os << fk[k] << " = " << pretty_print(s.f[k]) << "\n";
        for (int k = 0; k < 3; ++k) os << nk[k] << " = " << pretty_print(s.nu[k]) << "\n";
    } else {
        const auto& c = std::get<IntrinsicCTB>(spec);
        os << "[ctb]\n" << "name = " << c.name << "\n";
        domain_block(c.domain);
        os << "p11 = " << pretty_print(c.P[0][0]) << "\n";
        os << "p12 = " << pretty_print(c.P[0][1]) << "\n";
        os << "p21 = " << pretty_print(c.P[1][0]) << "\n";
        os << "p22 = " << pretty_print(c.P[1][1]) << "\n";
        os << "omega_u = " << pretty_print(c.omega_u) << "\n";
        os << "omega_v = " << pretty_print(c.omega_v) << "\n";
    }
    return os.str();
}

// ---- frontal -> intrinsic ---------------------------------------------------

IntrinsicCTB frontal_to_intrinsic(const FrontalSurface& s, const Vec3& reference) {
    // e1 = (r - <r,nu> nu)/|...|, e2 = nu x e1; both as expressions.
    std::array<Expr, 3> nu = s.nu;
    std::array<Expr, 3> r = {num(reference[0]), num(reference[1]), num(reference[2])};

    auto dot_expr = [](const std::array<Expr, 3>& a, const std::array<Expr, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    Expr rn = dot_expr(r, nu);
    std::array<Expr, 3> proj;
    for (int k = 0; k < 3; ++k) proj[k] = r[k] - rn * nu[k];
    Expr plen = sqrt_expr(dot_expr(proj, proj));
    std::array<Expr, 3> e1;
    for (int k = 0; k < 3; ++k) e1[k] = proj[k] / plen;
    std::array<Expr, 3> e2 = {nu[1] * e1[2] - nu[2] * e1[1], nu[2] * e1[0] - nu[0] * e1[2],
                              nu[0] * e1[1] - nu[1] * e1[0]};

    // frame validity: |proj| > 0.1 everywhere on a sample grid
    const ParamDomain& d = s.domain;
    for (int i = 0; i <= 32; ++i) {
        for (int j = 0; j <= 32; ++j) {
            double u = d.u_min() + (i + 0.5) / 33.0 * d.u_extent();
            double v = d.v_min() + (j + 0.5) / 33.0 * d.v_extent();
            if (eval(plen, u, v) <= 0.1)
                throw SpecError("frontal_to_intrinsic: reference vector too close to nu at (" +
                                std::to_string(u) + ", " + std::to_string(v) + ")");
        }
    }

    std::array<std::array<Expr, 3>, 2> df;
    for (int k = 0; k < 3; ++k) {
        df[0][k] = differentiate(s.f[k], NodeKind::VarU);
        df[1][k] = differentiate(s.f[k], NodeKind::VarV);
    }

    IntrinsicCTB c;
    c.name = s.name + "-intrinsic";
    c.domain = s.domain;
    c.P[0][0] = dot_expr(df[0], e1);
    c.P[1][0] = dot_expr(df[0], e2);
    c.P[0][1] = dot_expr(df[1], e1);
    c.P[1][1] = dot_expr(df[1], e2);

    std::array<Expr, 3> de1u, de1v;
    for (int k = 0; k < 3; ++k) {
        de1u[k] = differentiate(e1[k], NodeKind::VarU);
        de1v[k] = differentiate(e1[k], NodeKind::VarV);
    }
    c.omega_u = -dot_expr(de1u, e2);
    c.omega_v = -dot_expr(de1v, e2);
    return c;
}

}  // namespace frontlab
