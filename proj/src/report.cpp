#include "frontlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "frontlab/curvature.hpp"
#include "json.hpp"

namespace frontlab {

namespace {

using Json = nlohmann::ordered_json;

// Fixed round-trip formatting so CSV/OBJ output is byte-stable.
std::string fnum(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Json config_json(const RunConfig& cfg) {
    return Json{{"input", cfg.input},
                {"tol_nondeg", cfg.tol_nondeg},
                {"tol_angle", cfg.tol_angle},
                {"grid", cfg.grid},
                {"refine", cfg.refine},
                {"format", cfg.format}};
}

Json point_json(const SingularPointReport& r) {
    Json j;
    j["u"] = r.point.u;
    j["v"] = r.point.v;
    j["verdict"] = verdict_name(r.verdict);
    j["lambda"] = r.lambda;
    j["grad_lambda_norm"] = r.grad_lambda_norm;
    j["rank"] = r.rank;
    j["transversality"] = r.transversality;
    j["transversality_rate"] = r.transversality_rate;
    j["branch_count"] = r.branch_count;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

Json sector_json(const PeakSectorReport& rep) {
    Json j;
    j["peak"] = {rep.peak.u, rep.peak.v};
    j["axis_u"] = {rep.axis_u.u, rep.axis_u.v};
    j["axis_v"] = {rep.axis_v.u, rep.axis_v.v};
    j["m"] = rep.m;
    j["sign"] = peak_sign_name(rep.sign);
    j["alpha_plus"] = rep.alpha_plus;
    j["alpha_minus"] = rep.alpha_minus;
    Json sectors = Json::array();
    for (const auto& s : rep.sectors)
        sectors.push_back(Json{{"angle_multiple", s.angle_multiple},
                               {"sign", s.sign},
                               {"from_angle", s.from_angle},
                               {"to_angle", s.to_angle}});
    j["sectors"] = std::move(sectors);
    Json branches = Json::array();
    for (const auto& b : rep.branches)
        branches.push_back(Json{{"curve", b.curve},
                                {"at_start", b.at_start},
                                {"tangent", {b.tangent.u, b.tangent.v}},
                                {"frame_angle", b.frame_angle},
                                {"class", b.cls}});
    j["branches"] = std::move(branches);
    return j;
}

bool is_peak(Verdict v) {
    return v == Verdict::A3 || v == Verdict::NonDegeneratePeak ||
           v == Verdict::DegeneratePeak || v == Verdict::IsolatedPeak;
}

Json peaks_json(const BundleView& view, const SingularLocus& locus, double tol_angle) {
    Json peaks = Json::array();
    for (int k = 0; k < (int)locus.points.size(); ++k) {
        if (!is_peak(locus.points[k].verdict)) continue;
        try {
            PeakSectorReport rep = sector_angles(view, locus, k, tol_angle);
            Json j = sector_json(rep);
            j["point_index"] = k;
            TheoremAResult res = verify_theorem_A(rep);
            j["angle_sum"] = res.sum;
            j["angle_diff"] = res.diff;
            j["theorem_A"] = res.pass;
            peaks.push_back(std::move(j));
        } catch (const std::exception& ex) {
            peaks.push_back(Json{{"point_index", k}, {"error", ex.what()}});
        }
    }
    return peaks;
}

std::vector<double> curve_kappa_s(const BundleView& view, const SingularCurve& c) {
    try {
        return singular_curvature(view, c);
    } catch (const std::exception&) {
        std::vector<double> ks;
        ks.reserve(c.samples.size());
        for (const auto& s : c.samples) {
            try {
                ks.push_back(singular_curvature(view, s));
            } catch (const std::exception&) {
                ks.push_back(std::nan(""));
            }
        }
        return ks;
    }
}

const char* end_name(CurveEnd e) {
    switch (e) {
        case CurveEnd::Boundary: return "boundary";
        case CurveEnd::Loop: return "loop";
        case CurveEnd::Peak: return "peak";
    }
    return "?";
}

Json estimate_json(const Estimate& e) { return Json{{"value", e.value}, {"error", e.error}}; }

}  // namespace

std::string analyze_report_json(const BundleView& view, const SingularLocus& locus,
                                const RunConfig& cfg) {
    Json j;
    j["schema"] = "frontlab-analyze/1";
    j["surface"] = view.name();
    j["config"] = config_json(cfg);
    Json curves = Json::array();
    for (const auto& c : locus.curves) {
        Json cj;
        cj["start_end"] = end_name(c.start_end);
        cj["finish_end"] = end_name(c.finish_end);
        cj["start_peak"] = c.start_peak;
        cj["finish_peak"] = c.finish_peak;
        auto ks = curve_kappa_s(view, c);
        Json samples = Json::array();
        for (size_t i = 0; i < c.samples.size(); ++i) {
            const auto& s = c.samples[i];
            double k = i < ks.size() && std::isfinite(ks[i]) ? ks[i] : 0.0;
            samples.push_back(Json{{"t", s.t},
                                   {"u", s.p.u},
                                   {"v", s.p.v},
                                   {"lambda", s.lambda},
                                   {"eta_u", s.eta.u},
                                   {"eta_v", s.eta.v},
                                   {"d_lambda_eta", s.dlambda_eta},
                                   {"kappa_s", k},
                                   {"dtau_dt", s.psi_speed}});
        }
        cj["samples"] = std::move(samples);
        curves.push_back(std::move(cj));
    }
    j["singular_curves"] = std::move(curves);
    Json pts = Json::array();
    for (const auto& p : locus.points) pts.push_back(point_json(p));
    j["points"] = std::move(pts);
    j["peaks"] = peaks_json(view, locus, cfg.tol_angle);
    return j.dump(2) + "\n";
}

std::string gb_report_json(const BundleView& view, const GBReport& g, const RunConfig& cfg) {
    Json j;
    j["schema"] = "frontlab-gb/1";
    j["surface"] = view.name();
    j["config"] = config_json(cfg);
    j["KdA"] = estimate_json(g.KdA);
    j["KdAhat"] = estimate_json(g.KdAhat);
    j["kappa_s"] = estimate_json(g.kappa_s);
    j["chi_E"] = g.chi_E;
    j["P_plus"] = g.P_plus;
    j["P_minus"] = g.P_minus;
    j["euler"] = Json{{"chi_M", g.euler.chi_M},
                      {"chi_plus", g.euler.chi_plus},
                      {"chi_minus", g.euler.chi_minus},
                      {"chi_sigma", g.euler.chi_sigma},
                      {"V", g.euler.V},
                      {"E", g.euler.E},
                      {"F", g.euler.F},
                      {"m", g.euler.m},
                      {"identity_ok", g.euler.identity_ok},
                      {"sigma_ok", g.euler.sigma_ok}};
    j["residual_eq_A"] = g.residual_eq_A;
    j["budget_eq_A"] = g.budget_eq_A;
    j["residual_eq_B"] = g.residual_eq_B;
    j["budget_eq_B"] = g.budget_eq_B;
    j["pass"] = g.pass;
    Json peaks = Json::array();
    for (const auto& p : g.peaks) peaks.push_back(sector_json(p));
    j["peaks"] = std::move(peaks);
    return j.dump(2) + "\n";
}

std::string local_gb_report_json(const BundleView& view, const Triangle& tri,
                                 const LocalGBReport& r, const RunConfig& cfg) {
    Json j;
    j["schema"] = "frontlab-gb-local/1";
    j["surface"] = view.name();
    j["config"] = config_json(cfg);
    j["triangle"] = Json{{"A", {tri.A.u, tri.A.v}},
                         {"B", {tri.B.u, tri.B.v}},
                         {"C", {tri.C.u, tri.C.v}}};
    j["angle_A"] = r.angle_A;
    j["angle_B"] = r.angle_B;
    j["angle_C"] = r.angle_C;
    j["boundary_integral"] = r.boundary_integral;
    j["area_integral"] = r.area_integral;
    j["singular_integral"] = r.singular_integral;
    j["residual"] = r.residual;
    j["error_estimate"] = r.error_estimate;
    j["pass"] = std::abs(r.residual) <= std::max(1e-4, 10 * r.error_estimate);
    return j.dump(2) + "\n";
}

std::string gallery_report_json(const std::vector<GalleryReport>& reports) {
    Json j;
    j["schema"] = "frontlab-gallery/1";
    Json entries = Json::array();
    for (const auto& rep : reports) {
        Json e;
        e["name"] = rep.name;
        e["passed"] = rep.all_passed();
        Json results = Json::array();
        for (const auto& r : rep.results) {
            Json rj;
            rj["label"] = r.label;
            rj["provenance"] = provenance_name(r.provenance);
            rj["passed"] = r.passed;
            if (!r.observed.empty()) rj["observed"] = r.observed;
            results.push_back(std::move(rj));
        }
        e["expectations"] = std::move(results);
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

std::string singular_curves_csv(const BundleView& view, const SingularLocus& locus) {
    std::string out = "t,u,v,lambda,eta_u,eta_v,d_lambda_eta,kappa_s,dtau_dt\n";
    for (size_t k = 0; k < locus.curves.size(); ++k) {
        const auto& c = locus.curves[k];
        out += "# curve " + std::to_string(k) + "\n";
        auto ks = curve_kappa_s(view, c);
        for (size_t i = 0; i < c.samples.size(); ++i) {
            const auto& s = c.samples[i];
            double kap = i < ks.size() && std::isfinite(ks[i]) ? ks[i] : 0.0;
            out += fnum(s.t) + "," + fnum(s.p.u) + "," + fnum(s.p.v) + "," + fnum(s.lambda) +
                   "," + fnum(s.eta.u) + "," + fnum(s.eta.v) + "," + fnum(s.dlambda_eta) + "," +
                   fnum(kap) + "," + fnum(s.psi_speed) + "\n";
        }
    }
    return out;
}

std::string mesh_obj(const BundleView& view, int nu, int nv) {
    const auto* fv = dynamic_cast<const FrontalView*>(&view);
    if (!fv) throw std::invalid_argument("mesh export needs an extrinsic (frontal) surface");
    if (nu < 2 || nv < 2) throw std::invalid_argument("mesh resolution must be at least 2x2");
    const ParamDomain& dom = view.domain();
    // on a torus the last grid line would repeat the first, so faces wrap
    bool wrap = dom.compact();
    std::string out = "# frontlab mesh, " + std::to_string(nu) + "x" + std::to_string(nv) +
                      " vertices\n";
    std::array<Jet2, 3> f;
    for (int i = 0; i < nu; ++i) {
        double u = dom.u_min() + dom.u_extent() * (wrap ? (double)i / nu
                                                        : (double)i / (nu - 1));
        for (int jv = 0; jv < nv; ++jv) {
            double v = dom.v_min() + dom.v_extent() * (wrap ? (double)jv / nv
                                                            : (double)jv / (nv - 1));
            Vec2d p{u, v};
            fv->f_jets(p, 0, f);
            out += "v " + fnum(f[0].value()) + " " + fnum(f[1].value()) + " " +
                   fnum(f[2].value()) + "\n";
            GaussianDensity gd = gaussian_density(view, p);
            out += "#attr lambda " + fnum(gd.lambda) + " Klambda " + fnum(gd.K_lambda) + "\n";
        }
    }
    auto vid = [&](int i, int jv) {
        if (wrap) { i %= nu; jv %= nv; }
        return i * nv + jv + 1;  // OBJ indices are 1-based
    };
    int iu_max = wrap ? nu : nu - 1;
    int jv_max = wrap ? nv : nv - 1;
    for (int i = 0; i < iu_max; ++i)
        for (int jv = 0; jv < jv_max; ++jv) {
            out += "f " + std::to_string(vid(i, jv)) + " " + std::to_string(vid(i + 1, jv)) +
                   " " + std::to_string(vid(i + 1, jv + 1)) + "\n";
            out += "f " + std::to_string(vid(i, jv)) + " " +
                   std::to_string(vid(i + 1, jv + 1)) + " " + std::to_string(vid(i, jv + 1)) +
                   "\n";
        }
    return out;
}

Triangle load_triangle(const std::string& json_text) {
    Json j = Json::parse(json_text);
    auto pt = [&](const char* key) -> Vec2d {
        if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
            throw std::invalid_argument(std::string("triangle file: missing or malformed \"") +
                                        key + "\" (expect [u, v])");
        return {j[key][0].get<double>(), j[key][1].get<double>()};
    };
    return Triangle{pt("A"), pt("B"), pt("C")};
}

}  // namespace frontlab
