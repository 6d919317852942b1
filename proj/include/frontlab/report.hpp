#pragma once

#include <string>
#include <vector>

#include "frontlab/gallery.hpp"
#include "frontlab/integrate.hpp"
#include "frontlab/sectors.hpp"
#include "frontlab/singular.hpp"
#include "frontlab/surface.hpp"

namespace frontlab {

/// Knobs shared by the CLI commands; echoed verbatim into every JSON
/// report so identical configurations produce byte-identical output.
struct RunConfig {
    std::string input;        // file path or "gallery:<name>"
    double tol_nondeg = 1e-6;
    double tol_angle = 1e-6;
    int grid = 128;
    int refine = 0;
    std::string format = "json";  // "json" or "csv"
};

/// Singular-set analysis report: curves with per-sample kappa_s profiles,
/// special-point classifications, and sector decompositions at peaks.
std::string analyze_report_json(const BundleView& view, const SingularLocus& locus,
                                const RunConfig& cfg);

/// Global Gauss-Bonnet report (schema "frontlab-gb/1").
std::string gb_report_json(const BundleView& view, const GBReport& g, const RunConfig& cfg);

/// Local Gauss-Bonnet report for one triangle.
std::string local_gb_report_json(const BundleView& view, const Triangle& tri,
                                 const LocalGBReport& r, const RunConfig& cfg);

/// Combined gallery run report, entries in canonical order.
std::string gallery_report_json(const std::vector<GalleryReport>& reports);

/// One row per trace sample: t,u,v,lambda,eta_u,eta_v,d_lambda_eta,
/// kappa_s,dtau_dt. Curves are separated by "# curve <k>" comment lines.
std::string singular_curves_csv(const BundleView& view, const SingularLocus& locus);

/// Wavefront image mesh as Wavefront OBJ, nu x nv vertices; per-vertex
/// lambda and curvature density are attached as "#attr" comment lines.
/// Only frontal (extrinsic) surfaces have an image mesh.
std::string mesh_obj(const BundleView& view, int nu, int nv);

/// Reads a triangle {"A":[u,v],"B":[u,v],"C":[u,v]} from JSON text.
Triangle load_triangle(const std::string& json_text);

}  // namespace frontlab
