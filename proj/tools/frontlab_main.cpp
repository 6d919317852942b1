#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "frontlab/report.hpp"

using namespace frontlab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitInput = 1;
constexpr int kExitTheorem = 2;
constexpr int kExitHypothesis = 3;

class InputError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::shared_ptr<BundleView> resolve_input(const std::string& input) {
    try {
        if (input.rfind("gallery:", 0) == 0)
            return make_view(load_spec(gallery_spec(input.substr(8))));
        return make_view(load_spec_file(input));
    } catch (const UnknownEntry& e) {
        throw InputError(e.what());
    } catch (const std::exception& e) {
        throw InputError(std::string("failed to load ") + input + ": " + e.what());
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + out_path);
    out << text;
}

TraceOptions trace_options(const RunConfig& cfg) {
    TraceOptions t;
    t.tol_nondeg_rel = cfg.tol_nondeg;
    t.seed_grid = std::max(64, cfg.grid / 2) << cfg.refine;
    return t;
}

int effective_grid(const RunConfig& cfg) { return cfg.grid << cfg.refine; }

int cmd_analyze(const RunConfig& cfg, const std::string& out_path) {
    auto view = resolve_input(cfg.input);
    SingularLocus locus = trace_singular_set(*view, trace_options(cfg));
    if (cfg.format == "csv")
        emit(singular_curves_csv(*view, locus), out_path);
    else
        emit(analyze_report_json(*view, locus, cfg), out_path);
    for (const auto& p : locus.points)
        if (p.verdict == Verdict::Unclassified) return kExitHypothesis;
    return kExitPass;
}

int cmd_gb(const RunConfig& cfg, bool global, const std::string& tri_path,
           const std::string& out_path) {
    auto view = resolve_input(cfg.input);
    if (global) {
        GBReport g = verify_global_GB(*view, effective_grid(cfg), trace_options(cfg));
        emit(gb_report_json(*view, g, cfg), out_path);
        return g.pass ? kExitPass : kExitTheorem;
    }
    Triangle tri;
    try {
        tri = load_triangle(read_file(tri_path));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("bad triangle file ") + tri_path + ": " + e.what());
    }
    SingularLocus locus = trace_singular_set(*view, trace_options(cfg));
    LocalGBReport r = verify_local_GB(*view, tri, locus);
    emit(local_gb_report_json(*view, tri, r, cfg), out_path);
    bool pass = std::abs(r.residual) <= std::max(1e-4, 10 * r.error_estimate);
    return pass ? kExitPass : kExitTheorem;
}

int cmd_export(const RunConfig& cfg, const std::string& what, const std::string& out_path) {
    auto view = resolve_input(cfg.input);
    if (what == "mesh") {
        emit(mesh_obj(*view, cfg.grid, cfg.grid), out_path);
    } else if (what == "singular-curves") {
        SingularLocus locus = trace_singular_set(*view, trace_options(cfg));
        emit(singular_curves_csv(*view, locus), out_path);
    } else if (what == "report") {
        SingularLocus locus = trace_singular_set(*view, trace_options(cfg));
        emit(analyze_report_json(*view, locus, cfg), out_path);
    } else {
        throw InputError("unknown export target '" + what +
                         "' (expected mesh, singular-curves, or report)");
    }
    return kExitPass;
}

int cmd_gallery(const std::string& name, bool list, const std::string& spec_of,
                const std::string& out_path) {
    if (list) {
        std::string text;
        for (const auto& n : gallery_list()) text += n + "\n";
        emit(text, out_path);
        return kExitPass;
    }
    if (!spec_of.empty()) {
        try {
            emit(gallery_spec(spec_of), out_path);
        } catch (const UnknownEntry& e) {
            throw InputError(e.what());
        }
        return kExitPass;
    }
    std::vector<GalleryReport> reports;
    if (name.empty()) {
        reports = gallery_run_all();
    } else {
        try {
            reports.push_back(gallery_run(name));
        } catch (const UnknownEntry& e) {
            throw InputError(e.what());
        }
    }
    emit(gallery_report_json(reports), out_path);
    for (const auto& r : reports)
        if (!r.all_passed()) return kExitTheorem;
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frontlab: wave fronts, coherent tangent bundles, and their singular "
                 "curvature"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out_path, export_what, gallery_name, gallery_spec_of, tri_path;
    bool gb_global = false, gallery_list_flag = false;

    auto add_common = [&](CLI::App* c, bool needs_input) {
        if (needs_input)
            c->add_option("input", cfg.input, "surface spec file or gallery:<name>")
                ->required();
        c->add_option("--tol-nondeg", cfg.tol_nondeg, "non-degeneracy tolerance");
        c->add_option("--tol-angle", cfg.tol_angle, "sector angle tolerance");
        c->add_option("--grid", cfg.grid, "grid resolution");
        c->add_option("--refine", cfg.refine, "halve cell size k times")
            ->check(CLI::Range(0, 8));
        c->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
        c->add_option("-o,--output", out_path, "write output to file instead of stdout");
    };

    auto* analyze = app.add_subcommand(
        "analyze", "trace the singular set, classify its points, profile kappa_s");
    add_common(analyze, true);

    auto* gb = app.add_subcommand("gb", "verify the Gauss-Bonnet identities");
    add_common(gb, true);
    auto* gopt = gb->add_flag("--global", gb_global, "global identities on a compact domain");
    auto* lopt = gb->add_option("--local", tri_path, "local identity on a triangle (JSON file)");
    gopt->excludes(lopt);

    auto* exp = app.add_subcommand("export", "export mesh (OBJ), singular curves (CSV), or "
                                             "analysis report (JSON)");
    exp->add_option("what", export_what, "mesh | singular-curves | report")->required();
    add_common(exp, true);

    auto* gal = app.add_subcommand("gallery", "run the example gallery");
    gal->add_option("name", gallery_name, "run a single entry (default: all)");
    gal->add_flag("--list", gallery_list_flag, "list entry names");
    gal->add_option("--spec", gallery_spec_of, "print the spec file of an entry");
    gal->add_option("-o,--output", out_path, "write output to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitInput;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(cfg, out_path);
        if (gb->parsed()) {
            if (!gb_global && tri_path.empty())
                throw InputError("gb needs --global or --local <triangle.json>");
            return cmd_gb(cfg, gb_global, tri_path, out_path);
        }
        if (exp->parsed()) return cmd_export(cfg, export_what, out_path);
        if (gal->parsed())
            return cmd_gallery(gallery_name, gallery_list_flag, gallery_spec_of, out_path);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return kExitHypothesis;
    } catch (const RankZero& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return kExitHypothesis;
    } catch (const TheoremAViolation& e) {
        std::cerr << "theorem check failed: " << e.what() << "\n";
        return kExitTheorem;
    } catch (const ErrorBudgetExceeded& e) {
        std::cerr << "theorem check failed: " << e.what() << "\n";
        return kExitTheorem;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
