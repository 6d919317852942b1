#include "doctest.h"

#include <set>

#include "frontlab/gallery.hpp"
#include "frontlab/surface.hpp"

using namespace frontlab;

TEST_CASE("gallery lists ten entries with unique names") {
    auto names = gallery_list();
    CHECK(names.size() == 10);
    std::set<std::string> uniq(names.begin(), names.end());
    CHECK(uniq.size() == names.size());
    CHECK(uniq.count("cuspidal-edge") == 1);
    CHECK(uniq.count("swallowtail") == 1);
    CHECK(uniq.count("torus-immersed") == 1);
    CHECK(uniq.count("wavy-parallel-torus") == 1);
}

TEST_CASE("gallery specs parse and round-trip through the loader") {
    for (const auto& name : gallery_list()) {
        CAPTURE(name);
        SurfaceSpec spec = load_spec(gallery_spec(name));
        const auto& fs = std::get<FrontalSurface>(spec);
        CHECK(fs.name == name);
        auto view = make_view(spec);
        CHECK(view != nullptr);
        // re-serialized spec must load to the same surface name
        CHECK(std::get<FrontalSurface>(load_spec(write_spec(spec))).name == name);
    }
}

TEST_CASE("unknown entry name throws") {
    CHECK_THROWS_AS(gallery_spec("no-such-surface"), UnknownEntry);
    CHECK_THROWS_AS(gallery_run("no-such-surface"), UnknownEntry);
}

TEST_CASE("local chart entries pass all expectations") {
    for (const char* name : {"cuspidal-edge", "swallowtail", "cuspidal-crosscap",
                             "double-swallowtail", "cuspidal-lips", "scherbak",
                             "tangent-developable-345"}) {
        CAPTURE(name);
        GalleryReport rep = gallery_run(name);
        CHECK(rep.name == name);
        CHECK(!rep.results.empty());
        for (const auto& r : rep.results) {
            CAPTURE(r.label);
            CAPTURE(r.observed);
            CHECK(r.passed);
        }
    }
}

TEST_CASE("compact entries pass all expectations") {
    for (const char* name : {"torus-immersed", "parallel-torus", "wavy-parallel-torus"}) {
        CAPTURE(name);
        GalleryReport rep = gallery_run(name);
        for (const auto& r : rep.results) {
            CAPTURE(r.label);
            CAPTURE(r.observed);
            CHECK(r.passed);
        }
        CHECK(rep.all_passed());
        for (const auto& r : rep.results) {
            std::string p = provenance_name(r.provenance);
            CHECK((p == "reference" || p == "trivial" || p == "derived"));
        }
    }
}
