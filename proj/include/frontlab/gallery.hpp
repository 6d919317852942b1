#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace frontlab {

/// Where an expectation's "right answer" comes from: a documented fact
/// about the example (Reference), an immediate consequence of the
/// construction (Trivial), or a value our own machinery must reproduce
/// consistently, e.g. a theorem used as an oracle (Derived).
enum class Provenance { Reference, Trivial, Derived };

const char* provenance_name(Provenance p);

class UnknownEntry : public std::runtime_error {
public:
    explicit UnknownEntry(const std::string& name)
        : std::runtime_error("unknown gallery entry \"" + name + "\""), name(name) {}
    std::string name;
};

/// A single checked predicate failed; `observed` describes what the
/// machinery actually produced.
class ExpectationFailed : public std::runtime_error {
public:
    ExpectationFailed(const std::string& entry, const std::string& predicate,
                      const std::string& observed)
        : std::runtime_error(entry + ": " + predicate + " — observed " + observed),
          entry(entry),
          predicate(predicate),
          observed(observed) {}
    std::string entry;
    std::string predicate;
    std::string observed;
};

struct ExpectationResult {
    std::string label;
    Provenance provenance = Provenance::Derived;
    bool passed = false;
    std::string observed;  // empty when passed
};

struct GalleryReport {
    std::string name;
    std::vector<ExpectationResult> results;
    bool all_passed() const {
        for (const auto& r : results)
            if (!r.passed) return false;
        return true;
    }
};

/// Entry names in their canonical order.
std::vector<std::string> gallery_list();

/// The spec-file text of one entry (parseable by load_spec, exportable
/// verbatim). Throws UnknownEntry.
std::string gallery_spec(const std::string& name);

/// Run every expectation of one entry. Machinery errors (exceptions from
/// the pipeline) are recorded as failed expectations, not rethrown.
GalleryReport gallery_run(const std::string& name);

/// Run all entries (in parallel) and report in canonical order.
std::vector<GalleryReport> gallery_run_all();

}  // namespace frontlab
