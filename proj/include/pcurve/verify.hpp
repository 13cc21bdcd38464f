#ifndef PCURVE_VERIFY_HPP
#define PCURVE_VERIFY_HPP

#include <string>
#include <vector>

#include "pcurve/construction.hpp"

namespace pcurve {

/// One verification record. `margin` is the certified room left before the
/// check would fail (negative means violated); identity-style checks report
/// tolerance minus observed deviation.
struct CheckRecord {
    std::string id;
    long samples = 0;
    Rat margin;
    std::string status;  // "pass" | "fail" | "skipped-absent"
    std::string witness;
};

struct VerificationReport {
    std::string suite;
    unsigned long long seed = 1;
    long sample_budget = 0;
    std::vector<CheckRecord> records;
    bool overall_pass() const {
        for (const auto& r : records)
            if (r.status == "fail") return false;
        return !records.empty();
    }
};

/// Run one of the named suites: construction | curve | dynamics | metrics |
/// all. Deterministic for a fixed state, seed and budget.
VerificationReport verify_suite(const ConstructionState& state, const std::string& suite,
                                long sample_budget, unsigned long long seed = 1);

void save_report(const VerificationReport& report, const std::string& path);

}  // namespace pcurve

#endif
