#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fracsr::validation {

struct Budget {
    std::int64_t samples = 100'000;   // per Monte Carlo estimate
    std::uint64_t seed = 20240531;
    int workers = 1;
    double h = 1e-3;
};

// How measured, expected and tolerance combine into a verdict.
enum class Relation {
    AbsDiff,        // |measured - expected| <= tolerance
    AtMost,         // measured <= tolerance
    AtLeast,        // measured >= expected - tolerance
    True,           // measured != 0 (structural check; expected and tolerance unused)
};

struct Check {
    std::string criterion;   // "C1" .. "C12"
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    Relation relation = Relation::AbsDiff;
    bool pass = false;
    std::string note;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    bool passed() const;
    bool passed(const std::string& criterion) const;
};

const std::vector<std::string>& suite_names();
// Criteria covered by a suite, e.g. "identities" -> {C1, C2, C5}.
const std::vector<std::string>& suite_criteria(const std::string& suite);

// ParameterError on an unknown name.
SuiteResult run_suite(const std::string& suite, const Budget& budget);
SuiteResult run_criterion(const std::string& criterion, const Budget& budget);

std::string relation_name(Relation r);
// criterion, check, measured, expected, tolerance, relation, verdict, note
void write_suite_csv(const std::string& path, const SuiteResult& r);

}  // namespace fracsr::validation
