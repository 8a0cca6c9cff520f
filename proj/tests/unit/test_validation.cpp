#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracsr/errors.hpp"
#include "fracsr/validation.hpp"

using namespace fracsr;
using namespace fracsr::validation;

TEST_CASE("suite registry") {
    CHECK(suite_names().size() == 5);
    std::size_t total = 0;
    for (const auto& s : suite_names()) total += suite_criteria(s).size();
    CHECK(total == 12);
    CHECK_THROWS_AS(suite_criteria("nope"), ParameterError);
    CHECK_THROWS_AS(run_suite("nope", {}), ParameterError);
    CHECK_THROWS_AS(run_criterion("C13", {}), ParameterError);
}

TEST_CASE("specfun suite passes and every check is tagged C11") {
    const auto r = run_suite("specfun", {});
    CHECK(r.passed());
    CHECK(r.passed("C11"));
    CHECK(!r.passed("C1"));   // no checks for it here
    for (const auto& c : r.checks) CHECK(c.criterion == "C11");
}

TEST_CASE("small-budget identity checks run and report tolerances") {
    Budget b;
    b.samples = 4000;
    const auto r = run_criterion("C2", b);
    bool saw_c2 = false;
    for (const auto& c : r.checks) {
        saw_c2 = saw_c2 || c.criterion == "C2";
        CHECK(c.tolerance > 0.0);
    }
    CHECK(saw_c2);
    b.samples = 0;
    CHECK_THROWS_AS(run_criterion("C1", b), ParameterError);
}

TEST_CASE("suite CSV quotes free text") {
    SuiteResult r;
    r.suite = "x";
    Check c;
    c.criterion = "C9";
    c.name = "a, b";
    c.note = "say \"hi\"";
    c.pass = true;
    r.checks.push_back(c);
    const std::string path = (std::filesystem::temp_directory_path() / "fracsr_quote.csv").string();
    write_suite_csv(path, r);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("C9,\"a, b\",0,0,0,abs_diff_le_tol,PASS,\"say \"\"hi\"\"\"") != std::string::npos);
}
