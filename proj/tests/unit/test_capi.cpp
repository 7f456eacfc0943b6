// Exercises the shared-library surface the CLI uses: opaque handles, error
// codes, result accessors.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "weakreg.h"

namespace {
const char* kProblem =
    "field 5\n"
    "vars x1 x2 x3 x4\n"
    "poly P = x1^2*x2^2 + 2*x1*x2*x3*x4 + x3^2*x4^2\n";
}

TEST_CASE("version is exposed") {
    CHECK(wr_version() != nullptr);
    CHECK(std::strlen(wr_version()) > 0);
}

TEST_CASE("problem lifecycle and accessors") {
    wr_problem* p = nullptr;
    REQUIRE(wr_problem_parse(kProblem, &p) == WR_OK);
    CHECK(wr_problem_field(p) == 5);
    CHECK(wr_problem_nvars(p) == 4);
    CHECK(wr_problem_npolys(p) == 1);
    CHECK(std::string(wr_problem_poly_name(p, 0)) == "P");
    CHECK(wr_problem_poly_name(p, 1) == nullptr);
    wr_problem_free(p);
}

TEST_CASE("parse errors surface through status and message") {
    wr_problem* p = nullptr;
    CHECK(wr_problem_parse("field 4\nvars x1\npoly P = x1\n", &p) != WR_OK);
    CHECK(p == nullptr);
    CHECK(std::strlen(wr_last_error()) > 0);
}

TEST_CASE("run and verify through the C surface") {
    wr_problem* p = nullptr;
    REQUIRE(wr_problem_parse(kProblem, &p) == WR_OK);

    wr_result* r = nullptr;
    REQUIRE(wr_run(p, "regularize", "eps=1/2", &r) == WR_OK);
    CHECK(wr_result_exit_code(r) == 0);
    CHECK(wr_result_error(r) == nullptr);
    REQUIRE(wr_result_json(r) != nullptr);
    std::string cert = wr_result_json(r);
    CHECK(std::string(wr_result_text(r)).find("defect") != std::string::npos);

    wr_result* v = nullptr;
    REQUIRE(wr_verify(cert.c_str(), &v) == WR_OK);
    CHECK(wr_result_exit_code(v) == 0);
    wr_result_free(v);

    // determinism through this surface too
    wr_result* r2 = nullptr;
    REQUIRE(wr_run(p, "regularize", "eps=1/2", &r2) == WR_OK);
    CHECK(cert == wr_result_json(r2));
    wr_result_free(r2);

    wr_result_free(r);
    wr_problem_free(p);
}

TEST_CASE("usage errors inside results") {
    wr_problem* p = nullptr;
    REQUIRE(wr_problem_parse(kProblem, &p) == WR_OK);
    wr_result* r = nullptr;
    REQUIRE(wr_run(p, "regularize", "", &r) == WR_OK);  // epsilon missing
    CHECK(wr_result_exit_code(r) == 1);
    REQUIRE(wr_result_error(r) != nullptr);
    CHECK(std::string(wr_result_error(r)) == "InvalidArgument");
    wr_result_free(r);

    wr_result* bad = nullptr;
    REQUIRE(wr_run(p, "no-such-command", "", &bad) == WR_OK);
    CHECK(wr_result_exit_code(bad) == 1);
    wr_result_free(bad);
    wr_problem_free(p);
}

TEST_CASE("verify rejects garbage") {
    wr_result* v = nullptr;
    REQUIRE(wr_verify("{not json", &v) == WR_OK);
    CHECK(wr_result_exit_code(v) == 1);
    wr_result_free(v);
}
