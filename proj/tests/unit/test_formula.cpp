#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wr/formula.hpp"

using namespace wr;

namespace {
const FieldSpec F5(5);

Poly pp(const std::string& s, const FieldSpec& f, u32 n) { return parse_poly(s, f, n); }
}  // namespace

TEST_CASE("formula for the squared quadratic") {
    RankOracle oracle;
    Poly Q = pp("x1*x2 + x3*x4", F5, 4);
    Decomposition d = weak_regular_decompose({Q * Q}, Rat(1, 2), oracle);
    SPSPFormula phi = build_spsp(d, 2);
    CHECK(phi.top_fanin() == 1);
    CHECK(phi.prod_fanin() == 2);
    CHECK(phi.bottom_degree() == 2);
    CHECK(equiv_check(phi, d.target));

    FaninReport rep = certify_fanin(phi, 1, 4, 2);
    CHECK(!rep.prod_fanin_exceeds_u);
    CHECK(rep.bottom_within);
    CHECK(rep.top_within);  // 1 <= 2 * 1^4
}

TEST_CASE("formula with two shared single-factor products") {
    Decomposition d;
    d.target = {pp("x1^2 + x2^2", F5, 2)};
    d.parts = {pp("x1^2", F5, 2), pp("x2^2", F5, 2)};
    d.outers = {pp("x1 + x2", F5, 2)};
    d.minimal = true;
    d.pruned = true;
    SPSPFormula phi = build_spsp(d, 1);
    CHECK(phi.top_fanin() == 2);
    CHECK(phi.prod_fanin() == 1);
    CHECK(phi.bottom_degree() == 2);
    CHECK(equiv_check(phi, d.target));
}

TEST_CASE("constants become an empty product") {
    Decomposition d;
    d.target = {pp("3", F5, 2)};
    d.outers = {Poly::constant(F5, 0, 3)};
    d.pruned = true;
    SPSPFormula phi = build_spsp(d, 1);
    CHECK(phi.top_fanin() == 1);
    CHECK(phi.products[0].empty());
    CHECK(equiv_check(phi, d.target));
}

TEST_CASE("the zero tuple yields the empty formula") {
    Decomposition d;
    d.target = {Poly::zero(F5, 2)};
    d.outers = {Poly::constant(F5, 0, 0)};
    d.pruned = true;
    SPSPFormula phi = build_spsp(d, 1);
    CHECK(phi.top_fanin() == 0);
    CHECK(equiv_check(phi, d.target));
    FaninReport rep = certify_fanin(phi, 1, 0, 1);
    CHECK(rep.top_fanin == 0);
}

TEST_CASE("a perturbed coefficient breaks equivalence") {
    RankOracle oracle;
    Poly Q = pp("x1*x2 + x3*x4", F5, 4);
    Decomposition d = weak_regular_decompose({Q * Q}, Rat(1, 2), oracle);
    SPSPFormula phi = build_spsp(d, 2);
    phi.coefficients[0][0] = F5.add(phi.coefficients[0][0], 1);
    CHECK(!equiv_check(phi, d.target));
}

TEST_CASE("sharing: components reuse the product list") {
    Decomposition d;
    d.target = {pp("x1^2 + x2^2", F5, 2), pp("2*x1^2", F5, 2)};
    d.parts = {pp("x1^2", F5, 2), pp("x2^2", F5, 2)};
    d.outers = {pp("x1 + x2", F5, 2), pp("2*x1", F5, 2)};
    d.pruned = true;
    SPSPFormula phi = build_spsp(d, 1);
    CHECK(phi.top_fanin() == 2);  // products shared, not duplicated
    CHECK(equiv_check(phi, d.target));
}

TEST_CASE("ungroupable factors raise the flag instead of failing") {
    Decomposition d;
    d.target = {pp("x1^2*x2^2", F5, 4)};
    d.parts = {pp("x1^2", F5, 4), pp("x2^2", F5, 4)};
    d.outers = {pp("x1*x2", F5, 2)};
    d.pruned = true;
    // u = 1 wants a single group of degree <= 4; two degree-2 factors fit
    SPSPFormula phi1 = build_spsp(d, 1);
    CHECK(phi1.prod_fanin() == 1);
    CHECK(equiv_check(phi1, d.target));
    // u = 2 caps groups at degree 2, so both factors stay separate
    SPSPFormula phi2 = build_spsp(d, 2);
    CHECK(phi2.prod_fanin() == 2);
    FaninReport rep = certify_fanin(phi2, 1, 4, 2);
    CHECK(!rep.prod_fanin_exceeds_u);
}

TEST_CASE("build_spsp requires pruned outer maps") {
    Decomposition d;
    d.target = {pp("x1", F5, 1)};
    d.parts = {pp("x1", F5, 1)};
    d.outers = {pp("x1", F5, 1)};
    d.pruned = false;
    CHECK_THROWS_AS(build_spsp(d, 1), Error);
}
