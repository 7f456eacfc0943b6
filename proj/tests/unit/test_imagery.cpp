#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wr/imagery.hpp"

using namespace wr;

namespace {
const FieldSpec F5(5);
const FieldSpec F3(3);

Poly pp(const std::string& s, const FieldSpec& f, u32 n) { return parse_poly(s, f, n); }
}  // namespace

TEST_CASE("image by enumeration") {
    PointSet s = image({pp("x1^2", F5, 1)});
    CHECK(s.points == std::set<std::vector<u32>>{{0}, {1}, {4}});
    CHECK(image({pp("x1", F5, 1)}).points.size() == 5);
    CHECK(image({pp("3", F5, 2)}).points == std::set<std::vector<u32>>{{3}});
}

TEST_CASE("contains_line finds an axis line") {
    PointSet s;
    s.m = 2;
    for (u32 t = 0; t < 5; ++t) s.points.insert({t, 0});
    auto l = contains_line(s, F5);
    REQUIRE(l.has_value());
    CHECK(l->direction == std::vector<u32>{1, 0});
    CHECK(l->offset == std::vector<u32>{0, 0});
}

TEST_CASE("contains_line on sparse sets") {
    PointSet squares;
    squares.m = 1;
    squares.points = {{0}, {1}, {4}};
    CHECK(!contains_line(squares, F5).has_value());

    // the parabola graph has 5 points but no line
    PointSet parabola = image({pp("x1^2", F5, 1), pp("x1", F5, 1)});
    CHECK(parabola.points.size() == 5);
    CHECK(!contains_line(parabola, F5).has_value());
}

TEST_CASE("udeg ground truths over F_5") {
    UdegResult a = udeg({pp("x1^2", F5, 1)});
    CHECK(!a.infinite);
    CHECK(a.u == 2);
    REQUIRE(a.witness.has_value());
    CHECK(a.witness->degree() == 2);

    UdegResult b = udeg({pp("x1", F5, 1)});
    CHECK(b.u == 1);

    UdegResult c = udeg({pp("x1^4", F5, 1)});
    CHECK(c.u == 4);

    UdegResult k = udeg({pp("2", F5, 1)});
    CHECK(k.infinite);
}

TEST_CASE("udeg witness image containment") {
    PolyTuple P{pp("x1^2", F5, 2), pp("x1", F5, 2)};
    UdegResult r = udeg(P);
    REQUIRE(r.witness.has_value());
    PointSet img = image(P);
    for (u32 t = 0; t < 5; ++t) CHECK(img.contains(r.witness->at(t)));
    CHECK(r.witness->nonconstant());
}

TEST_CASE("udeg is one exactly when the image holds a line") {
    PolyTuple P{pp("x1", F3, 2), pp("x2", F3, 2)};
    CHECK(udeg(P).u == 1);
    PointSet img = image(P);
    CHECK(contains_line(img, F3).has_value());

    PolyTuple Q{pp("x1^2", F5, 1)};
    CHECK(udeg(Q).u >= 2);
    CHECK(!contains_line(image(Q), F5).has_value());
}

TEST_CASE("udeg of affine shifts is invariant") {
    UdegResult base = udeg({pp("x1^2", F5, 2)});
    UdegResult shifted = udeg({pp("2*x1^2 + 3", F5, 2)});
    CHECK(base.u == shifted.u);
}

TEST_CASE("sz witness on a surjective linear") {
    SzWitnessResult w = sz_witness(pp("x1", F5, 1), pp("x1", F5, 1), {pp("x1", F5, 1)});
    CHECK(w.point.size() == 1);
    CHECK(w.point[0] != 0);
    CHECK(w.hits == 1);
    CHECK(w.nonroots == 4);
}

TEST_CASE("sz witness on the squared quadratic") {
    Poly Q = pp("x1*x2 + x3*x4", F5, 4);
    SzWitnessResult w = sz_witness(Q * Q, pp("x1^2", F5, 1), {Q});
    // fibers of Q have sizes 145 (at 0) and 120; the best nonroot of y^2
    CHECK(w.hits == 120);
    CHECK(w.nonroots == 4);
}

TEST_CASE("sz witness rejects the zero polynomial") {
    CHECK_THROWS_AS(sz_witness(Poly::zero(F5, 1), pp("x1", F5, 1), {pp("x1", F5, 1)}), Error);
}

TEST_CASE("extract_curve on the certified square") {
    RankOracle oracle;
    Poly Q = pp("x1*x2 + x3*x4", F5, 4);
    Decomposition d = weak_regular_decompose({Q * Q}, Rat(1, 2), oracle);
    CurveExtraction ce = extract_curve(d);
    CHECK(ce.curve.coords.size() == 1);
    CHECK(ce.curve.degree() == 2);
    CHECK(ce.curve.nonconstant());
    // degree chain: deg(curve) * deg(X) <= d
    CHECK(ce.curve.degree() * tuple_degree(d.parts) <= tuple_degree(d.target));
    // independent brute force agrees
    UdegResult u = udeg(d.target);
    CHECK(u.u == 2);
    CHECK(tuple_degree(d.parts) * u.u <= tuple_degree(d.target));
}

TEST_CASE("extract_curve on a linear target") {
    RankOracle oracle;
    Decomposition d = weak_regular_decompose({pp("x1", F5, 2)}, Rat(1, 2), oracle);
    CurveExtraction ce = extract_curve(d);
    CHECK(ce.curve.degree() == 1);
}

TEST_CASE("extract_curve on a two-component map") {
    RankOracle oracle;
    PolyTuple P{pp("x1^2 + x2^2", F5, 4), pp("x1^2", F5, 4)};
    Decomposition d = weak_regular_decompose(P, Rat(1, 2), oracle);
    CurveExtraction ce = extract_curve(d);
    CHECK(ce.curve.coords.size() == 2);
    CHECK(ce.curve.nonconstant());
    PointSet img = image(P);
    for (u32 t = 0; t < 5; ++t) CHECK(img.contains(ce.curve.at(t)));
}

TEST_CASE("extract_curve needs a certified decomposition") {
    Decomposition d;
    d.target = {pp("x1", F5, 1)};
    d.parts = {pp("x1", F5, 1)};
    d.outers = {pp("x1", F5, 1)};
    CHECK_THROWS_AS(extract_curve(d), Error);  // no defect certificate
}

TEST_CASE("udeg of powers is at most the exponent") {
    Poly Q = pp("x1 + x2^2", F5, 2);  // surjective
    UdegResult r2 = udeg({Q * Q});
    CHECK(r2.u <= 2);
    CHECK(r2.u == 2);  // squares of surjective maps hit exactly the square set
}
