#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wr/regularize.hpp"

using namespace wr;

namespace {
const FieldSpec F5(5);
const FieldSpec F3(3);

Poly pp(const std::string& s, const FieldSpec& f, u32 n) { return parse_poly(s, f, n); }

// Minimality re-check: every homogeneous hyperplane of Span(X) must fail the
// fiber test for some component.
bool minimality_holds(const Decomposition& d) {
    if (d.parts.empty()) return true;
    FormSpace V = span_basis(d.parts);
    const FieldSpec& f = V.field();
    for (u32 drop_deg : V.degrees()) {
        // hyperplanes: replace the degree block by each of its hyperplanes
        std::vector<Poly> block = V.degree_basis(drop_deg);
        u32 bd = u32(block.size());
        // hyperplanes of the block as kernels of nonzero functionals
        for (ProjectiveIter functional(f, bd); !functional.done(); functional.next()) {
            // basis of the kernel of <functional, .>
            std::vector<Poly> hyp;
            for (u32 e : V.degrees())
                if (e != drop_deg)
                    for (const Poly& q : V.degree_basis(e)) hyp.push_back(q);
            // kernel vectors: complete a basis of the orthogonal complement
            u32 pivot = 0;
            while ((*functional)[pivot] == 0) ++pivot;
            for (u32 i = 0; i < bd; ++i) {
                if (i == pivot) continue;
                // e_i - (f_i / f_pivot) e_pivot lies in the kernel
                u32 c = f.mul((*functional)[i], f.inv((*functional)[pivot]));
                Poly q = block[i] - block[pivot].scaled(c);
                if (!q.is_zero()) hyp.push_back(q);
            }
            bool all_pass = true;
            for (const Poly& comp : d.target)
                if (!member_fiber_test(comp, hyp)) { all_pass = false; break; }
            if (all_pass) return false;  // a strict subspace still generates P
        }
    }
    return true;
}
}  // namespace

TEST_CASE("refine_step opens rank-one blocks into their factors") {
    RankOracle oracle;
    PolyTuple X{pp("x1*x2", F3, 4), pp("x3*x4", F3, 4)};
    RefineResult r = refine_step(X, Rat(1), oracle);
    CHECK(r.refined.size() == 4);
    CHECK(tuple_degree(r.refined) == 1);
    CHECK(r.low_rank_basis.size() == 2);
    CHECK(r.map_on_basis.size() == 2);
    // contract: |Y| <= 2 t |X|^2
    CHECK(r.refined.size() <= 2 * 1 * 2 * 2);
}

TEST_CASE("refine_step on a mixed regular/irregular pair") {
    RankOracle oracle;
    PolyTuple X{pp("x1*x2 + x3*x4", F3, 4), pp("x1*x2", F3, 4)};
    RefineResult r = refine_step(X, Rat(2), oracle);
    CHECK(tuple_degree(r.refined) == 1);
    CHECK(r.refined.size() <= 16);
}

TEST_CASE("refine_step rejects unequal degrees and regular tuples") {
    RankOracle oracle;
    CHECK_THROWS_AS(refine_step({pp("x1*x2", F3, 4), pp("x3", F3, 4)}, Rat(1), oracle), Error);
    // a single hyperbolic quadratic is 1-rank-regular (rank 2 >= 1)
    CHECK_THROWS_AS(refine_step({pp("x1*x2 + x3*x4", F5, 4)}, Rat(1), oracle), Error);
}

TEST_CASE("rank_regularize on the squared quadratic") {
    RankOracle oracle;
    Poly Q = pp("x1*x2 + x3*x4", F5, 4);
    Decomposition d = rank_regularize({Q * Q}, Rat(2), oracle);
    REQUIRE(d.parts.size() == 1);
    CHECK(d.parts[0] == Q);
    CHECK(d.outers[0] == pp("x1^2", F5, 1));
    CHECK(d.minimal);
    CHECK(d.pruned);
    CHECK(d.provenance.size() == 1);
    CHECK(minimality_holds(d));
}

TEST_CASE("rank_regularize leaves linear targets alone") {
    RankOracle oracle;
    Decomposition d = rank_regularize({pp("x1", F5, 2)}, Rat(3), oracle);
    REQUIRE(d.parts.size() == 1);
    CHECK(d.parts[0] == pp("x1", F5, 2));
    CHECK(d.provenance.empty());
}

TEST_CASE("rank_regularize splits a product under a high threshold") {
    RankOracle oracle;
    Decomposition d = rank_regularize({pp("x1*x2", F5, 2)}, Rat(3), oracle);
    CHECK(d.parts.size() == 2);
    CHECK(tuple_degree(d.parts) == 1);
    // outer map composes back to the product
    CHECK(compose(d.outers[0], d.parts) == pp("x1*x2", F5, 2));
    CHECK(d.provenance.size() == 1);
    CHECK(d.provenance.size() <= 2);  // within deg(P) rounds
}

TEST_CASE("rank_regularize handles constants") {
    RankOracle oracle;
    Decomposition d = rank_regularize({pp("3", F5, 2)}, Rat(1), oracle);
    CHECK(d.parts.empty());
    CHECK(d.defect == Rat(0));
}

TEST_CASE("rank_regularize refuses degrees at or above p") {
    RankOracle oracle;
    CHECK_THROWS_AS(rank_regularize({pp("x1^2*x2", F3, 2)}, Rat(1), oracle), Error);
}

TEST_CASE("weak pipeline certifies the rank-two quadratic over F_3") {
    RankOracle oracle;
    Poly Q = pp("x1*x2 + x3*x4", F3, 4);
    Decomposition d = weak_regular_decompose({Q}, Rat(1, 3), oracle);
    REQUIRE(d.parts.size() == 1);
    CHECK(d.parts[0] == Q);
    REQUIRE(d.defect.has_value());
    // counted by hand from the value distribution (33, 24, 24) over 81
    CHECK(*d.defect == Rat(2, 9));
    CHECK(d.escalations == 0);
    CHECK(minimality_holds(d));
}

TEST_CASE("weak pipeline on independent coordinates has defect zero") {
    RankOracle oracle;
    Decomposition d = weak_regular_decompose({pp("x1", F3, 2), pp("x2", F3, 2)},
                                             Rat(1, 100), oracle);
    CHECK(d.parts.size() == 2);
    CHECK(*d.defect == Rat(0));
    CHECK(tuple_degree(d.parts) == 1);
    // first part has maximal degree by construction
    CHECK(d.parts[0].degree() == tuple_degree(d.parts));
}

TEST_CASE("weak pipeline escalates past the biased square") {
    RankOracle oracle;
    Poly Q = pp("x1*x2 + x3*x4", F5, 4);
    Decomposition d = weak_regular_decompose({Q * Q}, Rat(1, 2), oracle);
    REQUIRE(d.parts.size() == 1);
    CHECK(d.parts[0] == Q);
    CHECK(d.outers[0] == pp("x1^2", F5, 1));
    CHECK(*d.defect == Rat(4, 25));
    CHECK(d.escalations == 1);  // t = 1 fails on bias, t = 2 certifies
    CHECK(d.pruned);
    CHECK(minimality_holds(d));
}

TEST_CASE("weak pipeline enforces the outer degree budget") {
    RankOracle oracle;
    // x1^3 + x1 is a function of the bijection x1^3, but only through outer
    // maps of excessive first-variable degree; t = 1 must be rejected.
    Poly P = pp("x1^3 + x1", F5, 1);
    WeakRegularConfig cfg;
    cfg.max_escalations = 0;
    CHECK_THROWS_AS(weak_regular_decompose({P}, Rat(1, 2), oracle, cfg), Error);
    // with escalations allowed it lands on the variable itself
    Decomposition d = weak_regular_decompose({P}, Rat(1, 2), oracle);
    REQUIRE(d.parts.size() == 1);
    CHECK(d.parts[0] == pp("x1", F5, 1));
    CHECK(tuple_degree(d.parts) == 1);
    CHECK(d.pruned);
}

TEST_CASE("weak pipeline rejects bad epsilon") {
    RankOracle oracle;
    CHECK_THROWS_AS(weak_regular_decompose({pp("x1", F3, 1)}, Rat(0), oracle), Error);
    CHECK_THROWS_AS(weak_regular_decompose({pp("x1", F3, 1)}, Rat(3, 2), oracle), Error);
}

TEST_CASE("composition soundness holds pointwise on a multi-component run") {
    RankOracle oracle;
    PolyTuple P{pp("x1^2 + x2^2", F5, 4), pp("x1^2", F5, 4)};
    Decomposition d = weak_regular_decompose(P, Rat(1, 2), oracle);
    for (std::size_t i = 0; i < P.size(); ++i) {
        Poly back = compose(d.outers[i], d.parts);
        for (PointIter it(F5, 4); !it.done(); it.next())
            CHECK(back.eval(*it) == P[i].eval(*it));
    }
    REQUIRE(d.defect.has_value());
    CHECK(*d.defect <= Rat(1, 2));
    CHECK(d.parts[0].degree() == tuple_degree(d.parts));
    CHECK(minimality_holds(d));
}

TEST_CASE("size bound monitor") {
    CHECK(size_within_theorem_bound(4, Rat(1), 2, 1));    // 4 <= (3*2)^4
    CHECK(size_within_theorem_bound(1, Rat(2), 4, 1));
    CHECK(!size_within_theorem_bound(2000, Rat(0), 1, 1));  // (1*1*1)^2 = 1
}
