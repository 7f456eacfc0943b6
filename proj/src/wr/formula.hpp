#pragma once

#include "wr/regularize.hpp"

namespace wr {

// Depth-4 sum(products of bottom polynomials) formula with its fan-in
// certificate. Component i evaluates to
// sum_j coefficients[i][j] * prod(products[j]); an empty product is 1.
struct SPSPFormula {
    FieldSpec field;
    u32 nvars = 0;
    u32 source_parts = 0;  // |X| of the decomposition it was built from
    std::vector<std::vector<Poly>> products;
    std::vector<std::vector<u32>> coefficients;

    u32 top_fanin() const { return u32(products.size()); }
    u32 prod_fanin() const;   // max factors in a product
    u32 bottom_degree() const;

    std::vector<u32> eval(const std::vector<u32>& point) const;
};

// One product term per outer-map monomial (shared across components); the
// X-factors are packed greedily (first-fit, descending degree) into groups of
// degree at most ceil(d/u), each multiplied into a single bottom polynomial.
// Requires pruned outer maps and deg(X) <= ceil(d/u).
SPSPFormula build_spsp(const Decomposition& D, u32 u);

// Exhaustive pointwise equality against the tuple.
bool equiv_check(const SPSPFormula& phi, const PolyTuple& P);

struct FaninReport {
    u32 top_fanin = 0, prod_fanin = 0, bottom_deg = 0;
    u32 u_target = 0, b_target = 0;
    bool prod_fanin_exceeds_u = false;
    bool bottom_within = false;
    // r <= sum_{i=0}^{d} k^i; for k >= 2 this implies the displayed 2 k^d,
    // while for k = 1 the geometric sum d+1 is the correct bound.
    bool top_within = false;
    double top_bound_sum = 0;      // sum_{i=0}^{d} k^i
    double top_bound = 0;          // 2 k^d, shown for comparison
    std::string context;           // the asymptotic f(m,d) shape, reporting only
};

FaninReport certify_fanin(const SPSPFormula& phi, u32 m, u32 d, u32 u);

}  // namespace wr
