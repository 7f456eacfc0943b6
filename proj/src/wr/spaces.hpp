#pragma once

#include <functional>
#include <map>

#include "wr/linalg.hpp"

namespace wr {

// Homogeneous linear space of forms. The basis is canonical: grouped by
// degree (descending), each degree block in reduced row echelon form over the
// grlex monomial coordinates, so equal spaces produce identical bases.
class FormSpace {
public:
    FormSpace() = default;
    FormSpace(FieldSpec f, u32 nvars) : field_(f), nvars_(nvars) {}

    const FieldSpec& field() const { return field_; }
    u32 nvars() const { return nvars_; }
    u32 dim() const { return u32(basis_.size()); }
    bool empty() const { return basis_.empty(); }
    u32 degree() const;  // max basis degree; 0 for the zero space
    const std::vector<Poly>& basis() const { return basis_; }
    std::vector<u32> degrees() const;  // distinct degrees, ascending
    std::vector<Poly> degree_basis(u32 e) const;

    FormSpace top_component() const;       // V-up-arrow
    FormSpace degree_component(u32 e) const;

    bool contains(const Poly& q) const;
    Poly element(const std::vector<u32>& coeffs) const;  // sum c_i * basis_i

    // Coordinates of q in this basis, or nullopt when q is outside the space.
    std::optional<std::vector<u32>> coordinates(const Poly& q) const;

    bool same_space(const FormSpace& o) const;

    friend FormSpace span_basis(const std::vector<Poly>& forms);
    friend FormSpace span_basis(const std::vector<Poly>& forms, FieldSpec f, u32 nvars);

private:
    FieldSpec field_;
    u32 nvars_ = 0;
    std::vector<Poly> basis_;
};

// Canonical reduced basis of the span of the given forms. Inputs must be
// forms (homogeneous, positive degree); mixed degrees are fine since the span
// of forms is the direct sum of its per-degree pieces.
FormSpace span_basis(const std::vector<Poly>& forms);
FormSpace span_basis(const std::vector<Poly>& forms, FieldSpec f, u32 nvars);

// Iterates coefficient vectors of the nonzero elements of F_p^dim up to
// scalars: the first nonzero coordinate is pinned to 1.
class ProjectiveIter {
public:
    ProjectiveIter(const FieldSpec& f, u32 dim);
    bool done() const { return done_; }
    const std::vector<u32>& operator*() const { return coeffs_; }
    void next();

private:
    u32 p_;
    u32 dim_;
    u32 lead_;
    std::vector<u32> coeffs_;
    bool done_;

    void reset_lead();
};

// P lies in F[X] iff P is constant on every fiber of X; checked by one
// exhaustive bucketing pass over F_p^n.
bool member_fiber_test(const Poly& P, const PolyTuple& X);

struct ExpressResult {
    Poly outer;   // F with compose(F, X) = P
    bool pruned;  // true when every monomial M of F has sum(e_j * deg X_j) <= deg P
};

// Outer map F with compose(F, X) = P. For form tuples, F is found directly in
// the span of products whose formal degree stays within deg P (the shape the
// fan-in bounds downstream need); when no such F exists, or X is not a form
// tuple, falls back to fiber interpolation and reports pruned = false.
ExpressResult express(const Poly& P, const PolyTuple& X);

// Decides "rank < R" for an element of a polynomial space; nullopt means the
// oracle could not decide at this threshold.
using RankBelowFn = std::function<std::optional<bool>(const Poly&, u32 R)>;

// U_R(V): span of the elements of V of rank < R. Enumerates V projectively
// (rank is scalar-invariant).
FormSpace low_rank_span(const FormSpace& V, u32 R, const RankBelowFn& rank_below);

// Smallest-dimension homogeneous subspace W <= V with P inside F[W]; the
// first such W in a fixed enumeration order (total dimension ascending, then
// per-degree dimension allocations, then echelon bases). Uniqueness is not
// claimed.
FormSpace minimal_generating_subspace(const PolyTuple& P, const FormSpace& V);

}  // namespace wr
