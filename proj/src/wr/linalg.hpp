#pragma once

#include <map>
#include <optional>

#include "wr/poly.hpp"

namespace wr {

// Dense row-major matrix over F_p.
struct FpMat {
    FieldSpec field;
    u32 rows = 0, cols = 0;
    std::vector<u32> a;

    FpMat(FieldSpec f, u32 r, u32 c) : field(f), rows(r), cols(c), a(std::size_t(r) * c, 0) {}
    u32& at(u32 r, u32 c) { return a[std::size_t(r) * cols + c]; }
    u32 at(u32 r, u32 c) const { return a[std::size_t(r) * cols + c]; }
};

// Reduced row echelon form in place; returns rank, and the pivot column of
// each nonzero row through `pivots` when given.
u32 rref_in_place(FpMat& m, std::vector<u32>* pivots = nullptr);

u32 matrix_rank(FpMat m);

// One solution of A x = b with free variables set to 0 (deterministic), or
// nullopt when inconsistent.
std::optional<std::vector<u32>> solve_linear(const FpMat& A, const std::vector<u32>& b);

// Reduced monomials of total degree exactly `deg` over nvars variables, in
// descending grlex order, with index lookup. Coordinates for per-degree form
// spaces.
class MonoBasis {
public:
    MonoBasis(const FieldSpec& f, u32 nvars, u32 deg);

    u32 size() const { return u32(monos_.size()); }
    const Monomial& mono(u32 i) const { return monos_[i]; }
    u32 index_of(const Monomial& m) const;

    std::vector<u32> coeff_vector(const Poly& p) const;  // p must be homogeneous of this degree
    Poly poly_from(const std::vector<u32>& v) const;

private:
    FieldSpec field_;
    u32 nvars_;
    u32 deg_;
    std::vector<Monomial> monos_;
    std::map<std::vector<u32>, u32> index_;
};

}  // namespace wr
