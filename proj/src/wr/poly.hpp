#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wr/field.hpp"

namespace wr {

// Exponent vector of a reduced monomial: every exponent < p. Total order is
// graded lexicographic (degree first, then exponents left to right), fixed
// globally so every serialized output is byte-stable.
struct Monomial {
    std::vector<u32> exps;

    u32 total_degree() const {
        u32 d = 0;
        for (u32 e : exps) d += e;
        return d;
    }
    bool operator==(const Monomial& o) const { return exps == o.exps; }
};

// grlex: returns true when a < b.
bool grlex_less(const Monomial& a, const Monomial& b);

struct Term {
    Monomial mono;
    u32 coeff;  // in {1, ..., p-1}
};

// Reduced multivariate polynomial function F_p^n -> F_p. Terms are kept in
// descending grlex order with nonzero coefficients and reduced exponents, so
// two Polys are equal as records iff they are equal as functions.
class Poly {
public:
    Poly() = default;
    Poly(FieldSpec field, u32 nvars) : field_(field), nvars_(nvars) {}

    static Poly zero(const FieldSpec& f, u32 nvars) { return Poly(f, nvars); }
    static Poly constant(const FieldSpec& f, u32 nvars, u32 c);
    static Poly variable(const FieldSpec& f, u32 nvars, u32 index);
    // Single term c * x^exps (exponents may be unreduced).
    static Poly term(const FieldSpec& f, u32 nvars, const std::vector<u32>& exps, u32 c);

    const FieldSpec& field() const { return field_; }
    u32 nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    // Degree of the zero polynomial is 0 by convention; it counts as constant.
    u32 degree() const { return terms_.empty() ? 0 : terms_.front().mono.total_degree(); }
    u32 degree_in(u32 var) const;
    bool is_constant() const { return degree() == 0; }
    bool is_homogeneous() const;
    bool is_form() const { return !is_constant() && is_homogeneous(); }
    u32 constant_value() const;  // value when is_constant()

    u32 coeff_of(const Monomial& m) const;
    u32 leading_coeff() const { return terms_.empty() ? 0 : terms_.front().coeff; }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(u32 c) const;

    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    u32 eval(const std::vector<u32>& point) const;
    // Values at every point of F_p^n in canonical point order (p^n entries).
    std::vector<u32> eval_all() const;

    // Sum of the terms of total degree exactly e.
    Poly homogeneous_part(u32 e) const;
    // Top-degree part (the paper-side P-up-arrow for nonconstant P).
    Poly top_part() const { return homogeneous_part(degree()); }

    std::string to_string(const std::vector<std::string>* names = nullptr) const;
    // Compact canonical key, usable for hashing and cache lookups.
    std::string key() const;

    void add_term(const std::vector<u32>& exps, u32 coeff);  // accumulate, then normalize()
    void normalize();

private:
    FieldSpec field_;
    u32 nvars_ = 0;
    std::vector<Term> terms_;
};

// Canonical total order on Polys: compare coefficient vectors position by
// position in descending grlex monomial order (absent monomial = 0). Used for
// deterministic element selection inside spans.
bool poly_less(const Poly& a, const Poly& b);

// ---- tuples ------------------------------------------------------------

using PolyTuple = std::vector<Poly>;

u32 tuple_degree(const PolyTuple& t);  // 0 for the empty tuple
bool is_form_tuple(const PolyTuple& t);
PolyTuple tuple_tail(const PolyTuple& t);
void check_tuple(const PolyTuple& t);  // shared field and nvars

std::vector<u32> eval_tuple(const PolyTuple& t, const std::vector<u32>& point);

// Encode a value vector y in F_p^k as an index (first coordinate most
// significant), matching the PointIter order.
u64 encode_point(const FieldSpec& f, const std::vector<u32>& y);
std::vector<u32> decode_point(const FieldSpec& f, u64 index, u32 k);

// ---- operations --------------------------------------------------------

// Parses the `expr` production of the problem-file grammar (see module cli):
// sums of optionally signed terms `[coeff *] factor (* factor)*` with factors
// `var[^nat]`. Variables default to x1..xn when no name list is given.
Poly parse_poly(const std::string& text, const FieldSpec& field, u32 nvars,
                const std::vector<std::string>* var_names = nullptr);

// Substitution F(X_1, ..., X_k), fully reduced. F must have k variables.
Poly compose(const Poly& F, const PolyTuple& X);

// Unique reduced polynomial agreeing with `table` on all of F_p^k; table is
// indexed in canonical point order and must have p^k entries. Uses the
// indicator expansion sum_y table(y) * prod_i (1 - (z_i - y_i)^(p-1)),
// applied as a mode-wise tensor transform.
Poly interpolate(const std::vector<u32>& table, const FieldSpec& field, u32 k);

}  // namespace wr
