#include "wr/linalg.hpp"

#include <algorithm>

namespace wr {

u32 rref_in_place(FpMat& m, std::vector<u32>* pivots) {
    const FieldSpec& f = m.field;
    u32 rank = 0;
    if (pivots) pivots->clear();
    for (u32 col = 0; col < m.cols && rank < m.rows; ++col) {
        u32 pivot = rank;
        while (pivot < m.rows && m.at(pivot, col) == 0) ++pivot;
        if (pivot == m.rows) continue;
        if (pivot != rank)
            for (u32 c = 0; c < m.cols; ++c) std::swap(m.at(pivot, c), m.at(rank, c));
        u32 inv = f.inv(m.at(rank, col));
        for (u32 c = col; c < m.cols; ++c) m.at(rank, c) = f.mul(m.at(rank, c), inv);
        for (u32 r = 0; r < m.rows; ++r) {
            if (r == rank) continue;
            u32 factor = m.at(r, col);
            if (!factor) continue;
            for (u32 c = col; c < m.cols; ++c)
                m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(rank, c)));
        }
        if (pivots) pivots->push_back(col);
        ++rank;
    }
    return rank;
}

u32 matrix_rank(FpMat m) { return rref_in_place(m); }

std::optional<std::vector<u32>> solve_linear(const FpMat& A, const std::vector<u32>& b) {
    const FieldSpec& f = A.field;
    FpMat aug(f, A.rows, A.cols + 1);
    for (u32 r = 0; r < A.rows; ++r) {
        for (u32 c = 0; c < A.cols; ++c) aug.at(r, c) = A.at(r, c);
        aug.at(r, A.cols) = b[r];
    }
    std::vector<u32> pivots;
    u32 rank = rref_in_place(aug, &pivots);
    for (u32 r = 0; r < rank; ++r)
        if (pivots[r] == A.cols) return std::nullopt;  // 0 = nonzero row
    std::vector<u32> x(A.cols, 0);
    for (u32 r = 0; r < rank; ++r) x[pivots[r]] = aug.at(r, A.cols);
    return x;
}

namespace {

void gen_monomials(u32 nvars, u32 deg, u32 maxexp, u32 var, std::vector<u32>& cur,
                   std::vector<Monomial>& out) {
    if (var == nvars) {
        if (deg == 0) out.push_back(Monomial{cur});
        return;
    }
    u32 hi = std::min(deg, maxexp);
    for (u32 e = 0; e <= hi; ++e) {
        cur[var] = e;
        gen_monomials(nvars, deg - e, maxexp, var + 1, cur, out);
    }
    cur[var] = 0;
}

}  // namespace

MonoBasis::MonoBasis(const FieldSpec& f, u32 nvars, u32 deg)
    : field_(f), nvars_(nvars), deg_(deg) {
    std::vector<u32> cur(nvars, 0);
    gen_monomials(nvars, deg, f.p - 1, 0, cur, monos_);
    std::sort(monos_.begin(), monos_.end(),
              [](const Monomial& a, const Monomial& b) { return grlex_less(b, a); });
    for (u32 i = 0; i < monos_.size(); ++i) index_[monos_[i].exps] = i;
}

u32 MonoBasis::index_of(const Monomial& m) const {
    auto it = index_.find(m.exps);
    if (it == index_.end()) fail(errc::internal_error, "monomial outside basis");
    return it->second;
}

std::vector<u32> MonoBasis::coeff_vector(const Poly& p) const {
    std::vector<u32> v(monos_.size(), 0);
    for (const Term& t : p.terms()) {
        if (t.mono.total_degree() != deg_)
            fail(errc::not_a_form, "polynomial is not homogeneous of degree " + std::to_string(deg_));
        v[index_of(t.mono)] = t.coeff;
    }
    return v;
}

Poly MonoBasis::poly_from(const std::vector<u32>& v) const {
    Poly r(field_, nvars_);
    for (u32 i = 0; i < v.size(); ++i)
        if (v[i] % field_.p != 0) r.add_term(monos_[i].exps, v[i]);
    r.normalize();
    return r;
}

}  // namespace wr
