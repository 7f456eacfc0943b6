#include "wr/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace wr {

u32 FormSpace::degree() const {
    u32 d = 0;
    for (const Poly& b : basis_) d = std::max(d, b.degree());
    return d;
}

std::vector<u32> FormSpace::degrees() const {
    std::vector<u32> ds;
    for (const Poly& b : basis_)
        if (std::find(ds.begin(), ds.end(), b.degree()) == ds.end()) ds.push_back(b.degree());
    std::sort(ds.begin(), ds.end());
    return ds;
}

std::vector<Poly> FormSpace::degree_basis(u32 e) const {
    std::vector<Poly> out;
    for (const Poly& b : basis_)
        if (b.degree() == e) out.push_back(b);
    return out;
}

FormSpace FormSpace::top_component() const {
    if (empty()) return *this;
    return degree_component(degree());
}

FormSpace FormSpace::degree_component(u32 e) const {
    FormSpace r(field_, nvars_);
    r.basis_ = degree_basis(e);
    return r;
}

std::optional<std::vector<u32>> FormSpace::coordinates(const Poly& q) const {
    if (q.is_zero()) return std::vector<u32>(dim(), 0);
    std::vector<u32> coords(dim(), 0);
    // Decompose into homogeneous parts; each part must sit in the matching block.
    for (u32 e = 0; e <= q.degree(); ++e) {
        Poly part = q.homogeneous_part(e);
        if (part.is_zero()) continue;
        std::vector<u32> block_idx;
        for (u32 i = 0; i < basis_.size(); ++i)
            if (basis_[i].degree() == e) block_idx.push_back(i);
        if (block_idx.empty()) return std::nullopt;
        MonoBasis mb(field_, nvars_, e);
        FpMat A(field_, mb.size(), u32(block_idx.size()));
        for (u32 c = 0; c < block_idx.size(); ++c) {
            std::vector<u32> v = mb.coeff_vector(basis_[block_idx[c]]);
            for (u32 r = 0; r < mb.size(); ++r) A.at(r, c) = v[r];
        }
        auto sol = solve_linear(A, mb.coeff_vector(part));
        if (!sol) return std::nullopt;
        for (u32 c = 0; c < block_idx.size(); ++c) coords[block_idx[c]] = (*sol)[c];
    }
    return coords;
}

bool FormSpace::contains(const Poly& q) const { return coordinates(q).has_value(); }

Poly FormSpace::element(const std::vector<u32>& coeffs) const {
    if (coeffs.size() != basis_.size()) fail(errc::dimension_mismatch, "coefficient arity");
    Poly acc(field_, nvars_);
    for (u32 i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] % field_.p) acc = acc + basis_[i].scaled(coeffs[i]);
    return acc;
}

bool FormSpace::same_space(const FormSpace& o) const {
    if (dim() != o.dim()) return false;
    for (u32 i = 0; i < dim(); ++i)
        if (basis_[i] != o.basis_[i]) return false;
    return true;
}

FormSpace span_basis(const std::vector<Poly>& forms, FieldSpec f, u32 nvars) {
    for (const Poly& q : forms) {
        if (!q.is_form())
            fail(errc::not_a_form, "span_basis input is not a form: " + q.to_string());
        if (q.field() != f || q.nvars() != nvars)
            fail(errc::dimension_mismatch, "span_basis inputs over different domains");
    }
    FormSpace space(f, nvars);
    std::vector<u32> degs;
    for (const Poly& q : forms)
        if (std::find(degs.begin(), degs.end(), q.degree()) == degs.end())
            degs.push_back(q.degree());
    std::sort(degs.rbegin(), degs.rend());  // basis listed top degree first
    for (u32 e : degs) {
        MonoBasis mb(f, nvars, e);
        std::vector<const Poly*> block;
        for (const Poly& q : forms)
            if (q.degree() == e) block.push_back(&q);
        FpMat m(f, u32(block.size()), mb.size());
        for (u32 r = 0; r < block.size(); ++r) {
            std::vector<u32> v = mb.coeff_vector(*block[r]);
            for (u32 c = 0; c < mb.size(); ++c) m.at(r, c) = v[c];
        }
        u32 rank = rref_in_place(m);
        for (u32 r = 0; r < rank; ++r) {
            std::vector<u32> v(mb.size());
            for (u32 c = 0; c < mb.size(); ++c) v[c] = m.at(r, c);
            space.basis_.push_back(mb.poly_from(v));
        }
    }
    return space;
}

FormSpace span_basis(const std::vector<Poly>& forms) {
    if (forms.empty()) fail(errc::invalid_argument, "span_basis of nothing without a domain");
    return span_basis(forms, forms[0].field(), forms[0].nvars());
}

ProjectiveIter::ProjectiveIter(const FieldSpec& f, u32 dim)
    : p_(f.p), dim_(dim), lead_(0), coeffs_(dim, 0), done_(dim == 0) {
    if (!done_) reset_lead();
}

void ProjectiveIter::reset_lead() {
    std::fill(coeffs_.begin(), coeffs_.end(), 0);
    coeffs_[lead_] = 1;
}

void ProjectiveIter::next() {
    // Odometer over the coordinates after the leading 1.
    for (u32 i = dim_; i-- > lead_ + 1;) {
        if (++coeffs_[i] < p_) return;
        coeffs_[i] = 0;
    }
    if (++lead_ >= dim_) { done_ = true; return; }
    reset_lead();
}

bool member_fiber_test(const Poly& P, const PolyTuple& X) {
    check_tuple(X);
    const FieldSpec& f = P.field();
    u32 n = P.nvars();
    for (const Poly& x : X)
        if (x.field() != f || x.nvars() != n)
            fail(errc::dimension_mismatch, "tuple and polynomial over different domains");
    u64 total = f.point_count(n);
    if (double(X.size()) * std::log2(double(f.p)) > 63)  // value key must fit u64
        fail(errc::budget_exceeded, "tuple too long to bucket");

    std::vector<u32> pvals = P.eval_all();
    std::vector<std::vector<u32>> xvals(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) xvals[i] = X[i].eval_all();

    std::unordered_map<u64, u32> first_value;
    first_value.reserve(std::size_t(std::min<u64>(total, 1 << 20)));
    for (u64 idx = 0; idx < total; ++idx) {
        u64 key = 0;
        for (std::size_t i = 0; i < X.size(); ++i) key = key * f.p + xvals[i][idx];
        auto [it, inserted] = first_value.try_emplace(key, pvals[idx]);
        if (!inserted && it->second != pvals[idx]) return false;
    }
    return true;
}

namespace {

// Exponent vectors e (e_j < p) with sum e_j * deg_j <= cap, in a fixed order.
void gen_bounded_exps(const std::vector<u32>& degs, u32 p, u32 cap, u32 j, std::vector<u32>& cur,
                      std::vector<std::vector<u32>>& out) {
    if (j == degs.size()) {
        out.push_back(cur);
        return;
    }
    for (u32 e = 0; e < p; ++e) {
        if (e * degs[j] > cap) break;
        cur[j] = e;
        gen_bounded_exps(degs, p, cap - e * degs[j], j + 1, cur, out);
    }
    cur[j] = 0;
}

// Row index over all reduced monomials of degree <= d.
struct LowDegreeIndex {
    std::map<std::vector<u32>, u32> index;
    u32 rows = 0;
    LowDegreeIndex(const FieldSpec& f, u32 nvars, u32 d) {
        for (u32 e = 0; e <= d; ++e) {
            MonoBasis mb(f, nvars, e);
            for (u32 i = 0; i < mb.size(); ++i) index[mb.mono(i).exps] = rows++;
        }
    }
    std::vector<u32> vec(const Poly& q) const {
        std::vector<u32> v(rows, 0);
        for (const Term& t : q.terms()) v[index.at(t.mono.exps)] = t.coeff;
        return v;
    }
};

Poly reduced_product(const PolyTuple& X, const std::vector<u32>& exps,
                     std::vector<std::vector<Poly>>& powers, const FieldSpec& f, u32 n) {
    Poly acc = Poly::constant(f, n, 1);
    for (std::size_t j = 0; j < X.size(); ++j) {
        u32 e = exps[j];
        if (!e) continue;
        auto& ladder = powers[j];
        if (ladder.empty()) ladder.push_back(Poly::constant(f, n, 1));
        while (ladder.size() <= e) ladder.push_back(ladder.back() * X[j]);
        acc = acc * ladder[e];
    }
    return acc;
}

ExpressResult express_by_interpolation(const Poly& P, const PolyTuple& X) {
    const FieldSpec& f = P.field();
    u32 n = P.nvars();
    u32 k = u32(X.size());
    u64 fibers = f.point_count(k);
    u64 total = f.point_count(n);

    std::vector<u32> pvals = P.eval_all();
    std::vector<std::vector<u32>> xvals(k);
    for (u32 i = 0; i < k; ++i) xvals[i] = X[i].eval_all();

    // Off-image fibers get value 0: any total extension is valid, 0 keeps the
    // interpolant small.
    std::vector<u32> table(fibers, 0);
    for (u64 idx = 0; idx < total; ++idx) {
        u64 key = 0;
        for (u32 i = 0; i < k; ++i) key = key * f.p + xvals[i][idx];
        table[key] = pvals[idx];
    }
    Poly F = interpolate(table, f, k);
    if (compose(F, X) != P)
        fail(errc::internal_error, "interpolated outer map does not recompose");
    return {F, false};
}

}  // namespace

ExpressResult express(const Poly& P, const PolyTuple& X) {
    check_tuple(X);
    if (!member_fiber_test(P, X))
        fail(errc::not_a_member, "polynomial is not a function of the tuple");
    const FieldSpec& f = P.field();
    u32 n = P.nvars();
    u32 k = u32(X.size());

    if (!is_form_tuple(X)) return express_by_interpolation(P, X);

    // Solve for F inside the span of products with formal degree <= deg P.
    u32 d = P.degree();
    std::vector<u32> degs(k);
    for (u32 j = 0; j < k; ++j) degs[j] = X[j].degree();
    std::vector<std::vector<u32>> cands;
    {
        std::vector<u32> cur(k, 0);
        gen_bounded_exps(degs, f.p, d, 0, cur, cands);
    }
    LowDegreeIndex li(f, n, d);
    FpMat A(f, li.rows, u32(cands.size()));
    std::vector<std::vector<Poly>> powers(k);
    for (u32 c = 0; c < cands.size(); ++c) {
        Poly prod = reduced_product(X, cands[c], powers, f, n);
        if (prod.degree() > d)
            fail(errc::internal_error, "reduced product above target degree");
        std::vector<u32> v = li.vec(prod);
        for (u32 r = 0; r < li.rows; ++r) A.at(r, c) = v[r];
    }
    auto sol = solve_linear(A, li.vec(P));
    if (!sol) return express_by_interpolation(P, X);

    Poly F(f, k);
    for (u32 c = 0; c < cands.size(); ++c)
        if ((*sol)[c]) F.add_term(cands[c], (*sol)[c]);
    F.normalize();
    if (compose(F, X) != P)
        fail(errc::prune_verification_failed, "degree-bounded outer map does not recompose");
    return {F, true};
}

FormSpace low_rank_span(const FormSpace& V, u32 R, const RankBelowFn& rank_below) {
    const FieldSpec& f = V.field();
    f.point_count(V.dim());  // budget gate for the projective sweep

    std::vector<Poly> low;
    for (ProjectiveIter it(f, V.dim()); !it.done(); it.next()) {
        Poly elem = V.element(*it);
        auto below = rank_below(elem, R);
        if (!below)
            fail(errc::oracle_inconclusive,
                 "rank threshold " + std::to_string(R) + " undecided for " + elem.to_string());
        if (*below) low.push_back(elem);
    }
    if (low.empty()) return FormSpace(f, V.nvars());

    // Span of the low-rank elements, then a form basis for it. Homogeneity
    // must hold since V is homogeneous; verified rather than assumed.
    std::vector<Poly> parts;
    for (const Poly& q : low)
        for (u32 e = 1; e <= q.degree(); ++e) {
            Poly part = q.homogeneous_part(e);
            if (!part.is_zero()) parts.push_back(part);
        }
    FormSpace U = span_basis(parts, f, V.nvars());

    // Every collected element must lie in the span of its own parts' space,
    // and conversely each part must be a combination of low-rank elements.
    FpMat m(f, u32(low.size()) + U.dim(), V.dim());
    u32 r = 0;
    for (const Poly& q : low) {
        auto coords = V.coordinates(q);
        for (u32 c = 0; c < V.dim(); ++c) m.at(r, c) = (*coords)[c];
        ++r;
    }
    u32 dim_low = matrix_rank(FpMat(m));
    for (const Poly& b : U.basis()) {
        auto coords = V.coordinates(b);
        if (!coords) fail(errc::internal_error, "U_R basis escapes V");
        for (u32 c = 0; c < V.dim(); ++c) m.at(r, c) = (*coords)[c];
        ++r;
    }
    if (matrix_rank(m) != dim_low || U.dim() != dim_low)
        fail(errc::internal_error, "U_R(V) is not homogeneous");
    return U;
}

// ---- minimal generating subspace -----------------------------------------

namespace {

// Echelon bases of the j-dimensional subspaces of F_p^D, canonical order:
// pivot column sets ascending lexicographically, then free entries as an
// odometer. Calls fn(rows); returns false when fn stopped the scan.
bool enum_subspaces(const FieldSpec& f, u32 D, u32 j,
                    const std::function<bool(const std::vector<std::vector<u32>>&)>& fn) {
    if (j == 0) return fn({});
    if (j > D) return true;
    std::vector<u32> piv(j);
    for (u32 i = 0; i < j; ++i) piv[i] = i;
    while (true) {
        // free positions: (row i, col c) with c > piv[i], c not a pivot
        std::vector<std::pair<u32, u32>> free_pos;
        std::vector<bool> is_piv(D, false);
        for (u32 i = 0; i < j; ++i) is_piv[piv[i]] = true;
        for (u32 i = 0; i < j; ++i)
            for (u32 c = piv[i] + 1; c < D; ++c)
                if (!is_piv[c]) free_pos.push_back({i, c});

        std::vector<std::vector<u32>> rows(j, std::vector<u32>(D, 0));
        for (u32 i = 0; i < j; ++i) rows[i][piv[i]] = 1;
        std::vector<u32> assign(free_pos.size(), 0);
        while (true) {
            for (std::size_t t = 0; t < free_pos.size(); ++t)
                rows[free_pos[t].first][free_pos[t].second] = assign[t];
            if (!fn(rows)) return false;
            std::size_t t = assign.size();
            bool wrapped = true;
            while (t-- > 0) {
                if (++assign[t] < f.p) { wrapped = false; break; }
                assign[t] = 0;
            }
            if (wrapped) break;
        }
        // next pivot combination, lexicographic
        bool advanced = false;
        for (u32 i = j; i-- > 0;) {
            if (piv[i] + (j - i) < D) {
                ++piv[i];
                for (u32 t = i + 1; t < j; ++t) piv[t] = piv[t - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) return true;
    }
}

double gaussian_count(u32 D, u32 j, u32 p) {
    double r = 1;
    for (u32 i = 0; i < j; ++i)
        r *= (std::pow(double(p), D - i) - 1) / (std::pow(double(p), i + 1) - 1);
    return r;
}

struct FiberChecker {
    const FieldSpec& f;
    u64 total;
    std::vector<std::vector<u32>> pvals;                  // per component
    std::vector<std::vector<std::vector<u32>>> bvals;     // per degree block, per basis form
    std::vector<std::pair<u64, u64>> counterexamples;     // point pairs that killed candidates

    // W given per degree as coefficient rows over that degree block of V.
    bool generates(const std::vector<std::vector<std::vector<u32>>>& rows_per_deg) {
        auto value_at = [&](u64 pt, std::vector<u32>& out) {
            out.clear();
            for (std::size_t db = 0; db < rows_per_deg.size(); ++db)
                for (const auto& row : rows_per_deg[db]) {
                    u32 acc = 0;
                    for (std::size_t i = 0; i < row.size(); ++i)
                        if (row[i]) acc = f.add(acc, f.mul(row[i], bvals[db][i][pt]));
                    out.push_back(acc);
                }
        };
        std::vector<u32> va, vb;
        for (std::size_t ci = 0; ci < counterexamples.size(); ++ci) {
            auto [x, y] = counterexamples[ci];
            value_at(x, va);
            value_at(y, vb);
            if (va == vb) {
                // move the killer up front: most candidates die on the same pairs
                if (ci > 0) std::swap(counterexamples[ci], counterexamples[ci - 1]);
                return false;
            }
        }
        // Full pass.
        std::unordered_map<u64, u64> first_point;
        std::vector<u32> w;
        for (u64 pt = 0; pt < total; ++pt) {
            value_at(pt, w);
            u64 key = 0;
            for (u32 v : w) key = key * f.p + v;
            auto [it, inserted] = first_point.try_emplace(key, pt);
            if (!inserted) {
                u64 fp = it->second;
                for (const auto& pv : pvals) {
                    if (pv[fp] != pv[pt]) {
                        counterexamples.push_back({fp, pt});
                        return false;
                    }
                }
            }
        }
        return true;
    }
};

}  // namespace

FormSpace minimal_generating_subspace(const PolyTuple& P, const FormSpace& V) {
    check_tuple(P);
    const FieldSpec& f = V.field();
    u32 n = V.nvars();
    for (const Poly& comp : P)
        if (!member_fiber_test(comp, V.basis()))
            fail(errc::not_a_member, "tuple is not generated by the given space");

    u64 total = f.point_count(n);
    std::vector<u32> degs = V.degrees();
    std::vector<std::vector<Poly>> blocks;
    for (u32 e : degs) blocks.push_back(V.degree_basis(e));

    FiberChecker checker{f, total, {}, {}, {}};
    for (const Poly& comp : P) checker.pvals.push_back(comp.eval_all());
    for (const auto& block : blocks) {
        checker.bvals.emplace_back();
        for (const Poly& b : block) checker.bvals.back().push_back(b.eval_all());
    }

    // Bottom-up over total dimension while the layer sizes stay affordable:
    // this finds the dimension-minimal subspace exactly.
    const double kExhaustiveCap = 200000;
    double spent = 0;
    for (u32 D = 0; D <= V.dim(); ++D) {
        double layer = 0;
        {
            // count this layer before enumerating it
            std::function<void(u32, u32, double)> count = [&](u32 b, u32 left, double acc) {
                if (b == blocks.size()) {
                    if (!left) layer += acc;
                    return;
                }
                u32 cap = std::min(left, u32(blocks[b].size()));
                for (u32 j = 0; j <= cap; ++j)
                    count(b + 1, left - j, acc * gaussian_count(u32(blocks[b].size()), j, f.p));
            };
            count(0, D, 1);
        }
        spent += layer;
        if (spent > kExhaustiveCap) break;

        std::vector<u32> alloc(blocks.size(), 0);
        std::function<std::optional<FormSpace>(u32, u32)> scan = [&](u32 b, u32 left)
            -> std::optional<FormSpace> {
            if (b == blocks.size()) {
                if (left) return std::nullopt;
                // Cartesian product of per-degree subspace enumerations.
                std::vector<std::vector<std::vector<u32>>> chosen(blocks.size());
                std::optional<FormSpace> found;
                std::function<bool(u32)> rec = [&](u32 bi) -> bool {
                    if (bi == blocks.size()) {
                        if (!checker.generates(chosen)) return true;
                        std::vector<Poly> basis;
                        for (std::size_t i = 0; i < blocks.size(); ++i)
                            for (const auto& row : chosen[i]) {
                                Poly q(f, n);
                                for (std::size_t c = 0; c < row.size(); ++c)
                                    if (row[c]) q = q + blocks[i][c].scaled(row[c]);
                                basis.push_back(q);
                            }
                        found = span_basis(basis, f, n);
                        return false;
                    }
                    return enum_subspaces(f, u32(blocks[bi].size()), alloc[bi],
                                          [&](const std::vector<std::vector<u32>>& rows) {
                                              chosen[bi] = rows;
                                              return rec(bi + 1);
                                          });
                };
                rec(0);
                return found;
            }
            u32 cap = std::min(left, u32(blocks[b].size()));
            for (u32 j = 0; j <= cap; ++j) {
                alloc[b] = j;
                if (auto r = scan(b + 1, left - j)) return r;
            }
            alloc[b] = 0;
            return std::nullopt;
        };
        if (auto r = scan(0, D)) return *r;
    }

    // Hyperplane descent. Generation is monotone under inclusion, so if some
    // strict subspace generates, some homogeneous hyperplane does; descending
    // through the first working hyperplane yields an inclusion-minimal W.
    // (Beyond the exhaustive cap this may exceed the true minimal dimension;
    // every consumer only needs inclusion-minimality.)
    auto block_of_degree = [&](u32 e) {
        for (std::size_t b = 0; b < degs.size(); ++b)
            if (degs[b] == e) return b;
        fail(errc::internal_error, "degree outside the ambient space");
    };
    // V-block coordinate row of a homogeneous member of V
    auto row_in_block = [&](const Poly& q, std::size_t b) {
        MonoBasis mb(f, n, degs[b]);
        FpMat A(f, mb.size(), u32(blocks[b].size()));
        for (u32 c = 0; c < blocks[b].size(); ++c) {
            std::vector<u32> v = mb.coeff_vector(blocks[b][c]);
            for (u32 r = 0; r < mb.size(); ++r) A.at(r, c) = v[r];
        }
        auto sol = solve_linear(A, mb.coeff_vector(q));
        if (!sol) fail(errc::internal_error, "descent left the ambient space");
        return *sol;
    };

    FormSpace W = V;
    while (true) {
        std::vector<std::vector<Poly>> wblocks;
        std::vector<std::size_t> wblock_at;  // ambient block index per W block
        for (u32 e : W.degrees()) {
            wblocks.push_back(W.degree_basis(e));
            wblock_at.push_back(block_of_degree(e));
        }
        std::vector<std::vector<std::vector<u32>>> vrows(wblocks.size());
        for (std::size_t b = 0; b < wblocks.size(); ++b)
            for (const Poly& q : wblocks[b]) vrows[b].push_back(row_in_block(q, wblock_at[b]));

        std::optional<FormSpace> smaller;
        std::vector<std::vector<std::vector<u32>>> cand(blocks.size());
        for (std::size_t bi = 0; bi < wblocks.size() && !smaller; ++bi) {
            u32 bd = u32(wblocks[bi].size());
            for (ProjectiveIter functional(f, bd); !functional.done() && !smaller;
                 functional.next()) {
                for (auto& c : cand) c.clear();
                for (std::size_t bj = 0; bj < wblocks.size(); ++bj)
                    if (bj != bi)
                        for (const auto& row : vrows[bj]) cand[wblock_at[bj]].push_back(row);
                u32 pivot = 0;
                while ((*functional)[pivot] == 0) ++pivot;
                u32 pinv = f.inv((*functional)[pivot]);
                for (u32 i = 0; i < bd; ++i) {
                    if (i == pivot) continue;
                    u32 c = f.mul((*functional)[i], pinv);
                    std::vector<u32> row(vrows[bi][i].size());
                    bool nonzero = false;
                    for (std::size_t k = 0; k < row.size(); ++k) {
                        row[k] = f.sub(vrows[bi][i][k], f.mul(c, vrows[bi][pivot][k]));
                        nonzero = nonzero || row[k];
                    }
                    if (nonzero) cand[wblock_at[bi]].push_back(std::move(row));
                }
                if (!checker.generates(cand)) continue;
                std::vector<Poly> basis;
                for (std::size_t b = 0; b < blocks.size(); ++b)
                    for (const auto& row : cand[b]) {
                        Poly q(f, n);
                        for (std::size_t c = 0; c < row.size(); ++c)
                            if (row[c]) q = q + blocks[b][c].scaled(row[c]);
                        basis.push_back(q);
                    }
                smaller = span_basis(basis, f, n);
            }
        }
        if (!smaller) return W;
        W = *smaller;
    }
}

}  // namespace wr
