#include "wr/rankor.hpp"

#include <algorithm>
#include <cmath>

#include "wr/spectral.hpp"

namespace wr {

namespace {

// ---- support compression --------------------------------------------------

struct Compressed {
    Poly q;                  // over the support variables only
    std::vector<u32> vars;   // original indices, ascending
    u32 n_orig = 0;
};

Compressed compress_support(const Poly& P) {
    std::vector<u32> vars;
    for (u32 i = 0; i < P.nvars(); ++i)
        if (P.degree_in(i) > 0) vars.push_back(i);
    Poly q(P.field(), u32(vars.size()));
    for (const Term& t : P.terms()) {
        std::vector<u32> e(vars.size());
        for (u32 j = 0; j < vars.size(); ++j) e[j] = t.mono.exps[vars[j]];
        q.add_term(e, t.coeff);
    }
    q.normalize();
    return {std::move(q), std::move(vars), P.nvars()};
}

Poly expand_vars(const Poly& q, const std::vector<u32>& vars, u32 n) {
    Poly r(q.field(), n);
    for (const Term& t : q.terms()) {
        std::vector<u32> e(n, 0);
        for (u32 j = 0; j < vars.size(); ++j) e[vars[j]] = t.mono.exps[j];
        r.add_term(e, t.coeff);
    }
    r.normalize();
    return r;
}

RankWitness expand_witness(const RankWitness& w, const std::vector<u32>& vars, u32 n) {
    RankWitness out;
    for (const auto& [a, b] : w.summands)
        out.summands.push_back({expand_vars(a, vars, n), expand_vars(b, vars, n)});
    return out;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
    for (std::size_t i = 0; i < a.exps.size(); ++i)
        if (a.exps[i] > b.exps[i]) return false;
    return true;
}

// ---- exact division and square roots (no Frobenius collapse: deg < p) -----

std::optional<Poly> divide_form(const Poly& P, const Poly& A) {
    const FieldSpec& f = P.field();
    if (P.degree() >= f.p || A.is_zero()) return std::nullopt;
    Poly R = P;
    Poly B(f, P.nvars());
    const Term& la = A.terms().front();
    u32 la_inv = f.inv(la.coeff);
    while (!R.is_zero()) {
        const Term& lr = R.terms().front();
        if (!mono_divides(la.mono, lr.mono)) return std::nullopt;
        std::vector<u32> qe(lr.mono.exps.size());
        for (std::size_t i = 0; i < qe.size(); ++i) qe[i] = lr.mono.exps[i] - la.mono.exps[i];
        Poly q = Poly::term(f, P.nvars(), qe, f.mul(lr.coeff, la_inv));
        B = B + q;
        R = R - q * A;
    }
    return B;
}

std::optional<Poly> sqrt_form(const Poly& P) {
    const FieldSpec& f = P.field();
    if (f.p == 2 || P.is_zero() || P.degree() % 2 != 0 || P.degree() >= f.p) return std::nullopt;
    const Term& lt = P.terms().front();
    for (u32 e : lt.mono.exps)
        if (e % 2) return std::nullopt;
    if (!f.is_square(lt.coeff)) return std::nullopt;
    std::vector<u32> he(lt.mono.exps.size());
    for (std::size_t i = 0; i < he.size(); ++i) he[i] = lt.mono.exps[i] / 2;
    Poly A = Poly::term(f, P.nvars(), he, f.sqrt_of(lt.coeff));
    u32 guard = 0;
    while (true) {
        Poly R = P - A * A;
        if (R.is_zero()) return A;
        if (++guard > 4096) return std::nullopt;
        const Term& lr = R.terms().front();
        const Term& la = A.terms().front();
        if (!mono_divides(la.mono, lr.mono)) return std::nullopt;
        std::vector<u32> qe(lr.mono.exps.size());
        for (std::size_t i = 0; i < qe.size(); ++i) qe[i] = lr.mono.exps[i] - la.mono.exps[i];
        u32 qc = f.mul(lr.coeff, f.inv(f.mul(2 % f.p, la.coeff)));
        Poly q = Poly::term(f, P.nvars(), qe, qc);
        if (grlex_less(la.mono, q.terms().front().mono)) return std::nullopt;  // not decreasing
        A = A + q;
    }
}

// ---- quadratic forms: exact rank via a symmetric reduction ----------------

struct QuadDecomp {
    std::vector<std::pair<u32, Poly>> squares;       // d * l^2
    std::vector<std::pair<Poly, Poly>> products;     // hyperbolic pieces
};

// Splits off squares and rectangles until nothing is left. All linear algebra
// happens on the polynomial itself.
QuadDecomp quad_reduce(const Poly& P) {
    const FieldSpec& f = P.field();
    u32 n = P.nvars();
    QuadDecomp out;
    Poly R = P;
    u32 inv2 = f.inv(2 % f.p);
    while (!R.is_zero()) {
        // diagonal pivot first
        std::optional<u32> diag;
        for (u32 i = 0; i < n && !diag; ++i) {
            std::vector<u32> e(n, 0);
            e[i] = 2;
            if (R.coeff_of(Monomial{e})) diag = i;
        }
        if (diag) {
            u32 i = *diag;
            std::vector<u32> e(n, 0);
            e[i] = 2;
            u32 a = R.coeff_of(Monomial{e});
            // L = sum of cross coefficients against x_i
            Poly L(f, n);
            for (u32 j = 0; j < n; ++j) {
                if (j == i) continue;
                std::vector<u32> em(n, 0);
                em[i] = 1;
                em[j] = 1;
                u32 c = R.coeff_of(Monomial{em});
                if (c) L = L + Poly::variable(f, n, j).scaled(c);
            }
            Poly ell = Poly::variable(f, n, i) + L.scaled(f.mul(inv2, f.inv(a)));
            R = R - (ell * ell).scaled(a);
            out.squares.push_back({a, ell});
        } else {
            // pure cross term: extract a rectangle
            std::optional<std::pair<u32, u32>> cross;
            for (u32 i = 0; i < n && !cross; ++i)
                for (u32 j = i + 1; j < n && !cross; ++j) {
                    std::vector<u32> em(n, 0);
                    em[i] = 1;
                    em[j] = 1;
                    if (R.coeff_of(Monomial{em})) cross = {{i, j}};
                }
            if (!cross) fail(errc::internal_error, "quadratic reduction stalled");
            auto [i, j] = *cross;
            std::vector<u32> em(n, 0);
            em[i] = 1;
            em[j] = 1;
            u32 c = R.coeff_of(Monomial{em});
            Poly A(f, n), B(f, n);  // x_i * A and x_j * B cross parts
            for (u32 k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                std::vector<u32> ei(n, 0), ej(n, 0);
                ei[i] = 1;
                ei[k] = 1;
                ej[j] = 1;
                ej[k] = 1;
                u32 ca = R.coeff_of(Monomial{ei});
                u32 cb = R.coeff_of(Monomial{ej});
                if (ca) A = A + Poly::variable(f, n, k).scaled(ca);
                if (cb) B = B + Poly::variable(f, n, k).scaled(cb);
            }
            u32 cinv = f.inv(c);
            Poly u = Poly::variable(f, n, i) + B.scaled(cinv);
            Poly v = Poly::variable(f, n, j) + A.scaled(cinv);
            out.products.push_back({u.scaled(c), v});
            R = R - u.scaled(c) * v;
        }
    }
    return out;
}

// Rewrites d1 l1^2 + d2 l2^2 + d3 l3^2 (pairwise non-combinable) as one
// product plus at most one square, through an isotropic vector.
void trio_reduce(const FieldSpec& f, std::vector<std::pair<u32, Poly>>& squares,
                 std::vector<std::pair<Poly, Poly>>& products) {
    u32 d[3] = {squares[0].first, squares[1].first, squares[2].first};
    Poly l[3] = {squares[0].second, squares[1].second, squares[2].second};
    squares.erase(squares.begin(), squares.begin() + 3);

    // isotropic vector of the diagonal ternary form
    std::vector<u32> v;
    for (u32 a = 0; a < f.p && v.empty(); ++a)
        for (u32 b = 0; b < f.p && v.empty(); ++b)
            for (u32 c = 0; c < f.p && v.empty(); ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                u32 s = f.add(f.add(f.mul(d[0], f.mul(a, a)), f.mul(d[1], f.mul(b, b))),
                              f.mul(d[2], f.mul(c, c)));
                if (s == 0) v = {a, b, c};
            }
    if (v.empty()) fail(errc::internal_error, "ternary diagonal form without isotropic vector");

    // basis change: columns b1 = v, b2/b3 = unit vectors keeping invertibility
    u32 piv = v[0] ? 0 : (v[1] ? 1 : 2);
    u32 o1 = (piv + 1) % 3, o2 = (piv + 2) % 3;
    FpMat Bm(f, 3, 3);
    for (u32 i = 0; i < 3; ++i) Bm.at(i, 0) = v[i];
    Bm.at(o1, 1) = 1;
    Bm.at(o2, 2) = 1;
    // invert
    FpMat aug(f, 3, 6);
    for (u32 r = 0; r < 3; ++r) {
        for (u32 c = 0; c < 3; ++c) aug.at(r, c) = Bm.at(r, c);
        aug.at(r, 3 + r) = 1;
    }
    if (rref_in_place(aug) != 3) fail(errc::internal_error, "singular trio basis");
    // m_a = sum_i Binv[a][i] * l_i
    Poly m[3] = {Poly(f, l[0].nvars()), Poly(f, l[0].nvars()), Poly(f, l[0].nvars())};
    for (u32 a = 0; a < 3; ++a)
        for (u32 i = 0; i < 3; ++i) {
            u32 c = aug.at(a, 3 + i);
            if (c) m[a] = m[a] + l[i].scaled(c);
        }
    // Gram matrix in the new basis: G = B^T D B
    u32 G[3][3];
    for (u32 a = 0; a < 3; ++a)
        for (u32 b = 0; b < 3; ++b) {
            u32 acc = 0;
            for (u32 i = 0; i < 3; ++i)
                acc = f.add(acc, f.mul(d[i], f.mul(Bm.at(i, a), Bm.at(i, b))));
            G[a][b] = acc;
        }
    if (G[0][0] != 0) fail(errc::internal_error, "isotropic direction kept a square");
    u32 j = G[0][1] ? 1 : 2;
    u32 gamma = G[0][j];
    if (gamma == 0) fail(errc::internal_error, "degenerate trio block");
    u32 k = 3 - j;  // the remaining index (1 or 2)

    // Gram-Schmidt in the coefficient space: u = e0 (isotropic), w completes
    // the hyperbolic pair, z is cleared of both pairings. S holds them as
    // columns; the matching coordinate functions are rows of S^-1 applied
    // to the m's.
    u32 inv2 = f.inv(2 % f.p);
    u32 invg = f.inv(gamma);
    u32 cw = f.mul(G[j][j], f.mul(inv2, invg));              // w = e_j - cw e_0
    u32 pair_w = f.sub(G[j][k], f.mul(G[j][j], f.mul(G[0][k], f.mul(inv2, invg))));
    u32 alpha = f.mul(pair_w, invg);                          // pairing of e_k with w
    u32 beta = f.mul(G[0][k], invg);                          // pairing of e_k with u
    FpMat S(f, 3, 3);
    S.at(0, 0) = 1;                                           // u
    S.at(0, 1) = f.neg(cw);                                   // w
    S.at(j, 1) = 1;
    // z = e_k - alpha*u - beta*w
    S.at(0, 2) = f.sub(f.neg(alpha), f.mul(beta, f.neg(cw)));
    S.at(j, 2) = f.neg(beta);
    S.at(k, 2) = 1;
    FpMat aug2(f, 3, 6);
    for (u32 r = 0; r < 3; ++r) {
        for (u32 c = 0; c < 3; ++c) aug2.at(r, c) = S.at(r, c);
        aug2.at(r, 3 + r) = 1;
    }
    if (rref_in_place(aug2) != 3) fail(errc::internal_error, "singular trio frame");
    Poly nu[3] = {Poly(f, l[0].nvars()), Poly(f, l[0].nvars()), Poly(f, l[0].nvars())};
    for (u32 a = 0; a < 3; ++a)
        for (u32 i = 0; i < 3; ++i) {
            u32 c = aug2.at(a, 3 + i);
            if (c) nu[a] = nu[a] + m[i].scaled(c);
        }

    // T = 2 gamma nu0 nu1 + delta nu2^2
    Poly T(f, l[0].nvars());
    for (u32 i = 0; i < 3; ++i) T = T + (l[i] * l[i]).scaled(d[i]);
    Poly prod = (nu[0] * nu[1]).scaled(f.mul(2 % f.p, gamma));
    Poly rest = T - prod;
    products.push_back({nu[0].scaled(f.mul(2 % f.p, gamma)), nu[1]});
    if (!rest.is_zero()) {
        Poly zz = nu[2] * nu[2];
        u32 delta = 0;
        for (const Term& t : zz.terms()) {
            u32 c = rest.coeff_of(t.mono);
            if (c) { delta = f.mul(c, f.inv(t.coeff)); break; }
        }
        if (delta == 0 || (zz.scaled(delta) != rest))
            fail(errc::internal_error, "trio remainder is not the expected square");
        squares.push_back({delta, nu[2]});
    }
}

}  // namespace

RankBound rank_quadratic(const Poly& P) {
    const FieldSpec& f = P.field();
    if (f.p == 2) fail(errc::even_characteristic, "quadratic rank formula needs odd p");
    if (P.is_zero()) return {0, 0, std::nullopt, RankBound::Status::exact, ""};
    if (!P.is_form() || P.degree() != 2)
        fail(errc::invalid_argument, "rank_quadratic expects a quadratic form");

    QuadDecomp dec = quad_reduce(P);
    u32 gram_rank = u32(2 * dec.products.size() + dec.squares.size());
    // discriminant class of the nondegenerate part: each rectangle block
    // contributes -1 modulo squares
    u32 disc = 1;
    if (dec.products.size() % 2) disc = f.neg(disc);
    for (const auto& [d, l] : dec.squares) disc = f.mul(disc, d);
    u32 expected;
    if (gram_rank % 2) {
        expected = gram_rank / 2 + 1;  // ceil(r/2)
    } else {
        u32 sign = (gram_rank / 2) % 2 ? f.neg(1) : 1;
        expected = gram_rank / 2 + (f.is_square(f.mul(sign, disc)) ? 0 : 1);
    }

    // combine squares into hyperbolic pairs where possible
    auto& sq = dec.squares;
    auto& pr = dec.products;
    while (true) {
        bool paired = false;
        for (std::size_t i = 0; i < sq.size() && !paired; ++i)
            for (std::size_t j = i + 1; j < sq.size() && !paired; ++j) {
                u32 m = f.neg(f.mul(sq[i].first, sq[j].first));
                if (!f.is_square(m)) continue;
                u32 alpha = f.sqrt_of(m);
                auto [di, li] = sq[i];
                auto [dj, lj] = sq[j];
                Poly u = li.scaled(di) - lj.scaled(alpha);
                Poly v = li + lj.scaled(f.mul(alpha, f.inv(di)));
                pr.push_back({u, v});
                sq.erase(sq.begin() + j);
                sq.erase(sq.begin() + i);
                paired = true;
            }
        if (paired) continue;
        if (sq.size() >= 3) {
            trio_reduce(f, sq, pr);
            continue;
        }
        break;
    }

    RankWitness w;
    for (const auto& [u, v] : pr) w.summands.push_back({u, v});
    for (const auto& [d, l] : sq) w.summands.push_back({l.scaled(d), l});

    // soundness: the witness re-expands to P, and hits the classified value
    Poly check(P.field(), P.nvars());
    for (const auto& [a, b] : w.summands) check = check + a * b;
    if (check != P) fail(errc::internal_error, "quadratic witness does not re-expand");
    if (w.summands.size() != expected)
        fail(errc::internal_error, "quadratic rank classification mismatch");
    return {expected, expected, std::move(w), RankBound::Status::exact, ""};
}

// ---- bounded search --------------------------------------------------------

namespace {

// Projective enumeration of degree-e forms over the (compressed) variables,
// pruned to leading monomials dividing lead(P). Calls fn(A); fn returns false
// to stop. Returns false when the candidate count would blow the cap.
template <typename Fn>
bool enumerate_divisor_candidates(const Poly& P, u32 e, u64 cap, Fn&& fn) {
    const FieldSpec& f = P.field();
    u32 s = P.nvars();
    MonoBasis mb(f, s, e);
    u32 D = mb.size();
    const Monomial& ltP = P.terms().front().mono;
    // work estimate
    double work = 0;
    for (u32 lead = 0; lead < D; ++lead)
        if (mono_divides(mb.mono(lead), ltP)) work += std::pow(double(f.p), double(D - 1 - lead));
    if (work > double(cap)) return false;

    std::vector<u32> v(D, 0);
    for (u32 lead = 0; lead < D; ++lead) {
        if (!mono_divides(mb.mono(lead), ltP)) continue;
        std::fill(v.begin(), v.end(), 0);
        v[lead] = 1;
        while (true) {
            Poly A = mb.poly_from(v);
            if (!fn(A)) return true;
            // odometer over coordinates after lead
            bool wrapped = true;
            for (u32 i = D; i-- > lead + 1;) {
                if (++v[i] < f.p) { wrapped = false; break; }
                v[i] = 0;
            }
            if (wrapped) break;
        }
    }
    return true;
}

struct R1Result {
    std::optional<std::pair<Poly, Poly>> factors;
    bool complete = false;  // every split exhausted
};

// Reducibility of a form: monomial and scaled-square shortcuts, then divisor
// enumeration split by split.
R1Result reducible_form(const Poly& P, const OracleLimits& lim) {
    const FieldSpec& f = P.field();
    u32 d = P.degree();
    u32 n = P.nvars();
    R1Result res;
    if (P.terms().size() == 1) {
        const Term& t = P.terms().front();
        u32 var = 0;
        while (t.mono.exps[var] == 0) ++var;
        std::vector<u32> ea(n, 0), eb = t.mono.exps;
        ea[var] = 1;
        eb[var] -= 1;
        res.factors = {{Poly::term(f, n, ea, 1), Poly::term(f, n, eb, t.coeff)}};
        res.complete = true;
        return res;
    }
    if (d % 2 == 0 && f.p != 2) {
        for (u32 c = 1; c < f.p; ++c) {
            if (auto a = sqrt_form(P.scaled(f.inv(c)))) {
                res.factors = {{a->scaled(c), *a}};
                res.complete = true;
                return res;
            }
        }
    }
    bool all_exhausted = true;
    for (u32 e = 1; e <= d / 2 && !res.factors; ++e) {
        if (d >= f.p) { all_exhausted = false; break; }  // division needs no collapse
        bool within = enumerate_divisor_candidates(P, e, lim.factor_enum_cap, [&](const Poly& A) {
            if (auto B = divide_form(P, A)) {
                res.factors = {{A, *B}};
                return false;
            }
            return true;
        });
        if (!within) all_exhausted = false;
    }
    res.complete = res.factors.has_value() || all_exhausted;
    return res;
}

// Dense sumset BFS over a small ambient form space. Exact up to r_cap.
struct BfsOutcome {
    bool applicable = false;
    std::optional<u32> rank;
    RankWitness witness;
    u32 exhausted_to = 0;
};

BfsOutcome bfs_rank(const Poly& P, u32 r_cap, const OracleLimits& lim) {
    BfsOutcome out;
    const FieldSpec& f = P.field();
    u32 d = P.degree();
    u32 s = P.nvars();
    MonoBasis mb(f, s, d);
    u32 D = mb.size();
    double space = std::pow(double(f.p), double(D));
    if (space > double(lim.bfs_space_cap)) return out;
    u64 space_sz = u64(space + 0.5);

    // all reducible degree-d forms, with factor pairs
    std::vector<std::pair<Poly, Poly>> gens;
    std::vector<u64> gen_idx;
    {
        double s1_work = 0;
        for (u32 e = 1; e <= d / 2; ++e) {
            MonoBasis ma(f, s, e), mbb(f, s, d - e);
            s1_work += (std::pow(double(f.p), double(ma.size())) - 1) / (f.p - 1) *
                       (std::pow(double(f.p), double(mbb.size())) - 1);
        }
        if (s1_work > double(lim.factor_enum_cap) || space * s1_work > 1e9) return out;

        std::vector<bool> seen(space_sz, false);
        for (u32 e = 1; e <= d / 2; ++e) {
            MonoBasis ma(f, s, e), mbb(f, s, d - e);
            for (ProjectiveIter ia(f, ma.size()); !ia.done(); ia.next()) {
                Poly A = ma.poly_from(*ia);
                std::vector<u32> vb(mbb.size(), 0);
                while (true) {
                    bool wrapped = true;
                    for (u32 i = mbb.size(); i-- > 0;) {
                        if (++vb[i] < f.p) { wrapped = false; break; }
                        vb[i] = 0;
                    }
                    if (wrapped) break;
                    Poly B = mbb.poly_from(vb);
                    Poly prod = A * B;
                    if (prod.is_zero() || !prod.is_homogeneous() || prod.degree() != d) continue;
                    u64 idx = encode_point(f, mb.coeff_vector(prod));
                    if (seen[idx]) continue;
                    seen[idx] = true;
                    gens.push_back({A, B});
                    gen_idx.push_back(idx);
                }
            }
        }
    }
    out.applicable = true;

    u64 target = encode_point(f, mb.coeff_vector(P));
    std::vector<unsigned char> dist(space_sz, 0xff);
    std::vector<u32> via(space_sz, 0);
    std::vector<u64> prev(space_sz, 0);
    std::vector<u64> frontier{0};
    dist[0] = 0;
    u32 layer = 0;
    std::vector<u32> acc(D), gvec(D);
    while (!frontier.empty() && layer < r_cap && dist[target] == 0xff) {
        std::vector<u64> next;
        for (u64 cur : frontier) {
            std::vector<u32> cvec = decode_point(f, cur, D);
            for (std::size_t g = 0; g < gens.size(); ++g) {
                std::vector<u32> gv = decode_point(f, gen_idx[g], D);
                for (u32 i = 0; i < D; ++i) acc[i] = f.add(cvec[i], gv[i]);
                u64 nidx = encode_point(f, acc);
                if (dist[nidx] != 0xff) continue;
                dist[nidx] = (unsigned char)(layer + 1);
                via[nidx] = u32(g);
                prev[nidx] = cur;
                next.push_back(nidx);
            }
        }
        frontier = std::move(next);
        ++layer;
        if (dist[target] != 0xff) break;
    }
    out.exhausted_to = frontier.empty() ? 0xfe : layer;
    if (dist[target] != 0xff) {
        out.rank = dist[target];
        u64 cur = target;
        while (cur != 0) {
            out.witness.summands.push_back(gens[via[cur]]);
            cur = prev[cur];
        }
    }
    return out;
}

// Cubic rank r via joint linear solves over sets of r distinct projective
// linear factors (every reducible cubic splits 1+2).
struct CubicOutcome {
    std::optional<RankWitness> witness;
    bool complete = false;
};

CubicOutcome cubic_rank_exact(const Poly& P, u32 r, const OracleLimits& lim) {
    CubicOutcome out;
    const FieldSpec& f = P.field();
    u32 s = P.nvars();
    if (P.degree() != 3 || 3 >= f.p) return out;
    MonoBasis m1(f, s, 1), m2(f, s, 2), m3(f, s, 3);

    std::vector<Poly> linears;
    for (ProjectiveIter it(f, m1.size()); !it.done(); it.next())
        linears.push_back(m1.poly_from(*it));
    double combos = 1;
    for (u32 i = 0; i < r; ++i) combos *= double(linears.size() - i) / double(i + 1);
    if (combos > double(lim.combo_cap)) return out;

    // columns of "multiply by linear l" in the monomial coordinates
    std::vector<std::vector<std::vector<u32>>> mulcol(linears.size());
    for (std::size_t l = 0; l < linears.size(); ++l) {
        mulcol[l].resize(m2.size());
        for (u32 c = 0; c < m2.size(); ++c) {
            std::vector<u32> v(m2.size(), 0);
            v[c] = 1;
            mulcol[l][c] = m3.coeff_vector(linears[l] * m2.poly_from(v));
        }
    }

    std::vector<u32> pick(r);
    std::vector<u32> target = m3.coeff_vector(P);
    std::function<bool(u32, u32)> rec = [&](u32 at, u32 from) -> bool {
        if (at == r) {
            FpMat A(f, m3.size(), r * m2.size());
            for (u32 i = 0; i < r; ++i)
                for (u32 c = 0; c < m2.size(); ++c) {
                    const std::vector<u32>& pv = mulcol[pick[i]][c];
                    for (u32 row = 0; row < m3.size(); ++row)
                        A.at(row, i * m2.size() + c) = pv[row];
                }
            auto sol = solve_linear(A, target);
            if (!sol) return false;
            RankWitness w;
            for (u32 i = 0; i < r; ++i) {
                std::vector<u32> bv(sol->begin() + i * m2.size(),
                                    sol->begin() + (i + 1) * m2.size());
                Poly B = m2.poly_from(bv);
                if (!B.is_zero()) w.summands.push_back({linears[pick[i]], B});
            }
            out.witness = std::move(w);
            return true;
        }
        for (u32 c = from; c < linears.size(); ++c) {
            pick[at] = c;
            if (rec(at + 1, c + 1)) return true;
        }
        return false;
    };
    rec(0, 0);
    out.complete = true;
    return out;
}

RankWitness monomial_witness(const Poly& P) {
    const FieldSpec& f = P.field();
    u32 n = P.nvars();
    RankWitness w;
    for (const Term& t : P.terms()) {
        u32 var = 0;
        while (t.mono.exps[var] == 0) ++var;
        std::vector<u32> ea(n, 0), eb = t.mono.exps;
        ea[var] = 1;
        eb[var] -= 1;
        w.summands.push_back({Poly::term(f, n, ea, 1), Poly::term(f, n, eb, t.coeff)});
    }
    return w;
}

}  // namespace

RankBound rank_bounded_search(const Poly& P, u32 r_max, const OracleLimits& lim) {
    if (P.is_zero() || P.is_constant())
        return {0, 0, std::nullopt, RankBound::Status::exact, ""};
    if (P.degree() == 1)
        return {kRankInfinity, kRankInfinity, std::nullopt, RankBound::Status::exact,
                "linear forms have infinite rank"};
    if (!P.is_form()) fail(errc::invalid_argument, "rank search expects a form");

    Compressed cp = compress_support(P);
    const Poly& Q = cp.q;
    u32 terms_bound = u32(Q.terms().size());

    auto finish = [&](RankBound b) {
        if (b.witness) b.witness = expand_witness(*b.witness, cp.vars, cp.n_orig);
        return b;
    };

    // dense BFS when the whole ambient space fits
    BfsOutcome bfs = bfs_rank(Q, std::min(r_max, u32(250)), lim);
    if (bfs.applicable) {
        if (bfs.rank)
            return finish({*bfs.rank, *bfs.rank, std::move(bfs.witness),
                           RankBound::Status::exact, "sumset search"});
        RankBound b;
        b.lower = (bfs.exhausted_to == 0xfe ? kRankInfinity : r_max + 1);
        if (b.lower != kRankInfinity) {
            b.upper = terms_bound;
            b.witness = monomial_witness(Q);
            b.status = RankBound::Status::bounded;
        } else {
            // frontier drained without reaching P: impossible for nonzero forms
            fail(errc::internal_error, "sumset closure missed a form");
        }
        return finish(b);
    }

    // r = 1: reducibility
    R1Result r1 = reducible_form(Q, lim);
    if (r1.factors)
        return finish({1, 1, RankWitness{{*r1.factors}}, RankBound::Status::exact, ""});
    u32 exhausted = r1.complete ? 1 : 0;

    // cubics: exact joint solves while the combinatorics stay in budget
    std::optional<RankWitness> found;
    u32 found_r = 0;
    if (Q.degree() == 3 && r1.complete) {
        for (u32 r = 2; r <= r_max && !found; ++r) {
            CubicOutcome c = cubic_rank_exact(Q, r, lim);
            if (!c.complete) break;
            if (c.witness) {
                found = c.witness;
                found_r = r;
            } else {
                exhausted = r;
            }
        }
    }

    if (found && exhausted == found_r - 1)
        return finish({found_r, found_r, std::move(found), RankBound::Status::exact, ""});

    RankBound b;
    b.lower = exhausted + 1;
    if (found) {
        b.upper = found_r;
        b.witness = std::move(found);
        b.status = RankBound::Status::inconclusive;
        b.note = "witness without full exhaustion below";
    } else {
        b.upper = terms_bound;
        b.witness = monomial_witness(Q);
        b.status = exhausted >= r_max ? RankBound::Status::bounded
                                      : RankBound::Status::inconclusive;
        if (b.status == RankBound::Status::inconclusive)
            b.note = "search stages capped before r_max";
    }
    if (b.lower > b.upper) fail(errc::internal_error, "rank bounds crossed");
    if (b.lower == b.upper) b.status = RankBound::Status::exact;
    return finish(b);
}

BiasRankBound bias_rank_lower_bound(const Poly& P, u32 cap) {
    double mag = std::abs(bias(P));
    BiasRankBound out;
    out.bias_magnitude = mag;
    if (mag < 1e-12) {
        out.bound = cap;
        out.capped = true;
        return out;
    }
    double acc = mag;
    for (u32 r = 0; r <= cap; ++r) {
        if (acc >= 1.0 - 1e-9) {
            out.bound = r;
            return out;
        }
        acc *= double(P.field().p);
    }
    out.bound = cap;
    out.capped = true;
    return out;
}

double rank_log_helper(u32 p, u32 r) {
    return std::log(double(r) + 1.0) / std::log(double(p)) + 1.0;
}

RankBound RankOracle::rank(const Poly& P, u32 r_need) {
    Poly top = P.top_part();
    if (top.is_zero() || top.is_constant())
        return {0, 0, std::nullopt, RankBound::Status::exact, ""};
    if (top.degree() == 1)
        return {kRankInfinity, kRankInfinity, std::nullopt, RankBound::Status::exact, ""};

    u32 lead = top.leading_coeff();
    Poly norm = top.scaled(top.field().inv(lead));
    std::string key = norm.key();
    auto rescale = [&](RankBound b) {
        // witnesses are cached for the normalized form; P's top part is lead*norm
        if (b.witness && lead != 1) {
            for (auto& [a, bb] : b.witness->summands) a = a.scaled(lead);
        }
        return b;
    };
    auto it = cache_.find(key);
    if (it != cache_.end() &&
        (it->second.bound.is_exact() || it->second.exhausted_to >= r_need)) {
        return rescale(it->second.bound);
    }

    RankBound b;
    if (norm.degree() == 2 && norm.field().p != 2) {
        b = rank_quadratic(norm);
        cache_[key] = {b, kRankInfinity};
    } else {
        b = rank_bounded_search(norm, std::max(r_need, 1u), lim_);
        u32 exh = b.is_exact() ? kRankInfinity : b.lower - 1;
        cache_[key] = {b, exh};
    }
    return rescale(b);
}

std::optional<bool> RankOracle::rank_below(const Poly& P, u32 R) {
    if (R == 0) return false;  // ranks are nonnegative
    RankBound b = rank(P, R - 1);
    if (b.upper < R) return true;
    if (b.lower >= R) return false;
    return std::nullopt;
}

std::optional<RankWitness> RankOracle::witness_below(const Poly& P, u32 R) {
    RankBound b = rank(P, R == 0 ? 0 : R - 1);
    if (b.witness && b.witness->summands.size() < R) return b.witness;
    return std::nullopt;
}

u32 rank_threshold(const Rat& t, u32 r) {
    if (t.num < 0) fail(errc::invalid_argument, "negative rank-regularity parameter");
    u64 num = u64(t.num) * r;
    u64 den = u64(t.den);
    return u32((num + den - 1) / den);
}

RankRegularity is_t_rank_regular(const PolyTuple& X, const Rat& t, RankOracle& oracle) {
    check_tuple(X);
    if (!is_form_tuple(X)) fail(errc::not_a_form, "rank regularity expects a form tuple");
    u32 R = rank_threshold(t, u32(X.size()));
    FormSpace V = span_basis(X);
    FormSpace offending = low_rank_span(V, R, oracle.as_below_fn());
    return {offending.dim() != V.dim(), std::move(offending)};
}

// ---- rk_t ------------------------------------------------------------------

RktVerification rkt_verify(const PolyTuple& P, const RktCertificate& cert) {
    check_tuple(P);
    if (cert.t < 1) return {false, "t must be at least 1"};
    if (cert.coefficients.size() != P.size())
        return {false, "coefficient rows do not match tuple size"};
    for (const auto& row : cert.coefficients)
        if (row.size() != cert.summands.size())
            return {false, "coefficient row length does not match summand count"};
    for (std::size_t j = 0; j < cert.summands.size(); ++j) {
        if (cert.summands[j].empty()) return {false, "empty product"};
        for (const Poly& factor : cert.summands[j])
            if (factor.degree() > cert.t)
                return {false, "factor of degree " + std::to_string(factor.degree()) +
                                   " exceeds t = " + std::to_string(cert.t)};
    }
    std::vector<Poly> prods;
    for (const auto& factors : cert.summands) {
        Poly acc = Poly::constant(P[0].field(), P[0].nvars(), 1);
        for (const Poly& q : factors) acc = acc * q;
        prods.push_back(acc);
    }
    for (std::size_t i = 0; i < P.size(); ++i) {
        Poly acc(P[0].field(), P[0].nvars());
        for (std::size_t j = 0; j < prods.size(); ++j)
            if (cert.coefficients[i][j]) acc = acc + prods[j].scaled(cert.coefficients[i][j]);
        if (acc != P[i])
            return {false, "component " + std::to_string(i + 1) +
                               " does not match its combination"};
    }
    return {true, ""};
}

namespace {

struct FactorTree {
    std::optional<std::vector<Poly>> factors;
    bool family_complete = true;  // form-factor trees fully explored
};

// Peels one factorization and recurses on both factors. Sound to follow any
// split: the irreducible factors of G are the union of those of the two
// sides, so failure on either side is definitive.
FactorTree factor_into(const Poly& G, u32 t, const OracleLimits& lim) {
    FactorTree out;
    if (G.degree() <= t) {
        out.factors = {{G}};
        return out;
    }
    if (!G.is_form()) {
        out.family_complete = false;  // only form factor trees are searched
        return out;
    }
    Compressed cg = compress_support(G);
    R1Result r1 = reducible_form(cg.q, lim);
    out.family_complete = r1.complete;
    if (!r1.factors) return out;  // irreducible (or capped) above degree t

    FactorTree left = factor_into(expand_vars(r1.factors->first, cg.vars, cg.n_orig), t, lim);
    FactorTree right = factor_into(expand_vars(r1.factors->second, cg.vars, cg.n_orig), t, lim);
    out.family_complete = out.family_complete && left.family_complete && right.family_complete;
    if (left.factors && right.factors) {
        std::vector<Poly> fs = *left.factors;
        for (const Poly& q : *right.factors) fs.push_back(q);
        out.factors = std::move(fs);
    }
    return out;
}

}  // namespace

RktSearchOutcome rkt_search(const PolyTuple& P, u32 t, u32 r_max, const OracleLimits& lim) {
    check_tuple(P);
    if (P.empty()) fail(errc::invalid_argument, "rk_t of an empty tuple");
    if (t < 1) fail(errc::invalid_argument, "t must be at least 1");
    const FieldSpec& f = P[0].field();
    u32 n = P[0].nvars();

    RktSearchOutcome out;
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < P.size(); ++i)
        if (!P[i].is_zero()) nonzero.push_back(i);
    if (nonzero.empty()) {
        RktCertificate cert;
        cert.t = t;
        cert.coefficients.assign(P.size(), {});
        out.certificate = cert;
        out.exhausted = true;
        return out;
    }

    // r = 1: all components proportional to one t-reducible generator
    {
        const Poly& G = P[nonzero.front()];
        bool proportional = true;
        std::vector<u32> scalars(P.size(), 0);
        for (std::size_t i = 0; i < P.size(); ++i) {
            if (P[i].is_zero()) continue;
            u32 c = f.mul(P[i].leading_coeff(), f.inv(G.leading_coeff()));
            if (G.scaled(c) != P[i]) { proportional = false; break; }
            scalars[i] = c;
        }
        bool r1_complete = true;
        if (proportional) {
            FactorTree ft = factor_into(G, t, lim);
            r1_complete = ft.family_complete;
            if (ft.factors) {
                RktCertificate cert;
                cert.t = t;
                cert.summands = {*ft.factors};
                for (std::size_t i = 0; i < P.size(); ++i)
                    cert.coefficients.push_back({scalars[i]});
                auto v = rkt_verify(P, cert);
                if (!v.ok) fail(errc::internal_error, "rk_t factorization failed to verify");
                out.certificate = cert;
                out.exhausted = true;
                return out;
            }
        }
        if (r_max == 1) {
            out.exhausted = r1_complete;
            out.note = r1_complete ? "r = 1 candidates exhausted"
                                   : "r = 1 search family capped";
            return out;
        }
    }

    // r >= 2: span solves over a pooled candidate family (upper bounds only;
    // minimality holds within the family).
    std::map<std::string, std::vector<Poly>> pool;
    auto add_product = [&](const std::vector<Poly>& factors) {
        Poly acc = Poly::constant(f, n, 1);
        for (const Poly& q : factors) acc = acc * q;
        if (acc.is_zero()) return;
        Poly norm = acc.scaled(f.inv(acc.leading_coeff()));
        pool.try_emplace(norm.key(), factors);
    };
    for (const Poly& comp : P) {
        FactorTree whole = factor_into(comp, t, lim);
        if (whole.factors) add_product(*whole.factors);
        for (const Term& term : comp.terms()) {
            // chunk the monomial into blocks of degree <= t
            std::vector<Poly> fs;
            std::vector<u32> rest = term.mono.exps;
            while (true) {
                std::vector<u32> chunk(n, 0);
                u32 got = 0;
                for (u32 i = 0; i < n && got < t; ++i) {
                    u32 take = std::min(rest[i], t - got);
                    chunk[i] = take;
                    rest[i] -= take;
                    got += take;
                }
                if (got == 0) break;
                fs.push_back(Poly::term(f, n, chunk, 1));
            }
            if (!fs.empty()) {
                fs[0] = fs[0].scaled(term.coeff);
                add_product(fs);
            }
        }
    }
    std::vector<std::vector<Poly>> cands;
    for (auto& [k, v] : pool) cands.push_back(v);

    std::map<std::vector<u32>, u32> rows;
    for (const Poly& comp : P)
        for (const Term& term : comp.terms()) rows.try_emplace(term.mono.exps, u32(rows.size()));
    std::vector<Poly> prods;
    for (const auto& fs : cands) {
        Poly acc = Poly::constant(f, n, 1);
        for (const Poly& q : fs) acc = acc * q;
        prods.push_back(acc);
        for (const Term& term : acc.terms()) rows.try_emplace(term.mono.exps, u32(rows.size()));
    }
    auto vec_of = [&](const Poly& q) {
        std::vector<u32> v(rows.size(), 0);
        for (const Term& term : q.terms()) v[rows.at(term.mono.exps)] = term.coeff;
        return v;
    };

    for (u32 r = 2; r <= std::min<u32>(r_max, u32(cands.size())); ++r) {
        std::vector<u32> pick(r);
        u64 tried = 0;
        std::function<std::optional<RktCertificate>(u32, u32)> rec =
            [&](u32 at, u32 from) -> std::optional<RktCertificate> {
            if (at == r) {
                if (++tried > lim.combo_cap) return std::nullopt;
                FpMat A(f, u32(rows.size()), r);
                for (u32 j = 0; j < r; ++j) {
                    std::vector<u32> v = vec_of(prods[pick[j]]);
                    for (u32 row = 0; row < rows.size(); ++row) A.at(row, j) = v[row];
                }
                RktCertificate cert;
                cert.t = t;
                for (u32 j = 0; j < r; ++j) cert.summands.push_back(cands[pick[j]]);
                for (const Poly& comp : P) {
                    auto sol = solve_linear(A, vec_of(comp));
                    if (!sol) return std::nullopt;
                    cert.coefficients.push_back(*sol);
                }
                return cert;
            }
            for (u32 c = from; c < cands.size(); ++c) {
                pick[at] = c;
                if (auto got = rec(at + 1, c + 1)) return got;
                if (tried > lim.combo_cap) return std::nullopt;
            }
            return std::nullopt;
        };
        if (auto cert = rec(0, 0)) {
            auto v = rkt_verify(P, *cert);
            if (!v.ok) fail(errc::internal_error, "pooled rk_t certificate failed to verify");
            out.certificate = *cert;
            out.exhausted = false;
            out.note = "minimal within the pooled family";
            return out;
        }
    }
    out.exhausted = false;
    out.note = "no certificate within the pooled family";
    return out;
}

}  // namespace wr
