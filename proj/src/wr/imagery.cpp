#include "wr/imagery.hpp"

#include <algorithm>

namespace wr {

PointSet image(const PolyTuple& P) {
    check_tuple(P);
    if (P.empty()) fail(errc::invalid_argument, "image of an empty tuple");
    const FieldSpec& f = P[0].field();
    u64 total = f.point_count(P[0].nvars());
    std::vector<std::vector<u32>> vals(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) vals[i] = P[i].eval_all();
    PointSet s;
    s.m = u32(P.size());
    std::vector<u32> y(P.size());
    for (u64 idx = 0; idx < total; ++idx) {
        for (std::size_t i = 0; i < P.size(); ++i) y[i] = vals[i][idx];
        s.points.insert(y);
    }
    return s;
}

std::optional<Line> contains_line(const PointSet& S, const FieldSpec& f) {
    u32 m = S.m;
    checked_pow(f.p, 2 * m, f.enumeration_budget);  // direction x offset sweep
    for (ProjectiveIter dir(f, m); !dir.done(); dir.next()) {
        u32 pivot = 0;
        while ((*dir)[pivot] == 0) ++pivot;
        u64 offsets = 1;
        for (u32 i = 0; i < m; ++i)
            if (i != pivot) offsets *= f.p;
        for (u64 oi = 0; oi < offsets; ++oi) {
            std::vector<u32> off(m, 0);
            u64 rest = oi;
            for (u32 i = m; i-- > 0;) {
                if (i == pivot) continue;
                off[i] = u32(rest % f.p);
                rest /= f.p;
            }
            Line l{*dir, off};
            bool inside = true;
            for (u32 t = 0; t < f.p && inside; ++t) inside = S.contains(l.point(f, t));
            if (inside) return l;
        }
    }
    return std::nullopt;
}

u32 Curve::degree() const {
    u32 d = 0;
    for (const Poly& c : coords) d = std::max(d, c.degree());
    return d;
}

bool Curve::nonconstant() const {
    return std::any_of(coords.begin(), coords.end(),
                       [](const Poly& c) { return !c.is_constant(); });
}

std::vector<u32> Curve::at(u32 t) const {
    std::vector<u32> y(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) y[i] = coords[i].eval({t});
    return y;
}

std::set<std::vector<u32>> Curve::image_points(const FieldSpec& f) const {
    std::set<std::vector<u32>> s;
    for (u32 t = 0; t < f.p; ++t) s.insert(at(t));
    return s;
}

namespace {

// Restriction of the tuple to one variable: a certified upper bound on udeg.
std::optional<Curve> restriction_witness(const PolyTuple& P, u32 var) {
    const FieldSpec& f = P[0].field();
    u32 n = P[0].nvars();
    // assignment of the other variables making some coordinate vary in x_var
    for (PointIter it(f, n); !it.done(); it.next()) {
        if ((*it)[var] != 0) continue;  // x_var slot unused in the assignment
        Curve c;
        for (const Poly& comp : P) {
            PolyTuple sub;
            for (u32 i = 0; i < n; ++i)
                sub.push_back(i == var ? Poly::variable(f, 1, 0)
                                       : Poly::constant(f, 1, (*it)[i]));
            c.coords.push_back(compose(comp, sub));
        }
        if (c.nonconstant()) return c;
    }
    return std::nullopt;
}

}  // namespace

UdegResult udeg(const PolyTuple& P) {
    check_tuple(P);
    if (P.empty()) fail(errc::invalid_argument, "udeg of an empty tuple");
    const FieldSpec& f = P[0].field();
    u32 m = u32(P.size());
    UdegResult out;
    if (std::all_of(P.begin(), P.end(), [](const Poly& q) { return q.is_constant(); })) {
        out.infinite = true;
        return out;
    }

    // certified cap: best variable restriction (also bounded by p-1 through reduction)
    u32 cap = f.p - 1;
    for (u32 v = 0; v < P[0].nvars(); ++v) {
        bool used = false;
        for (const Poly& comp : P) used = used || comp.degree_in(v) > 0;
        if (!used) continue;
        if (auto w = restriction_witness(P, v)) cap = std::min(cap, w->degree());
    }

    PointSet img = image(P);
    // prefix sets for the coordinate-wise pruning
    std::vector<std::set<std::vector<u32>>> prefixes(m + 1);
    for (const auto& y : img.points)
        for (u32 j = 1; j <= m; ++j)
            prefixes[j].insert(std::vector<u32>(y.begin(), y.begin() + j));

    for (u32 u = 1; u <= cap; ++u) {
        checked_pow(f.p, (u + 1) * m, f.enumeration_budget);
        // coordinate-major backtracking over coefficient vectors
        std::vector<Poly> coords(m, Poly(f, 1));
        std::vector<std::vector<u32>> values(m, std::vector<u32>(f.p));
        std::function<std::optional<Curve>(u32)> rec = [&](u32 j) -> std::optional<Curve> {
            if (j == m) {
                Curve c{std::vector<Poly>(coords.begin(), coords.end())};
                if (!c.nonconstant()) return std::nullopt;
                return c;
            }
            std::vector<u32> cv(u + 1, 0);  // coefficients of t^u .. t^0
            while (true) {
                Poly q(f, 1);
                for (u32 e = 0; e <= u; ++e)
                    if (cv[e]) q.add_term({u - e}, cv[e]);
                q.normalize();
                bool ok = true;
                std::vector<u32> probe(j + 1);
                for (u32 t = 0; t < f.p && ok; ++t) {
                    for (u32 i = 0; i < j; ++i) probe[i] = values[i][t];
                    probe[j] = q.eval({t});
                    ok = prefixes[j + 1].count(probe) > 0;
                }
                if (ok) {
                    coords[j] = q;
                    for (u32 t = 0; t < f.p; ++t) values[j][t] = q.eval({t});
                    if (auto got = rec(j + 1)) return got;
                }
                bool wrapped = true;
                for (u32 i = u32(cv.size()); i-- > 0;) {
                    if (++cv[i] < f.p) { wrapped = false; break; }
                    cv[i] = 0;
                }
                if (wrapped) return std::nullopt;
            }
        };
        if (auto got = rec(0)) {
            out.u = u;
            out.witness = got;
            return out;
        }
    }
    fail(errc::internal_error, "restriction witness lost during the search");
}

SzWitnessResult sz_witness(const Poly& P, const Poly& F, const PolyTuple& X) {
    if (P.is_zero()) fail(errc::zero_polynomial, "Schwartz-Zippel needs a nonzero target");
    check_tuple(X);
    if (F.nvars() != X.size()) fail(errc::dimension_mismatch, "outer map arity vs tuple");
    const FieldSpec& f = P.field();
    u32 k = u32(X.size());
    u32 n = P.nvars();
    u64 domain = f.point_count(n);
    u64 fibers = f.point_count(k);
    {
        Poly back = X.empty() ? Poly::constant(f, n, F.is_zero() ? 0 : F.constant_value())
                              : compose(F, X);
        if (back != P) fail(errc::invalid_argument, "F(X) is not the given polynomial");
    }

    // value counts of X and values of F over the fiber space
    std::vector<u64> counts(fibers, 0);
    if (k == 0) {
        counts[0] = domain;
    } else {
        std::vector<std::vector<u32>> vals(k);
        for (u32 i = 0; i < k; ++i) vals[i] = X[i].eval_all();
        for (u64 idx = 0; idx < domain; ++idx) {
            u64 key = 0;
            for (u32 i = 0; i < k; ++i) key = key * f.p + vals[i][idx];
            ++counts[key];
        }
    }

    SzWitnessResult out;
    out.domain = domain;
    out.fiber_space = fibers;
    std::optional<u64> best;
    for (u64 y = 0; y < fibers; ++y) {
        std::vector<u32> yv = decode_point(f, y, k);
        if (F.eval(yv) == 0) continue;
        ++out.nonroots;
        if (!best || counts[y] > counts[*best]) best = y;
    }
    if (!best) fail(errc::internal_error, "nonzero composition with an everywhere-zero outer map");
    out.point = decode_point(f, *best, k);
    out.hits = counts[*best];

    // Pr[F != 0] * Pr[X = y] >= (1 - d/p) p^-k, exactly
    u32 d = P.degree();
    i128 lhs = i128(out.nonroots) * i128(out.hits) * i128(f.p);
    i128 rhs = d >= f.p ? i128(0) : i128(f.p - d) * i128(domain);
    if (lhs < rhs) fail(errc::internal_error, "Schwartz-Zippel bound violated");
    return out;
}

CurveExtraction extract_curve(const Decomposition& D) {
    if (!D.defect || !D.minimal)
        fail(errc::invalid_argument, "curve extraction needs a certified decomposition");
    if (D.parts.empty())
        fail(errc::invalid_argument, "constant decompositions carry no curve");
    const FieldSpec& f = D.target[0].field();
    u32 d = tuple_degree(D.target);
    u32 k = u32(D.parts.size());
    if (d >= f.p || !(*D.defect <= Rat(i64(f.p - d), i64(f.p))))
        fail(errc::invalid_argument,
             "defect above 1 - d/p: the containment lemma does not apply");

    // component depending on the first part
    std::optional<u32> comp;
    for (u32 i = 0; i < D.outers.size() && !comp; ++i)
        if (D.outers[i].degree_in(0) > 0) comp = i;
    if (!comp)
        fail(errc::no_dependent_component,
             "no outer map depends on X_1 despite certification");
    const Poly& Fj = D.outers[*comp];

    // F_j = sum_i y1^i C_i(y_2..y_k); find the least i >= 1 with C_i(X') != 0
    PolyTuple tail = tuple_tail(D.parts);
    std::optional<u32> index;
    Poly ci_composed(f, D.target[0].nvars());
    Poly ci(f, k - 1);
    for (u32 i = 1; i <= Fj.degree_in(0) && !index; ++i) {
        Poly c(f, k == 1 ? 0 : k - 1);
        for (const Term& t : Fj.terms()) {
            if (t.mono.exps[0] != i) continue;
            std::vector<u32> e(t.mono.exps.begin() + 1, t.mono.exps.end());
            c.add_term(e, t.coeff);
        }
        c.normalize();
        if (c.is_zero()) continue;
        Poly composed = tail.empty()
                            ? Poly::constant(f, D.target[0].nvars(), c.constant_value())
                            : compose(c, tail);
        if (!composed.is_zero()) {
            index = i;
            ci = c;
            ci_composed = composed;
        }
    }
    if (!index)
        fail(errc::no_dependent_component,
             "every first-variable coefficient vanishes after composition");

    SzWitnessResult sz = sz_witness(ci_composed, ci, tail);

    // the line (t, y_0) and the curve F(t, y_0)
    CurveExtraction out;
    out.component = *comp;
    out.tail_offset = sz.point;
    std::vector<u32> off(k, 0);
    for (u32 i = 1; i < k; ++i) off[i] = sz.point[i - 1];
    std::vector<u32> dir(k, 0);
    dir[0] = 1;
    out.line = Line{dir, off};

    PolyTuple sub;
    sub.push_back(Poly::variable(f, 1, 0));
    for (u32 i = 1; i < k; ++i) sub.push_back(Poly::constant(f, 1, off[i]));
    for (const Poly& outer : D.outers) out.curve.coords.push_back(compose(outer, sub));

    // verified conclusions: the line sits inside Image(X), the curve is
    // nonconstant, its image sits inside Image(P), and the degree chain holds
    if (!D.parts.empty()) {
        PointSet xi = image(D.parts);
        for (u32 t = 0; t < f.p; ++t)
            if (!xi.contains(out.line.point(f, t)))
                fail(errc::internal_error, "popular line escapes the image of X");
    }
    if (!out.curve.nonconstant())
        fail(errc::internal_error, "extracted curve is constant");
    PointSet pi = image(D.target);
    for (u32 t = 0; t < f.p; ++t)
        if (!pi.contains(out.curve.at(t)))
            fail(errc::internal_error, "curve image escapes the image of P");
    if (out.curve.degree() * tuple_degree(D.parts) > d)
        fail(errc::internal_error, "curve degree breaks the degree chain");
    return out;
}

}  // namespace wr
