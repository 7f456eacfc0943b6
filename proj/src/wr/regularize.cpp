#include "wr/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wr {

namespace {

void verify_composition(const Decomposition& d) {
    for (std::size_t i = 0; i < d.target.size(); ++i) {
        Poly back = d.parts.empty()
                        ? Poly::constant(d.target[i].field(), d.target[i].nvars(),
                                         d.outers[i].is_zero() ? 0 : d.outers[i].constant_value())
                        : compose(d.outers[i], d.parts);
        if (back != d.target[i])
            fail(errc::internal_error, "decomposition does not recompose its target");
    }
}

std::vector<Poly> express_all(const PolyTuple& P, const PolyTuple& X, bool* all_pruned) {
    std::vector<Poly> outers;
    *all_pruned = true;
    for (const Poly& comp : P) {
        if (X.empty()) {
            if (!comp.is_constant())
                fail(errc::internal_error, "empty part tuple for a nonconstant target");
            outers.push_back(Poly::constant(comp.field(), 0,
                                            comp.is_zero() ? 0 : comp.constant_value()));
            continue;
        }
        ExpressResult r = express(comp, X);
        if (!r.pruned) *all_pruned = false;
        outers.push_back(r.outer);
    }
    return outers;
}

bool all_constant(const PolyTuple& P) {
    return std::all_of(P.begin(), P.end(), [](const Poly& q) { return q.is_constant(); });
}

Decomposition constant_decomposition(const PolyTuple& P) {
    Decomposition d;
    d.target = P;
    bool pruned = true;
    d.outers = express_all(P, {}, &pruned);
    d.minimal = true;
    d.pruned = true;
    d.defect = Rat(0);
    verify_composition(d);
    return d;
}

}  // namespace

RefineResult refine_step(const PolyTuple& X, const Rat& t, RankOracle& oracle) {
    check_tuple(X);
    if (X.empty()) fail(errc::invalid_argument, "refine_step on an empty tuple");
    if (!is_form_tuple(X)) fail(errc::not_a_form, "refine_step expects a form tuple");
    u32 d = tuple_degree(X);
    for (const Poly& q : X)
        if (q.degree() != d)
            fail(errc::invalid_argument, "refine_step expects equal degrees");
    if (d < 2) fail(errc::invalid_argument, "refine_step needs degree at least 2");

    u32 r = u32(X.size());
    u32 R = rank_threshold(t, r);
    FormSpace V = span_basis(X);

    // Collect a basis of V from low-rank elements, witnesses attached. The
    // tuple is not t-rank-regular, so these elements span V.
    const FieldSpec& f = V.field();
    PolyTuple basis;
    std::vector<RankWitness> witnesses;
    FpMat coords(f, V.dim(), V.dim());
    u32 have = 0;
    for (ProjectiveIter it(f, V.dim()); !it.done() && have < V.dim(); it.next()) {
        Poly elem = V.element(*it);
        auto below = oracle.rank_below(elem, R);
        if (!below)
            fail(errc::oracle_inconclusive, "rank threshold " + std::to_string(R) +
                                                " undecided during refinement");
        if (!*below) continue;
        FpMat probe(f, have + 1, V.dim());
        for (u32 rr = 0; rr < have; ++rr)
            for (u32 c = 0; c < V.dim(); ++c) probe.at(rr, c) = coords.at(rr, c);
        for (u32 c = 0; c < V.dim(); ++c) probe.at(have, c) = (*it)[c];
        if (rref_in_place(probe) != have + 1) continue;  // dependent on chosen ones
        auto w = oracle.witness_below(elem, R);
        if (!w)
            fail(errc::oracle_inconclusive, "low rank decided without a witness");
        for (u32 c = 0; c < V.dim(); ++c) coords.at(have, c) = (*it)[c];
        basis.push_back(elem);
        witnesses.push_back(*w);
        ++have;
    }
    if (have < V.dim())
        fail(errc::actually_regular,
             "low-rank elements do not span: the tuple is t-rank-regular");

    // All factors, deduplicated projectively; witness soundness re-checked.
    RefineResult out;
    std::map<std::string, u32> seen;
    auto add_factor = [&](const Poly& q) {
        Poly norm = q.scaled(f.inv(q.leading_coeff()));
        auto [it2, inserted] = seen.try_emplace(norm.key(), u32(out.refined.size()));
        if (inserted) out.refined.push_back(norm);
        return it2->second;
    };
    for (std::size_t i = 0; i < basis.size(); ++i) {
        Poly acc(f, basis[i].nvars());
        for (const auto& [a, b] : witnesses[i].summands) {
            add_factor(a);
            add_factor(b);
            acc = acc + a * b;
        }
        if (acc != basis[i])
            fail(errc::internal_error, "refinement witness does not re-expand");
    }
    std::sort(out.refined.begin(), out.refined.end(), poly_less);
    out.low_rank_basis = basis;

    // X = L(B): coordinates of each X_j in the collected basis.
    FormSpace B = span_basis(basis);
    for (const Poly& xj : X) {
        // solve against the raw (non-canonical) basis by augmenting
        FpMat A(f, V.dim(), u32(basis.size()));
        for (u32 c = 0; c < basis.size(); ++c) {
            auto bc = V.coordinates(basis[c]);
            for (u32 rr = 0; rr < V.dim(); ++rr) A.at(rr, c) = (*bc)[rr];
        }
        auto xc = V.coordinates(xj);
        auto sol = solve_linear(A, *xc);
        if (!sol) fail(errc::internal_error, "part escapes the low-rank basis");
        out.map_on_basis.push_back(*sol);
    }

    // contract: deg(Y) < d and |Y| <= 2 t r^2
    for (const Poly& q : out.refined)
        if (q.degree() >= d) fail(errc::internal_error, "refinement did not drop the degree");
    if (Rat(i64(out.refined.size())) > Rat(2) * t * Rat(i64(r) * i64(r)))
        fail(errc::internal_error, "refinement output exceeds 2 t r^2");
    return out;
}

Decomposition rank_regularize(const PolyTuple& P, const Rat& t, RankOracle& oracle) {
    check_tuple(P);
    if (P.empty()) fail(errc::invalid_argument, "empty tuple");
    const FieldSpec& f = P[0].field();
    u32 d = tuple_degree(P);
    if (d >= f.p)
        fail(errc::char_too_small, "degree " + std::to_string(d) +
                                       " needs characteristic above it, have p = " +
                                       std::to_string(f.p));
    if (all_constant(P)) {
        Decomposition dec = constant_decomposition(P);
        dec.t_rank_regular = t;
        return dec;
    }

    // X^0: homogeneous parts of positive degree of every component
    PolyTuple current;
    for (const Poly& comp : P)
        for (u32 e = 1; e <= comp.degree(); ++e) {
            Poly part = comp.homogeneous_part(e);
            if (!part.is_zero()) current.push_back(part);
        }

    Decomposition dec;
    dec.target = P;
    u32 round = 0;
    while (true) {
        if (round > d)
            fail(errc::internal_error, "refinement did not settle within deg(P) rounds");
        FormSpace V = span_basis(current);
        FormSpace W = minimal_generating_subspace(P, V);
        PolyTuple Y = W.basis();
        if (Y.empty()) fail(errc::internal_error, "nonconstant tuple generated by nothing");

        RankRegularity reg = is_t_rank_regular(Y, t, oracle);
        if (reg.regular) {
            dec.parts = Y;
            break;
        }
        // refine only the top degree: substitute the first top-degree
        // component for every lower-degree one (they are then restored)
        u32 top = tuple_degree(Y);
        PolyTuple star, low;
        for (const Poly& q : Y)
            if (q.degree() == top) star.push_back(q);
            else low.push_back(q);
        const Poly& stand_in = star.front();  // Y is sorted top degree first
        PolyTuple star_full = Y;
        for (Poly& q : star_full)
            if (q.degree() != top) q = stand_in;

        RankRegularity star_reg = is_t_rank_regular(star_full, t, oracle);
        if (star_reg.regular)
            fail(errc::internal_error,
                 "top-degree substitution became regular, contradicting the corollary");

        RefineResult ref = refine_step(star_full, t, oracle);
        PolyTuple next = ref.refined;
        for (const Poly& q : low) next.push_back(q);
        dec.provenance.push_back({round, top, u32(Y.size()), u32(next.size())});
        current = std::move(next);
        ++round;
    }

    bool pruned = true;
    dec.outers = express_all(P, dec.parts, &pruned);
    dec.pruned = pruned;
    dec.minimal = true;
    dec.t_rank_regular = t;
    verify_composition(dec);
    if (dec.provenance.size() > d)
        fail(errc::internal_error, "more refinement rounds than the degree");
    return dec;
}

Decomposition weak_regular_decompose(const PolyTuple& P, const Rat& epsilon,
                                     RankOracle& oracle, const WeakRegularConfig& cfg) {
    check_tuple(P);
    if (P.empty()) fail(errc::invalid_argument, "empty tuple");
    const FieldSpec& f = P[0].field();
    u32 d = tuple_degree(P);
    if (d >= f.p)
        fail(errc::char_too_small, "degree " + std::to_string(d) +
                                       " needs characteristic above it, have p = " +
                                       std::to_string(f.p));
    if (!(Rat(0) < epsilon) || Rat(1) < epsilon)
        fail(errc::invalid_argument, "epsilon must lie in (0, 1]");
    if (all_constant(P)) {
        Decomposition dec = constant_decomposition(P);
        dec.epsilon = epsilon;
        return dec;
    }

    std::optional<Rat> best_defect;
    std::string attempts_log;
    Rat t(1);
    for (u32 attempt = 0; attempt <= cfg.max_escalations; ++attempt, t = t * Rat(2)) {
        Decomposition dec = rank_regularize(P, t, oracle);
        FormSpace V = span_basis(dec.parts);
        u32 k = V.dim();
        u32 R = rank_threshold(t, k);
        FormSpace U = low_rank_span(V, R, oracle.as_below_fn());

        // Every element of V outside U must have small bias; this measured
        // check stands in for the structure-vs-randomness bound.
        double bound = epsilon.to_double() * std::pow(double(f.p), -double(k));
        bool bias_ok = true;
        for (ProjectiveIter it(f, k); !it.done() && bias_ok; it.next()) {
            Poly elem = V.element(*it);
            if (U.contains(elem)) continue;
            std::vector<u64> counts(f.p, 0);
            for (u32 v : elem.eval_all()) ++counts[v];
            u64 total = f.point_count(elem.nvars());
            for (u32 c = 1; c < f.p && bias_ok; ++c) {
                // distribution of c*elem permutes the counts
                std::vector<u64> cc(f.p, 0);
                for (u32 v = 0; v < f.p; ++v) cc[f.mul(c, v)] = counts[v];
                if (std::abs(bias_from_counts(f, cc, total)) >
                    bound * (1 + cfg.bias_tolerance) + cfg.bias_tolerance * 1e-3)
                    bias_ok = false;
            }
        }
        if (!bias_ok) {
            attempts_log += " t=" + t.str() + ": bias above threshold;";
            continue;
        }

        // X_1 comes from the top component outside U.
        FormSpace Vtop = V.top_component();
        FormSpace Utop = U.degree_component(V.degree());
        if (Utop.dim() == Vtop.dim()) {
            attempts_log += " t=" + t.str() + ": empty top pencil;";
            continue;
        }
        std::optional<Poly> x1;
        for (ProjectiveIter it(f, Vtop.dim()); !it.done(); it.next()) {
            Poly cand = Vtop.element(*it);
            if (U.contains(cand)) continue;
            if (!x1 || poly_less(cand, *x1)) x1 = cand;
        }
        if (!x1) fail(errc::empty_top, "no top-degree element outside the low-rank span");

        // basis: X_1, completion, then the basis of U
        PolyTuple X{*x1};
        for (const Poly& b : U.basis()) X.push_back(b);
        FpMat probe(f, k, k);
        u32 have = 0;
        auto try_add = [&](const Poly& q) {
            auto qc = V.coordinates(q);
            for (u32 c = 0; c < k; ++c) probe.at(have, c) = (*qc)[c];
            FpMat copy = probe;
            copy.rows = have + 1;
            copy.a.resize(std::size_t(have + 1) * k);
            if (rref_in_place(copy) == have + 1) {
                ++have;
                return true;
            }
            return false;
        };
        for (const Poly& q : X)
            if (!try_add(q)) fail(errc::internal_error, "assembled basis is dependent");
        PolyTuple completion;
        for (const Poly& b : V.basis()) {
            if (have == k) break;
            if (try_add(b)) completion.push_back(b);
        }
        if (have != k) fail(errc::internal_error, "could not complete the basis");
        PolyTuple assembled{*x1};
        for (const Poly& q : completion) assembled.push_back(q);
        for (const Poly& b : U.basis()) assembled.push_back(b);

        RegularityReport rep = regularity_defect(assembled, epsilon);
        if (!best_defect || rep.defect < *best_defect) best_defect = rep.defect;
        if (!rep.verdict) {
            attempts_log += " t=" + t.str() + ": defect " + rep.defect.str() + ";";
            continue;
        }

        // P must genuinely depend on X_1.
        PolyTuple tail = tuple_tail(assembled);
        bool depends = false;
        for (const Poly& comp : P)
            if (!member_fiber_test(comp, tail)) { depends = true; break; }
        if (!depends)
            fail(errc::internal_error, "tail generates the tuple despite minimality");

        bool pruned = true;
        std::vector<Poly> outers = express_all(P, assembled, &pruned);
        if (!pruned) {
            // Only degree-budgeted outer maps certify; the fan-in and curve
            // bounds downstream rely on them.
            attempts_log += " t=" + t.str() + ": outer maps exceed the degree budget;";
            continue;
        }

        dec.parts = assembled;
        dec.outers = std::move(outers);
        dec.pruned = true;
        dec.minimal = true;
        dec.t_rank_regular = t;
        dec.defect = rep.defect;
        dec.worst_point = rep.worst_point;
        dec.epsilon = epsilon;
        dec.escalations = attempt;
        verify_composition(dec);
        return dec;
    }
    fail(errc::escalation_exhausted,
         "no certification within " + std::to_string(cfg.max_escalations + 1) +
             " attempts; best defect " +
             (best_defect ? best_defect->str() : std::string("n/a")) + ";" + attempts_log);
}

bool minimal_decomposition_check(const PolyTuple& P, const PolyTuple& X) {
    if (X.empty()) return true;  // nothing below the zero space
    FormSpace V = span_basis(X);
    const FieldSpec& f = V.field();
    for (u32 drop_deg : V.degrees()) {
        std::vector<Poly> block = V.degree_basis(drop_deg);
        u32 bd = u32(block.size());
        for (ProjectiveIter functional(f, bd); !functional.done(); functional.next()) {
            // hyperplane: kernel of the functional inside this degree block,
            // direct-summed with the other blocks
            std::vector<Poly> hyp;
            for (u32 e : V.degrees())
                if (e != drop_deg)
                    for (const Poly& q : V.degree_basis(e)) hyp.push_back(q);
            u32 pivot = 0;
            while ((*functional)[pivot] == 0) ++pivot;
            for (u32 i = 0; i < bd; ++i) {
                if (i == pivot) continue;
                u32 c = f.mul((*functional)[i], f.inv((*functional)[pivot]));
                Poly q = block[i] - block[pivot].scaled(c);
                if (!q.is_zero()) hyp.push_back(q);
            }
            bool all_pass = true;
            for (const Poly& comp : P)
                if (!member_fiber_test(comp, hyp)) { all_pass = false; break; }
            if (all_pass) return false;
        }
    }
    return true;
}

bool size_within_theorem_bound(u32 size, const Rat& t, u32 d, u32 m) {
    // ((2t+1) d m)^(2^d) with i128 saturation
    Rat base = (Rat(2) * t + Rat(1)) * Rat(i64(d) * i64(m));
    u64 exp = u64(1) << d;
    // compare size^den^exp <= num^exp * ... work in logs with generous margin,
    // falling back to exact only near the boundary
    double logbound = double(exp) * std::log(base.to_double());
    double logsize = std::log(std::max<double>(1.0, double(size)));
    if (logsize < logbound - 1e-6) return true;
    if (logsize > logbound + 1e-6) return false;
    // boundary: exact integer comparison of size^1 vs base^exp via i128
    i128 num = 1;
    bool sat = false;
    for (u64 i = 0; i < exp && !sat; ++i) {
        num *= base.num;
        if (num > i128(1) << 100) sat = true;
    }
    if (sat) return true;
    i128 den = 1;
    for (u64 i = 0; i < exp; ++i) den *= base.den;
    return i128(size) * den <= num;
}

}  // namespace wr
