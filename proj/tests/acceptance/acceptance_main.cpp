// Acceptance suite: one function per criterion, each printing a PASS/FAIL
// line. Run with no arguments for all criteria, or with a number to run one.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include <json.hpp>

#include "support/gen.hpp"
#include "wr/driver.hpp"
#include "wr/formula.hpp"
#include "wr/imagery.hpp"

using namespace wr;
using gen::Rng;
using nlohmann::json;

namespace {

struct Check {
    bool ok = true;
    std::string why;
    void require(bool cond, const std::string& msg) {
        if (ok && !cond) {
            ok = false;
            why = msg;
        }
    }
};

// ---- criterion 1: Fourier identities --------------------------------------

bool criterion1() {
    Check c;
    Rng rng(101);
    const u32 primes[3] = {2, 3, 5};
    for (u32 inst = 0; inst < 200 && c.ok; ++inst) {
        FieldSpec f(primes[inst % 3]);
        u32 n = rng.in(1, 6);
        u32 k = rng.in(1, 3);
        PolyTuple X = gen::random_tuple(rng, f, n, k, 3, 6);
        ValueCounts vc = joint_distribution(X);
        auto dirs = directional_counts(X);
        for (u64 y = 0; y < vc.counts.size() && c.ok; ++y) {
            double via = prob_via_bias(f, dirs, vc.total, decode_point(f, y, k));
            c.require(std::abs(via - vc.probability(y)) < 1e-9,
                      "point identity off at instance " + std::to_string(inst));
        }
        u64 tails = vc.counts.size() / f.p;
        for (u64 z = 0; z < tails && c.ok; ++z) {
            Line l = Line::e1(f, k, decode_point(f, z, k - 1));
            u64 hits = 0;
            for (u32 t = 0; t < f.p; ++t) hits += vc.counts[encode_point(f, l.point(f, t))];
            double via = line_prob_via_bias(f, dirs, vc.total, l);
            c.require(std::abs(via - double(hits) / double(vc.total)) < 1e-9,
                      "line identity off at instance " + std::to_string(inst));
        }
    }
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 2: popular lines are contained ------------------------------

bool criterion2() {
    Check c;
    Rng rng(202);
    const u32 primes[3] = {2, 3, 5};
    u32 certified = 0;
    for (u32 inst = 0; inst < 200 && c.ok; ++inst) {
        FieldSpec f(primes[inst % 3]);
        u32 n = rng.in(2, 6);
        u32 k = rng.in(1, 3);
        PolyTuple X = gen::random_form_tuple(rng, f, n, k, 2, 3);
        // certify the tuple with its own measured defect
        RegularityReport rep = regularity_defect(X, Rat(1));
        Rat eps = rep.defect;
        ++certified;
        for (const PopularLine& pl : popular_line_containment(X, eps)) {
            c.require(pl.contained, "flagged line not contained at instance " +
                                        std::to_string(inst));
        }
    }
    c.require(certified >= 200, "corpus too small");
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 3: U_R(V) structure -----------------------------------------

bool criterion3() {
    Check c;
    Rng rng(303);
    FieldSpec f(3);
    RankOracle oracle;
    u32 spaces = 0;
    while (spaces < 100 && c.ok) {
        u32 n = rng.in(3, 4);
        u32 count = rng.in(1, 3);
        std::vector<Poly> forms;
        for (u32 i = 0; i < count; ++i)
            forms.push_back(gen::random_form(rng, f, n, rng.in(1, 2), rng.in(1, 3)));
        FormSpace V = span_basis(forms, f, n);
        if (V.dim() == 0 || V.dim() > 3) continue;
        ++spaces;
        for (u32 R = 1; R <= 3 && c.ok; ++R) {
            FormSpace U = low_rank_span(V, R, oracle.as_below_fn());

            // Lemma low-deg: low-degree elements of V land in U
            if (!U.empty()) {
                std::vector<u32> coeffs(V.dim(), 0);
                for (u64 idx = 1; idx < checked_pow(3, V.dim(), 1 << 20); ++idx) {
                    std::vector<u32> cs = decode_point(f, idx, V.dim());
                    Poly elem = V.element(cs);
                    if (elem.is_zero()) continue;
                    if (elem.degree() < U.degree())
                        c.require(U.contains(elem), "low-deg closure violated");
                }
            }

            // Lemma U-hom: homogeneous parts of U's elements stay inside U
            for (u64 idx = 1; idx < checked_pow(3, U.dim(), 1 << 20) && c.ok; ++idx) {
                Poly elem = U.element(decode_point(f, idx, U.dim()));
                for (u32 e = 1; e <= elem.degree(); ++e) {
                    Poly part = elem.homogeneous_part(e);
                    if (!part.is_zero())
                        c.require(U.contains(part), "U_R is not homogeneous");
                }
            }

            // eq U-top and the corollary
            FormSpace Vtop = V.top_component();
            FormSpace Utop_direct = low_rank_span(Vtop, R, oracle.as_below_fn());
            FormSpace Utop_cut = U.degree_component(V.degree());
            c.require(Utop_direct.same_space(Utop_cut), "U_R(V^) != U_R(V) cap V^");
            bool full = U.dim() == V.dim();
            bool top_full = Utop_direct.dim() == Vtop.dim();
            c.require(full == top_full, "top-rank-regularity equivalence violated");
        }
    }
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 4: oracle agreement on all ternary quadratics over F_3 ------

bool criterion4() {
    Check c;
    FieldSpec f(3);
    MonoBasis mb(f, 3, 2);
    u32 seen = 0;
    for (ProjectiveIter it(f, mb.size()); !it.done() && c.ok; it.next()) {
        Poly q = mb.poly_from(*it);
        if (q.is_zero() || q.degree() != 2) continue;
        ++seen;
        RankBound a = rank_quadratic(q);
        RankBound b = rank_bounded_search(q, 6);
        c.require(a.is_exact() && b.is_exact(), "non-exact oracle answer on " + q.to_string());
        c.require(a.lower == b.lower,
                  "oracles disagree on " + q.to_string() + ": " + std::to_string(a.lower) +
                      " vs " + std::to_string(b.lower));
        BiasRankBound bias_lb = bias_rank_lower_bound(q);
        c.require(!bias_lb.capped && bias_lb.bound <= a.lower,
                  "bias bound exceeds the exact rank on " + q.to_string());
    }
    c.require(seen == 364, "expected 364 projective quadratics, saw " + std::to_string(seen));
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 5 corpus -----------------------------------------------------

struct PipelineInstance {
    PolyTuple target;
    Rat t;
};

std::vector<PipelineInstance> corpus5() {
    FieldSpec f(5);
    Rng rng(505);
    std::vector<PipelineInstance> out;
    // quadratic-flavored instances, n up to 6
    for (u32 i = 0; i < 25; ++i) {
        u32 n = rng.in(4, 6);
        Poly q1 = gen::random_form(rng, f, n, 2, rng.in(2, 4));
        PolyTuple P{q1 + gen::random_poly(rng, f, n, 1, 2)};
        if (i % 2 == 1) {
            Poly q2 = gen::random_form(rng, f, n, 2, rng.in(1, 3));
            P.push_back(q2 + gen::random_linear(rng, f, n));
        }
        out.push_back({P, Rat(i % 3 == 0 ? 2 : 1)});
    }
    // cubic instances with a single cubic core over x1..x4
    for (u32 i = 0; i < 15; ++i) {
        u32 n = rng.in(4, 6);
        Poly a = gen::random_linear(rng, f, 4);
        Poly b = gen::random_form(rng, f, 4, 2, rng.in(1, 2));
        Poly core4 = a * b;  // reducible cubic
        if (i % 3 == 2) {
            Poly a2 = gen::random_linear(rng, f, 4);
            Poly b2 = gen::random_form(rng, f, 4, 2, 1);
            core4 = core4 + a2 * b2;  // rank <= 2 cubic
        }
        // lift to n variables
        Poly core(f, n);
        for (const Term& t : core4.terms()) {
            std::vector<u32> e(n, 0);
            for (u32 v = 0; v < 4; ++v) e[v] = t.mono.exps[v];
            core.add_term(e, t.coeff);
        }
        core.normalize();
        if (core.is_zero() || core.degree() != 3) { --i; continue; }
        Poly low = gen::random_poly(rng, f, n, 1, 2);
        PolyTuple P{core + low};
        if (i % 4 == 3) P.push_back(gen::random_linear(rng, f, n));
        out.push_back({P, Rat(1)});
    }
    // mixed pairs
    for (u32 i = 0; i < 10; ++i) {
        u32 n = rng.in(4, 5);
        Poly q = gen::random_form(rng, f, n, 2, 2);
        Poly l = gen::random_linear(rng, f, n);
        PolyTuple P{q * Poly::constant(f, n, 1) + l, q + gen::random_linear(rng, f, n)};
        out.push_back({P, Rat(i % 2 ? 2 : 1)});
    }
    return out;
}

bool criterion5() {
    Check c;
    auto corpus = corpus5();
    c.require(corpus.size() >= 50, "corpus too small");
    RankOracle oracle;
    for (std::size_t i = 0; i < corpus.size() && c.ok; ++i) {
        const auto& inst = corpus[i];
        u32 d = tuple_degree(inst.target);
        if (d == 0) continue;
        Decomposition dec = rank_regularize(inst.target, inst.t, oracle);
        c.require(dec.provenance.size() <= d,
                  "instance " + std::to_string(i) + ": too many rounds");
        // composition
        for (std::size_t j = 0; j < inst.target.size(); ++j) {
            Poly back = dec.parts.empty()
                            ? Poly::constant(inst.target[j].field(), inst.target[j].nvars(),
                                             dec.outers[j].is_zero()
                                                 ? 0
                                                 : dec.outers[j].constant_value())
                            : compose(dec.outers[j], dec.parts);
            c.require(back == inst.target[j],
                      "instance " + std::to_string(i) + ": does not recompose");
        }
        // minimality and regularity re-checks
        c.require(minimal_decomposition_check(inst.target, dec.parts),
                  "instance " + std::to_string(i) + ": not minimal");
        if (!dec.parts.empty()) {
            RankRegularity reg = is_t_rank_regular(dec.parts, inst.t, oracle);
            c.require(reg.regular, "instance " + std::to_string(i) + ": output not regular");
        }
        c.require(size_within_theorem_bound(dec.size(), inst.t, d, u32(inst.target.size())),
                  "instance " + std::to_string(i) + ": size above the theorem bound");
    }
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 6: the exact pipeline instance -------------------------------

bool criterion6() {
    Check c;
    FieldSpec f(5);
    Poly Q = parse_poly("x1*x2 + x3*x4", f, 4);
    PolyTuple P{Q * Q};
    RankOracle oracle;
    Decomposition dec = weak_regular_decompose(P, Rat(1, 2), oracle);
    c.require(dec.parts.size() == 1, "expected a single part");
    c.require(dec.parts[0] == Q, "part is not the quadratic (up to scalar)");
    c.require(dec.outers[0] == parse_poly("x1^2", f, 1), "outer map is not y^2");
    c.require(dec.defect && *dec.defect <= Rat(1, 2), "defect above epsilon");
    c.require(*dec.defect == Rat(4, 25), "defect differs from the counted value");
    c.require(!member_fiber_test(P[0], {}), "P is generated by the empty tuple");

    CurveExtraction ce = extract_curve(dec);
    c.require(ce.curve.nonconstant() && ce.curve.degree() == 2,
              "curve is not a nonconstant degree-2 curve");
    PointSet img = image(P);
    for (u32 t = 0; t < 5; ++t)
        c.require(img.contains(ce.curve.at(t)), "curve image escapes Image(P)");

    UdegResult u = udeg(P);
    c.require(!u.infinite && u.u == 2, "independent udeg is not 2");
    c.require(tuple_degree(dec.parts) * u.u <= tuple_degree(P), "degree chain violated");

    RktSearchOutcome rkt = rkt_search(P, 2, 3);
    c.require(rkt.certificate.has_value() && rkt.certificate->summands.size() == 1,
              "rk_2 certificate with r = 1 not found");
    if (rkt.certificate)
        c.require(rkt_verify(P, *rkt.certificate).ok, "rk_2 certificate fails verification");
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 7: non-surjective maps decompose through low degrees ---------

std::vector<Poly> corpus7() {
    FieldSpec f(5);
    auto pp = [&](const std::string& s) { return parse_poly(s, f, 4); };
    Poly Q1 = pp("x1*x2 + x3*x4");
    Poly Q2 = pp("x1^2 + x2^2");
    Poly Q3 = pp("x1^2 + x2*x3");
    Poly Q4 = pp("x1*x2 + x3^2");
    Poly Q5 = pp("x1^2 + x2^2 + x3^2");
    Poly Q6 = pp("x1^2 + x2^2 + x3^2 + x4^2");
    std::vector<Poly> out = {
        Q1 * Q1,
        Q2 * Q2,
        Q3 * Q3,
        Q4 * Q4,
        Q5 * Q5,
        Q6 * Q6,
        Q1 * Q1 + Q1,
        Q1 * Q1 + Q1.scaled(2) + Poly::constant(f, 4, 1),
        Q2 * Q2 + Q2,
        Q5 * Q5 + Q5.scaled(3),
        pp("x1^2*x2^2"),
        pp("x1^4"),
        pp("2*x1^4 + 1"),
        pp("x1^4 + x2^4"),
        pp("x1^4 + x1^2"),
        pp("x1^2"),
        pp("3*x1^2 + 1"),
        pp("x1^2 + 2"),
        (Q1 + Poly::constant(f, 4, 1)) * (Q1 + Poly::constant(f, 4, 1)),
        Q4 * Q4 + Q4,
    };
    return out;
}

bool criterion7() {
    Check c;
    FieldSpec f(5);
    std::vector<Poly> corpus = corpus7();
    c.require(corpus.size() == 20, "corpus size");
    RankOracle oracle;
    for (std::size_t i = 0; i < corpus.size() && c.ok; ++i) {
        const Poly& P = corpus[i];
        u32 d = P.degree();
        // the hypothesis: no line in the image (m = 1: non-surjectivity)
        PointSet img = image({P});
        c.require(img.points.size() < 5, "instance " + std::to_string(i) + " is surjective");
        Rat eps(i64(5 - d), 5);
        Decomposition dec = weak_regular_decompose({P}, eps, oracle);
        c.require(2 * tuple_degree(dec.parts) <= d,
                  "instance " + std::to_string(i) + ": deg(X) above d/2");
        c.require(dec.defect && *dec.defect <= eps,
                  "instance " + std::to_string(i) + ": defect above 1 - d/p");
    }
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 8: udeg ground truths and properties --------------------------

bool criterion8() {
    Check c;
    FieldSpec f5(5);
    c.require(udeg({parse_poly("x1^2", f5, 1)}).u == 2, "udeg(x^2) != 2");
    c.require(udeg({parse_poly("x1^4", f5, 1)}).u == 4, "udeg(x^4) != 4");

    Rng rng(808);
    const u32 primes[2] = {3, 5};
    u32 tested = 0;
    while (tested < 50 && c.ok) {
        FieldSpec f(primes[tested % 2]);
        u32 n = rng.in(1, 3);
        Poly P = gen::random_poly(rng, f, n, f.p - 1, 4);
        if (P.is_constant()) continue;
        ++tested;
        UdegResult r = udeg({P});
        c.require(!r.infinite, "nonconstant map with infinite udeg");

        // m = 1: the image holds a line exactly when udeg is 1
        bool line_free = !contains_line(image({P}), f).has_value();
        c.require(line_free == (r.u >= 2), "line-freeness disagrees with udeg >= 2");

        // udeg <= min over used variables of deg_i, and udeg < p
        u32 min_used = f.p;
        for (u32 v = 0; v < n; ++v)
            if (P.degree_in(v) >= 1) min_used = std::min(min_used, P.degree_in(v));
        c.require(r.u <= min_used, "udeg above min_i deg_i on " + P.to_string());
        c.require(r.u < f.p, "udeg at or above p");

        // affine invariance
        u32 a = 1 + rng.below(f.p - 1);
        u32 b = rng.below(f.p);
        UdegResult shifted = udeg({P.scaled(a) + Poly::constant(f, n, b)});
        c.require(shifted.u == r.u, "udeg changed under an affine shift");

        // composition with a surjective inner tuple preserves udeg; a general
        // inner tuple cannot lower it
        if (tested % 2 == 0) {
            Poly F = gen::random_poly(rng, f, 1, f.p - 1, 3);
            if (!F.is_constant()) {
                UdegResult base = udeg({F});
                Poly lin = gen::random_linear(rng, f, 2);
                UdegResult through = udeg({compose(F, {lin})});  // linear forms are surjective
                c.require(through.u == base.u, "udeg moved under a surjective substitution");
                Poly sq = parse_poly("x1^2", f, 2);
                Poly composed = compose(F, {sq});
                if (!composed.is_constant()) {
                    UdegResult narrowed = udeg({composed});
                    c.require(narrowed.u >= base.u, "udeg dropped under a substitution");
                }
            }
        }

        // udeg(Q^t) <= t for surjective Q
        if (tested % 3 == 0) {
            Poly Q = gen::random_poly(rng, f, 2, 2, 3);
            if (!Q.is_constant() && image({Q}).points.size() == f.p) {
                for (u32 t = 2; t <= 2; ++t) {
                    Poly power = Q;
                    for (u32 e = 1; e < t; ++e) power = power * Q;
                    UdegResult pr = udeg({power});
                    c.require(pr.u <= t, "udeg(Q^t) above t for surjective Q");
                }
            }
        }
    }
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 9: formula synthesis over the certified corpus ----------------

bool criterion9() {
    Check c;
    RankOracle oracle;
    std::vector<Decomposition> decs;

    // criterion 5 outputs
    for (const auto& inst : corpus5()) {
        if (tuple_degree(inst.target) == 0) continue;
        decs.push_back(rank_regularize(inst.target, inst.t, oracle));
    }
    // criterion 6 and 7 outputs
    {
        FieldSpec f(5);
        Poly Q = parse_poly("x1*x2 + x3*x4", f, 4);
        decs.push_back(weak_regular_decompose({Q * Q}, Rat(1, 2), oracle));
        for (const Poly& P : corpus7()) {
            Rat eps(i64(5 - P.degree()), 5);
            decs.push_back(weak_regular_decompose({P}, eps, oracle));
        }
    }

    for (std::size_t i = 0; i < decs.size() && c.ok; ++i) {
        const Decomposition& d = decs[i];
        u32 dd = tuple_degree(d.target);
        u32 degx = tuple_degree(d.parts);
        c.require(d.pruned, "decomposition " + std::to_string(i) + " is unpruned");
        if (!d.pruned) break;
        u32 u = degx == 0 ? 1 : std::max<u32>(1, dd / degx);
        SPSPFormula phi = build_spsp(d, u);
        c.require(equiv_check(phi, d.target),
                  "formula " + std::to_string(i) + " fails equivalence");
        u32 b_target = (dd + u - 1) / u;
        c.require(phi.bottom_degree() <= std::max(b_target, 1u),
                  "formula " + std::to_string(i) + ": bottom degree above ceil(d/u)");
        // r <= sum_{j=0}^{d} k^j always; the displayed 2 k^d holds once k >= 2
        double sum_bound = 0;
        for (u32 j = 0; j <= dd; ++j)
            sum_bound += std::pow(double(std::max<u32>(phi.source_parts, 1)), double(j));
        c.require(double(phi.top_fanin()) <= sum_bound,
                  "formula " + std::to_string(i) + ": top fan-in above sum k^i");
        if (phi.source_parts >= 2)
            c.require(double(phi.top_fanin()) <=
                          2.0 * std::pow(double(phi.source_parts), double(dd)),
                      "formula " + std::to_string(i) + ": top fan-in above 2k^d");
    }
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

// ---- criterion 10: byte-identical certificates -------------------------------

bool criterion10() {
    Check c;
    const char* square =
        "field 5\nvars x1 x2 x3 x4\npoly P = x1^2*x2^2 + 2*x1*x2*x3*x4 + x3^2*x4^2\n";
    const char* quad = "field 3\nvars x1 x2 x3 x4\npoly Q = x1*x2 + x3*x4\neps 1/3\n";
    struct Job {
        const char* cmd;
        const char* prob;
        const char* opts;
    } jobs[] = {
        {"regularize", square, "eps=1/2"}, {"analyze", quad, ""},
        {"udeg", square, ""},              {"rank", square, "t=2"},
        {"formula", square, "eps=1/2 u=2"}, {"rank", quad, ""},
    };
    for (const Job& j : jobs) {
        CommandResult a = run_command(j.cmd, j.prob, parse_options(j.opts));
        CommandResult b = run_command(j.cmd, j.prob, parse_options(j.opts));
        c.require(a.json == b.json && a.text == b.text && a.exit_code == b.exit_code,
                  std::string("non-deterministic run: ") + j.cmd);
        c.require(!a.json.empty(), std::string("no certificate from ") + j.cmd);
    }
    if (!c.ok) std::cout << "  " << c.why << "\n";
    return c.ok;
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all = {
        {1, "Fourier identities match exhaustive counting", criterion1},
        {2, "popular lines are contained in the image", criterion2},
        {3, "low-rank span structure (low-deg, U-hom, top-rank-reg)", criterion3},
        {4, "rank oracles agree on ternary quadratics over F_3", criterion4},
        {5, "rank-regularization terminates, minimal, regular, bounded", criterion5},
        {6, "weak pipeline exact instance (x1x2+x3x4)^2 over F_5", criterion6},
        {7, "non-surjective maps certify deg(X) <= d/2", criterion7},
        {8, "udeg ground truths and properties", criterion8},
        {9, "formula synthesis over the certified corpus", criterion9},
        {10, "byte-identical certificates on reruns", criterion10},
    };
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    int failures = 0;
    for (const auto& crit : all) {
        if (only && crit.id != only) continue;
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = crit.fn();
        } catch (const std::exception& e) {
            std::cout << "  exception: " << e.what() << "\n";
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        std::printf("[%s] criterion %d: %s (%lld ms)\n", ok ? "PASS" : "FAIL", crit.id,
                    crit.name, static_cast<long long>(ms));
        if (!ok) ++failures;
    }
    return failures;
}
