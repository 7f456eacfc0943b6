#include "wr/formula.hpp"

#include <algorithm>
#include <cmath>

namespace wr {

u32 SPSPFormula::prod_fanin() const {
    u32 a = 0;
    for (const auto& prod : products) a = std::max(a, u32(prod.size()));
    return a;
}

u32 SPSPFormula::bottom_degree() const {
    u32 b = 0;
    for (const auto& prod : products)
        for (const Poly& q : prod) b = std::max(b, q.degree());
    return b;
}

std::vector<u32> SPSPFormula::eval(const std::vector<u32>& point) const {
    std::vector<u32> prodvals(products.size());
    for (std::size_t j = 0; j < products.size(); ++j) {
        u32 v = 1;
        for (const Poly& q : products[j]) v = field.mul(v, q.eval(point));
        prodvals[j] = v;
    }
    std::vector<u32> out(coefficients.size(), 0);
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        for (std::size_t j = 0; j < products.size(); ++j)
            if (coefficients[i][j])
                out[i] = field.add(out[i], field.mul(coefficients[i][j], prodvals[j]));
    return out;
}

SPSPFormula build_spsp(const Decomposition& D, u32 u) {
    if (u < 1) fail(errc::invalid_argument, "product fan-in target must be positive");
    if (!D.pruned)
        fail(errc::invalid_argument, "formula synthesis needs degree-bounded outer maps");
    const FieldSpec& f = D.target[0].field();
    u32 n = D.target[0].nvars();
    u32 d = tuple_degree(D.target);
    u32 b_target = (d + u - 1) / u;
    if (!D.parts.empty() && tuple_degree(D.parts) > std::max(b_target, 1u))
        fail(errc::invalid_argument, "parts exceed the bottom degree target");

    SPSPFormula phi;
    phi.field = f;
    phi.nvars = n;
    phi.source_parts = u32(D.parts.size());

    // shared product list: the union of the outer maps' monomials
    std::vector<Monomial> monos;
    for (const Poly& outer : D.outers)
        for (const Term& t : outer.terms())
            if (std::find_if(monos.begin(), monos.end(), [&](const Monomial& m) {
                    return m == t.mono;
                }) == monos.end())
                monos.push_back(t.mono);
    std::sort(monos.begin(), monos.end(),
              [](const Monomial& a, const Monomial& b) { return grlex_less(b, a); });

    for (const Monomial& M : monos) {
        // X-factors with multiplicity, packed first-fit by descending degree
        std::vector<u32> factor_parts;  // indices into D.parts
        for (u32 j = 0; j < D.parts.size(); ++j)
            for (u32 c = 0; c < M.exps[j]; ++c) factor_parts.push_back(j);
        u64 xdeg = 0;
        for (u32 j : factor_parts) xdeg += D.parts[j].degree();
        if (xdeg > d)
            fail(errc::degree_overflow, "monomial exceeds the target degree after pruning");
        std::stable_sort(factor_parts.begin(), factor_parts.end(), [&](u32 a, u32 b) {
            return D.parts[a].degree() > D.parts[b].degree();
        });
        std::vector<std::vector<u32>> bins;
        std::vector<u32> bin_load;
        for (u32 j : factor_parts) {
            u32 deg = D.parts[j].degree();
            bool placed = false;
            for (std::size_t b = 0; b < bins.size() && !placed; ++b) {
                if (bin_load[b] + deg <= b_target) {
                    bins[b].push_back(j);
                    bin_load[b] += deg;
                    placed = true;
                }
            }
            if (!placed) {
                bins.push_back({j});
                bin_load.push_back(deg);
            }
        }
        std::vector<Poly> bottoms;
        for (const auto& bin : bins) {
            Poly q = Poly::constant(f, n, 1);
            for (u32 j : bin) q = q * D.parts[j];
            bottoms.push_back(q);
        }
        phi.products.push_back(std::move(bottoms));
    }

    for (const Poly& outer : D.outers) {
        std::vector<u32> row(monos.size(), 0);
        for (const Term& t : outer.terms()) {
            auto it = std::find_if(monos.begin(), monos.end(),
                                   [&](const Monomial& m) { return m == t.mono; });
            row[std::size_t(it - monos.begin())] = t.coeff;
        }
        phi.coefficients.push_back(std::move(row));
    }
    return phi;
}

bool equiv_check(const SPSPFormula& phi, const PolyTuple& P) {
    check_tuple(P);
    if (phi.coefficients.size() != P.size())
        fail(errc::dimension_mismatch, "formula components vs tuple size");
    const FieldSpec& f = phi.field;
    u32 n = phi.nvars;
    f.point_count(n);
    std::vector<std::vector<u32>> vals(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) vals[i] = P[i].eval_all();
    u64 idx = 0;
    for (PointIter it(f, n); !it.done(); it.next(), ++idx) {
        std::vector<u32> got = phi.eval(*it);
        for (std::size_t i = 0; i < P.size(); ++i)
            if (got[i] != vals[i][idx]) return false;
    }
    return true;
}

FaninReport certify_fanin(const SPSPFormula& phi, u32 m, u32 d, u32 u) {
    FaninReport rep;
    rep.top_fanin = phi.top_fanin();
    rep.prod_fanin = phi.prod_fanin();
    rep.bottom_deg = phi.bottom_degree();
    rep.u_target = u;
    rep.b_target = u >= 1 ? (d + u - 1) / u : d;
    rep.prod_fanin_exceeds_u = rep.prod_fanin > u;
    rep.bottom_within = rep.bottom_deg <= rep.b_target;
    rep.top_bound = 2.0 * std::pow(double(phi.source_parts), double(d));
    rep.top_bound_sum = 0;
    for (u32 i = 0; i <= d; ++i) rep.top_bound_sum += std::pow(double(phi.source_parts), double(i));
    rep.top_within = double(rep.top_fanin) <= rep.top_bound_sum;
    rep.context = "asymptotic top fan-in shape: (2m)^(2^(d(1+o(1)))) with m = " +
                  std::to_string(m) + ", d = " + std::to_string(d);
    return rep;
}

}  // namespace wr
