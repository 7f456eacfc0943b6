#include "wr/spectral.hpp"

#include <cmath>
#include <numbers>

#include "wr/linalg.hpp"

namespace wr {

namespace {

std::vector<std::complex<double>> roots_of_unity(u32 p) {
    std::vector<std::complex<double>> w(p);
    for (u32 v = 0; v < p; ++v) {
        double ang = 2.0 * std::numbers::pi * double(v) / double(p);
        w[v] = {std::cos(ang), std::sin(ang)};
    }
    return w;
}

// Pack the tuple into per-point value rows, one eval_all pass per component.
std::vector<std::vector<u32>> tuple_values(const PolyTuple& X) {
    std::vector<std::vector<u32>> vals(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) vals[i] = X[i].eval_all();
    return vals;
}

Rat power_ratio(u64 num_scale, u32 p, i64 exp) {
    // num_scale * p^exp as an exact rational (exp may be negative)
    if (exp >= 0) {
        i64 v = i64(num_scale);
        for (i64 i = 0; i < exp; ++i) v *= p;
        return Rat(v);
    }
    i64 den = 1;
    for (i64 i = 0; i < -exp; ++i) den *= p;
    return Rat(i64(num_scale), den);
}

}  // namespace

ValueCounts joint_distribution(const PolyTuple& X) {
    check_tuple(X);
    if (X.empty()) fail(errc::invalid_argument, "joint distribution of an empty tuple");
    const FieldSpec& f = X[0].field();
    u32 n = X[0].nvars();
    u32 k = u32(X.size());
    u64 total = f.point_count(n);
    u64 cells = checked_pow(f.p, k, f.enumeration_budget);

    auto vals = tuple_values(X);
    ValueCounts vc{f, k, total, std::vector<u64>(cells, 0)};
    for (u64 idx = 0; idx < total; ++idx) {
        u64 key = 0;
        for (u32 i = 0; i < k; ++i) key = key * f.p + vals[i][idx];
        ++vc.counts[key];
    }
    return vc;
}

std::complex<double> bias_from_counts(const FieldSpec& f, const std::vector<u64>& value_counts,
                                      u64 total) {
    auto w = roots_of_unity(f.p);
    std::complex<double> acc{0, 0};
    for (u32 v = 0; v < f.p; ++v)
        if (value_counts[v]) acc += double(value_counts[v]) * w[v];
    return acc / double(total);
}

std::complex<double> bias(const Poly& P) {
    const FieldSpec& f = P.field();
    u64 total = f.point_count(P.nvars());
    std::vector<u64> counts(f.p, 0);
    for (u32 v : P.eval_all()) ++counts[v];
    return bias_from_counts(f, counts, total);
}

Line Line::canonical(const FieldSpec& f, std::vector<u32> direction, std::vector<u32> offset) {
    if (direction.size() != offset.size())
        fail(errc::dimension_mismatch, "line direction/offset arity");
    u32 pivot = 0;
    while (pivot < direction.size() && direction[pivot] % f.p == 0) ++pivot;
    if (pivot == direction.size()) fail(errc::invalid_argument, "line with zero direction");
    u32 inv = f.inv(direction[pivot]);
    for (u32& d : direction) d = f.mul(d % f.p, inv);
    u32 shift = offset[pivot] % f.p;
    for (u32 i = 0; i < offset.size(); ++i)
        offset[i] = f.sub(offset[i] % f.p, f.mul(shift, direction[i]));
    return Line{std::move(direction), std::move(offset)};
}

Line Line::e1(const FieldSpec& f, u32 k, const std::vector<u32>& tail_offset) {
    if (tail_offset.size() + 1 != k) fail(errc::dimension_mismatch, "line offset arity");
    std::vector<u32> dir(k, 0);
    dir[0] = 1;
    std::vector<u32> off(k, 0);
    for (u32 i = 1; i < k; ++i) off[i] = tail_offset[i - 1] % f.p;
    return Line{std::move(dir), std::move(off)};
}

std::vector<u32> Line::point(const FieldSpec& f, u32 t) const {
    std::vector<u32> y(direction.size());
    for (u32 i = 0; i < y.size(); ++i) y[i] = f.add(offset[i], f.mul(t, direction[i]));
    return y;
}

RegularityReport regularity_defect(const PolyTuple& X, const Rat& epsilon) {
    check_tuple(X);
    if (X.empty()) fail(errc::invalid_argument, "defect of an empty tuple");
    if (!is_form_tuple(X)) fail(errc::not_a_form, "defect requires a form tuple");
    u32 k = u32(X.size());
    const FieldSpec& f = X[0].field();
    u32 n = X[0].nvars();
    if (X[0].degree() != tuple_degree(X))
        fail(errc::not_max_degree_first, "first component must have maximal degree");

    ValueCounts joint = joint_distribution(X);
    u64 tail_cells = checked_pow(f.p, k - 1, f.enumeration_budget);
    std::vector<u64> tail_counts(tail_cells, 0);
    for (u64 y = 0; y < joint.counts.size(); ++y) tail_counts[y % tail_cells] += joint.counts[y];

    // delta = max_y |p*C[y] - C'[y']| * p^(k-n-1), exact.
    u64 best = 0;
    u64 best_y = 0;
    for (u64 y = 0; y < joint.counts.size(); ++y) {
        u64 a = u64(f.p) * joint.counts[y];
        u64 b = tail_counts[y % tail_cells];
        u64 dev = a > b ? a - b : b - a;
        if (dev > best) { best = dev; best_y = y; }
    }

    RegularityReport rep;
    rep.defect = power_ratio(best, f.p, i64(k) - i64(n) - 1);
    rep.worst_point = decode_point(f, best_y, k);
    rep.epsilon_threshold = epsilon;
    rep.verdict = !(epsilon < rep.defect);

    // Linear independence over the monomial coordinates (mixed degrees).
    {
        std::map<std::vector<u32>, u32> cols;
        for (const Poly& q : X)
            for (const Term& t : q.terms()) cols.try_emplace(t.mono.exps, u32(cols.size()));
        FpMat m(f, k, std::max<u32>(1, u32(cols.size())));
        for (u32 r = 0; r < k; ++r)
            for (const Term& t : X[r].terms()) m.at(r, cols[t.mono.exps]) = t.coeff;
        rep.dependent_tuple = matrix_rank(m) < k;
    }
    return rep;
}

std::vector<std::vector<u64>> directional_counts(const PolyTuple& X) {
    check_tuple(X);
    if (X.empty()) fail(errc::invalid_argument, "directional counts of an empty tuple");
    const FieldSpec& f = X[0].field();
    u32 k = u32(X.size());
    u32 n = X[0].nvars();
    checked_pow(f.p, n + k, f.enumeration_budget);

    ValueCounts joint = joint_distribution(X);
    u64 dirs = 1;
    for (u32 i = 0; i < k; ++i) dirs *= f.p;

    std::vector<std::vector<u64>> out(dirs, std::vector<u64>(f.p, 0));
    std::vector<u32> yvec(k);
    for (u64 y = 0; y < joint.counts.size(); ++y) {
        if (!joint.counts[y]) continue;
        u64 rest = y;
        for (u32 i = k; i-- > 0;) { yvec[i] = u32(rest % f.p); rest /= f.p; }
        for (u64 a = 0; a < dirs; ++a) {
            u64 ra = a;
            u32 dot = 0;
            for (u32 i = k; i-- > 0;) {
                dot = f.add(dot, f.mul(u32(ra % f.p), yvec[i]));
                ra /= f.p;
            }
            out[a][dot] += joint.counts[y];
        }
    }
    return out;
}

namespace {

double prob_from_dirs(const FieldSpec& f, const std::vector<std::vector<u64>>& dir_counts,
                      u64 total, const std::vector<u32>& anchor, bool restrict_a1_zero) {
    u32 k = u32(anchor.size());
    auto w = roots_of_unity(f.p);
    std::complex<double> acc{0, 0};
    u64 used = 0;
    std::vector<u32> avec(k);
    for (u64 a = 0; a < dir_counts.size(); ++a) {
        u64 ra = a;
        for (u32 i = k; i-- > 0;) { avec[i] = u32(ra % f.p); ra /= f.p; }
        if (restrict_a1_zero && avec[0] != 0) continue;
        u32 shift = 0;
        for (u32 i = 0; i < k; ++i) shift = f.add(shift, f.mul(avec[i], anchor[i]));
        // bias(a . (X - anchor)) = (1/total) sum_v counts[v] w^(v - shift)
        std::complex<double> b{0, 0};
        for (u32 v = 0; v < f.p; ++v)
            if (dir_counts[a][v]) b += double(dir_counts[a][v]) * w[f.sub(v, shift)];
        acc += b;
        ++used;
    }
    return acc.real() / (double(total) * double(used));
}

}  // namespace

double prob_via_bias(const FieldSpec& f, const std::vector<std::vector<u64>>& dir_counts,
                     u64 total, const std::vector<u32>& y) {
    return prob_from_dirs(f, dir_counts, total, y, false);
}

double prob_via_bias(const PolyTuple& X, const std::vector<u32>& y) {
    if (X.empty() || y.size() != X.size())
        fail(errc::dimension_mismatch, "point arity vs tuple size");
    const FieldSpec& f = X[0].field();
    u64 total = f.point_count(X[0].nvars());
    return prob_via_bias(f, directional_counts(X), total, y);
}

double line_prob_via_bias(const FieldSpec& f, const std::vector<std::vector<u64>>& dir_counts,
                          u64 total, const Line& line) {
    std::vector<u32> e1(line.direction.size(), 0);
    e1[0] = 1;
    if (line.direction != e1)
        fail(errc::invalid_argument, "line probability via bias needs direction e_1");
    return prob_from_dirs(f, dir_counts, total, line.offset, true);
}

double line_prob_via_bias(const PolyTuple& X, const Line& line) {
    if (X.empty() || line.direction.size() != X.size())
        fail(errc::dimension_mismatch, "line arity vs tuple size");
    const FieldSpec& f = X[0].field();
    u64 total = f.point_count(X[0].nvars());
    return line_prob_via_bias(f, directional_counts(X), total, line);
}

std::vector<PopularLine> popular_line_containment(const PolyTuple& X, const Rat& epsilon) {
    check_tuple(X);
    if (X.empty()) fail(errc::invalid_argument, "line scan of an empty tuple");
    const FieldSpec& f = X[0].field();
    u32 k = u32(X.size());
    ValueCounts joint = joint_distribution(X);
    u64 tail_cells = 1;
    for (u32 i = 1; i < k; ++i) tail_cells *= f.p;

    std::vector<PopularLine> out;
    for (u64 z = 0; z < tail_cells; ++z) {
        u64 hits = 0;
        bool contained = true;
        for (u32 t = 0; t < f.p; ++t) {
            u64 yidx = u64(t) * tail_cells + z;
            hits += joint.counts[yidx];
            if (joint.counts[yidx] == 0) contained = false;
        }
        // popularity > epsilon * p^-(k-1), exactly:
        // hits * eps.den * p^(k-1) > eps.num * p^n
        i128 lhs = i128(hits) * epsilon.den * i128(tail_cells);
        i128 rhs = i128(epsilon.num) * i128(joint.total);
        if (lhs > rhs) {
            out.push_back({Line::e1(f, k, decode_point(f, z, k - 1)), hits, contained});
        }
    }
    return out;
}

}  // namespace wr
