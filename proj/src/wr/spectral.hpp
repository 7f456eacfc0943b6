#pragma once

#include <complex>

#include "wr/poly.hpp"

namespace wr {

// Exact joint value counts of a tuple over all of F_p^n: counts[i] is the
// number of inputs mapping to the value vector with canonical index i.
struct ValueCounts {
    FieldSpec field;
    u32 k = 0;           // arity of the value vectors
    u64 total = 0;       // p^n
    std::vector<u64> counts;  // size p^k

    double probability(u64 index) const { return double(counts[index]) / double(total); }
};

ValueCounts joint_distribution(const PolyTuple& X);

// bias(P) = E_x chi(P(x)) with chi(y) = omega^y, omega = e^(2 pi i / p).
// Integer value counts are accumulated first; the only floating-point step is
// the final conversion.
std::complex<double> bias(const Poly& P);
std::complex<double> bias_from_counts(const FieldSpec& f, const std::vector<u64>& value_counts,
                                      u64 total);

// Line {t*direction + offset} in F_p^k, stored canonically: direction has its
// first nonzero coordinate scaled to 1 and the offset is zeroed at that pivot.
struct Line {
    std::vector<u32> direction;
    std::vector<u32> offset;

    static Line canonical(const FieldSpec& f, std::vector<u32> direction, std::vector<u32> offset);
    static Line e1(const FieldSpec& f, u32 k, const std::vector<u32>& tail_offset);
    std::vector<u32> point(const FieldSpec& f, u32 t) const;
};

struct RegularityReport {
    Rat defect;                  // delta(X), exact
    std::vector<u32> worst_point;
    Rat epsilon_threshold;
    bool verdict = false;        // defect <= epsilon, exact comparison
    bool dependent_tuple = false;  // tolerated, but worth surfacing
};

// delta(X) = p^k * max_y | Pr[X=y] - p^{-1} Pr[X'=y'] |; X is weak
// epsilon-regular iff delta <= epsilon. Requires a form tuple whose first
// component has maximal degree.
RegularityReport regularity_defect(const PolyTuple& X, const Rat& epsilon);

// Per-direction value counts: dir_counts[a][v] counts x with (a . X(x)) = v,
// for every a in F_p^k. One enumeration pass; everything else is exact
// integer regrouping.
std::vector<std::vector<u64>> directional_counts(const PolyTuple& X);

// E_{a in F^k} bias(a . (X - y)), evaluated from directional counts. Agrees
// with joint counting to float precision (the Fourier inversion identity).
double prob_via_bias(const PolyTuple& X, const std::vector<u32>& y);
double prob_via_bias(const FieldSpec& f, const std::vector<std::vector<u64>>& dir_counts,
                     u64 total, const std::vector<u32>& y);

// Same average restricted to a . e_1 = 0, for a line in direction e_1.
double line_prob_via_bias(const PolyTuple& X, const Line& line);
double line_prob_via_bias(const FieldSpec& f, const std::vector<std::vector<u64>>& dir_counts,
                          u64 total, const Line& line);

struct PopularLine {
    Line line;
    u64 hits = 0;        // number of inputs landing on the line
    bool contained = false;  // line fully inside Image(X)
};

// All lines in direction e_1 with popularity strictly above
// epsilon * p^-(k-1), each checked pointwise for image containment.
std::vector<PopularLine> popular_line_containment(const PolyTuple& X, const Rat& epsilon);

}  // namespace wr
