#pragma once

#include <set>

#include "wr/regularize.hpp"

namespace wr {

struct PointSet {
    u32 m = 0;  // arity
    std::set<std::vector<u32>> points;

    bool contains(const std::vector<u32>& y) const { return points.count(y) > 0; }
};

PointSet image(const PolyTuple& P);

// A line fully inside S, or nullopt; first hit in the canonical scan over
// projective directions and reduced offsets.
std::optional<Line> contains_line(const PointSet& S, const FieldSpec& f);

// m univariate coordinate polynomials over F_p, each reduced (degree < p).
struct Curve {
    std::vector<Poly> coords;

    u32 degree() const;
    bool nonconstant() const;
    std::vector<u32> at(u32 t) const;
    std::set<std::vector<u32>> image_points(const FieldSpec& f) const;
};

struct UdegResult {
    bool infinite = false;  // constant maps
    u32 u = 0;
    std::optional<Curve> witness;
};

// Univariate degree by exhaustive curve search, level by level; capped above
// by the best variable-restriction witness, so the search always terminates
// with a witness for nonconstant maps.
UdegResult udeg(const PolyTuple& P);

struct SzWitnessResult {
    std::vector<u32> point;  // y with F(y) != 0 maximizing Pr[X = y]
    u64 hits = 0;            // |{x : X(x) = y}|
    u64 nonroots = 0;        // |{y : F(y) != 0}|
    u64 domain = 0;          // p^n
    u64 fiber_space = 0;     // p^k
};

// Most popular value of X outside the zero set of F; the Schwartz-Zippel
// guarantee Pr[F != 0] * Pr[X = y] >= (1 - d/p) p^-k is re-verified exactly.
SzWitnessResult sz_witness(const Poly& P, const Poly& F, const PolyTuple& X);

struct CurveExtraction {
    Curve curve;
    Line line;                    // the popular e_1-line behind the curve
    std::vector<u32> tail_offset; // y_0 from the Schwartz-Zippel step
    u32 component = 0;            // which target component supplied it
};

// Realizes the popular-line argument on a certified decomposition: picks a
// component depending on X_1, finds a popular offset for its coefficient
// polynomial, and reads the curve off the outer map along that line. The
// line-in-image and image-containment conclusions are verified exhaustively.
CurveExtraction extract_curve(const Decomposition& D);

}  // namespace wr
