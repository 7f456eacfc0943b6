#pragma once

#include "wr/rankor.hpp"
#include "wr/spectral.hpp"

namespace wr {

struct RefineRecord {
    u32 round = 0;
    u32 degree = 0;        // top degree refined in this round
    u32 tuple_before = 0;  // |Y|
    u32 tuple_after = 0;   // |X^{i+1}|
};

// A verified record P = F(X): the parts, the expressed outer maps, and the
// flags the pipeline certified. Composition soundness is checked whenever one
// of these is constructed.
struct Decomposition {
    PolyTuple target;            // P
    PolyTuple parts;             // X, a basis of forms (empty for constant P)
    std::vector<Poly> outers;    // F_i over |X| variables
    bool minimal = false;
    bool pruned = false;         // outer maps obey the formal degree budget
    std::optional<Rat> t_rank_regular;
    std::optional<Rat> defect;
    std::vector<u32> worst_point;
    std::optional<Rat> epsilon;
    std::vector<RefineRecord> provenance;
    u32 escalations = 0;         // weak pipeline attempts before certification

    u32 size() const { return u32(parts.size()); }
    u32 degree() const { return tuple_degree(target); }
};

// Everything refine_step produced: the refined tuple, the low-rank basis it
// came from, and the linear map expressing the input through that basis.
struct RefineResult {
    PolyTuple refined;                        // Y, degrees strictly below deg X
    PolyTuple low_rank_basis;                 // B, a basis of Span(X)
    std::vector<std::vector<u32>> map_on_basis;  // L with X = L(B)
};

// One decomposition round on an equal-degree tuple that failed the
// t-rank-regularity test: every element of a low-rank basis is opened into
// its witness factors. |Y| <= 2 t |X|^2 and deg(Y) < deg(X).
RefineResult refine_step(const PolyTuple& X, const Rat& t, RankOracle& oracle);

// Iterated refinement of the paper's rank-regularity lemma: homogeneous
// parts, minimal generating subspace, regularity test, top-degree refinement;
// at most deg(P) rounds.
Decomposition rank_regularize(const PolyTuple& P, const Rat& t, RankOracle& oracle);

struct WeakRegularConfig {
    u32 max_escalations = 6;  // t doubles this many times after the first try
    double bias_tolerance = 1e-9;
};

// Full weak-regularity pipeline. Rank-regularizes at escalating t, then
// certifies directly: all of Span(X) outside the low-rank span must have
// small bias (measured exhaustively, replacing the non-constructive
// structure-vs-randomness constant), the basis is rebuilt with a top-degree
// first element outside that span, and the defect is checked exactly.
Decomposition weak_regular_decompose(const PolyTuple& P, const Rat& epsilon,
                                     RankOracle& oracle, const WeakRegularConfig& cfg = {});

// Report-only comparison against the rank-regularity size bound
// ((2t+1) d m)^(2^d); saturates far above any desk-scale size.
bool size_within_theorem_bound(u32 size, const Rat& t, u32 d, u32 m);

// Re-checks minimality of P inside F[X] by sweeping every homogeneous
// hyperplane of Span(X): each must fail the fiber test for some component.
// Pure evaluation, usable by verifiers.
bool minimal_decomposition_check(const PolyTuple& P, const PolyTuple& X);

}  // namespace wr
