#pragma once

#include <unordered_map>

#include "wr/spaces.hpp"

namespace wr {

constexpr u32 kRankInfinity = 0xffffffffu;

// Sum of reducible forms equal to the witnessed polynomial's top part: each
// summand is A_i * B_i with deg A_i + deg B_i = deg P and both factors forms.
struct RankWitness {
    std::vector<std::pair<Poly, Poly>> summands;
};

struct RankBound {
    u32 lower = 0;
    u32 upper = kRankInfinity;
    std::optional<RankWitness> witness;
    enum class Status { exact, bounded, inconclusive } status = Status::inconclusive;
    std::string note;

    bool is_exact() const { return status == Status::exact; }
};

// Search ceilings; exhaustive stages respect these and report inconclusive
// instead of running past them.
struct OracleLimits {
    u64 factor_enum_cap = u64(1) << 23;   // candidate divisors per split
    u64 combo_cap = u64(1) << 23;         // factor-subset combinations (cubic joint solve)
    u64 bfs_space_cap = u64(1) << 20;     // dense layer BFS when the ambient form space fits
    u32 default_r_max = 6;
};

// Exact Schmidt rank of a quadratic form over odd characteristic, with a
// witness. Classification: for Gram rank r, the rank is ceil(r/2), except
// r/2 + 1 when r is even and the form is not split (discriminant test).
RankBound rank_quadratic(const Poly& P);

// Layered bounded search over reducible-form summands: divisor peeling for
// r = 1 (with perfect-square shortcuts), a dense sumset BFS when the ambient
// space is small, and joint linear solves over sets of linear factors for
// cubics. Exact whenever the relevant stage exhausts.
RankBound rank_bounded_search(const Poly& P, u32 r_max, const OracleLimits& lim = {});

struct BiasRankBound {
    u32 bound = 0;
    bool capped = false;  // |bias| = 0: no finite log, reported at the cap
    double bias_magnitude = 0.0;
};

// ceil(-log_p |bias(P)|), a computation-backed lower bound on rk(P).
// Heuristic-grade: reported, never folded into oracle decisions.
BiasRankBound bias_rank_lower_bound(const Poly& P, u32 cap = 64);

// L_F(r) = log_q(r+1) + 1, the reporting helper attached to rank bounds.
double rank_log_helper(u32 p, u32 r);

// Caching oracle over canonicalized forms. Decisions reduce to the layered
// searches above; deg <= 1 and quadratic cases are exact.
class RankOracle {
public:
    RankOracle() = default;
    explicit RankOracle(OracleLimits lim) : lim_(lim) {}

    // rk(P) with enough exhaustion to settle ranks up to r_need.
    RankBound rank(const Poly& P, u32 r_need);
    // rk(P) < R: nullopt when the bound brackets R without deciding.
    std::optional<bool> rank_below(const Poly& P, u32 R);
    // Witness with fewer than R summands for the top part of P, when one is known.
    std::optional<RankWitness> witness_below(const Poly& P, u32 R);

    RankBelowFn as_below_fn() {
        return [this](const Poly& q, u32 R) { return rank_below(q, R); };
    }

    const OracleLimits& limits() const { return lim_; }

private:
    struct Entry {
        RankBound bound;
        u32 exhausted_to = 0;  // every rank <= this value is decided
    };
    OracleLimits lim_;
    std::unordered_map<std::string, Entry> cache_;
};

// Smallest integer threshold with (rk < t*r) == (rk < threshold).
u32 rank_threshold(const Rat& t, u32 r);

struct RankRegularity {
    bool regular = false;
    FormSpace offending;  // span of the elements below the threshold (= U_{tr})
};

// X is t-rank-regular iff the elements of Span(X) of rank < t*|X| fail to
// span the whole space.
RankRegularity is_t_rank_regular(const PolyTuple& X, const Rat& t, RankOracle& oracle);

// ---- rk_t certificates ----------------------------------------------------

// Summands are products of polynomials of degree <= t; every component of the
// certified tuple is the stated linear combination of the summand products.
struct RktCertificate {
    u32 t = 0;
    std::vector<std::vector<Poly>> summands;       // factor lists
    std::vector<std::vector<u32>> coefficients;    // [component][summand]
};

struct RktVerification {
    bool ok = false;
    std::string diagnosis;  // first violated condition when !ok
};

RktVerification rkt_verify(const PolyTuple& P, const RktCertificate& cert);

struct RktSearchOutcome {
    std::optional<RktCertificate> certificate;
    bool exhausted = false;  // r_max fully excluded within the searched family
    std::string note;
};

// Bounded certificate search: complete factor peeling for r = 1 over form
// factors, then span solves over a pooled candidate family for larger r. Any
// returned certificate passes rkt_verify.
RktSearchOutcome rkt_search(const PolyTuple& P, u32 t, u32 r_max,
                            const OracleLimits& lim = {});

}  // namespace wr
