#pragma once

#include <vector>

#include "wr/common.hpp"

namespace wr {

// Prime field F_p together with the enumeration budget every exhaustive loop
// in the toolkit must respect. Values are plain u32 in [0, p).
struct FieldSpec {
    static constexpr u64 kDefaultBudget = u64(1) << 24;

    u32 p = 0;
    u64 enumeration_budget = kDefaultBudget;

    FieldSpec() = default;
    explicit FieldSpec(u32 prime, u64 budget = kDefaultBudget);

    bool operator==(const FieldSpec& o) const { return p == o.p; }
    bool operator!=(const FieldSpec& o) const { return p != o.p; }

    u32 add(u32 a, u32 b) const { u32 s = a + b; return s >= p ? s - p : s; }
    u32 sub(u32 a, u32 b) const { return a >= b ? a - b : a + p - b; }
    u32 neg(u32 a) const { return a == 0 ? 0 : p - a; }
    u32 mul(u32 a, u32 b) const { return u32((u64(a) * b) % p); }
    u32 pow(u32 a, u64 e) const;
    u32 inv(u32 a) const;

    // Number of points in F_p^n, or budget_exceeded.
    u64 point_count(u32 nvars) const {
        return checked_pow(p, nvars, enumeration_budget);
    }

    bool is_square(u32 a) const;          // 0 counts as a square
    u32 sqrt_of(u32 a) const;             // some r with r*r = a; a must be a square
};

// Odometer over F_p^n in canonical order: index 0 is the all-zero point, the
// last coordinate moves fastest.
class PointIter {
public:
    PointIter(const FieldSpec& f, u32 nvars)
        : p_(f.p), point_(nvars, 0), done_(false) {}

    bool done() const { return done_; }
    const std::vector<u32>& operator*() const { return point_; }
    void next();

private:
    u32 p_;
    std::vector<u32> point_;
    bool done_;
};

}  // namespace wr
