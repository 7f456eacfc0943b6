#pragma once

// Deterministic corpus generators for the test suites. Everything draws from
// an explicitly seeded engine so reruns are byte-identical.

#include <random>

#include "wr/poly.hpp"

namespace gen {

using namespace wr;

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(u64 seed) : eng(seed) {}
    u32 below(u32 bound) { return u32(eng() % bound); }
    u32 in(u32 lo, u32 hi) { return lo + below(hi - lo + 1); }  // inclusive
};

// Random reduced polynomial with at most `terms` monomials of total degree
// <= max_deg (coefficients may cancel; the zero polynomial can occur).
inline Poly random_poly(Rng& rng, const FieldSpec& f, u32 nvars, u32 max_deg, u32 terms) {
    Poly q(f, nvars);
    for (u32 t = 0; t < terms; ++t) {
        std::vector<u32> e(nvars, 0);
        u32 budget = rng.below(max_deg + 1);
        for (u32 used = 0; used < budget;) {
            u32 v = rng.below(nvars);
            if (e[v] + 1 >= f.p) { ++used; continue; }  // keep exponents reduced
            ++e[v];
            ++used;
        }
        q.add_term(e, 1 + rng.below(f.p - 1));
    }
    q.normalize();
    return q;
}

// Nonzero homogeneous polynomial of exact degree `deg`.
inline Poly random_form(Rng& rng, const FieldSpec& f, u32 nvars, u32 deg, u32 terms) {
    while (true) {
        Poly q(f, nvars);
        for (u32 t = 0; t < terms; ++t) {
            std::vector<u32> e(nvars, 0);
            for (u32 used = 0; used < deg;) {
                u32 v = rng.below(nvars);
                if (e[v] + 1 >= f.p) continue;
                ++e[v];
                ++used;
            }
            q.add_term(e, 1 + rng.below(f.p - 1));
        }
        q.normalize();
        if (!q.is_zero() && q.degree() == deg) return q;
    }
}

inline Poly random_linear(Rng& rng, const FieldSpec& f, u32 nvars) {
    return random_form(rng, f, nvars, 1, 1 + rng.below(nvars));
}

inline PolyTuple random_tuple(Rng& rng, const FieldSpec& f, u32 nvars, u32 k, u32 max_deg,
                              u32 terms) {
    PolyTuple out;
    for (u32 i = 0; i < k; ++i) out.push_back(random_poly(rng, f, nvars, max_deg, terms));
    return out;
}

// Form tuple sorted so the first component has maximal degree.
inline PolyTuple random_form_tuple(Rng& rng, const FieldSpec& f, u32 nvars, u32 k,
                                   u32 max_deg, u32 terms) {
    PolyTuple out;
    for (u32 i = 0; i < k; ++i)
        out.push_back(random_form(rng, f, nvars, 1 + rng.below(max_deg), terms));
    std::stable_sort(out.begin(), out.end(),
                     [](const Poly& a, const Poly& b) { return a.degree() > b.degree(); });
    return out;
}

}  // namespace gen
