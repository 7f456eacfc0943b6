#include "wr/field.hpp"

namespace wr {

namespace {

bool is_prime(u32 n) {
    if (n < 2) return false;
    for (u32 d = 2; u64(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

FieldSpec::FieldSpec(u32 prime, u64 budget) : p(prime), enumeration_budget(budget) {
    if (!is_prime(prime))
        fail(errc::invalid_argument, "field modulus " + std::to_string(prime) + " is not prime");
    if (budget < 1)
        fail(errc::invalid_argument, "enumeration budget must be at least 1");
}

u32 FieldSpec::pow(u32 a, u64 e) const {
    u64 r = 1, x = a % p;
    while (e) {
        if (e & 1) r = (r * x) % p;
        x = (x * x) % p;
        e >>= 1;
    }
    return u32(r);
}

u32 FieldSpec::inv(u32 a) const {
    if (a % p == 0) fail(errc::invalid_argument, "inverse of zero");
    return pow(a, p - 2);
}

bool FieldSpec::is_square(u32 a) const {
    a %= p;
    if (a == 0) return true;
    if (p == 2) return true;
    return pow(a, (p - 1) / 2) == 1;
}

u32 FieldSpec::sqrt_of(u32 a) const {
    a %= p;
    for (u32 r = 0; r < p; ++r)
        if (mul(r, r) == a) return r;
    fail(errc::invalid_argument, std::to_string(a) + " is not a square mod " + std::to_string(p));
}

void PointIter::next() {
    for (std::size_t i = point_.size(); i-- > 0;) {
        if (++point_[i] < p_) return;
        point_[i] = 0;
    }
    done_ = true;
}

}  // namespace wr
