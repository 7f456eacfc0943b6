#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wr {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using i128 = __int128;

// Machine-readable error codes. These surface verbatim through the C API and
// in JSON payloads, so renaming an enumerator is a breaking change.
enum class errc {
    ok = 0,
    parse_error,
    variable_out_of_range,
    dimension_mismatch,
    budget_exceeded,
    incomplete_table,
    not_a_form,
    not_a_member,
    prune_verification_failed,
    not_max_degree_first,
    even_characteristic,
    oracle_inconclusive,
    actually_regular,
    char_too_small,
    escalation_exhausted,
    empty_top,
    zero_polynomial,
    zero_bias,
    no_dependent_component,
    degree_overflow,
    verification_failed,
    invalid_argument,
    internal_error,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
    throw Error(code, msg);
}

// Exact rational with int64 components; all pipeline thresholds (epsilon, t,
// defects) are compared through this type so verdicts never depend on
// floating-point rounding.
struct Rat {
    i64 num = 0;
    i64 den = 1;

    Rat() = default;
    Rat(i64 n) : num(n), den(1) {}
    Rat(i64 n, i64 d);

    static Rat parse(const std::string& text);  // "a/b" or "a"

    double to_double() const { return double(num) / double(den); }
    std::string str() const;

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return i128(a.num) * b.den < i128(b.num) * a.den;
    }
    friend bool operator<=(const Rat& a, const Rat& b) {
        return i128(a.num) * b.den <= i128(b.num) * a.den;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

    friend Rat operator*(const Rat& a, const Rat& b) {
        return Rat(a.num * b.num, a.den * b.den);
    }
    friend Rat operator+(const Rat& a, const Rat& b) {
        return Rat(a.num * b.den + b.num * a.den, a.den * b.den);
    }
};

// p^e as u64, throwing budget_exceeded past `cap` (guards enumeration loops
// before they start).
u64 checked_pow(u64 p, u32 e, u64 cap);

// FNV-1a over bytes; used for certificate input digests.
struct Fnv1a {
    u64 h = 1469598103934665603ull;
    void feed(const void* data, std::size_t n);
    void feed_u64(u64 v);
    std::string hex() const;
};

}  // namespace wr
