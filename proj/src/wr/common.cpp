#include "wr/common.hpp"

#include <numeric>

namespace wr {

const char* errc_name(errc c) {
    switch (c) {
        case errc::ok: return "Ok";
        case errc::parse_error: return "ParseError";
        case errc::variable_out_of_range: return "VariableOutOfRange";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::budget_exceeded: return "BudgetExceeded";
        case errc::incomplete_table: return "IncompleteTable";
        case errc::not_a_form: return "NotAForm";
        case errc::not_a_member: return "NotAMember";
        case errc::prune_verification_failed: return "PruneVerificationFailed";
        case errc::not_max_degree_first: return "NotMaxDegreeFirst";
        case errc::even_characteristic: return "EvenCharacteristic";
        case errc::oracle_inconclusive: return "OracleInconclusive";
        case errc::actually_regular: return "ActuallyRegular";
        case errc::char_too_small: return "CharTooSmall";
        case errc::escalation_exhausted: return "EscalationExhausted";
        case errc::empty_top: return "EmptyTop";
        case errc::zero_polynomial: return "ZeroPolynomial";
        case errc::zero_bias: return "ZeroBias";
        case errc::no_dependent_component: return "NoDependentComponent";
        case errc::degree_overflow: return "DegreeOverflow";
        case errc::verification_failed: return "VerificationFailed";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::internal_error: return "InternalError";
    }
    return "Unknown";
}

Rat::Rat(i64 n, i64 d) {
    if (d == 0) fail(errc::invalid_argument, "rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    i64 g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rat Rat::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Rat(std::stoll(text));
        }
        i64 n = std::stoll(text.substr(0, slash));
        i64 d = std::stoll(text.substr(slash + 1));
        return Rat(n, d);
    } catch (const std::logic_error&) {
        fail(errc::parse_error, "bad rational: '" + text + "'");
    }
}

std::string Rat::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

u64 checked_pow(u64 p, u32 e, u64 cap) {
    u64 r = 1;
    for (u32 i = 0; i < e; ++i) {
        if (r > cap / p) {
            fail(errc::budget_exceeded,
                 std::to_string(p) + "^" + std::to_string(e) +
                     " exceeds enumeration budget " + std::to_string(cap));
        }
        r *= p;
    }
    return r;
}

void Fnv1a::feed(const void* data, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
    }
}

void Fnv1a::feed_u64(u64 v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
    feed(b, 8);
}

std::string Fnv1a::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 0; i < 16; ++i) s[15 - i] = digits[(h >> (4 * i)) & 0xf];
    return s;
}

}  // namespace wr
