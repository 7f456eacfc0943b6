#include "wr/poly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace wr {

bool grlex_less(const Monomial& a, const Monomial& b) {
    u32 da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    // Equal degree: lexicographic, x1 weighs most.
    for (std::size_t i = 0; i < a.exps.size(); ++i)
        if (a.exps[i] != b.exps[i]) return a.exps[i] < b.exps[i];
    return false;
}

namespace {

// x^p = x as functions; reduced exponents live in [0, p-1].
u32 reduce_exp(u32 e, u32 p) {
    if (e < p) return e;
    return (e - 1) % (p - 1) + 1;
}

bool term_order_desc(const Term& a, const Term& b) {
    return grlex_less(b.mono, a.mono);
}

}  // namespace

Poly Poly::constant(const FieldSpec& f, u32 nvars, u32 c) {
    Poly r(f, nvars);
    c %= f.p;
    if (c != 0) r.terms_.push_back({Monomial{std::vector<u32>(nvars, 0)}, c});
    return r;
}

Poly Poly::variable(const FieldSpec& f, u32 nvars, u32 index) {
    if (index >= nvars)
        fail(errc::variable_out_of_range, "variable index " + std::to_string(index));
    std::vector<u32> e(nvars, 0);
    e[index] = 1;
    Poly r(f, nvars);
    r.terms_.push_back({Monomial{std::move(e)}, 1});
    return r;
}

Poly Poly::term(const FieldSpec& f, u32 nvars, const std::vector<u32>& exps, u32 c) {
    if (exps.size() != nvars) fail(errc::dimension_mismatch, "exponent vector length");
    Poly r(f, nvars);
    r.add_term(exps, c);
    r.normalize();
    return r;
}

u32 Poly::degree_in(u32 var) const {
    u32 d = 0;
    for (const Term& t : terms_) d = std::max(d, t.mono.exps[var]);
    return d;
}

bool Poly::is_homogeneous() const {
    if (terms_.empty()) return true;
    u32 d = terms_.front().mono.total_degree();
    for (const Term& t : terms_)
        if (t.mono.total_degree() != d) return false;
    return true;
}

u32 Poly::constant_value() const {
    if (!is_constant()) fail(errc::invalid_argument, "not a constant polynomial");
    return terms_.empty() ? 0 : terms_.front().coeff;
}

u32 Poly::coeff_of(const Monomial& m) const {
    for (const Term& t : terms_)
        if (t.mono == m) return t.coeff;
    return 0;
}

void Poly::add_term(const std::vector<u32>& exps, u32 coeff) {
    coeff %= field_.p;
    if (coeff == 0) return;
    std::vector<u32> red(exps.size());
    for (std::size_t i = 0; i < exps.size(); ++i) red[i] = reduce_exp(exps[i], field_.p);
    terms_.push_back({Monomial{std::move(red)}, coeff});
}

void Poly::normalize() {
    std::sort(terms_.begin(), terms_.end(), term_order_desc);
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const Term& t : terms_) {
        if (!out.empty() && out.back().mono == t.mono) {
            out.back().coeff = field_.add(out.back().coeff, t.coeff);
        } else {
            out.push_back(t);
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Term& t) { return t.coeff == 0; }),
              out.end());
    terms_ = std::move(out);
}

Poly Poly::operator+(const Poly& o) const {
    if (field_ != o.field_ || nvars_ != o.nvars_)
        fail(errc::dimension_mismatch, "polynomial addition across domains");
    Poly r(field_, nvars_);
    r.terms_ = terms_;
    for (const Term& t : o.terms_) r.terms_.push_back(t);
    r.normalize();
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o.scaled(o.field_.p - 1); }

Poly Poly::scaled(u32 c) const {
    c %= field_.p;
    Poly r(field_, nvars_);
    if (c == 0) return r;
    r.terms_ = terms_;
    for (Term& t : r.terms_) t.coeff = field_.mul(t.coeff, c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    if (field_ != o.field_ || nvars_ != o.nvars_)
        fail(errc::dimension_mismatch, "polynomial product across domains");
    Poly r(field_, nvars_);
    std::vector<u32> e(nvars_);
    for (const Term& a : terms_) {
        for (const Term& b : o.terms_) {
            for (u32 i = 0; i < nvars_; ++i) e[i] = a.mono.exps[i] + b.mono.exps[i];
            r.add_term(e, field_.mul(a.coeff, b.coeff));
        }
    }
    r.normalize();
    return r;
}

bool Poly::operator==(const Poly& o) const {
    if (field_ != o.field_ || nvars_ != o.nvars_ || terms_.size() != o.terms_.size())
        return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (!(terms_[i].mono == o.terms_[i].mono) || terms_[i].coeff != o.terms_[i].coeff)
            return false;
    return true;
}

u32 Poly::eval(const std::vector<u32>& point) const {
    if (point.size() != nvars_) fail(errc::dimension_mismatch, "evaluation point arity");
    u32 acc = 0;
    for (const Term& t : terms_) {
        u32 v = t.coeff;
        for (u32 i = 0; i < nvars_ && v != 0; ++i) {
            u32 e = t.mono.exps[i];
            if (e) v = field_.mul(v, field_.pow(point[i], e));
        }
        acc = field_.add(acc, v);
    }
    return acc;
}

std::vector<u32> Poly::eval_all() const {
    u64 total = field_.point_count(nvars_);
    // pow_table[x][e] for x, e < p
    u32 p = field_.p;
    std::vector<u32> pow_table(std::size_t(p) * p);
    for (u32 x = 0; x < p; ++x)
        for (u32 e = 0; e < p; ++e) pow_table[x * p + e] = field_.pow(x, e);

    std::vector<u32> out;
    out.reserve(total);
    for (PointIter it(field_, nvars_); !it.done(); it.next()) {
        const std::vector<u32>& pt = *it;
        u32 acc = 0;
        for (const Term& t : terms_) {
            u32 v = t.coeff;
            for (u32 i = 0; i < nvars_; ++i) {
                u32 e = t.mono.exps[i];
                if (e) {
                    v = field_.mul(v, pow_table[pt[i] * p + e]);
                    if (v == 0) break;
                }
            }
            acc = field_.add(acc, v);
        }
        out.push_back(acc);
    }
    return out;
}

Poly Poly::homogeneous_part(u32 e) const {
    Poly r(field_, nvars_);
    for (const Term& t : terms_)
        if (t.mono.total_degree() == e) r.terms_.push_back(t);
    return r;
}

std::string Poly::to_string(const std::vector<std::string>* names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const Term& t : terms_) {
        if (!first) os << " + ";
        first = false;
        bool has_var = t.mono.total_degree() > 0;
        if (t.coeff != 1 || !has_var) os << t.coeff;
        bool star = t.coeff != 1 || !has_var;
        for (u32 i = 0; i < nvars_; ++i) {
            u32 e = t.mono.exps[i];
            if (!e) continue;
            if (star) os << "*";
            star = true;
            if (names) os << (*names)[i];
            else os << "x" << (i + 1);
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

std::string Poly::key() const {
    std::ostringstream os;
    os << field_.p << ";" << nvars_ << ";";
    for (const Term& t : terms_) {
        for (u32 e : t.mono.exps) os << e << ",";
        os << ":" << t.coeff << "|";
    }
    return os.str();
}

bool poly_less(const Poly& a, const Poly& b) {
    std::size_t i = 0, j = 0;
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    while (i < ta.size() || j < tb.size()) {
        if (i == ta.size()) return tb[j].coeff > 0 ? true : false;  // a has 0 where b doesn't
        if (j == tb.size()) return false;
        if (ta[i].mono == tb[j].mono) {
            if (ta[i].coeff != tb[j].coeff) return ta[i].coeff < tb[j].coeff;
            ++i, ++j;
        } else if (grlex_less(tb[j].mono, ta[i].mono)) {
            return false;  // a nonzero at a larger monomial
        } else {
            return true;
        }
    }
    return false;
}

u32 tuple_degree(const PolyTuple& t) {
    u32 d = 0;
    for (const Poly& q : t) d = std::max(d, q.degree());
    return d;
}

bool is_form_tuple(const PolyTuple& t) {
    for (const Poly& q : t)
        if (!q.is_form()) return false;
    return true;
}

PolyTuple tuple_tail(const PolyTuple& t) {
    if (t.empty()) fail(errc::invalid_argument, "tail of empty tuple");
    return PolyTuple(t.begin() + 1, t.end());
}

void check_tuple(const PolyTuple& t) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i].field() != t[0].field() || t[i].nvars() != t[0].nvars())
            fail(errc::dimension_mismatch, "tuple components over different domains");
}

std::vector<u32> eval_tuple(const PolyTuple& t, const std::vector<u32>& point) {
    std::vector<u32> y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) y[i] = t[i].eval(point);
    return y;
}

u64 encode_point(const FieldSpec& f, const std::vector<u32>& y) {
    u64 idx = 0;
    for (u32 v : y) idx = idx * f.p + v;
    return idx;
}

std::vector<u32> decode_point(const FieldSpec& f, u64 index, u32 k) {
    std::vector<u32> y(k, 0);
    for (u32 i = k; i-- > 0;) {
        y[i] = u32(index % f.p);
        index /= f.p;
    }
    return y;
}

// ---- parser --------------------------------------------------------------

namespace {

struct Lexer {
    const std::string& s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    u64 number() {
        skip_ws();
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
            fail(errc::parse_error, "expected number at offset " + std::to_string(pos));
        u64 v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = v * 10 + (s[pos] - '0');
            if (v > (u64(1) << 40)) fail(errc::parse_error, "number too large");
            ++pos;
        }
        return v;
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (start == pos) fail(errc::parse_error, "expected identifier at offset " + std::to_string(start));
        return s.substr(start, pos - start);
    }
};

u32 var_index(const std::string& name, u32 nvars, const std::vector<std::string>* names) {
    if (names) {
        for (u32 i = 0; i < names->size(); ++i)
            if ((*names)[i] == name) {
                if (i >= nvars) fail(errc::variable_out_of_range, "variable " + name);
                return i;
            }
        fail(errc::parse_error, "unknown variable '" + name + "'");
    }
    // default names x1..xn
    if (name.size() < 2 || name[0] != 'x')
        fail(errc::parse_error, "unknown variable '" + name + "'");
    u64 idx = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i])))
            fail(errc::parse_error, "unknown variable '" + name + "'");
        idx = idx * 10 + (name[i] - '0');
    }
    if (idx == 0 || idx > nvars)
        fail(errc::variable_out_of_range, "variable " + name + " out of range 1.." + std::to_string(nvars));
    return u32(idx - 1);
}

}  // namespace

Poly parse_poly(const std::string& text, const FieldSpec& field, u32 nvars,
                const std::vector<std::string>* var_names) {
    Lexer lx{text};
    Poly result(field, nvars);
    bool first = true;
    while (true) {
        if (lx.eof()) {
            if (first) fail(errc::parse_error, "empty polynomial expression");
            break;
        }
        u32 sign = 1;
        if (lx.accept('+')) {
            if (first) fail(errc::parse_error, "leading '+'");
        } else if (lx.accept('-')) {
            sign = field.p - 1;
        } else if (!first) {
            fail(errc::parse_error, "expected '+' or '-' at offset " + std::to_string(lx.pos));
        }
        // term: [coeff ['*' factors]] | factors
        u32 coeff = sign;
        std::vector<u32> exps(nvars, 0);
        bool any = false;
        if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
            coeff = field.mul(sign, u32(lx.number() % field.p));
            any = true;
            if (!lx.accept('*')) {
                result.add_term(exps, coeff);
                first = false;
                continue;
            }
        }
        while (true) {
            std::string name = lx.ident();
            u32 vi = var_index(name, nvars, var_names);
            u64 e = 1;
            if (lx.accept('^')) e = lx.number();
            // Frobenius reduction happens in add_term; clamp here so the sum fits u32.
            u32 re = field.p == 2 ? (e == 0 ? 0u : 1u)
                                  : (e < field.p ? u32(e) : u32((e - 1) % (field.p - 1) + 1));
            exps[vi] += re;
            any = true;
            if (!lx.accept('*')) break;
            if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
                coeff = field.mul(coeff, u32(lx.number() % field.p));
                if (!lx.accept('*')) break;
            }
        }
        if (!any) fail(errc::parse_error, "empty term");
        result.add_term(exps, coeff);
        first = false;
    }
    result.normalize();
    return result;
}

Poly compose(const Poly& F, const PolyTuple& X) {
    check_tuple(X);
    if (F.nvars() != X.size())
        fail(errc::dimension_mismatch, "outer map arity " + std::to_string(F.nvars()) +
                                           " vs tuple size " + std::to_string(X.size()));
    if (X.empty()) {
        // F is a constant in zero variables.
        return Poly::constant(F.field(), 0, F.is_zero() ? 0 : F.constant_value());
    }
    const FieldSpec& f = X[0].field();
    u32 n = X[0].nvars();
    if (f != F.field()) fail(errc::dimension_mismatch, "outer map over a different field");

    // powers[i][e] = X_i^e, filled on demand (e < p after reduction).
    std::vector<std::vector<Poly>> powers(X.size());
    auto power = [&](std::size_t i, u32 e) -> const Poly& {
        auto& ladder = powers[i];
        if (ladder.empty()) ladder.push_back(Poly::constant(f, n, 1));
        while (ladder.size() <= e) ladder.push_back(ladder.back() * X[i]);
        return ladder[e];
    };

    Poly acc(f, n);
    for (const Term& t : F.terms()) {
        Poly prod = Poly::constant(f, n, t.coeff);
        for (std::size_t i = 0; i < X.size(); ++i) {
            u32 e = t.mono.exps[i];
            if (e) prod = prod * power(i, e);
        }
        acc = acc + prod;
    }
    return acc;
}

Poly interpolate(const std::vector<u32>& table, const FieldSpec& field, u32 k) {
    u64 total = field.point_count(k);
    if (table.size() != total)
        fail(errc::incomplete_table, "table has " + std::to_string(table.size()) +
                                         " entries, expected " + std::to_string(total));
    u32 p = field.p;

    // M[e][y] = coefficient of z^e in 1 - (z - y)^(p-1).
    std::vector<u32> M(std::size_t(p) * p);
    {
        std::vector<u64> binom(p, 0);
        binom[0] = 1;
        for (u32 r = 1; r < p; ++r)
            for (u32 c = r; c-- > 0;) binom[c + 1] = (binom[c + 1] + binom[c]);
        for (u32 e = 0; e < p; ++e) {
            for (u32 y = 0; y < p; ++y) {
                u32 b = u32(binom[e] % p);
                u32 ny = field.pow(field.neg(y), p - 1 - e);
                u32 v = field.neg(field.mul(b, ny));
                if (e == 0) v = field.add(v, 1);
                M[e * p + y] = v;
            }
        }
    }

    // Mode-wise transform: coefficient tensor in the same layout as the table
    // (coordinate i has stride p^(k-1-i)).
    std::vector<u32> cur(table);
    std::vector<u32> nxt(cur.size());
    for (u32 axis = 0; axis < k; ++axis) {
        u64 stride = 1;
        for (u32 j = axis + 1; j < k; ++j) stride *= p;
        u64 block = stride * p;
        for (u64 base = 0; base < total; base += block) {
            for (u64 off = 0; off < stride; ++off) {
                for (u32 e = 0; e < p; ++e) {
                    u64 acc = 0;
                    for (u32 y = 0; y < p; ++y)
                        acc += u64(M[e * p + y]) * cur[base + y * stride + off];
                    nxt[base + e * stride + off] = u32(acc % p);
                }
            }
        }
        std::swap(cur, nxt);
    }

    Poly r(field, k);
    for (u64 idx = 0; idx < total; ++idx) {
        if (cur[idx] == 0) continue;
        r.add_term(decode_point(field, idx, k), cur[idx]);
    }
    r.normalize();
    return r;
}

}  // namespace wr
