#include "wr/driver.hpp"

#include <json.hpp>
#include <sstream>

namespace wr {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

// ---- problem files ---------------------------------------------------------

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

u64 parse_nat(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        u64 v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        fail(errc::parse_error, std::string("bad ") + what + ": '" + s + "'");
    }
}

}  // namespace

ProblemFile parse_problem(const std::string& text, std::optional<u64> budget_override) {
    ProblemFile pf;
    bool have_field = false;
    std::vector<std::pair<std::string, std::string>> poly_lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::vector<std::string> toks = split_ws(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "field") {
            if (toks.size() != 2) fail(errc::parse_error, "field wants one number");
            pf.field = FieldSpec(u32(parse_nat(toks[1], "field modulus")));
            have_field = true;
        } else if (head == "vars") {
            if (toks.size() < 2) fail(errc::parse_error, "vars wants at least one name");
            pf.var_names.assign(toks.begin() + 1, toks.end());
            for (std::size_t i = 0; i < pf.var_names.size(); ++i)
                for (std::size_t j = i + 1; j < pf.var_names.size(); ++j)
                    if (pf.var_names[i] == pf.var_names[j])
                        fail(errc::parse_error, "duplicate variable " + pf.var_names[i]);
            pf.nvars = u32(pf.var_names.size());
        } else if (head == "poly") {
            auto eq = line.find('=');
            if (toks.size() < 3 || eq == std::string::npos)
                fail(errc::parse_error, "poly wants: poly NAME = expr");
            poly_lines.push_back({toks[1], line.substr(eq + 1)});
        } else if (head == "eps") {
            pf.eps = Rat::parse(toks.at(1));
        } else if (head == "t") {
            pf.t = Rat::parse(toks.at(1));
        } else if (head == "u") {
            pf.u = u32(parse_nat(toks.at(1), "u"));
        } else if (head == "max-rank") {
            pf.max_rank = u32(parse_nat(toks.at(1), "max-rank"));
        } else if (head == "budget") {
            pf.budget = parse_nat(toks.at(1), "budget");
        } else {
            fail(errc::parse_error, "unknown directive '" + head + "'");
        }
    }
    if (!have_field) fail(errc::parse_error, "missing 'field' line");
    if (pf.nvars == 0) fail(errc::parse_error, "missing 'vars' line");
    if (poly_lines.empty()) fail(errc::parse_error, "no polynomials declared");
    if (pf.budget) pf.field.enumeration_budget = *pf.budget;
    if (budget_override) pf.field.enumeration_budget = *budget_override;
    for (auto& [name, expr] : poly_lines) {
        for (auto& [seen, q] : pf.polys)
            if (seen == name) fail(errc::parse_error, "duplicate polynomial " + name);
        pf.polys.push_back({name, parse_poly(expr, pf.field, pf.nvars, &pf.var_names)});
    }
    return pf;
}

PolyTuple ProblemFile::tuple() const {
    PolyTuple t;
    for (const auto& [name, q] : polys) t.push_back(q);
    return t;
}

RunOptions parse_options(const std::string& text) {
    RunOptions o;
    for (const std::string& tok : split_ws(text)) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) fail(errc::parse_error, "option without '=': " + tok);
        std::string key = tok.substr(0, eq);
        std::string val = tok.substr(eq + 1);
        if (key == "eps") o.eps = Rat::parse(val);
        else if (key == "t") o.t = Rat::parse(val);
        else if (key == "u") o.u = u32(parse_nat(val, "u"));
        else if (key == "max-rank") o.max_rank = u32(parse_nat(val, "max-rank"));
        else if (key == "budget") o.budget = parse_nat(val, "budget");
        else if (key == "seed") o.seed = parse_nat(val, "seed");
        else fail(errc::parse_error, "unknown option '" + key + "'");
    }
    return o;
}

const char* toolkit_version() { return kVersion; }

// ---- serialization ---------------------------------------------------------

namespace {

json poly_to_json(const Poly& q) {
    json terms = json::array();
    for (const Term& t : q.terms()) terms.push_back({t.mono.exps, t.coeff});
    return terms;
}

Poly poly_from_json(const json& j, const FieldSpec& f, u32 nvars) {
    Poly q(f, nvars);
    for (const auto& term : j) {
        std::vector<u32> exps = term.at(0).get<std::vector<u32>>();
        if (exps.size() != nvars) fail(errc::verification_failed, "term arity mismatch");
        q.add_term(exps, term.at(1).get<u32>());
    }
    q.normalize();
    return q;
}

json input_to_json(const ProblemFile& pf) {
    json in;
    in["field"] = pf.field.p;
    in["budget"] = pf.field.enumeration_budget;
    in["nvars"] = pf.nvars;
    in["vars"] = pf.var_names;
    json polys = json::array();
    for (const auto& [name, q] : pf.polys) polys.push_back({{"name", name}, {"terms", poly_to_json(q)}});
    in["polys"] = polys;
    return in;
}

ProblemFile input_from_json(const json& in) {
    ProblemFile pf;
    pf.field = FieldSpec(in.at("field").get<u32>(),
                         in.value("budget", FieldSpec::kDefaultBudget));
    pf.nvars = in.at("nvars").get<u32>();
    pf.var_names = in.at("vars").get<std::vector<std::string>>();
    for (const auto& p : in.at("polys"))
        pf.polys.push_back({p.at("name").get<std::string>(),
                            poly_from_json(p.at("terms"), pf.field, pf.nvars)});
    return pf;
}

json curve_to_json(const CurveExtraction& ce) {
    json c;
    json coords = json::array();
    for (const Poly& q : ce.curve.coords) coords.push_back(poly_to_json(q));
    c["coords"] = coords;
    c["line_direction"] = ce.line.direction;
    c["line_offset"] = ce.line.offset;
    c["component"] = ce.component;
    return c;
}

json certificate_shell(const std::string& kind, const ProblemFile& pf) {
    json cert;
    cert["schema_version"] = kSchemaVersion;
    cert["toolkit_version"] = kVersion;
    cert["kind"] = kind;
    cert["input"] = input_to_json(pf);
    cert["input_digest"] = problem_digest(pf);
    return cert;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string poly_str(const Poly& q, const ProblemFile& pf) {
    return q.to_string(&pf.var_names);
}

std::string ypoly_str(const Poly& q) {
    std::vector<std::string> names;
    for (u32 i = 1; i <= q.nvars(); ++i) names.push_back("y" + std::to_string(i));
    return q.to_string(&names);
}

// ---- commands --------------------------------------------------------------

OracleLimits limits_from(const ProblemFile& pf, const RunOptions& opts) {
    OracleLimits lim;
    if (opts.max_rank) lim.default_r_max = *opts.max_rank;
    else if (pf.max_rank) lim.default_r_max = *pf.max_rank;
    return lim;
}

Rat require_eps(const ProblemFile& pf, const RunOptions& opts) {
    if (opts.eps) return *opts.eps;
    if (pf.eps) return *pf.eps;
    fail(errc::invalid_argument, "epsilon required (pass --eps or an eps line)");
}

CommandResult cmd_analyze(const ProblemFile& pf, const RunOptions& opts) {
    CommandResult res;
    std::ostringstream os;
    PolyTuple X = pf.tuple();
    Rat eps = opts.eps ? *opts.eps : (pf.eps ? *pf.eps : Rat(1));

    json payload;
    json biases = json::array();
    os << "field F_" << pf.field.p << ", " << pf.nvars << " variables, " << X.size()
       << " polynomial(s)\n";
    for (const auto& [name, q] : pf.polys) {
        auto b = bias(q);
        os << "bias(" << name << ") = " << b.real() << (b.imag() < 0 ? " - " : " + ")
           << std::abs(b.imag()) << "i  |bias| = " << std::abs(b) << "\n";
        biases.push_back({{"name", name},
                          {"real", b.real()},
                          {"imag", b.imag()},
                          {"magnitude", std::abs(b)}});
    }
    payload["biases"] = biases;

    ValueCounts vc = joint_distribution(X);
    std::vector<u64> top_idx;
    for (u64 i = 0; i < vc.counts.size(); ++i) top_idx.push_back(i);
    std::stable_sort(top_idx.begin(), top_idx.end(),
                     [&](u64 a, u64 b) { return vc.counts[a] > vc.counts[b]; });
    os << "distribution over F_" << pf.field.p << "^" << X.size() << " (top values):\n";
    json dist = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(5, top_idx.size()); ++i) {
        u64 idx = top_idx[i];
        if (!vc.counts[idx]) break;
        std::vector<u32> y = decode_point(pf.field, idx, u32(X.size()));
        os << "  Pr[X = " << json(y).dump() << "] = " << vc.counts[idx] << "/" << vc.total
           << "\n";
        dist.push_back({{"value", y}, {"count", vc.counts[idx]}});
    }
    payload["distribution_top"] = dist;
    payload["total_points"] = vc.total;

    if (is_form_tuple(X) && X[0].degree() == tuple_degree(X)) {
        RegularityReport rep = regularity_defect(X, eps);
        os << "defect = " << rep.defect.str() << " (" << rep.defect.to_double() << ")"
           << " at y = " << json(rep.worst_point).dump() << "\n";
        os << "epsilon = " << eps.str() << " -> "
           << (rep.verdict ? "weak epsilon-regular" : "NOT weak epsilon-regular") << "\n";
        if (rep.dependent_tuple) os << "note: tuple is linearly dependent\n";
        payload["defect"] = rep.defect.str();
        payload["defect_float"] = rep.defect.to_double();
        payload["worst_point"] = rep.worst_point;
        payload["epsilon"] = eps.str();
        payload["verdict"] = rep.verdict;
        payload["dependent_tuple"] = rep.dependent_tuple;
    } else {
        os << "defect: skipped (tuple is not a form tuple with maximal-degree first)\n";
        payload["defect"] = nullptr;
    }

    json cert = certificate_shell("report", pf);
    cert["payload"] = payload;
    res.text = os.str();
    res.json = dump(cert);
    return res;
}

CommandResult cmd_rank(const ProblemFile& pf, const RunOptions& opts) {
    CommandResult res;
    std::ostringstream os;
    OracleLimits lim = limits_from(pf, opts);
    RankOracle oracle(lim);
    json payload;
    json ranks = json::array();
    bool any_inconclusive = false;
    for (const auto& [name, q] : pf.polys) {
        RankBound b = oracle.rank(q, lim.default_r_max);
        json entry;
        entry["name"] = name;
        os << "rk(" << name << "): ";
        if (b.lower == kRankInfinity) {
            os << "infinity (linear form)";
            entry["lower"] = "inf";
            entry["upper"] = "inf";
        } else {
            entry["lower"] = b.lower;
            entry["upper"] = b.upper == kRankInfinity ? json("inf") : json(b.upper);
            if (b.is_exact()) os << "= " << b.lower;
            else os << "in [" << b.lower << ", "
                    << (b.upper == kRankInfinity ? std::string("inf") : std::to_string(b.upper))
                    << "]";
        }
        entry["status"] = b.status == RankBound::Status::exact        ? "exact"
                          : b.status == RankBound::Status::bounded    ? "bounded"
                                                                      : "inconclusive";
        if (b.status == RankBound::Status::inconclusive) any_inconclusive = true;
        if (!b.note.empty()) entry["note"] = b.note;
        os << " [" << entry["status"].get<std::string>() << "]\n";
        if (b.witness) {
            json w = json::array();
            for (const auto& [a, bb] : b.witness->summands)
                w.push_back({poly_to_json(a), poly_to_json(bb)});
            entry["witness"] = w;
            os << "  witness with " << b.witness->summands.size() << " summand(s)\n";
        }
        if (!q.is_constant() && q.degree() >= 1) {
            BiasRankBound bb = bias_rank_lower_bound(q);
            entry["bias_lower_bound"] = bb.bound;
            entry["bias_lower_bound_capped"] = bb.capped;
            entry["bias_magnitude"] = bb.bias_magnitude;
            os << "  bias-based lower bound (heuristic-grade): " << bb.bound
               << (bb.capped ? " (capped: zero bias)" : "") << "\n";
            if (b.lower != kRankInfinity && b.upper != kRankInfinity) {
                os << "  L_F(" << b.upper << ") = " << rank_log_helper(pf.field.p, b.upper)
                   << "\n";
                entry["log_helper"] = rank_log_helper(pf.field.p, b.upper);
            }
        }
        ranks.push_back(entry);
    }
    payload["ranks"] = ranks;
    payload["r_max"] = lim.default_r_max;

    // with -t, the certificate switches to an rk_t search outcome
    std::optional<Rat> t = opts.t ? opts.t : pf.t;
    if (t) {
        if (t->den != 1 || t->num < 1)
            fail(errc::invalid_argument, "rk_t needs a positive integer t");
        u32 tt = u32(t->num);
        RktSearchOutcome out = rkt_search(pf.tuple(), tt, lim.default_r_max, lim);
        if (out.certificate) {
            os << "rk_" << tt << " <= " << out.certificate->summands.size()
               << (out.exhausted ? " (minimal within the search)" : "") << "\n";
            json payload_rkt;
            payload_rkt["t"] = tt;
            json summands = json::array();
            for (const auto& fs : out.certificate->summands) {
                json prod = json::array();
                for (const Poly& q : fs) prod.push_back(poly_to_json(q));
                summands.push_back(prod);
            }
            payload_rkt["summands"] = summands;
            payload_rkt["coefficients"] = out.certificate->coefficients;
            payload_rkt["exhausted"] = out.exhausted;
            if (!out.note.empty()) payload_rkt["note"] = out.note;
            json cert = certificate_shell("rkt", pf);
            cert["payload"] = payload_rkt;
            res.text = os.str();
            res.json = dump(cert);
            res.exit_code = any_inconclusive ? 2 : 0;
            return res;
        }
        os << "no rk_" << tt << " certificate within r_max = " << lim.default_r_max
           << (out.exhausted ? " (search exhausted)" : " (search family capped)") << "\n";
        if (!out.note.empty()) os << "  " << out.note << "\n";
        json j;
        j["error"] = out.exhausted ? "Exhausted" : errc_name(errc::oracle_inconclusive);
        j["message"] = out.note;
        res.text = os.str();
        res.json = dump(j);
        res.exit_code = 2;
        return res;
    }

    json cert = certificate_shell("report", pf);
    cert["payload"] = payload;
    res.text = os.str();
    res.json = dump(cert);
    res.exit_code = any_inconclusive ? 2 : 0;
    return res;
}

json decomposition_payload(const Decomposition& d, const ProblemFile& pf,
                           std::ostringstream& os) {
    json payload;
    payload["epsilon"] = d.epsilon ? json(d.epsilon->str()) : json(nullptr);
    payload["t"] = d.t_rank_regular ? json(d.t_rank_regular->str()) : json(nullptr);
    json parts = json::array();
    for (const Poly& q : d.parts) parts.push_back(poly_to_json(q));
    payload["parts"] = parts;
    json outers = json::array();
    for (const Poly& q : d.outers) outers.push_back(poly_to_json(q));
    payload["outers"] = outers;
    payload["flags"] = {{"minimal", d.minimal}, {"pruned", d.pruned}};
    if (d.defect) {
        payload["defect"] = d.defect->str();
        payload["defect_float"] = d.defect->to_double();
        payload["worst_point"] = d.worst_point;
    }
    payload["escalations"] = d.escalations;
    json prov = json::array();
    for (const RefineRecord& r : d.provenance)
        prov.push_back({{"round", r.round},
                        {"degree", r.degree},
                        {"tuple_before", r.tuple_before},
                        {"tuple_after", r.tuple_after}});
    payload["provenance"] = prov;
    payload["size"] = d.size();
    if (d.t_rank_regular)
        payload["size_within_bound"] = size_within_theorem_bound(
            d.size(), *d.t_rank_regular, tuple_degree(d.target), u32(d.target.size()));

    os << "decomposition of size " << d.size() << ", deg(X) = " << tuple_degree(d.parts)
       << (d.minimal ? ", minimal" : "") << (d.pruned ? ", pruned" : "") << "\n";
    for (std::size_t i = 0; i < d.parts.size(); ++i)
        os << "  X_" << (i + 1) << " = " << poly_str(d.parts[i], pf) << "\n";
    for (std::size_t i = 0; i < d.outers.size(); ++i)
        os << "  " << pf.polys[i].first << " = F_" << (i + 1) << "(X), F_" << (i + 1)
           << " = " << ypoly_str(d.outers[i]) << "\n";
    if (d.defect)
        os << "defect = " << d.defect->str() << " (" << d.defect->to_double()
           << "), epsilon = " << (d.epsilon ? d.epsilon->str() : "-") << " -> certified\n";
    if (d.t_rank_regular) os << "t = " << d.t_rank_regular->str() << ", escalations = "
                             << d.escalations << "\n";
    return payload;
}

CommandResult cmd_regularize(const ProblemFile& pf, const RunOptions& opts) {
    CommandResult res;
    std::ostringstream os;
    Rat eps = require_eps(pf, opts);
    OracleLimits lim = limits_from(pf, opts);
    RankOracle oracle(lim);
    PolyTuple P = pf.tuple();
    Decomposition d = weak_regular_decompose(P, eps, oracle);
    json payload = decomposition_payload(d, pf, os);

    // curve extraction whenever the containment lemma applies
    u32 dd = tuple_degree(P);
    if (!d.parts.empty() && d.defect &&
        *d.defect <= Rat(i64(pf.field.p - dd), i64(pf.field.p))) {
        CurveExtraction ce = extract_curve(d);
        payload["curve"] = curve_to_json(ce);
        os << "curve through the image: degree " << ce.curve.degree() << ", coords";
        for (const Poly& c : ce.curve.coords) {
            std::vector<std::string> tname{"t"};
            os << " [" << c.to_string(&tname) << "]";
        }
        os << "\n";
    } else {
        os << "curve extraction skipped (defect above 1 - d/p)\n";
    }

    json cert = certificate_shell("decomposition", pf);
    cert["payload"] = payload;
    res.text = os.str();
    res.json = dump(cert);
    return res;
}

CommandResult cmd_udeg(const ProblemFile& pf, const RunOptions&) {
    CommandResult res;
    std::ostringstream os;
    PolyTuple P = pf.tuple();
    UdegResult r = udeg(P);
    json payload;
    if (r.infinite) {
        payload["infinite"] = true;
        os << "udeg = infinity (constant map)\n";
    } else {
        payload["infinite"] = false;
        payload["u"] = r.u;
        json coords = json::array();
        for (const Poly& c : r.witness->coords) coords.push_back(poly_to_json(c));
        payload["witness"] = coords;
        os << "udeg = " << r.u << "\n";
        std::vector<std::string> tname{"t"};
        os << "witness curve:";
        for (const Poly& c : r.witness->coords) os << " [" << c.to_string(&tname) << "]";
        os << "\n";
    }
    json cert = certificate_shell("udeg", pf);
    cert["payload"] = payload;
    res.text = os.str();
    res.json = dump(cert);
    return res;
}

CommandResult cmd_formula(const ProblemFile& pf, const RunOptions& opts) {
    CommandResult res;
    std::ostringstream os;
    Rat eps = require_eps(pf, opts);
    OracleLimits lim = limits_from(pf, opts);
    RankOracle oracle(lim);
    PolyTuple P = pf.tuple();
    Decomposition d = weak_regular_decompose(P, eps, oracle);
    u32 dd = tuple_degree(P);
    u32 u = opts.u ? *opts.u
                   : (pf.u ? *pf.u
                           : std::max<u32>(1, tuple_degree(d.parts) == 0
                                                  ? 1
                                                  : dd / tuple_degree(d.parts)));
    SPSPFormula phi = build_spsp(d, u);
    if (!equiv_check(phi, P))
        fail(errc::internal_error, "synthesized formula fails pointwise equivalence");
    FaninReport rep = certify_fanin(phi, u32(P.size()), dd, u);

    json payload;
    payload["u"] = u;
    payload["source_parts"] = phi.source_parts;
    json prods = json::array();
    for (const auto& prod : phi.products) {
        json fs = json::array();
        for (const Poly& q : prod) fs.push_back(poly_to_json(q));
        prods.push_back(fs);
    }
    payload["products"] = prods;
    payload["coefficients"] = phi.coefficients;
    payload["certificate"] = {{"top_fanin", rep.top_fanin},
                              {"prod_fanin", rep.prod_fanin},
                              {"bottom_deg", rep.bottom_deg},
                              {"u_target", rep.u_target},
                              {"b_target", rep.b_target},
                              {"prod_fanin_exceeds_u", rep.prod_fanin_exceeds_u},
                              {"top_bound", rep.top_bound}};
    payload["decomposition_defect"] = d.defect ? json(d.defect->str()) : json(nullptr);

    os << "SPSP formula: r = " << rep.top_fanin << ", a = " << rep.prod_fanin
       << ", b = " << rep.bottom_deg << " (targets: a <= " << u << ", b <= " << rep.b_target
       << ")\n";
    if (rep.prod_fanin_exceeds_u) os << "note: product fan-in exceeds the target u\n";
    os << "pointwise equivalence verified on " << pf.field.point_count(pf.nvars)
       << " points\n";
    os << rep.context << "\n";

    json cert = certificate_shell("formula", pf);
    cert["payload"] = payload;
    res.text = os.str();
    res.json = dump(cert);
    return res;
}

// ---- verification ----------------------------------------------------------

[[noreturn]] void vfail(const std::string& what) { fail(errc::verification_failed, what); }

void verify_decomposition(const ProblemFile& pf, const json& payload) {
    PolyTuple P = pf.tuple();
    PolyTuple X;
    for (const auto& pj : payload.at("parts"))
        X.push_back(poly_from_json(pj, pf.field, pf.nvars));
    std::vector<Poly> outers;
    for (const auto& oj : payload.at("outers"))
        outers.push_back(poly_from_json(oj, pf.field, u32(X.size())));
    if (outers.size() != P.size()) vfail("outer count does not match the tuple");

    for (std::size_t i = 0; i < P.size(); ++i) {
        Poly back = X.empty()
                        ? Poly::constant(pf.field, pf.nvars,
                                         outers[i].is_zero() ? 0 : outers[i].constant_value())
                        : compose(outers[i], X);
        if (back != P[i]) vfail("component " + pf.polys[i].first + " does not recompose");
    }

    bool pruned = payload.at("flags").at("pruned").get<bool>();
    if (pruned) {
        for (std::size_t i = 0; i < outers.size(); ++i)
            for (const Term& t : outers[i].terms()) {
                u64 formal = 0;
                for (u32 j = 0; j < X.size(); ++j) formal += u64(t.mono.exps[j]) * X[j].degree();
                if (formal > P[i].degree()) vfail("outer map exceeds the degree budget");
            }
    }

    if (payload.contains("defect") && !payload.at("defect").is_null()) {
        Rat stated = Rat::parse(payload.at("defect").get<std::string>());
        Rat eps = Rat::parse(payload.at("epsilon").get<std::string>());
        if (X.empty()) {
            if (stated != Rat(0)) vfail("constant decomposition with nonzero defect");
        } else {
            RegularityReport rep = regularity_defect(X, eps);
            if (rep.defect != stated) vfail("stated defect does not match recomputation");
            if (!rep.verdict) vfail("defect exceeds epsilon");
        }
    }

    if (payload.at("flags").at("minimal").get<bool>() && !minimal_decomposition_check(P, X))
        vfail("a homogeneous hyperplane still generates the tuple");

    if (payload.contains("provenance") &&
        payload.at("provenance").size() > tuple_degree(P))
        vfail("more refinement rounds than the degree");

    if (payload.contains("curve")) {
        const json& cj = payload.at("curve");
        Curve curve;
        for (const auto& c : cj.at("coords"))
            curve.coords.push_back(poly_from_json(c, pf.field, 1));
        if (!curve.nonconstant()) vfail("stated curve is constant");
        PointSet img = image(P);
        for (u32 t = 0; t < pf.field.p; ++t)
            if (!img.contains(curve.at(t))) vfail("curve image escapes the image of P");
        if (!X.empty()) {
            Line l{cj.at("line_direction").get<std::vector<u32>>(),
                   cj.at("line_offset").get<std::vector<u32>>()};
            PointSet xi = image(X);
            for (u32 t = 0; t < pf.field.p; ++t)
                if (!xi.contains(l.point(pf.field, t))) vfail("stated line escapes Image(X)");
        }
        if (curve.degree() * tuple_degree(X) > tuple_degree(P))
            vfail("curve breaks the degree chain");
    }
}

void verify_rkt(const ProblemFile& pf, const json& payload) {
    RktCertificate cert;
    cert.t = payload.at("t").get<u32>();
    for (const auto& s : payload.at("summands")) {
        std::vector<Poly> fs;
        for (const auto& fj : s) fs.push_back(poly_from_json(fj, pf.field, pf.nvars));
        cert.summands.push_back(fs);
    }
    cert.coefficients = payload.at("coefficients").get<std::vector<std::vector<u32>>>();
    RktVerification v = rkt_verify(pf.tuple(), cert);
    if (!v.ok) vfail(v.diagnosis);
}

void verify_formula(const ProblemFile& pf, const json& payload) {
    SPSPFormula phi;
    phi.field = pf.field;
    phi.nvars = pf.nvars;
    phi.source_parts = payload.at("source_parts").get<u32>();
    for (const auto& prod : payload.at("products")) {
        std::vector<Poly> fs;
        for (const auto& fj : prod) fs.push_back(poly_from_json(fj, pf.field, pf.nvars));
        phi.products.push_back(fs);
    }
    phi.coefficients = payload.at("coefficients").get<std::vector<std::vector<u32>>>();
    if (!equiv_check(phi, pf.tuple())) vfail("formula is not equivalent to the tuple");
    const json& c = payload.at("certificate");
    if (c.at("top_fanin").get<u32>() != phi.top_fanin() ||
        c.at("prod_fanin").get<u32>() != phi.prod_fanin() ||
        c.at("bottom_deg").get<u32>() != phi.bottom_degree())
        vfail("stated fan-ins do not match the formula");
}

void verify_udeg(const ProblemFile& pf, const json& payload) {
    PolyTuple P = pf.tuple();
    if (payload.at("infinite").get<bool>()) {
        for (const Poly& q : P)
            if (!q.is_constant()) vfail("infinite udeg stated for a nonconstant map");
        return;
    }
    u32 u = payload.at("u").get<u32>();
    Curve curve;
    for (const auto& c : payload.at("witness"))
        curve.coords.push_back(poly_from_json(c, pf.field, 1));
    if (curve.coords.size() != P.size()) vfail("witness arity mismatch");
    if (!curve.nonconstant()) vfail("witness curve is constant");
    if (curve.degree() != u) vfail("witness degree does not match the stated u");
    PointSet img = image(P);
    for (u32 t = 0; t < pf.field.p; ++t)
        if (!img.contains(curve.at(t))) vfail("witness image escapes the image of P");
}

void verify_report(const ProblemFile& pf, const json& payload) {
    if (payload.contains("defect") && !payload.at("defect").is_null()) {
        PolyTuple X = pf.tuple();
        Rat eps = Rat::parse(payload.at("epsilon").get<std::string>());
        RegularityReport rep = regularity_defect(X, eps);
        if (rep.defect != Rat::parse(payload.at("defect").get<std::string>()))
            vfail("stated defect does not match recomputation");
        if (rep.verdict != payload.at("verdict").get<bool>()) vfail("stated verdict flipped");
    }
    if (payload.contains("biases")) {
        for (const auto& entry : payload.at("biases")) {
            std::string name = entry.at("name").get<std::string>();
            for (const auto& [pname, q] : pf.polys) {
                if (pname != name) continue;
                auto b = bias(q);
                if (std::abs(b.real() - entry.at("real").get<double>()) > 1e-9 ||
                    std::abs(b.imag() - entry.at("imag").get<double>()) > 1e-9)
                    vfail("stated bias does not match recomputation for " + name);
            }
        }
    }
    if (payload.contains("ranks")) {
        for (const auto& entry : payload.at("ranks")) {
            if (!entry.contains("witness")) continue;
            std::string name = entry.at("name").get<std::string>();
            const Poly* target = nullptr;
            for (const auto& [pname, q] : pf.polys)
                if (pname == name) target = &q;
            if (!target) vfail("rank entry for an unknown polynomial");
            Poly acc(pf.field, pf.nvars);
            for (const auto& s : entry.at("witness")) {
                Poly a = poly_from_json(s.at(0), pf.field, pf.nvars);
                Poly b = poly_from_json(s.at(1), pf.field, pf.nvars);
                acc = acc + a * b;
            }
            if (acc != target->top_part()) vfail("rank witness does not re-expand for " + name);
            if (!entry.at("upper").is_string() &&
                entry.at("witness").size() > entry.at("upper").get<u32>())
                vfail("witness larger than the stated upper bound");
        }
    }
}

}  // namespace

std::string problem_digest(const ProblemFile& pf) {
    Fnv1a h;
    h.feed_u64(pf.field.p);
    h.feed_u64(pf.nvars);
    for (const auto& [name, q] : pf.polys) {
        h.feed(name.data(), name.size());
        std::string key = q.key();
        h.feed(key.data(), key.size());
    }
    return h.hex();
}

CommandResult run_command(const std::string& command, const std::string& problem_text,
                          const RunOptions& opts) {
    try {
        ProblemFile pf = parse_problem(problem_text, opts.budget);
        if (command == "regularize" || command == "formula") {
            if (tuple_degree(pf.tuple()) >= pf.field.p)
                fail(errc::char_too_small, "pipeline commands need deg(P) < p");
        }
        if (command == "analyze") return cmd_analyze(pf, opts);
        if (command == "rank") return cmd_rank(pf, opts);
        if (command == "regularize") return cmd_regularize(pf, opts);
        if (command == "udeg") return cmd_udeg(pf, opts);
        if (command == "formula") return cmd_formula(pf, opts);
        fail(errc::invalid_argument, "unknown command '" + command + "'");
    } catch (const Error& e) {
        CommandResult res;
        res.error_code = errc_name(e.code());
        res.text = std::string("error [") + res.error_code + "]: " + e.what() + "\n";
        res.exit_code = (e.code() == errc::escalation_exhausted ||
                         e.code() == errc::oracle_inconclusive)
                            ? 2
                            : 1;
        json j;
        j["error"] = res.error_code;
        j["message"] = e.what();
        res.json = dump(j);
        return res;
    } catch (const std::exception& e) {
        CommandResult res;
        res.error_code = errc_name(errc::internal_error);
        res.text = std::string("error [InternalError]: ") + e.what() + "\n";
        res.exit_code = 1;
        return res;
    }
}

CommandResult verify_certificate(const std::string& certificate_json) {
    try {
        json cert = json::parse(certificate_json);
        if (cert.at("schema_version").get<int>() != kSchemaVersion)
            fail(errc::verification_failed, "unsupported schema version");
        ProblemFile pf = input_from_json(cert.at("input"));
        if (problem_digest(pf) != cert.at("input_digest").get<std::string>())
            fail(errc::verification_failed, "input digest mismatch");
        std::string kind = cert.at("kind").get<std::string>();
        const json& payload = cert.at("payload");
        if (kind == "decomposition") verify_decomposition(pf, payload);
        else if (kind == "rkt") verify_rkt(pf, payload);
        else if (kind == "formula") verify_formula(pf, payload);
        else if (kind == "udeg") verify_udeg(pf, payload);
        else if (kind == "report") verify_report(pf, payload);
        else fail(errc::verification_failed, "unknown certificate kind '" + kind + "'");
        CommandResult res;
        res.text = "certificate verified: " + kind + "\n";
        return res;
    } catch (const Error& e) {
        CommandResult res;
        res.error_code = errc_name(e.code());
        res.text = std::string("verification failed [") + res.error_code + "]: " + e.what() +
                   "\n";
        res.exit_code = 1;
        return res;
    } catch (const std::exception& e) {
        CommandResult res;
        res.error_code = errc_name(errc::verification_failed);
        res.text = std::string("verification failed: ") + e.what() + "\n";
        res.exit_code = 1;
        return res;
    }
}

}  // namespace wr
