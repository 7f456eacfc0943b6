#include "weakreg.h"

#include <string>

#include "wr/driver.hpp"

using namespace wr;

struct wr_problem {
    std::string source;
    ProblemFile parsed;
};

struct wr_result {
    CommandResult inner;
};

namespace {

thread_local std::string g_last_error;

wr_status status_of(const Error& e) {
    switch (e.code()) {
        case errc::parse_error:
        case errc::variable_out_of_range:
            return WR_ERR_PARSE;
        case errc::budget_exceeded:
            return WR_ERR_BUDGET;
        case errc::escalation_exhausted:
        case errc::oracle_inconclusive:
            return WR_ERR_NOT_CERTIFIED;
        case errc::verification_failed:
            return WR_ERR_VERIFICATION;
        case errc::internal_error:
            return WR_ERR_INTERNAL;
        default:
            return WR_ERR_INVALID;
    }
}

}  // namespace

extern "C" {

const char* wr_version(void) { return toolkit_version(); }

const char* wr_last_error(void) { return g_last_error.c_str(); }

wr_status wr_problem_parse(const char* text, wr_problem** out) {
    *out = nullptr;
    if (!text) {
        g_last_error = "null problem text";
        return WR_ERR_INVALID;
    }
    try {
        auto* p = new wr_problem{text, parse_problem(text)};
        *out = p;
        return WR_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return WR_ERR_INTERNAL;
    }
}

void wr_problem_free(wr_problem* p) { delete p; }

unsigned wr_problem_field(const wr_problem* p) { return p->parsed.field.p; }
unsigned wr_problem_nvars(const wr_problem* p) { return p->parsed.nvars; }
unsigned wr_problem_npolys(const wr_problem* p) { return unsigned(p->parsed.polys.size()); }

const char* wr_problem_poly_name(const wr_problem* p, unsigned i) {
    if (i >= p->parsed.polys.size()) return nullptr;
    return p->parsed.polys[i].first.c_str();
}

wr_status wr_run(const wr_problem* p, const char* command, const char* options,
                 wr_result** out) {
    *out = nullptr;
    if (!p || !command) {
        g_last_error = "null argument";
        return WR_ERR_INVALID;
    }
    try {
        RunOptions opts = parse_options(options ? options : "");
        CommandResult res = run_command(command, p->source, opts);
        *out = new wr_result{std::move(res)};
        return WR_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return WR_ERR_INTERNAL;
    }
}

wr_status wr_verify(const char* certificate_json, wr_result** out) {
    *out = nullptr;
    if (!certificate_json) {
        g_last_error = "null certificate";
        return WR_ERR_INVALID;
    }
    try {
        CommandResult res = verify_certificate(certificate_json);
        *out = new wr_result{std::move(res)};
        return WR_OK;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return WR_ERR_INTERNAL;
    }
}

int wr_result_exit_code(const wr_result* r) { return r->inner.exit_code; }

const char* wr_result_text(const wr_result* r) { return r->inner.text.c_str(); }

const char* wr_result_json(const wr_result* r) {
    return r->inner.json.empty() ? nullptr : r->inner.json.c_str();
}

const char* wr_result_error(const wr_result* r) {
    return r->inner.error_code.empty() ? nullptr : r->inner.error_code.c_str();
}

void wr_result_free(wr_result* r) { delete r; }

}  // extern "C"
