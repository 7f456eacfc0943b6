#pragma once

#include "wr/formula.hpp"
#include "wr/imagery.hpp"

namespace wr {

// Parsed problem file: field header, variable list, named polynomials, and
// optional parameters. Grammar (one directive per line, '#' comments):
//   field <prime>
//   vars <name> <name> ...
//   poly <NAME> = <expr>
//   eps <a/b> | t <a/b> | u <nat> | max-rank <nat> | budget <nat>
struct ProblemFile {
    FieldSpec field;
    u32 nvars = 0;
    std::vector<std::string> var_names;
    std::vector<std::pair<std::string, Poly>> polys;
    std::optional<Rat> eps;
    std::optional<Rat> t;
    std::optional<u32> u;
    std::optional<u32> max_rank;
    std::optional<u64> budget;

    PolyTuple tuple() const;
};

// budget_override (command line) wins over the file's budget directive.
ProblemFile parse_problem(const std::string& text, std::optional<u64> budget_override = {});

// Whitespace-separated key=value pairs; command-line flags override the file.
struct RunOptions {
    std::optional<Rat> eps;
    std::optional<Rat> t;
    std::optional<u32> u;
    std::optional<u32> max_rank;
    std::optional<u64> budget;
    std::optional<u64> seed;  // reserved for corpus tooling
};

RunOptions parse_options(const std::string& text);

struct CommandResult {
    int exit_code = 0;       // 0 success/certified, 2 honest non-certification, 1 error
    std::string text;        // human-readable report
    std::string json;        // certificate, when the command produces one
    std::string error_code;  // machine-readable errc name on failure
};

// command is one of: analyze, rank, regularize, udeg, formula.
CommandResult run_command(const std::string& command, const std::string& problem_text,
                          const RunOptions& opts);

// Re-verifies a certificate by expansion and evaluation only; searches are
// never re-run.
CommandResult verify_certificate(const std::string& certificate_json);

const char* toolkit_version();

// Canonical digest of a problem (field, arity, polynomials).
std::string problem_digest(const ProblemFile& pf);

}  // namespace wr
