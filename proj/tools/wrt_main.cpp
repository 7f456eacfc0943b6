// wrt: command-line front end of the weak-regularity toolkit. Talks to the
// shared library exclusively through the C API in weakreg.h.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "weakreg.h"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonFlags {
    std::string file;
    std::string eps, t;
    unsigned u = 0;
    unsigned max_rank = 0;
    unsigned long long budget = 0;
    unsigned long long seed = 0;
    bool have_u = false, have_max_rank = false, have_budget = false, have_seed = false;
    std::string json_path;
};

void add_common(CLI::App* cmd, CommonFlags& fl, bool needs_file = true) {
    auto* fopt = cmd->add_option("-f,--file", fl.file, "problem file");
    if (needs_file) fopt->required();
    cmd->add_option("--eps", fl.eps, "regularity parameter epsilon, as a/b");
    cmd->add_option("-t", fl.t, "rank-regularity parameter t, as a/b");
    cmd->add_option("-u", fl.u, "product fan-in target")->each([&](const std::string&) {
        fl.have_u = true;
    });
    cmd->add_option("--max-rank", fl.max_rank, "rank search ceiling")
        ->each([&](const std::string&) { fl.have_max_rank = true; });
    cmd->add_option("--budget", fl.budget, "enumeration budget (points)")
        ->each([&](const std::string&) { fl.have_budget = true; });
    cmd->add_option("--seed", fl.seed, "random corpus seed (reserved)")
        ->each([&](const std::string&) { fl.have_seed = true; });
    cmd->add_option("--json", fl.json_path, "write the JSON certificate here");
}

std::string options_string(const CommonFlags& fl) {
    std::ostringstream os;
    if (!fl.eps.empty()) os << "eps=" << fl.eps << " ";
    if (!fl.t.empty()) os << "t=" << fl.t << " ";
    if (fl.have_u) os << "u=" << fl.u << " ";
    if (fl.have_max_rank) os << "max-rank=" << fl.max_rank << " ";
    if (fl.have_budget) os << "budget=" << fl.budget << " ";
    if (fl.have_seed) os << "seed=" << fl.seed << " ";
    return os.str();
}

int run_subcommand(const char* name, const CommonFlags& fl) {
    std::string text;
    try {
        text = read_file(fl.file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    wr_problem* prob = nullptr;
    if (wr_problem_parse(text.c_str(), &prob) != WR_OK) {
        std::cerr << "error: " << wr_last_error() << "\n";
        return 1;
    }
    wr_result* res = nullptr;
    std::string opts = options_string(fl);
    if (wr_run(prob, name, opts.c_str(), &res) != WR_OK) {
        std::cerr << "error: " << wr_last_error() << "\n";
        wr_problem_free(prob);
        return 1;
    }
    std::cout << wr_result_text(res);
    int code = wr_result_exit_code(res);
    if (!fl.json_path.empty()) {
        const char* json = wr_result_json(res);
        if (json) {
            std::ofstream out(fl.json_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write '" << fl.json_path << "'\n";
                code = 1;
            } else {
                out << json;
            }
        } else {
            std::cerr << "note: no certificate to write\n";
        }
    }
    wr_result_free(res);
    wr_problem_free(prob);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak regularity toolkit for polynomials over prime fields"};
    app.set_version_flag("--version", std::string(wr_version()));
    app.require_subcommand(1);

    CommonFlags analyze_fl, rank_fl, reg_fl, udeg_fl, formula_fl;
    auto* analyze = app.add_subcommand("analyze", "bias, distribution, defect");
    add_common(analyze, analyze_fl);
    auto* rank = app.add_subcommand("rank", "rank bounds with witnesses");
    add_common(rank, rank_fl);
    auto* reg = app.add_subcommand(
        "regularize", "weak epsilon-regular decomposition with certificates");
    add_common(reg, reg_fl);
    auto* udeg = app.add_subcommand("udeg", "univariate degree by exhaustive search");
    add_common(udeg, udeg_fl);
    auto* formula = app.add_subcommand("formula", "depth-4 formula synthesis");
    add_common(formula, formula_fl);

    std::string cert_path;
    auto* verify = app.add_subcommand("verify", "re-verify a JSON certificate");
    verify->add_option("certificate", cert_path, "certificate file")->required();

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) return run_subcommand("analyze", analyze_fl);
    if (rank->parsed()) return run_subcommand("rank", rank_fl);
    if (reg->parsed()) return run_subcommand("regularize", reg_fl);
    if (udeg->parsed()) return run_subcommand("udeg", udeg_fl);
    if (formula->parsed()) return run_subcommand("formula", formula_fl);
    if (verify->parsed()) {
        std::string json;
        try {
            json = read_file(cert_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        wr_result* res = nullptr;
        if (wr_verify(json.c_str(), &res) != WR_OK) {
            std::cerr << "error: " << wr_last_error() << "\n";
            return 1;
        }
        std::cout << wr_result_text(res);
        int code = wr_result_exit_code(res);
        wr_result_free(res);
        return code;
    }
    return 1;
}
