// This file is part of otdro, a C++ library for worst-case expectation
// bounds over optimal-transport balls of probability measures.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

#include "otdro/otdro.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

// Exit code contract: 0 success, 1 input error, 2 certificate failure.
constexpr int exit_ok = 0;
constexpr int exit_input_error = 1;
constexpr int exit_certificate_failure = 2;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw otdro::ParseError("cannot open input file '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw otdro::Error("cannot open output file '" + path + "'");
    out << text;
}

/// Flips a minimization-form value back to the document's sense.
double oriented(double value, otdro::Sense sense) {
    return sense == otdro::Sense::Max ? -value : value;
}

struct SolveOptions {
    std::string input;
    std::string output;
    std::string method = "both";
    bool timings = false;
    double perturb_dual = 0.0; // testing hook: shifts the dual value
};

int run_solve(const SolveOptions& opt) {
    const otdro::ProblemSpec spec = otdro::parse_problem(read_input(opt.input));
    const otdro::PrimalProblem prob =
        spec.sense == otdro::Sense::Max ? spec.problem().negated() : spec.problem();

    otdro::ResultDocument res;
    res.problem = otdro::problem_hash(spec);
    res.sense = otdro::to_string(spec.sense);
    std::map<std::string, double> timings;
    const auto stamp = [] { return std::chrono::steady_clock::now(); };
    using dsec = std::chrono::duration<double>;

    std::optional<otdro::PrimalSolution> primal;
    if (opt.method == "primal" || opt.method == "both") {
        const auto t0 = stamp();
        primal = otdro::solve_primal(prob);
        timings["primal"] = dsec(stamp() - t0).count();
        otdro::PrimalReport rep;
        rep.value = oriented(primal->value, spec.sense);
        rep.cost_used = primal->cost_used;
        rep.status = primal->status == otdro::SolveStatus::Optimal ? "optimal" : "infeasible";
        rep.plan = primal->plan.pi.to_rows();
        res.primal = std::move(rep);
    }

    std::optional<otdro::DualSolution> dual;
    if (opt.method == "dual" || opt.method == "both") {
        const auto t0 = stamp();
        dual = otdro::solve_dual_min(prob);
        timings["dual"] = dsec(stamp() - t0).count();
        dual->value += opt.perturb_dual;
        otdro::DualReport rep;
        rep.attained = dual->attained;
        rep.lambda_star = dual->lambda_star;
        rep.value = oriented(dual->value, spec.sense);
        res.dual = std::move(rep);
    }

    bool certified = true;
    if (opt.method == "both") {
        res.gap = std::abs(primal->value - dual->value);

        const auto t0 = stamp();
        const otdro::WorstCaseResult worst = otdro::recover_worst_case(*dual, prob);
        const otdro::CertificateReport cert = otdro::verify_certificate(worst, *dual, prob);
        timings["recovery"] = dsec(stamp() - t0).count();

        otdro::WorstCaseReport rep;
        rep.nu = worst.nu.w;
        rep.blend_t = worst.blend_t;
        rep.slack = worst.slack;
        rep.certificate = cert.clauses;
        res.worst_case = std::move(rep);

        const double scale = 1e-8 * (1.0 + std::abs(primal->value));
        certified = cert.all_pass() && *res.gap <= scale;
    }

    if (opt.timings) res.timings = std::move(timings);
    write_output(opt.output, otdro::emit_result(res));
    if (!certified) {
        std::cerr << "certificate failure: primal/dual gap or certificate clause out of "
                     "tolerance\n";
        return exit_certificate_failure;
    }
    return exit_ok;
}

struct VerifyOptions {
    std::string input;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
};

int run_verify(const VerifyOptions& opt) {
    const otdro::ProblemSpec spec = otdro::parse_problem(read_input(opt.input));
    const otdro::PrimalProblem prob =
        spec.sense == otdro::Sense::Max ? spec.problem().negated() : spec.problem();

    const otdro::MinimaxReport minimax = otdro::certify_minimax(prob, opt.trials, opt.seed);
    const otdro::DualSolution dual = otdro::solve_dual_min(prob);
    const otdro::WorstCaseResult worst = otdro::recover_worst_case(dual, prob);
    const otdro::CertificateReport cert = otdro::verify_certificate(worst, dual, prob);

    bool all_pass = true;
    const auto line = [&all_pass](const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "PASS" : "FAIL") << "  " << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        all_pass = all_pass && pass;
    };

    line("minimax_gap", std::abs(minimax.gap) <= 1e-8,
         "min_sup=" + otdro::format_double(minimax.min_sup) +
             " sup_min=" + otdro::format_double(minimax.sup_min));
    line("cc_like_linearity", minimax.cc_like_max_violation <= 1e-12,
         "max_violation=" + otdro::format_double(minimax.cc_like_max_violation));
    line("lsc_acknowledged", minimax.lsc_checked,
         "automatic on finite spaces, not separately tested");
    for (const auto& clause : cert.clauses)
        line("certificate_" + clause.name, clause.pass,
             "measured=" + otdro::format_double(clause.lhs) +
                 " reference=" + otdro::format_double(clause.rhs));

    return all_pass ? exit_ok : exit_certificate_failure;
}

struct SweepOptions {
    std::string input;
    std::string output;
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t steps = 2;
};

int run_sweep(const SweepOptions& opt) {
    if (!(opt.r_min >= 0.0) || opt.r_max < opt.r_min)
        throw otdro::ValidationError("sweep requires 0 <= r-min <= r-max");
    if (opt.steps < 2) throw otdro::ValidationError("sweep requires at least 2 steps");

    const otdro::ProblemSpec spec = otdro::parse_problem(read_input(opt.input));

    std::vector<otdro::SweepRow> rows;
    rows.reserve(opt.steps);
    for (std::size_t k = 0; k < opt.steps; ++k) {
        const double radius =
            opt.r_min + static_cast<double>(k) * (opt.r_max - opt.r_min) /
                            static_cast<double>(opt.steps - 1);
        otdro::PrimalProblem prob(spec.f, spec.mu, spec.cost, radius);
        if (spec.sense == otdro::Sense::Max) prob = prob.negated();
        const otdro::DualSolution dual = otdro::solve_dual_min(prob);
        rows.push_back(otdro::SweepRow{radius, oriented(dual.value, spec.sense),
                                       dual.attained, dual.lambda_star});
    }
    write_output(opt.output, otdro::emit_sweep_csv(rows));
    return exit_ok;
}

struct OtdistOptions {
    std::string input;
    std::string output;
};

int run_otdist(const OtdistOptions& opt) {
    const otdro::ProblemSpec spec = otdro::parse_problem(read_input(opt.input));
    if (!spec.nu)
        throw otdro::SchemaError("otdist requires a 'nu' measure in the problem document");
    const otdro::OTResult ot = otdro::ot_distance(spec.mu, *spec.nu, spec.cost);

    nlohmann::json doc;
    doc["distance"] = ot.distance;
    doc["plan"] = ot.plan.pi.to_rows();
    write_output(opt.output, doc.dump(2) + "\n");
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case expectation bounds over optimal-transport balls"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    auto* solve = app.add_subcommand(
        "solve", "Solve a problem document via the primal LP, the dual, or both");
    solve->add_option("input", solve_opt.input, "problem file ('-' for stdin)")->required();
    solve->add_option("--method", solve_opt.method, "primal | dual | both")
        ->check(CLI::IsMember({"primal", "dual", "both"}))
        ->capture_default_str();
    solve->add_option("-o,--output", solve_opt.output, "output file (default stdout)");
    solve->add_flag("--timings", solve_opt.timings,
                    "include wall-clock timings (makes output non-reproducible)");
    solve->add_option("--perturb-dual", solve_opt.perturb_dual,
                      "testing hook: add this offset to the dual value before certification");

    VerifyOptions verify_opt;
    auto* verify = app.add_subcommand(
        "verify", "Certify minimax equality and the worst-case recovery on a problem");
    verify->add_option("input", verify_opt.input, "problem file ('-' for stdin)")->required();
    verify->add_option("--trials", verify_opt.trials, "linearity-check trials")
        ->capture_default_str();
    verify->add_option("--seed", verify_opt.seed, "seed for the trials")->capture_default_str();

    SweepOptions sweep_opt;
    auto* sweep =
        app.add_subcommand("sweep", "Tabulate the optimal value over a range of radii (CSV)");
    sweep->add_option("input", sweep_opt.input, "problem file ('-' for stdin)")->required();
    sweep->add_option("--r-min", sweep_opt.r_min, "smallest radius")->required();
    sweep->add_option("--r-max", sweep_opt.r_max, "largest radius")->required();
    sweep->add_option("--steps", sweep_opt.steps, "row count (>= 2)")->required();
    sweep->add_option("-o,--output", sweep_opt.output, "output file (default stdout)");

    OtdistOptions otdist_opt;
    auto* otdist = app.add_subcommand(
        "otdist", "Optimal transport cost between the mu and nu measures of a problem");
    otdist->add_option("input", otdist_opt.input, "problem file ('-' for stdin)")->required();
    otdist->add_option("-o,--output", otdist_opt.output, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (solve->parsed()) return run_solve(solve_opt);
        if (verify->parsed()) return run_verify(verify_opt);
        if (sweep->parsed()) return run_sweep(sweep_opt);
        return run_otdist(otdist_opt);
    } catch (const otdro::CertificateFailureError& e) {
        std::cerr << "certificate failure: " << e.what() << "\n";
        return exit_certificate_failure;
    } catch (const otdro::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_error;
    }
}
