#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "ctdta/errors.hpp"
#include "ctdta/grid.hpp"
#include "ctdta/io.hpp"
#include "ctdta/muller.hpp"
#include "ctdta/simulate.hpp"
#include "ctdta/single_clock.hpp"

namespace ctdta::cli {

namespace {

struct CheckArgs {
    std::string ctmc;
    std::string dta;
    std::string method = "auto";
    std::string qualitative = "positive";
    std::optional<double> time_bound;
    double grid_step = 0.01;
    std::optional<double> epsilon;
    long samples = 100000;
    std::uint64_t seed = 1;
    long max_steps = 10000;
    std::string format = "json";
    std::string dump_region_graph;
    std::string dump_field;
    std::optional<std::string> acceptance;
    std::string muller_mode = "exact";
    int threads = 0;
    long max_iterations = 0;
};

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
}

// Rates divided by `scale`, so that time is measured in 1/scale units.
Ctmc with_time_scale(Ctmc c, long scale) {
    c.rates /= static_cast<double>(scale);
    return c;
}

VerificationReport run_check(const CheckArgs& args) {
    Ctmc c = load_ctmc(args.ctmc);
    std::vector<std::string> load_warnings;
    Dta a = load_dta(args.dta, &load_warnings);

    const bool muller = a.acceptance == AcceptanceKind::muller;
    if (args.acceptance && *args.acceptance != (muller ? "muller" : "finite"))
        throw UsageError("--acceptance " + *args.acceptance + " does not match the automaton, which has " +
                         (muller ? "muller" : "finite") + " acceptance");
    if (args.time_bound && muller) throw UsageError("--time-bound needs finite acceptance");
    if (!(args.grid_step > 0.0)) throw UsageError("--grid-step must be positive");
    if (args.time_bound && !(*args.time_bound > 0.0)) throw UsageError("--time-bound must be positive");
    MullerMode mmode = args.muller_mode == "containment" ? MullerMode::containment : MullerMode::exact;

    // Time-bounded queries run on A[t_f] with a rescaled chain.
    Ctmc chain = c;
    Dta automaton = a;
    long scale = 1;
    if (args.time_bound) {
        TimeBounded tb = time_bound_transform(a, *args.time_bound);
        automaton = tb.dta;
        scale = tb.scale;
        chain = with_time_scale(c, scale);
    }

    std::string method = args.method;
    if (method == "auto") method = automaton.num_clocks() <= 1 ? "single-clock" : "grid";
    if (method == "single-clock" && automaton.num_clocks() > 1)
        throw UsageError(args.time_bound ? "--time-bound adds a clock; use --method grid or simulate"
                                         : "single-clock engine needs at most one clock");

    if (!args.dump_region_graph.empty()) {
        Prepared p = prepare(chain, automaton, mmode);
        write_text_file(args.dump_region_graph, to_dot(p.graph));
    }

    GridSpec spec;
    spec.h = args.grid_step * static_cast<double>(scale);
    if (args.epsilon) spec.eps_fix = *args.epsilon;
    spec.n_max = args.max_iterations;
    SingleClockOptions single;
    if (args.epsilon) single.eps = *args.epsilon;

    VerificationReport r;
    if (method == "qualitative") {
        r = qualitative_check(chain, automaton,
                              args.qualitative == "almost-sure" ? QualitativeMode::almost_sure
                                                                : QualitativeMode::positive,
                              mmode);
    } else if (method == "simulate") {
        SimConfig cfg;
        cfg.samples = args.samples;
        cfg.seed = args.seed;
        cfg.max_steps = args.max_steps;
        cfg.muller = mmode;
        cfg.threads = args.threads;
        r = simulate_report(chain, automaton, cfg);
    } else if (muller) {
        MullerOptions opt;
        opt.engine = method == "grid" ? Engine::grid : Engine::single_clock;
        opt.mode = mmode;
        opt.single = single;
        opt.grid = spec;
        r = check_muller(chain, automaton, opt);
    } else if (method == "single-clock") {
        r = solve_single_clock(chain, automaton, single);
    } else {
        GridResult field;
        r = solve_grid(chain, automaton, spec, &field);
        if (!args.dump_field.empty()) {
            std::ofstream f(args.dump_field);
            if (!f) throw UsageError("cannot write " + args.dump_field);
            write_field_csv(field, build_product(chain, validated(automaton)), f);
        }
    }
    if (args.time_bound) r.time_bound = *args.time_bound;
    for (auto& w : load_warnings)
        if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) r.warnings.push_back(w);
    return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model checking CTMCs against deterministic timed automata", "ctdta"};
    app.require_subcommand(1);

    CheckArgs check;
    CLI::App* cmd = app.add_subcommand("check", "Compute the acceptance probability");
    cmd->add_option("--ctmc", check.ctmc, "CTMC model (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--dta", check.dta, "Automaton specification (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--method", check.method, "Engine (auto: single-clock for one clock, else grid)")
        ->check(CLI::IsMember({"auto", "single-clock", "grid", "simulate", "qualitative"}));
    cmd->add_option("--qualitative", check.qualitative, "Qualitative mode")
        ->check(CLI::IsMember({"positive", "almost-sure"}));
    cmd->add_option("--time-bound", check.time_bound, "Accept only within this many time units");
    cmd->add_option("--grid-step", check.grid_step, "Grid step h for the grid engine");
    cmd->add_option("--epsilon", check.epsilon, "Truncation error (single-clock) or fixpoint tolerance (grid)");
    cmd->add_option("--samples", check.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", check.seed, "Monte Carlo seed");
    cmd->add_option("--max-steps", check.max_steps, "Monte Carlo path length limit")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iterations", check.max_iterations, "Grid value-iteration cap (0: 10 x vertices)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", check.threads, "Monte Carlo worker threads (0: all cores)");
    cmd->add_option("--format", check.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--dump-region-graph", check.dump_region_graph, "Write the region graph as dot");
    cmd->add_option("--dump-field", check.dump_field, "Write the grid value field as CSV");
    cmd->add_option("--acceptance", check.acceptance, "Expected acceptance kind")
        ->check(CLI::IsMember({"finite", "muller"}));
    cmd->add_option("--muller-mode", check.muller_mode, "Muller BSCC matching rule")
        ->check(CLI::IsMember({"exact", "containment"}));

    std::string validate_ctmc_path, validate_dta_path;
    CLI::App* val = app.add_subcommand("validate", "Load and validate model files");
    val->add_option("--ctmc", validate_ctmc_path, "CTMC model (JSON)")->check(CLI::ExistingFile);
    val->add_option("--dta", validate_dta_path, "Automaton specification (JSON)")->check(CLI::ExistingFile);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*val) {
            if (!validate_ctmc_path.empty()) load_ctmc(validate_ctmc_path);
            std::vector<std::string> warnings;
            if (!validate_dta_path.empty()) load_dta(validate_dta_path, &warnings);
            for (const auto& w : warnings) err << "warning: " << w << "\n";
            out << "ok\n";
            return ok;
        }
        VerificationReport r = run_check(check);
        out << (check.format == "text" ? report_to_text(r) : report_to_json(r));
        return r.converged ? ok : not_converged;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return usage_error;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return validation_error;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return validation_error;
    } catch (const ConvergenceError& e) {
        err << "not converged: " << e.what() << " (residual " << e.residual() << ")\n";
        return not_converged;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace ctdta::cli
