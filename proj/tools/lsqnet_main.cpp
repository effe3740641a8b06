// lsqnet: run, check, and analyze distributed least-squares problems
// described by JSON problem files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsqnet/analysis.hpp"
#include "lsqnet/artifacts.hpp"
#include "lsqnet/error.hpp"
#include "lsqnet/problem_io.hpp"

namespace {

using namespace lsqnet;

struct CommonOptions {
    std::string problem_path;
    std::string out_dir = ".";
    std::optional<double> c;
    std::optional<double> cbar;
    std::optional<std::string> gains; // "default" or a path to a JSON array
    std::optional<std::size_t> max_rounds;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> init; // zeros | random
    std::optional<std::size_t> record_every;
    bool plot = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("problem", opt.problem_path, "problem file (JSON)")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--c", opt.c, "primal coupling constant (>= 0)");
    cmd->add_option("--cbar", opt.cbar, "data weighting constant (> 0)");
    cmd->add_option("--gains", opt.gains, "\"default\" or path to a JSON array of gains");
    cmd->add_option("--max-rounds", opt.max_rounds, "round cap");
    cmd->add_option("--tol", opt.tol, "termination threshold on the metric W");
    cmd->add_option("--seed", opt.seed, "seed for random initialization");
    cmd->add_option("--init", opt.init, "initial states: zeros | random");
    cmd->add_option("--record-every", opt.record_every, "metric recording stride");
    cmd->add_flag("--plot", opt.plot, "also write convergence.svg");
}

ProblemSpec load_with_overrides(const CommonOptions& opt) {
    ProblemSpec spec = load_problem(opt.problem_path);
    if (opt.c) spec.hp.c = *opt.c;
    if (opt.cbar) spec.hp.cbar = *opt.cbar;
    if (opt.max_rounds) spec.cfg.max_rounds = *opt.max_rounds;
    if (opt.tol) spec.cfg.tol = *opt.tol;
    if (opt.seed) spec.cfg.rng_seed = *opt.seed;
    if (opt.record_every) spec.cfg.record_every = *opt.record_every;
    if (opt.init) {
        if (*opt.init == "zeros")
            spec.cfg.init = InitKind::zeros;
        else if (*opt.init == "random")
            spec.cfg.init = InitKind::random;
        else
            throw Error(ErrorCode::invalid_argument, "--init must be zeros or random");
    }
    if (opt.gains) {
        if (*opt.gains == "default") {
            spec.gains.reset();
        } else {
            std::ifstream in(*opt.gains);
            if (!in) throw Error(ErrorCode::io_error, "cannot open gains file: " + *opt.gains);
            nlohmann::json doc;
            try {
                in >> doc;
            } catch (const nlohmann::json::parse_error& e) {
                throw Error(ErrorCode::parse_error, e.what());
            }
            if (!doc.is_array())
                throw Error(ErrorCode::parse_error, "gains file must hold a JSON array");
            spec.gains = doc.get<Vector>();
        }
    }
    validate(spec.hp);
    return spec;
}

std::string joined(const std::filesystem::path& dir, const std::string& name) {
    return (dir / name).string();
}

int cmd_run(const CommonOptions& opt) {
    const ProblemSpec spec = load_with_overrides(opt);
    const NetworkModel net = build(spec.weights);
    const Gains gains = resolve_gains(spec, net);

    const RunTrajectory traj = run(net, gains, spec.hp, spec.blocks, spec.cfg);
    for (const std::string& w : traj.warnings) std::cerr << "warning: " << w << "\n";

    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    write_text_atomic(joined(dir, "metrics.csv"), metrics_csv(traj));
    write_text_atomic(joined(dir, "final_states.json"), final_states_json(traj));
    if (opt.plot) write_text_atomic(joined(dir, "convergence.svg"), convergence_svg(traj));

    std::cout << "terminated by " << to_string(traj.reason) << " after " << traj.rounds
              << " rounds, final W = " << traj.samples.back().W << "\n";
    switch (traj.reason) {
        case TerminationReason::tolerance: return 0;
        case TerminationReason::max_rounds: return 2;
        case TerminationReason::divergence: return 3;
    }
    return 1;
}

int cmd_check(const CommonOptions& opt) {
    const ProblemSpec spec = load_with_overrides(opt);
    const NetworkModel net = build(spec.weights); // throws on disconnected graph
    const Gains gains = resolve_gains(spec, net);
    const StackedSystem sys = assemble(spec.blocks);

    std::cout << "connectivity: connected (" << net.m << " agents)\n";

    const GainConditionVerdict verdict = check_gain_condition(net, gains);
    std::cout << "gain condition D K D - W K W >= 0: "
              << (verdict.pass ? "pass" : "FAIL")
              << " (min eigenvalue " << verdict.min_eigenvalue << ")\n";

    const DegenerateDirectionReport degen =
        check_degenerate_direction(net, gains, spec.blocks);
    std::cout << "degenerate direction (requires c > 0): "
              << (degen.exists ? "exists" : "none") << "\n";

    const std::size_t ker_dim = nullspace(sys.A, 1e-9).size();
    std::cout << "kernel dimension of stacked A: " << ker_dim
              << (ker_dim > 0 ? " (least-squares solution set is a subspace coset)\n"
                              : " (unique least-squares solution)\n");

    const bool ok = verdict.pass && (!degen.exists || spec.hp.c > 0.0);
    std::cout << "hypotheses with c = " << spec.hp.c << ": " << (ok ? "hold" : "DO NOT hold")
              << "\n";
    return ok ? 0 : 2;
}

int cmd_analyze(const CommonOptions& opt) {
    const ProblemSpec spec = load_with_overrides(opt);
    const NetworkModel net = build(spec.weights);
    const Gains gains = resolve_gains(spec, net);
    const StackedSystem sys = assemble(spec.blocks);
    if (2 * net.m * sys.n > 200)
        throw Error(ErrorCode::too_large,
                    "analysis is desk-scale: 2 m n = " + std::to_string(2 * net.m * sys.n) +
                        " exceeds 200");

    const GlobalSystem gs = build_global(net, gains, spec.hp, spec.blocks);
    const SpectralReport spectral = spectral_report(gs, net, spec.blocks);
    const PencilReport pencil = pencil_check(make_pencil(gs), gs);

    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    write_text_atomic(joined(dir, "spectrum.json"), spectrum_json(spectral, pencil));

    std::cout << "eigenvalues: " << spectral.eigenvalues.size()
              << ", max |lambda| = " << spectral.max_magnitude
              << ", nearest to -1: " << spectral.nearest_to_minus_one << "\n";
    std::cout << "eigenvalue 1 multiplicity: algebraic " << spectral.algebraic_one
              << ", geometric " << spectral.geometric_one << ", structural "
              << spectral.structural_one << "\n";
    std::cout << "pencil: min eig M2 = " << pencil.min_eig_M2
              << ", M0 = " << pencil.min_eig_M0
              << ", M(-1) = " << pencil.min_eig_M_minus_one << ", residual max = "
              << pencil.max_pencil_residual << " over " << pencil.eigenpairs_checked
              << " eigenpairs\n";
    for (const std::string& v : pencil.violations) std::cout << "violation: " << v << "\n";

    const bool ok = spectral.pass() && pencil.pass();
    std::cout << "spectral verdicts: " << (ok ? "all pass" : "FAIL") << "\n";
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed least-squares simulator and spectral certifier"};
    app.require_subcommand(1);

    CommonOptions run_opt, check_opt, analyze_opt;
    CLI::App* run_cmd = app.add_subcommand("run", "simulate the distributed update");
    add_common(run_cmd, run_opt);
    CLI::App* check_cmd = app.add_subcommand("check", "verify the convergence conditions");
    add_common(check_cmd, check_opt);
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "spectral report of the iteration matrix");
    add_common(analyze_cmd, analyze_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opt);
        if (check_cmd->parsed()) return cmd_check(check_opt);
        if (analyze_cmd->parsed()) return cmd_analyze(analyze_opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
