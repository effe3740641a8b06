#ifndef LSQNET_PROBLEM_IO_HPP
#define LSQNET_PROBLEM_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "lsqnet/agent.hpp"
#include "lsqnet/network.hpp"
#include "lsqnet/problem.hpp"
#include "lsqnet/simulator.hpp"

namespace lsqnet {

/// Parsed problem file: graph weights, per-agent equations, run parameters.
/// gains empty means "default" (kappa_i = 1/d_i).
struct ProblemSpec {
    Matrix weights;
    std::vector<LocalData> blocks;
    Hyperparams hp;
    std::optional<Vector> gains;
    RunConfig cfg;
};

/// Parses the JSON problem format:
///   { "graph": { "m": ..., "weights": [[i, j, w], ...] },      (1-based indices)
///     "equations": { "agents": [ { "A": [[...]], "b": [...] }, ... ] },
///     "params": { "c", "cbar", "gains", "max_rounds", "tol",
///                 "record_every", "init", "seed" } }
/// Symmetric weight entries are auto-mirrored; conflicting duplicates and
/// unknown keys are rejected. Throws Error{parse_error}.
ProblemSpec parse_problem(const std::string& json_text);
ProblemSpec load_problem(const std::string& path);

std::string serialize_problem(const ProblemSpec& spec);

Gains resolve_gains(const ProblemSpec& spec, const NetworkModel& net);

} // namespace lsqnet

#endif
