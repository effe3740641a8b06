#ifndef LSQNET_SIMULATOR_HPP
#define LSQNET_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lsqnet/agent.hpp"
#include "lsqnet/network.hpp"
#include "lsqnet/problem.hpp"

namespace lsqnet {

enum class InitKind { zeros, random, explicit_states };

struct RunConfig {
    std::size_t max_rounds = 5000;
    double tol = 1e-12;             // termination threshold on the metric W(t)
    std::size_t record_every = 1;
    InitKind init = InitKind::zeros;
    std::vector<AgentState> explicit_init; // used when init == explicit_states
    std::uint64_t rng_seed = 0;            // for init == random
    bool record_states = false;
};

enum class TerminationReason { tolerance, max_rounds, divergence };

const char* to_string(TerminationReason r);

struct Sample {
    std::size_t t = 0;
    double W = 0.0;                  // the convergence metric
    double consensus_spread = 0.0;   // max_{i,j} ||x_i - x_j||_2
    double normal_eq_residual = 0.0; // ||A'A xbar - A'b||_2 at the mean xbar
};

struct RunTrajectory {
    std::vector<Sample> samples;                          // strictly increasing t
    std::vector<std::vector<AgentState>> recorded_states; // only if record_states
    std::vector<AgentState> final_states;
    std::size_t rounds = 0;
    TerminationReason reason = TerminationReason::max_rounds;
    std::vector<std::string> warnings;
};

/// The paper's convergence diagnostic:
/// W = (1/2m) sum_i ||A'A x_i - A'b||^2 + (1/2m^2) sum_{i,j} ||x_i - x_j||^2,
/// with the GLOBAL stacked A (a centralized diagnostic, not agent-local).
double metric_W(const std::vector<AgentState>& states, const StackedSystem& sys);

/// Synchronous round engine: snapshot all states, step every agent from the
/// snapshot, record metrics. Terminates on W(t) <= tol, the round cap, or
/// divergence (W(t) > 1e12 * W(0)); divergence is a reported outcome, not an
/// error. Warns (in trajectory.warnings) when the gain condition fails.
RunTrajectory run(const NetworkModel& net, const Gains& g, const Hyperparams& hp,
                  const std::vector<LocalData>& blocks, const RunConfig& cfg);

struct ExpFit {
    double rate = 0.0;      // per-round slope of ln W(t), expected < 0
    double r_squared = 0.0;
};

/// Line fit of ln W(t) vs t over the last 50% of recorded rounds with
/// W(t) > 1e-14. Requires at least 20 such rounds.
ExpFit exp_fit(const RunTrajectory& traj);

/// Deterministic uniform draw in [lo, hi) from a 64-bit generator state,
/// stable across standard libraries (53-bit mantissa scaling).
double uniform_draw(std::uint64_t& state, double lo, double hi);

} // namespace lsqnet

#endif
