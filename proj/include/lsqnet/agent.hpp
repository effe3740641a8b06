#ifndef LSQNET_AGENT_HPP
#define LSQNET_AGENT_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "lsqnet/matrix.hpp"
#include "lsqnet/network.hpp"
#include "lsqnet/problem.hpp"

namespace lsqnet {

/// Global update constants: c >= 0 weights the primal coupling, cbar > 0 the
/// data term. Shared by all agents.
struct Hyperparams {
    double c = 0.0;
    double cbar = 1.0;
};

void validate(const Hyperparams& hp);

struct AgentState {
    Vector x;
    Vector z;
};

/// Messages visible to one agent in one round: exactly the states of its
/// neighbors (self included), snapshotted at time t.
using MessageSet = std::map<std::size_t, AgentState>;

/// Everything agent i needs per round, precomputed once: neighbor weights,
/// the cached data term cbar*kappa_i*A_i'b_i, and the LU-factored 2n x 2n
/// system whose inverse is the update operator E_i. The system's symmetric
/// part is block-diagonal positive definite, so factorization never fails
/// for valid inputs.
class AgentUpdater {
public:
    AgentUpdater(std::size_t index, const NetworkModel& net, const Gains& g,
                 const Hyperparams& hp, const LocalData& data);

    std::size_t index() const { return index_; }
    std::size_t dimension() const { return n_; }
    double kappa() const { return kappa_; }
    double degree() const { return degree_; }
    const std::vector<std::pair<std::size_t, double>>& neighbor_weights() const {
        return neighbor_weights_;
    }
    const Vector& data_term() const { return data_term_; } // cbar * kappa_i * A_i' b_i
    const Matrix& system_matrix() const { return system_; } // the matrix E_i inverts

    /// One synchronous round: returns (x_i(t+1), z_i(t+1)) from the agent's
    /// own time-t state and the neighbors' time-t snapshot. The neighbor sum
    /// runs over all of N_i INCLUDING the self-arc term w_ii (the degree d_i
    /// sums over self too; dropping the self-message changes the dynamics).
    AgentState step(const AgentState& own, const MessageSet& msgs) const;

    const Hyperparams& hyperparams() const { return hp_; }

private:
    std::size_t index_;
    std::size_t n_;
    double kappa_;
    double degree_;
    Hyperparams hp_;
    std::vector<std::pair<std::size_t, double>> neighbor_weights_;
    Matrix AtA_;
    Vector data_term_;
    Matrix system_;
    std::shared_ptr<const LuFactorization> factor_;
};

AgentUpdater precompute(std::size_t index, const NetworkModel& net, const Gains& g,
                        const Hyperparams& hp, const LocalData& data);

/// Residual of the implicit update equations at an executed transition:
/// substitutes (next.x, next.z) back into the two defining equations and
/// returns the max infinity-norm. Evaluated from the raw network/gain/data
/// inputs, independent of the factored system, so it checks step() itself.
double implicit_residual(const NetworkModel& net, const Gains& g, const Hyperparams& hp,
                         const LocalData& data, const AgentState& own, const MessageSet& msgs,
                         const AgentState& next);

} // namespace lsqnet

#endif
