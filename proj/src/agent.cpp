#include "lsqnet/agent.hpp"

#include <cmath>
#include <string>

#include "lsqnet/error.hpp"

namespace lsqnet {

void validate(const Hyperparams& hp) {
    if (!(hp.c >= 0.0) || !std::isfinite(hp.c))
        throw Error(ErrorCode::invalid_argument, "c must be a finite value >= 0");
    if (!(hp.cbar > 0.0) || !std::isfinite(hp.cbar))
        throw Error(ErrorCode::invalid_argument, "cbar must be a finite value > 0");
}

AgentUpdater::AgentUpdater(std::size_t index, const NetworkModel& net, const Gains& g,
                           const Hyperparams& hp, const LocalData& data)
    : index_(index),
      n_(data.A.cols()),
      kappa_(g.kappa.at(index)),
      degree_(net.degrees.at(index)),
      hp_(hp) {
    validate(hp);
    if (index >= net.m)
        throw Error(ErrorCode::invalid_argument, "agent index out of range");
    if (data.b.size() != data.A.rows())
        throw Error(ErrorCode::dimension_mismatch,
                    "agent " + std::to_string(index + 1) + ": b length != A rows");

    for (std::size_t j : net.neighbors[index])
        neighbor_weights_.emplace_back(j, net.W(index, j));

    AtA_ = transpose(data.A) * data.A;
    data_term_ = (hp.cbar * kappa_) * (transpose(data.A) * data.b);

    // [[I + cbar k A'A + c k d I, k d I], [-k d I, I]]
    const double kd = kappa_ * degree_;
    system_ = Matrix(2 * n_, 2 * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j)
            system_(i, j) = hp.cbar * kappa_ * AtA_(i, j);
        system_(i, i) += 1.0 + hp.c * kd;
        system_(i, n_ + i) = kd;
        system_(n_ + i, i) = -kd;
        system_(n_ + i, n_ + i) = 1.0;
    }
    try {
        factor_ = std::make_shared<const LuFactorization>(system_);
    } catch (const Error&) {
        throw Error(ErrorCode::singular_matrix,
                    "agent " + std::to_string(index + 1) +
                        ": update system unexpectedly singular (internal invariant violation)");
    }
}

AgentUpdater precompute(std::size_t index, const NetworkModel& net, const Gains& g,
                        const Hyperparams& hp, const LocalData& data) {
    return AgentUpdater(index, net, g, hp, data);
}

namespace {

const AgentState& checked_message(const AgentUpdater& u, const MessageSet& msgs,
                                  std::size_t j) {
    const auto it = msgs.find(j);
    if (it == msgs.end())
        throw Error(ErrorCode::missing_neighbor_message,
                    "agent " + std::to_string(u.index() + 1) +
                        " is missing the message of neighbor " + std::to_string(j + 1));
    const AgentState& s = it->second;
    if (s.x.size() != u.dimension() || s.z.size() != u.dimension())
        throw Error(ErrorCode::dimension_mismatch,
                    "message from agent " + std::to_string(j + 1) + " has wrong dimension");
    return s;
}

void reject_strangers(const AgentUpdater& u, const MessageSet& msgs) {
    if (msgs.size() == u.neighbor_weights().size()) return;
    for (const auto& [j, state] : msgs) {
        bool known = false;
        for (const auto& [nb, w] : u.neighbor_weights())
            if (nb == j) known = true;
        if (!known)
            throw Error(ErrorCode::unexpected_message,
                        "agent " + std::to_string(u.index() + 1) +
                            " received a message from non-neighbor " + std::to_string(j + 1));
    }
}

} // namespace

AgentState AgentUpdater::step(const AgentState& own, const MessageSet& msgs) const {
    if (own.x.size() != n_ || own.z.size() != n_)
        throw Error(ErrorCode::dimension_mismatch,
                    "agent " + std::to_string(index_ + 1) + ": own state has wrong dimension");
    reject_strangers(*this, msgs);

    Vector rhs(2 * n_);
    for (std::size_t k = 0; k < n_; ++k) {
        rhs[k] = own.x[k] + data_term_[k];
        rhs[n_ + k] = own.z[k];
    }
    for (const auto& [j, w] : neighbor_weights_) {
        const AgentState& s = checked_message(*this, msgs, j);
        for (std::size_t k = 0; k < n_; ++k) {
            rhs[k] += kappa_ * w * (hp_.c * s.x[k] + s.z[k]);
            rhs[n_ + k] -= kappa_ * w * s.x[k];
        }
    }
    const Vector sol = factor_->solve(rhs);
    AgentState next;
    next.x.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n_));
    next.z.assign(sol.begin() + static_cast<std::ptrdiff_t>(n_), sol.end());
    return next;
}

double implicit_residual(const NetworkModel& net, const Gains& g, const Hyperparams& hp,
                         const LocalData& data, const AgentState& own, const MessageSet& msgs,
                         const AgentState& next) {
    const std::size_t i = data.index;
    const std::size_t n = data.A.cols();
    const double k = g.kappa.at(i);

    // x_i(t+1) - x_i(t) + cbar k [A_i'A_i x_i(t+1) - A_i'b_i]
    //   + k sum_j w_ij [z_i(t+1) - z_j(t)] + c k sum_j w_ij [x_i(t+1) - x_j(t)] = 0
    // z_i(t+1) - z_i(t) - k sum_j w_ij [x_i(t+1) - x_j(t)] = 0
    const Vector grad = transpose(data.A) * (data.A * next.x) - transpose(data.A) * data.b;
    Vector r1(n), r2(n);
    for (std::size_t kk = 0; kk < n; ++kk) {
        r1[kk] = next.x[kk] - own.x[kk] + hp.cbar * k * grad[kk];
        r2[kk] = next.z[kk] - own.z[kk];
    }
    for (std::size_t j : net.neighbors[i]) {
        const double w = net.W(i, j);
        const AgentState& s = msgs.at(j);
        for (std::size_t kk = 0; kk < n; ++kk) {
            r1[kk] += k * w * (next.z[kk] - s.z[kk]);
            r1[kk] += hp.c * k * w * (next.x[kk] - s.x[kk]);
            r2[kk] -= k * w * (next.x[kk] - s.x[kk]);
        }
    }
    return std::max(max_abs(r1), max_abs(r2));
}

} // namespace lsqnet
