#include "lsqnet/simulator.hpp"

#include <cmath>
#include <string>

#include "lsqnet/error.hpp"

namespace lsqnet {

const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::tolerance: return "tolerance";
        case TerminationReason::max_rounds: return "max_rounds";
        case TerminationReason::divergence: return "divergence";
    }
    return "unknown";
}

double uniform_draw(std::uint64_t& state, double lo, double hi) {
    // splitmix64 step; top 53 bits scaled into [0,1)
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

double metric_W(const std::vector<AgentState>& states, const StackedSystem& sys) {
    const std::size_t m = states.size();
    if (m != sys.m)
        throw Error(ErrorCode::dimension_mismatch, "state count does not match system");
    double cost = 0.0;
    for (const AgentState& s : states) {
        if (s.x.size() != sys.n)
            throw Error(ErrorCode::dimension_mismatch, "state dimension does not match system");
        const Vector r = sys.AtA * s.x - sys.Atb;
        cost += dot(r, r);
    }
    double disagreement = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const Vector d = states[i].x - states[j].x;
            disagreement += dot(d, d);
        }
    const double md = static_cast<double>(m);
    return cost / (2.0 * md) + disagreement / (2.0 * md * md);
}

namespace {

std::vector<AgentState> initial_states(const RunConfig& cfg, std::size_t m, std::size_t n) {
    std::vector<AgentState> states(m);
    switch (cfg.init) {
        case InitKind::zeros:
            for (AgentState& s : states) {
                s.x.assign(n, 0.0);
                s.z.assign(n, 0.0);
            }
            break;
        case InitKind::random: {
            std::uint64_t rng = cfg.rng_seed;
            for (AgentState& s : states) {
                s.x.resize(n);
                s.z.resize(n);
                for (double& v : s.x) v = uniform_draw(rng, -1.0, 1.0);
                for (double& v : s.z) v = uniform_draw(rng, -1.0, 1.0);
            }
            break;
        }
        case InitKind::explicit_states:
            if (cfg.explicit_init.size() != m)
                throw Error(ErrorCode::dimension_mismatch,
                            "explicit init must provide one state per agent");
            states = cfg.explicit_init;
            for (const AgentState& s : states)
                if (s.x.size() != n || s.z.size() != n)
                    throw Error(ErrorCode::dimension_mismatch,
                                "explicit init state has wrong dimension");
            break;
    }
    return states;
}

double spread_of(const std::vector<AgentState>& states) {
    double spread = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i + 1; j < states.size(); ++j)
            spread = std::max(spread, norm2(states[i].x - states[j].x));
    return spread;
}

Sample make_sample(std::size_t t, const std::vector<AgentState>& states,
                   const StackedSystem& sys) {
    Sample s;
    s.t = t;
    s.W = metric_W(states, sys);
    s.consensus_spread = spread_of(states);
    Vector xbar(sys.n, 0.0);
    for (const AgentState& st : states) xbar = xbar + st.x;
    xbar = (1.0 / static_cast<double>(states.size())) * xbar;
    s.normal_eq_residual = norm2(sys.AtA * xbar - sys.Atb);
    return s;
}

} // namespace

RunTrajectory run(const NetworkModel& net, const Gains& g, const Hyperparams& hp,
                  const std::vector<LocalData>& blocks, const RunConfig& cfg) {
    validate(hp);
    if (cfg.max_rounds < 1)
        throw Error(ErrorCode::invalid_argument, "max_rounds must be at least 1");
    if (!(cfg.tol > 0))
        throw Error(ErrorCode::invalid_argument, "termination tolerance must be positive");
    if (cfg.record_every < 1)
        throw Error(ErrorCode::invalid_argument, "record_every must be at least 1");

    const StackedSystem sys = assemble(blocks);
    if (sys.m != net.m)
        throw Error(ErrorCode::dimension_mismatch, "block count does not match network");

    RunTrajectory traj;
    const GainConditionVerdict verdict = check_gain_condition(net, g);
    if (!verdict.pass)
        traj.warnings.push_back("gain condition D K D - W K W >= 0 fails (min eigenvalue " +
                                std::to_string(verdict.min_eigenvalue) +
                                "); convergence is not guaranteed");

    std::vector<AgentUpdater> updaters;
    updaters.reserve(net.m);
    for (std::size_t i = 0; i < net.m; ++i)
        updaters.push_back(AgentUpdater(i, net, g, hp, blocks[i]));

    std::vector<AgentState> states = initial_states(cfg, net.m, sys.n);
    const double W0 = metric_W(states, sys);

    traj.samples.push_back(make_sample(0, states, sys));
    if (cfg.record_states) traj.recorded_states.push_back(states);

    std::vector<AgentState> snapshot;
    for (std::size_t t = 1; t <= cfg.max_rounds; ++t) {
        snapshot = states; // round barrier: everyone reads time-(t-1) states
        for (std::size_t i = 0; i < net.m; ++i) {
            MessageSet msgs;
            for (std::size_t j : net.neighbors[i]) msgs.emplace(j, snapshot[j]);
            states[i] = updaters[i].step(snapshot[i], msgs);
        }

        const double w = metric_W(states, sys);
        const bool done_tol = w <= cfg.tol;
        const bool done_div = W0 > 0.0 && w > 1e12 * W0;
        const bool done = done_tol || done_div || t == cfg.max_rounds;
        if (t % cfg.record_every == 0 || done) {
            traj.samples.push_back(make_sample(t, states, sys));
            if (cfg.record_states) traj.recorded_states.push_back(states);
        }
        if (done) {
            traj.rounds = t;
            traj.reason = done_tol ? TerminationReason::tolerance
                          : done_div ? TerminationReason::divergence
                                     : TerminationReason::max_rounds;
            break;
        }
    }
    traj.final_states = states;
    return traj;
}

ExpFit exp_fit(const RunTrajectory& traj) {
    constexpr double kFloor = 1e-14;
    std::vector<const Sample*> above;
    for (const Sample& s : traj.samples)
        if (s.W > kFloor) above.push_back(&s);
    if (above.size() < 20)
        throw Error(ErrorCode::insufficient_data,
                    "exp_fit needs at least 20 recorded rounds with W > 1e-14, have " +
                        std::to_string(above.size()));

    const std::size_t begin = above.size() / 2; // last 50% of above-floor rounds
    const std::size_t n = above.size() - begin;
    double st = 0.0, sy = 0.0;
    for (std::size_t k = begin; k < above.size(); ++k) {
        st += static_cast<double>(above[k]->t);
        sy += std::log(above[k]->W);
    }
    const double tbar = st / static_cast<double>(n);
    const double ybar = sy / static_cast<double>(n);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t k = begin; k < above.size(); ++k) {
        const double dt = static_cast<double>(above[k]->t) - tbar;
        const double dy = std::log(above[k]->W) - ybar;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    ExpFit fit;
    fit.rate = stt > 0.0 ? sty / stt : 0.0;
    double ss_res = 0.0;
    for (std::size_t k = begin; k < above.size(); ++k) {
        const double dt = static_cast<double>(above[k]->t) - tbar;
        const double resid = (std::log(above[k]->W) - ybar) - fit.rate * dt;
        ss_res += resid * resid;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

} // namespace lsqnet
