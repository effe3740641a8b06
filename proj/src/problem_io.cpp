#include "lsqnet/problem_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lsqnet/error.hpp"

namespace lsqnet {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!known.count(key))
            throw Error(ErrorCode::parse_error, "unknown key \"" + key + "\" in " + where);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw Error(ErrorCode::parse_error, where + " must be a number");
    return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& where) {
    if (!v.is_number_unsigned())
        throw Error(ErrorCode::parse_error, where + " must be a non-negative integer");
    return v.get<std::size_t>();
}

Matrix parse_weights(const json& graph) {
    reject_unknown_keys(graph, {"m", "weights"}, "graph");
    if (!graph.contains("m") || !graph.contains("weights"))
        throw Error(ErrorCode::parse_error, "graph needs \"m\" and \"weights\"");
    const std::size_t m = as_count(graph["m"], "graph.m");
    if (m == 0) throw Error(ErrorCode::parse_error, "graph.m must be positive");

    Matrix w(m, m);
    Matrix given(m, m); // 1 where an entry was provided
    for (const json& triple : graph["weights"]) {
        if (!triple.is_array() || triple.size() != 3)
            throw Error(ErrorCode::parse_error, "graph.weights entries must be [i, j, w]");
        const std::size_t i = as_count(triple[0], "weight index");
        const std::size_t j = as_count(triple[1], "weight index");
        if (i < 1 || i > m || j < 1 || j > m)
            throw Error(ErrorCode::parse_error,
                        "weight index out of range: [" + std::to_string(i) + ", " +
                            std::to_string(j) + "] with m = " + std::to_string(m));
        const double value = as_number(triple[2], "weight value");
        const std::size_t a = i - 1, b = j - 1;
        if (given(a, b) != 0.0 && w(a, b) != value)
            throw Error(ErrorCode::parse_error,
                        "conflicting weight for edge (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
        w(a, b) = value;
        w(b, a) = value; // symmetric entries auto-mirrored
        given(a, b) = given(b, a) = 1.0;
    }
    return w;
}

std::vector<LocalData> parse_equations(const json& equations) {
    reject_unknown_keys(equations, {"agents"}, "equations");
    if (!equations.contains("agents") || !equations["agents"].is_array())
        throw Error(ErrorCode::parse_error, "equations needs an \"agents\" array");
    std::vector<LocalData> blocks;
    std::size_t index = 0;
    for (const json& agent : equations["agents"]) {
        reject_unknown_keys(agent, {"A", "b"}, "equations.agents[" + std::to_string(index) + "]");
        if (!agent.contains("A") || !agent.contains("b"))
            throw Error(ErrorCode::parse_error,
                        "agent " + std::to_string(index + 1) + " needs \"A\" and \"b\"");
        const json& rows = agent["A"];
        if (!rows.is_array() || rows.empty())
            throw Error(ErrorCode::parse_error,
                        "agent " + std::to_string(index + 1) + ": A must be a nonempty array of rows");
        const std::size_t n = rows[0].size();
        Matrix A(rows.size(), n);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].is_array() || rows[r].size() != n)
                throw Error(ErrorCode::parse_error,
                            "agent " + std::to_string(index + 1) + ": ragged A rows");
            for (std::size_t c = 0; c < n; ++c)
                A(r, c) = as_number(rows[r][c], "A entry");
        }
        const json& bj = agent["b"];
        if (!bj.is_array() || bj.size() != rows.size())
            throw Error(ErrorCode::parse_error,
                        "agent " + std::to_string(index + 1) + ": b length must equal A rows");
        Vector b(bj.size());
        for (std::size_t r = 0; r < bj.size(); ++r) b[r] = as_number(bj[r], "b entry");
        blocks.push_back(LocalData{index, std::move(A), std::move(b)});
        ++index;
    }
    if (blocks.empty()) throw Error(ErrorCode::parse_error, "equations.agents is empty");
    return blocks;
}

void parse_params(const json& params, ProblemSpec& spec) {
    reject_unknown_keys(params,
                        {"c", "cbar", "gains", "max_rounds", "tol", "record_every", "init",
                         "seed"},
                        "params");
    if (params.contains("c")) spec.hp.c = as_number(params["c"], "params.c");
    if (params.contains("cbar")) spec.hp.cbar = as_number(params["cbar"], "params.cbar");
    if (params.contains("gains")) {
        const json& g = params["gains"];
        if (g.is_string()) {
            if (g.get<std::string>() != "default")
                throw Error(ErrorCode::parse_error,
                            "params.gains must be \"default\" or a list of positive numbers");
        } else if (g.is_array()) {
            Vector kappa(g.size());
            for (std::size_t i = 0; i < g.size(); ++i)
                kappa[i] = as_number(g[i], "params.gains entry");
            spec.gains = std::move(kappa);
        } else {
            throw Error(ErrorCode::parse_error, "params.gains must be a string or a list");
        }
    }
    if (params.contains("max_rounds"))
        spec.cfg.max_rounds = as_count(params["max_rounds"], "params.max_rounds");
    if (params.contains("tol")) spec.cfg.tol = as_number(params["tol"], "params.tol");
    if (params.contains("record_every"))
        spec.cfg.record_every = as_count(params["record_every"], "params.record_every");
    if (params.contains("seed")) spec.cfg.rng_seed = as_count(params["seed"], "params.seed");
    if (params.contains("init")) {
        const json& init = params["init"];
        if (init.is_string()) {
            const std::string kind = init.get<std::string>();
            if (kind == "zeros")
                spec.cfg.init = InitKind::zeros;
            else if (kind == "random")
                spec.cfg.init = InitKind::random;
            else
                throw Error(ErrorCode::parse_error,
                            "params.init must be \"zeros\", \"random\", or explicit states");
        } else if (init.is_array()) {
            spec.cfg.init = InitKind::explicit_states;
            for (const json& st : init) {
                reject_unknown_keys(st, {"x", "z"}, "params.init entry");
                AgentState s;
                for (const json& v : st.at("x")) s.x.push_back(as_number(v, "init x"));
                for (const json& v : st.at("z")) s.z.push_back(as_number(v, "init z"));
                spec.cfg.explicit_init.push_back(std::move(s));
            }
        } else {
            throw Error(ErrorCode::parse_error, "params.init has an unsupported type");
        }
    }
}

} // namespace

ProblemSpec parse_problem(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse_error, e.what()); // includes line and column
    }
    if (!doc.is_object())
        throw Error(ErrorCode::parse_error, "problem file must be a JSON object");
    reject_unknown_keys(doc, {"graph", "equations", "params"}, "problem file");
    if (!doc.contains("graph") || !doc.contains("equations"))
        throw Error(ErrorCode::parse_error, "problem file needs \"graph\" and \"equations\"");

    ProblemSpec spec;
    spec.weights = parse_weights(doc["graph"]);
    spec.blocks = parse_equations(doc["equations"]);
    if (spec.blocks.size() != spec.weights.rows())
        throw Error(ErrorCode::parse_error,
                    "equations list " + std::to_string(spec.blocks.size()) +
                        " agents but graph.m = " + std::to_string(spec.weights.rows()));
    if (doc.contains("params")) parse_params(doc["params"], spec);
    return spec;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open problem file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str());
}

std::string serialize_problem(const ProblemSpec& spec) {
    json graph;
    const std::size_t m = spec.weights.rows();
    graph["m"] = m;
    json weights = json::array();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            if (spec.weights(i, j) != 0.0)
                weights.push_back({i + 1, j + 1, spec.weights(i, j)});
    graph["weights"] = weights;

    json agents = json::array();
    for (const LocalData& blk : spec.blocks) {
        json rows = json::array();
        for (std::size_t r = 0; r < blk.A.rows(); ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < blk.A.cols(); ++c) row.push_back(blk.A(r, c));
            rows.push_back(row);
        }
        agents.push_back({{"A", rows}, {"b", blk.b}});
    }

    json params;
    params["c"] = spec.hp.c;
    params["cbar"] = spec.hp.cbar;
    if (spec.gains)
        params["gains"] = *spec.gains;
    else
        params["gains"] = "default";
    params["max_rounds"] = spec.cfg.max_rounds;
    params["tol"] = spec.cfg.tol;
    params["record_every"] = spec.cfg.record_every;
    params["seed"] = spec.cfg.rng_seed;
    switch (spec.cfg.init) {
        case InitKind::zeros: params["init"] = "zeros"; break;
        case InitKind::random: params["init"] = "random"; break;
        case InitKind::explicit_states: {
            json states = json::array();
            for (const AgentState& s : spec.cfg.explicit_init)
                states.push_back({{"x", s.x}, {"z", s.z}});
            params["init"] = states;
            break;
        }
    }

    json doc;
    doc["graph"] = graph;
    doc["equations"] = {{"agents", agents}};
    doc["params"] = params;
    return doc.dump(2) + "\n";
}

Gains resolve_gains(const ProblemSpec& spec, const NetworkModel& net) {
    if (!spec.gains) return default_gains(net);
    return make_gains(net, *spec.gains);
}

} // namespace lsqnet
