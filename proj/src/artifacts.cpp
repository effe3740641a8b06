#include "lsqnet/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lsqnet/error.hpp"

namespace lsqnet {

using nlohmann::json;

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp);
        out << content;
        if (!out.flush()) throw Error(ErrorCode::io_error, "write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error(ErrorCode::io_error, "cannot rename " + tmp + " to " + path);
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string metrics_csv(const RunTrajectory& traj) {
    std::ostringstream os;
    os << "t,W,consensus_spread,normal_eq_residual\n";
    for (const Sample& s : traj.samples)
        os << s.t << ',' << fmt(s.W) << ',' << fmt(s.consensus_spread) << ','
           << fmt(s.normal_eq_residual) << '\n';
    return os.str();
}

std::string final_states_json(const RunTrajectory& traj) {
    json agents = json::array();
    for (std::size_t i = 0; i < traj.final_states.size(); ++i)
        agents.push_back({{"agent", i + 1},
                          {"x", traj.final_states[i].x},
                          {"z", traj.final_states[i].z}});
    json doc;
    doc["termination"] = to_string(traj.reason);
    doc["rounds"] = traj.rounds;
    doc["final_W"] = traj.samples.empty() ? 0.0 : traj.samples.back().W;
    doc["agents"] = agents;
    if (!traj.warnings.empty()) doc["warnings"] = traj.warnings;
    return doc.dump(2) + "\n";
}

std::string spectrum_json(const SpectralReport& spectral, const PencilReport& pencil) {
    json eigs = json::array();
    for (const Complex& l : spectral.eigenvalues)
        eigs.push_back({{"re", l.real()}, {"im", l.imag()}, {"magnitude", std::abs(l)}});

    json doc;
    doc["eigenvalues"] = eigs;
    doc["unit_circle"] = {{"max_magnitude", spectral.max_magnitude},
                          {"pass", spectral.pass_unit_circle}};
    doc["minus_one"] = {{"nearest_distance", spectral.nearest_to_minus_one},
                        {"pass", spectral.pass_minus_one}};
    doc["eigenvalue_one"] = {{"algebraic_multiplicity", spectral.algebraic_one},
                             {"geometric_multiplicity", spectral.geometric_one},
                             {"structural_multiplicity", spectral.structural_one},
                             {"pass", spectral.pass_multiplicity}};
    doc["pencil"] = {{"min_eig_M2", pencil.min_eig_M2},
                     {"min_eig_M0", pencil.min_eig_M0},
                     {"min_eig_M_minus_one", pencil.min_eig_M_minus_one},
                     {"eigenpairs_checked", pencil.eigenpairs_checked},
                     {"max_pencil_residual", pencil.max_pencil_residual},
                     {"max_reconstruction_error", pencil.max_reconstruction_error},
                     {"violations", pencil.violations},
                     {"pass", pencil.pass()}};
    doc["pass"] = spectral.pass() && pencil.pass();
    return doc.dump(2) + "\n";
}

std::string convergence_svg(const RunTrajectory& traj) {
    const double width = 640, height = 420;
    const double ml = 70, mr = 20, mt = 30, mb = 50;

    std::vector<std::pair<double, double>> pts; // (t, log10 W)
    for (const Sample& s : traj.samples)
        if (s.W > 0 && std::isfinite(s.W))
            pts.emplace_back(static_cast<double>(s.t), std::log10(s.W));

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (pts.size() >= 2) {
        double t0 = pts.front().first, t1 = pts.back().first;
        double y0 = pts[0].second, y1 = pts[0].second;
        for (const auto& [t, y] : pts) {
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        if (t1 == t0) t1 = t0 + 1;
        if (y1 == y0) y1 = y0 + 1;
        const auto px = [&](double t) { return ml + (t - t0) / (t1 - t0) * (width - ml - mr); };
        const auto py = [&](double y) {
            return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb);
        };

        // axes
        os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
           << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
           << height - mb << "\" stroke=\"black\"/>\n";

        // x ticks: 5 round values
        for (int k = 0; k <= 4; ++k) {
            const double t = t0 + (t1 - t0) * k / 4.0;
            os << "<line x1=\"" << px(t) << "\" y1=\"" << height - mb << "\" x2=\"" << px(t)
               << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << px(t) << "\" y=\"" << height - mb + 20
               << "\" font-size=\"12\" text-anchor=\"middle\">" << static_cast<long>(t)
               << "</text>\n";
        }
        // y ticks: integer decades, at most ~8 labels
        const int d0 = static_cast<int>(std::ceil(y0));
        const int d1 = static_cast<int>(std::floor(y1));
        const int step = std::max(1, (d1 - d0) / 8 + 1);
        for (int d = d0; d <= d1; d += step) {
            os << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(d) << "\" x2=\"" << ml
               << "\" y2=\"" << py(d) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << ml - 10 << "\" y=\"" << py(d) + 4
               << "\" font-size=\"12\" text-anchor=\"end\">1e" << d << "</text>\n";
        }

        os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
        for (const auto& [t, y] : pts) os << px(t) << ',' << py(y) << ' ';
        os << "\"/>\n";
    } else {
        os << "<text x=\"50%\" y=\"50%\" text-anchor=\"middle\">no positive samples</text>\n";
    }

    os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
       << "\" font-size=\"13\" text-anchor=\"middle\">round t</text>\n";
    os << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (mt + height - mb) / 2 << ")\">W(t)</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace lsqnet
