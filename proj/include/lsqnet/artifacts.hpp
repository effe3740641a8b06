#ifndef LSQNET_ARTIFACTS_HPP
#define LSQNET_ARTIFACTS_HPP

#include <string>

#include "lsqnet/analysis.hpp"
#include "lsqnet/simulator.hpp"

namespace lsqnet {

/// Writes via a temp file and rename so readers never see partial output.
void write_text_atomic(const std::string& path, const std::string& content);

/// CSV time series: header "t,W,consensus_spread,normal_eq_residual", one row
/// per recorded round, full round-trip precision.
std::string metrics_csv(const RunTrajectory& traj);

std::string final_states_json(const RunTrajectory& traj);

std::string spectrum_json(const SpectralReport& spectral, const PencilReport& pencil);

/// Self-contained SVG of log10 W(t) vs t (semilog convergence plot).
std::string convergence_svg(const RunTrajectory& traj);

} // namespace lsqnet

#endif
