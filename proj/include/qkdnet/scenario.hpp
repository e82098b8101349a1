#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qkdnet/config.hpp"
#include "qkdnet/doqkd_protocol.hpp"

namespace qkdnet {

/// Runs fn(0..n-1) on up to `workers` threads. Work items must be
/// independent; results should land in caller-owned slots indexed by item
/// so the outcome does not depend on scheduling. The first exception
/// thrown by any item is rethrown after all threads join.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

/// Detection record of one subnet fed by one wavelength combo.
struct SubnetStreams {
  DetectorGrid grid;                                  // per (user, arm)
  std::vector<std::vector<DetectionEvent>> per_user;  // arms merged, sorted
};

/// Full chain for one subnet: emission stream -> splitter/arm routing with
/// dispersion -> per-detector response. combo_id selects the wavelength
/// combo and addresses the random substreams, so different subnets are
/// statistically independent and individually reproducible.
SubnetStreams simulate_subnet(const ScenarioConfig& cfg, int combo_id);

/// Executes cfg.scenario and writes its report bundle under cfg.out_dir.
/// Returns the relative paths of the files written (manifest.json last).
/// Outputs depend only on the config content, seed and blind flag, never
/// on the worker count.
std::vector<std::string> run_scenario(const ScenarioConfig& cfg);

}  // namespace qkdnet
