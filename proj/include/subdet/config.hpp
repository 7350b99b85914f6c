#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subdet/detectors.hpp"
#include "subdet/scenario.hpp"

namespace subdet {

struct MonteCarloConfig {
    double pfa = 1e-3;
    long calib_trials = 0;  // 0 selects round(100/pfa)
    long pd_trials = 1000;
    std::uint64_t master_seed = 1;
};

struct SinrGrid {
    double start_db = 0.0;
    double stop_db = 30.0;
    double step_db = 5.0;

    std::vector<double> points() const;
};

/// Full run description: INI-style sections [scenario], [montecarlo], [sinr]
/// plus a top-level `detectors = name, name, ...` list.
struct RunConfig {
    ScenarioConfig scenario;
    MonteCarloConfig montecarlo;
    SinrGrid sinr;
    std::vector<DetectorId> detectors;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& config);

}  // namespace subdet
