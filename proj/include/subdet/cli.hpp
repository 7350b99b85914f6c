#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subdet/config.hpp"
#include "subdet/montecarlo.hpp"

namespace subdet::cli {

struct Options {
    std::optional<std::uint64_t> seed;  // overrides the config master_seed
    int workers = 0;                    // 0 = hardware concurrency
};

/// Writes one threshold CSV row per configured detector; detectors whose
/// preconditions fail get an error record and the rest proceed.
/// Returns 0 on full success, nonzero if any detector errored.
int cmd_calibrate(const std::string& config_path, const std::string& out_path,
                  const Options& opts = {});

/// Pd-versus-SINR curves for every configured detector at the thresholds in
/// thresholds_path; refuses to run on a scenario-hash mismatch.
int cmd_pd(const std::string& config_path, const std::string& thresholds_path,
           const std::string& out_path, const Options& opts = {});

/// False-alarm sensitivity sweep over cnr_db or gamma at fixed thresholds.
int cmd_pfa_sweep(const std::string& config_path, const std::string& thresholds_path,
                  const std::string& param, const std::vector<double>& values,
                  const std::string& out_path, const Options& opts = {});

/// Materializes the preset run for one figure id (1a, 1b, 2-5, 7-10) at desk
/// or paper scale and runs calibrate+pd (or the sweep for 1a/1b) into out_dir.
int cmd_figure(const std::string& figure_id, const std::string& scale, const std::string& out_dir,
               const Options& opts = {});

/// Figure preset lookup (exposed for tests). Throws for out-of-scope or
/// unknown figure ids.
struct FigurePreset {
    RunConfig config;
    bool is_sweep = false;
    SweepParam sweep_param = SweepParam::CnrDb;
    std::vector<double> sweep_values;
};
FigurePreset figure_preset(const std::string& figure_id, const std::string& scale);

/// Threshold CSV round-trip used by the pd and sweep commands.
struct ThresholdFile {
    std::vector<ThresholdRow> rows;
    std::vector<std::string> error_records;  // detectors that failed preconditions
};
ThresholdFile read_threshold_csv(const std::string& path);

int run(int argc, const char* const* argv);

}  // namespace subdet::cli
