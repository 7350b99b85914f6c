#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subdet/detectors.hpp"
#include "subdet/scenario.hpp"

namespace subdet {

struct CalibrationSpec {
    DetectorId detector = DetectorId::FO_KS_HE;
    double pfa = 1e-3;
    long trials = 0;  // 0 selects the default round(100/pfa)
    std::uint64_t master_seed = 0;
};

struct ThresholdRow {
    DetectorId detector = DetectorId::FO_KS_HE;
    std::string scenario_hash;
    double pfa = 0.0;
    double eta = 0.0;
    long trials = 0;
    std::uint64_t master_seed = 0;
};

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;

    bool contains(double p) const { return p >= low && p <= high; }
};

/// Wilson score interval (default 95%); valid near 0 and 1 where the Wald
/// interval degenerates.
WilsonInterval wilson_interval(long successes, long trials, double z = 1.959963984540054);

struct PdPoint {
    double sinr_db = 0.0;
    double pd = 0.0;
    WilsonInterval ci;
    long trials = 0;
};

struct PdCurve {
    DetectorId detector = DetectorId::FO_KS_HE;
    std::vector<PdPoint> points;
    std::uint64_t master_seed = 0;
};

struct SweepPoint {
    double value = 0.0;
    double pfa_hat = 0.0;
    long trials = 0;
};

enum class SweepParam { CnrDb, Gamma };

std::string to_string(SweepParam param);

/// Midpoint of the m-th and (m+1)-th largest H0 statistics, m = round(pfa *
/// trials), so exactly m values exceed the threshold when they are distinct.
/// `statistic(t)` must be a pure function of the trial index. Requires
/// pfa * trials >= 10.
double threshold_from_statistics(const std::function<double(long)>& statistic, long trials,
                                 double pfa, int workers = 1);

/// Calibrates all listed detectors on a shared H0 batch (common random
/// numbers). Detector preconditions are checked before any trial runs.
std::vector<ThresholdRow> calibrate_thresholds(const std::vector<DetectorId>& detectors,
                                               const ScenarioConfig& cfg, double pfa, long trials,
                                               std::uint64_t master_seed, int workers = 1);

ThresholdRow calibrate_threshold(const CalibrationSpec& spec, const ScenarioConfig& cfg,
                                 int workers = 1);

/// Fraction of H1 trials with statistic > eta plus its Wilson 95% interval.
/// Refuses to run when the threshold's scenario hash does not match cfg.
PdPoint estimate_pd(DetectorId detector, const ScenarioConfig& cfg, const ThresholdRow& threshold,
                    double sinr_db, long trials, std::uint64_t master_seed, int workers = 1,
                    std::uint64_t grid_point = 0);

/// One Pd point per grid entry. Streams are keyed by (grid point, trial) and
/// never by detector, so detectors compared at the same point see identical
/// datasets (common random numbers).
PdCurve pd_curve(DetectorId detector, const ScenarioConfig& cfg, const ThresholdRow& threshold,
                 const std::vector<double>& sinr_grid_db, long trials, std::uint64_t master_seed,
                 int workers = 1);

/// Multi-detector variant sharing each trial dataset across detectors.
std::vector<PdCurve> pd_curves(const std::vector<DetectorId>& detectors, const ScenarioConfig& cfg,
                               const std::vector<ThresholdRow>& thresholds,
                               const std::vector<double>& sinr_grid_db, long trials,
                               std::uint64_t master_seed, int workers = 1);

/// Regenerates H0 data with the swept parameter and reports the exceedance
/// fraction of the fixed thresholds.
std::vector<std::vector<SweepPoint>> pfa_sweep(const std::vector<DetectorId>& detectors,
                                               const ScenarioConfig& cfg,
                                               const std::vector<ThresholdRow>& thresholds,
                                               SweepParam param, const std::vector<double>& values,
                                               long trials, std::uint64_t master_seed,
                                               int workers = 1);

/// Empirical exceedance fraction of eta on a fresh H0 batch (its streams are
/// disjoint from calibration streams).
PdPoint validate_pfa(DetectorId detector, const ScenarioConfig& cfg, const ThresholdRow& threshold,
                     long trials, std::uint64_t master_seed, int workers = 1);

/// Multi-detector variant sharing the fresh H0 batch across detectors.
std::vector<PdPoint> validate_pfas(const std::vector<DetectorId>& detectors,
                                   const ScenarioConfig& cfg,
                                   const std::vector<ThresholdRow>& thresholds, long trials,
                                   std::uint64_t master_seed, int workers = 1);

}  // namespace subdet
