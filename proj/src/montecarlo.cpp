#include "subdet/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace subdet {

namespace {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(i) for i in [0, count). Each index writes only its own output
/// slot, so results are identical for any worker count or schedule.
void parallel_for(long count, int workers, const std::function<void(long)>& body) {
    workers = std::min<long>(resolve_workers(workers), count);
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

long default_trials(double pfa, long trials) {
    if (trials > 0) return trials;
    return std::lround(100.0 / pfa);
}

void require_hash_match(const ScenarioConfig& cfg, const ThresholdRow& row) {
    const std::string expected = scenario_hash(cfg);
    if (row.scenario_hash != expected) {
        throw Error("threshold for " + std::string(detector_name(row.detector)) +
                    " was calibrated for scenario " + row.scenario_hash +
                    " but the current scenario hashes to " + expected);
    }
}

/// Per-trial exceedance counts for a detector set on a shared batch of
/// datasets; the per-trial matrix keeps aggregation order-independent.
std::vector<long> count_exceedances(const ScenarioModel& model,
                                    const std::vector<DetectorId>& detectors,
                                    const std::vector<double>& etas, Truth truth, double sinr_db,
                                    long trials, std::uint64_t master_seed, std::uint64_t purpose,
                                    std::uint64_t point, int workers) {
    const auto d = detectors.size();
    std::vector<std::uint8_t> exceeded(static_cast<std::size_t>(trials) * d, 0);
    parallel_for(trials, workers, [&](long t) {
        RngStream rng(master_seed, make_stream_id(purpose, point, static_cast<std::uint64_t>(t)));
        const Dataset data = model.generate_dataset(truth, sinr_db, rng);
        DetectorWorkspace workspace(data, model.subspace(), model.config().r);
        for (std::size_t i = 0; i < d; ++i) {
            exceeded[static_cast<std::size_t>(t) * d + i] =
                workspace.evaluate(detectors[i]) > etas[i] ? 1 : 0;
        }
    });
    std::vector<long> counts(d, 0);
    for (long t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < d; ++i) {
            counts[i] += exceeded[static_cast<std::size_t>(t) * d + i];
        }
    }
    return counts;
}

double midpoint_threshold(std::vector<double>& values, double pfa) {
    const long trials = static_cast<long>(values.size());
    const long m = std::lround(pfa * static_cast<double>(trials));
    if (!(pfa > 0.0 && pfa < 1.0) || m < 10) {
        std::ostringstream msg;
        msg << "calibration needs pfa*trials >= 10 and pfa in (0,1); got pfa=" << pfa
            << ", trials=" << trials;
        throw PreconditionError(msg.str());
    }
    if (m + 1 > trials) {
        throw PreconditionError("calibration needs at least round(pfa*trials)+1 trials");
    }
    std::nth_element(values.begin(), values.begin() + (m - 1), values.end(),
                     std::greater<double>());
    const double upper = values[m - 1];  // m-th largest
    std::nth_element(values.begin() + m, values.begin() + m, values.end(), std::greater<double>());
    const double lower = values[m];  // (m+1)-th largest
    return 0.5 * (upper + lower);
}

}  // namespace

std::string to_string(SweepParam param) { return param == SweepParam::CnrDb ? "cnr_db" : "gamma"; }

WilsonInterval wilson_interval(long successes, long trials, double z) {
    assert(trials > 0 && successes >= 0 && successes <= trials);
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) ci.low = 0.0;     // endpoints are exact, not round-off
    if (successes == trials) ci.high = 1.0;
    return ci;
}

double threshold_from_statistics(const std::function<double(long)>& statistic, long trials,
                                 double pfa, int workers) {
    std::vector<double> values(trials);
    parallel_for(trials, workers, [&](long t) { values[t] = statistic(t); });
    return midpoint_threshold(values, pfa);
}

std::vector<ThresholdRow> calibrate_thresholds(const std::vector<DetectorId>& detectors,
                                               const ScenarioConfig& cfg, double pfa, long trials,
                                               std::uint64_t master_seed, int workers) {
    trials = default_trials(pfa, trials);
    const ScenarioModel model(cfg);
    for (const DetectorId id : detectors) {
        check_detector_preconditions(id, cfg.n, cfg.k_p, cfg.k_s, cfg.r);
    }
    const auto d = detectors.size();
    std::vector<double> stats(static_cast<std::size_t>(trials) * d);
    parallel_for(trials, workers, [&](long t) {
        RngStream rng(master_seed, make_stream_id(stream_purpose::calibration, 0,
                                                  static_cast<std::uint64_t>(t)));
        const Dataset data = model.generate_dataset(Truth::H0, 0.0, rng);
        DetectorWorkspace workspace(data, model.subspace(), cfg.r);
        for (std::size_t i = 0; i < d; ++i) {
            stats[static_cast<std::size_t>(t) * d + i] = workspace.evaluate(detectors[i]);
        }
    });
    const std::string hash = scenario_hash(cfg);
    std::vector<ThresholdRow> rows;
    rows.reserve(d);
    std::vector<double> column(trials);
    for (std::size_t i = 0; i < d; ++i) {
        for (long t = 0; t < trials; ++t) {
            column[t] = stats[static_cast<std::size_t>(t) * d + i];
        }
        ThresholdRow row;
        row.detector = detectors[i];
        row.scenario_hash = hash;
        row.pfa = pfa;
        row.eta = midpoint_threshold(column, pfa);
        row.trials = trials;
        row.master_seed = master_seed;
        rows.push_back(std::move(row));
    }
    return rows;
}

ThresholdRow calibrate_threshold(const CalibrationSpec& spec, const ScenarioConfig& cfg,
                                 int workers) {
    return calibrate_thresholds({spec.detector}, cfg, spec.pfa, spec.trials, spec.master_seed,
                                workers)[0];
}

PdPoint estimate_pd(DetectorId detector, const ScenarioConfig& cfg, const ThresholdRow& threshold,
                    double sinr_db, long trials, std::uint64_t master_seed, int workers,
                    std::uint64_t grid_point) {
    require_hash_match(cfg, threshold);
    check_detector_preconditions(detector, cfg.n, cfg.k_p, cfg.k_s, cfg.r);
    const ScenarioModel model(cfg);
    const std::vector<long> counts =
        count_exceedances(model, {detector}, {threshold.eta}, Truth::H1, sinr_db, trials,
                          master_seed, stream_purpose::pd, grid_point, workers);
    PdPoint point;
    point.sinr_db = sinr_db;
    point.pd = static_cast<double>(counts[0]) / static_cast<double>(trials);
    point.ci = wilson_interval(counts[0], trials);
    point.trials = trials;
    return point;
}

std::vector<PdCurve> pd_curves(const std::vector<DetectorId>& detectors, const ScenarioConfig& cfg,
                               const std::vector<ThresholdRow>& thresholds,
                               const std::vector<double>& sinr_grid_db, long trials,
                               std::uint64_t master_seed, int workers) {
    if (detectors.size() != thresholds.size()) {
        throw Error("pd_curves needs one threshold per detector");
    }
    for (std::size_t i = 1; i < sinr_grid_db.size(); ++i) {
        if (!(sinr_grid_db[i] > sinr_grid_db[i - 1])) {
            throw PreconditionError("SINR grid must be strictly ascending");
        }
    }
    std::vector<double> etas;
    etas.reserve(detectors.size());
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        if (thresholds[i].detector != detectors[i]) {
            throw Error("threshold list does not line up with the detector list");
        }
        require_hash_match(cfg, thresholds[i]);
        check_detector_preconditions(detectors[i], cfg.n, cfg.k_p, cfg.k_s, cfg.r);
        etas.push_back(thresholds[i].eta);
    }
    const ScenarioModel model(cfg);
    std::vector<PdCurve> curves(detectors.size());
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        curves[i].detector = detectors[i];
        curves[i].master_seed = master_seed;
    }
    for (std::size_t p = 0; p < sinr_grid_db.size(); ++p) {
        const std::vector<long> counts =
            count_exceedances(model, detectors, etas, Truth::H1, sinr_grid_db[p], trials,
                              master_seed, stream_purpose::pd, p, workers);
        for (std::size_t i = 0; i < detectors.size(); ++i) {
            PdPoint point;
            point.sinr_db = sinr_grid_db[p];
            point.pd = static_cast<double>(counts[i]) / static_cast<double>(trials);
            point.ci = wilson_interval(counts[i], trials);
            point.trials = trials;
            curves[i].points.push_back(point);
        }
    }
    return curves;
}

PdCurve pd_curve(DetectorId detector, const ScenarioConfig& cfg, const ThresholdRow& threshold,
                 const std::vector<double>& sinr_grid_db, long trials, std::uint64_t master_seed,
                 int workers) {
    return pd_curves({detector}, cfg, {threshold}, sinr_grid_db, trials, master_seed, workers)[0];
}

std::vector<std::vector<SweepPoint>> pfa_sweep(const std::vector<DetectorId>& detectors,
                                               const ScenarioConfig& cfg,
                                               const std::vector<ThresholdRow>& thresholds,
                                               SweepParam param, const std::vector<double>& values,
                                               long trials, std::uint64_t master_seed,
                                               int workers) {
    if (detectors.size() != thresholds.size()) {
        throw Error("pfa_sweep needs one threshold per detector");
    }
    std::vector<double> etas;
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        if (thresholds[i].detector != detectors[i]) {
            throw Error("threshold list does not line up with the detector list");
        }
        require_hash_match(cfg, thresholds[i]);
        etas.push_back(thresholds[i].eta);
    }
    std::vector<std::vector<SweepPoint>> result(detectors.size());
    for (std::size_t v = 0; v < values.size(); ++v) {
        ScenarioConfig swept = cfg;
        if (param == SweepParam::CnrDb) {
            swept.cnr_db = values[v];
        } else {
            swept.gamma = values[v];
        }
        const ScenarioModel model(swept);
        // Swept values share trial streams (common random numbers), so a
        // parameter the generator ignores yields an exactly flat sweep.
        const std::vector<long> counts =
            count_exceedances(model, detectors, etas, Truth::H0, 0.0, trials, master_seed,
                              stream_purpose::pfa_sweep, 0, workers);
        for (std::size_t i = 0; i < detectors.size(); ++i) {
            result[i].push_back(SweepPoint{values[v],
                                           static_cast<double>(counts[i]) / trials, trials});
        }
    }
    return result;
}

std::vector<PdPoint> validate_pfas(const std::vector<DetectorId>& detectors,
                                   const ScenarioConfig& cfg,
                                   const std::vector<ThresholdRow>& thresholds, long trials,
                                   std::uint64_t master_seed, int workers) {
    if (detectors.size() != thresholds.size()) {
        throw Error("validate_pfas needs one threshold per detector");
    }
    std::vector<double> etas;
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        if (thresholds[i].detector != detectors[i]) {
            throw Error("threshold list does not line up with the detector list");
        }
        require_hash_match(cfg, thresholds[i]);
        etas.push_back(thresholds[i].eta);
    }
    const ScenarioModel model(cfg);
    const std::vector<long> counts =
        count_exceedances(model, detectors, etas, Truth::H0, 0.0, trials, master_seed,
                          stream_purpose::validation, 0, workers);
    std::vector<PdPoint> points(detectors.size());
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        points[i].sinr_db = 0.0;
        points[i].pd = static_cast<double>(counts[i]) / static_cast<double>(trials);
        points[i].ci = wilson_interval(counts[i], trials);
        points[i].trials = trials;
    }
    return points;
}

PdPoint validate_pfa(DetectorId detector, const ScenarioConfig& cfg, const ThresholdRow& threshold,
                     long trials, std::uint64_t master_seed, int workers) {
    return validate_pfas({detector}, cfg, {threshold}, trials, master_seed, workers)[0];
}

}  // namespace subdet
