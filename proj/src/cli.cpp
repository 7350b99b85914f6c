#include "subdet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace subdet::cli {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) {
        throw Error("cannot write output file: " + path);
    }
    out << content;
}

std::string sanitize_error(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

std::uint64_t effective_seed(const RunConfig& config, const Options& opts) {
    return opts.seed.value_or(config.montecarlo.master_seed);
}

std::string threshold_csv(const RunConfig& config, const std::vector<ThresholdRow>& rows,
                          const std::vector<std::pair<DetectorId, std::string>>& errors,
                          std::uint64_t seed) {
    std::ostringstream out;
    out << "detector,scenario_hash,pfa,eta,trials,seed\n";
    const std::string hash = scenario_hash(config.scenario);
    for (const DetectorId id : config.detectors) {
        const auto row = std::find_if(rows.begin(), rows.end(),
                                      [&](const ThresholdRow& r) { return r.detector == id; });
        if (row != rows.end()) {
            out << detector_name(id) << ',' << row->scenario_hash << ',' << fmt17(row->pfa) << ','
                << fmt17(row->eta) << ',' << row->trials << ',' << row->master_seed << '\n';
            continue;
        }
        const auto err = std::find_if(errors.begin(), errors.end(),
                                      [&](const auto& e) { return e.first == id; });
        out << detector_name(id) << ',' << hash << ',' << fmt17(config.montecarlo.pfa)
            << ",error:" << sanitize_error(err->second) << ",0," << seed << '\n';
    }
    return out.str();
}

}  // namespace

ThresholdFile read_threshold_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read thresholds file: " + path);
    }
    ThresholdFile file;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string detector, hash, pfa, eta, trials, seed;
        std::getline(ss, detector, ',');
        std::getline(ss, hash, ',');
        std::getline(ss, pfa, ',');
        std::getline(ss, eta, ',');
        std::getline(ss, trials, ',');
        std::getline(ss, seed, ',');
        const auto id = detector_from_name(detector);
        if (!id) {
            throw Error("thresholds file names unknown detector '" + detector + "'");
        }
        if (eta.rfind("error:", 0) == 0) {
            file.error_records.push_back(detector + ": " + eta.substr(6));
            continue;
        }
        ThresholdRow row;
        row.detector = *id;
        row.scenario_hash = hash;
        row.pfa = std::stod(pfa);
        row.eta = std::stod(eta);
        row.trials = std::stol(trials);
        row.master_seed = std::stoull(seed);
        file.rows.push_back(std::move(row));
    }
    return file;
}

int cmd_calibrate(const std::string& config_path, const std::string& out_path,
                  const Options& opts) {
    const RunConfig config = load_run_config(config_path);
    const std::uint64_t seed = effective_seed(config, opts);
    const auto& scenario = config.scenario;

    std::vector<DetectorId> runnable;
    std::vector<std::pair<DetectorId, std::string>> errors;
    for (const DetectorId id : config.detectors) {
        try {
            check_detector_preconditions(id, scenario.n, scenario.k_p, scenario.k_s, scenario.r);
            runnable.push_back(id);
        } catch (const PreconditionError& e) {
            errors.emplace_back(id, e.condition);
            std::cerr << "calibrate: skipping " << detector_name(id) << ": " << e.condition
                      << "\n";
        }
    }
    std::vector<ThresholdRow> rows;
    if (!runnable.empty()) {
        rows = calibrate_thresholds(runnable, scenario, config.montecarlo.pfa,
                                    config.montecarlo.calib_trials, seed, opts.workers);
    }
    write_file(out_path, threshold_csv(config, rows, errors, seed));
    return errors.empty() ? 0 : 1;
}

int cmd_pd(const std::string& config_path, const std::string& thresholds_path,
           const std::string& out_path, const Options& opts) {
    const RunConfig config = load_run_config(config_path);
    const std::uint64_t seed = effective_seed(config, opts);
    const ThresholdFile thresholds = read_threshold_csv(thresholds_path);
    const std::string hash = scenario_hash(config.scenario);

    std::vector<ThresholdRow> matched;
    for (const DetectorId id : config.detectors) {
        const auto row =
            std::find_if(thresholds.rows.begin(), thresholds.rows.end(),
                         [&](const ThresholdRow& r) { return r.detector == id; });
        if (row == thresholds.rows.end()) {
            throw Error("thresholds file has no row for " + std::string(detector_name(id)));
        }
        if (row->scenario_hash != hash) {
            throw Error("scenario hash mismatch for " + std::string(detector_name(id)) +
                        ": thresholds were calibrated for " + row->scenario_hash +
                        " but the config hashes to " + hash);
        }
        matched.push_back(*row);
    }

    const std::vector<double> grid = config.sinr.points();
    const std::vector<PdCurve> curves = pd_curves(config.detectors, config.scenario, matched, grid,
                                                  config.montecarlo.pd_trials, seed, opts.workers);

    std::ostringstream out;
    out << "# scenario_hash=" << hash << '\n';
    out << "detector,env,order,subspace,K_S,sinr_db,pd,ci_low,ci_high,trials,seed\n";
    for (const PdCurve& curve : curves) {
        const DetectorId id = curve.detector;
        for (const PdPoint& p : curve.points) {
            out << detector_name(id) << ',' << to_string(detector_env(id)) << ','
                << to_string(detector_order(id)) << ','
                << (detector_known_subspace(id) ? "KS" : "US") << ',' << config.scenario.k_s << ','
                << fmt17(p.sinr_db) << ',' << fmt17(p.pd) << ',' << fmt17(p.ci.low) << ','
                << fmt17(p.ci.high) << ',' << p.trials << ',' << seed << '\n';
        }
    }
    write_file(out_path, out.str());
    return 0;
}

int cmd_pfa_sweep(const std::string& config_path, const std::string& thresholds_path,
                  const std::string& param, const std::vector<double>& values,
                  const std::string& out_path, const Options& opts) {
    if (param != "cnr_db" && param != "gamma") {
        throw Error("sweep param must be cnr_db or gamma, got '" + param + "'");
    }
    const SweepParam sweep_param = param == "cnr_db" ? SweepParam::CnrDb : SweepParam::Gamma;
    const RunConfig config = load_run_config(config_path);
    const std::uint64_t seed = effective_seed(config, opts);
    const ThresholdFile thresholds = read_threshold_csv(thresholds_path);
    const std::string hash = scenario_hash(config.scenario);

    std::vector<ThresholdRow> matched;
    for (const DetectorId id : config.detectors) {
        const auto row =
            std::find_if(thresholds.rows.begin(), thresholds.rows.end(),
                         [&](const ThresholdRow& r) { return r.detector == id; });
        if (row == thresholds.rows.end()) {
            throw Error("thresholds file has no row for " + std::string(detector_name(id)));
        }
        if (row->scenario_hash != hash) {
            throw Error("scenario hash mismatch for " + std::string(detector_name(id)));
        }
        matched.push_back(*row);
    }

    const long trials = std::lround(100.0 / config.montecarlo.pfa);
    const auto sweep = pfa_sweep(config.detectors, config.scenario, matched, sweep_param, values,
                                 trials, seed, opts.workers);

    std::ostringstream out;
    out << "# scenario_hash=" << hash << '\n';
    out << "detector,param,value,pfa_hat,trials,seed\n";
    for (std::size_t i = 0; i < config.detectors.size(); ++i) {
        for (const SweepPoint& p : sweep[i]) {
            out << detector_name(config.detectors[i]) << ',' << param << ',' << fmt17(p.value)
                << ',' << fmt17(p.pfa_hat) << ',' << p.trials << ',' << seed << '\n';
        }
    }
    write_file(out_path, out.str());
    return 0;
}

namespace {

/// Paper-scale settings shared by every figure; desk scale shrinks the
/// problem so the whole pipeline runs in seconds.
RunConfig base_config(const std::string& scale) {
    if (scale != "desk" && scale != "paper") {
        throw Error("scale must be desk or paper, got '" + scale + "'");
    }
    RunConfig config;
    config.scenario = ScenarioConfig{};  // N=16, K_P=16, K_S=32, r=2, CNR 30 dB, rho 0.95
    config.montecarlo.pfa = 1e-3;
    config.montecarlo.calib_trials = 0;  // 100/pfa
    config.montecarlo.pd_trials = 1000;
    config.montecarlo.master_seed = 73;
    config.sinr = SinrGrid{0.0, 40.0, 2.0};
    if (scale == "desk") {
        config.scenario.n = 8;
        config.scenario.k_p = 8;
        config.scenario.k_s = 16;
        config.montecarlo.pfa = 1e-2;
        config.sinr = SinrGrid{0.0, 30.0, 2.0};
    }
    return config;
}

}  // namespace

FigurePreset figure_preset(const std::string& figure_id, const std::string& scale) {
    if (figure_id == "6") {
        throw Error("figure 6 is out of scope: it depends on the alternating second-order GLR "
                    "estimation procedures, which this library does not implement");
    }
    FigurePreset preset;
    preset.config = base_config(scale);
    auto& config = preset.config;
    const auto with_ks = [&](int mult) { config.scenario.k_s = mult * config.scenario.n; };

    if (figure_id == "1a" || figure_id == "1b") {
        with_ks(2);
        config.scenario.env = Environment::PHE;
        config.scenario.gamma = 2.0;  // 3 dB nominal
        preset.is_sweep = true;
        if (figure_id == "1a") {
            // Every first-order GLR detector is CFAR with respect to the
            // clutter covariance once calibrated at the nominal scenario.
            config.detectors = {DetectorId::FO_KS_HE, DetectorId::FO_KS_PHE,
                                DetectorId::FO_US_HE, DetectorId::FO_US_PHE};
            preset.sweep_param = SweepParam::CnrDb;
            preset.sweep_values = {10.0, 20.0, 30.0, 40.0};
        } else {
            // A gamma sweep is a CFAR question only for the detectors that
            // treat the secondary scale as unknown; the homogeneous variants
            // are not gamma-invariant by construction.
            config.detectors = {DetectorId::FO_KS_PHE, DetectorId::FO_US_PHE};
            preset.sweep_param = SweepParam::Gamma;
            // 0, 1.5, 3, 4.5 dB
            preset.sweep_values = {1.0, std::pow(10.0, 0.15), 2.0, std::pow(10.0, 0.45)};
        }
        return preset;
    }
    if (figure_id == "2" || figure_id == "3") {
        with_ks(figure_id == "2" ? 2 : 4);
        config.scenario.env = Environment::HE;
        config.scenario.order = SignalOrder::First;
        config.detectors = {DetectorId::FO_KS_HE, DetectorId::FO_US_HE, DetectorId::EP_FO_KS_HE,
                            DetectorId::EP_FO_US_HE};
        return preset;
    }
    if (figure_id == "4" || figure_id == "5") {
        with_ks(figure_id == "4" ? 2 : 4);
        config.scenario.env = Environment::PHE;
        config.scenario.order = SignalOrder::First;
        config.detectors = {DetectorId::FO_KS_PHE, DetectorId::FO_US_PHE, DetectorId::EP_FO_KS_PHE,
                            DetectorId::EP_FO_US_PHE};
        return preset;
    }
    if (figure_id == "7" || figure_id == "8") {
        with_ks(figure_id == "7" ? 2 : 4);
        config.scenario.env = Environment::HE;
        config.scenario.order = SignalOrder::Second;
        config.detectors = {DetectorId::EP_SO_KS_HE, DetectorId::EP_SO_US_HE};
        return preset;
    }
    if (figure_id == "9" || figure_id == "10") {
        with_ks(figure_id == "9" ? 2 : 4);
        config.scenario.env = Environment::PHE;
        config.scenario.order = SignalOrder::Second;
        config.detectors = {DetectorId::EP_SO_KS_PHE, DetectorId::EP_SO_US_PHE};
        return preset;
    }
    throw Error("unknown figure id '" + figure_id + "' (expected 1a, 1b, 2-5, 7-10)");
}

int cmd_figure(const std::string& figure_id, const std::string& scale, const std::string& out_dir,
               const Options& opts) {
    const FigurePreset preset = figure_preset(figure_id, scale);
    std::filesystem::create_directories(out_dir);
    const std::string stem = (std::filesystem::path(out_dir) / ("fig" + figure_id)).string();
    const std::string config_path = stem + "_config.ini";
    const std::string thresholds_path = stem + "_thresholds.csv";
    write_file(config_path, serialize_run_config(preset.config));

    int status = cmd_calibrate(config_path, thresholds_path, opts);
    if (preset.is_sweep) {
        status |= cmd_pfa_sweep(config_path, thresholds_path, to_string(preset.sweep_param),
                                preset.sweep_values, stem + "_sweep.csv", opts);
    } else {
        status |= cmd_pd(config_path, thresholds_path, stem + "_pd.csv", opts);
    }
    return status;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Adaptive subspace detection: detectors, threshold calibration, Pd curves, and "
                 "false-alarm sweeps"};
    app.require_subcommand(1);

    std::string config_path, thresholds_path, out_path, param, figure_id, out_dir;
    std::string scale = "desk";
    std::vector<double> values;
    Options opts;
    std::int64_t seed_flag = -1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_flag, "Override the config master seed");
        cmd->add_option("--workers", opts.workers,
                        "Worker threads (performance only, never results); 0 = all cores");
    };

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate detection thresholds");
    calibrate->add_option("--config", config_path, "Run config (INI)")->required();
    calibrate->add_option("--out", out_path, "Output thresholds CSV")->required();
    add_common(calibrate);

    auto* pd = app.add_subcommand("pd", "Estimate Pd versus SINR");
    pd->add_option("--config", config_path, "Run config (INI)")->required();
    pd->add_option("--thresholds", thresholds_path, "Calibrated thresholds CSV")->required();
    pd->add_option("--out", out_path, "Output Pd CSV")->required();
    add_common(pd);

    auto* sweep = app.add_subcommand("pfa-sweep", "Sweep Pfa sensitivity over cnr_db or gamma");
    sweep->add_option("--config", config_path, "Run config (INI)")->required();
    sweep->add_option("--thresholds", thresholds_path, "Calibrated thresholds CSV")->required();
    sweep->add_option("--param", param, "Swept parameter: cnr_db or gamma")->required();
    sweep->add_option("--values", values, "Comma-separated swept values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", out_path, "Output sweep CSV")->required();
    add_common(sweep);

    auto* figure = app.add_subcommand("figure", "Run a preset experiment");
    figure->add_option("--figure", figure_id, "Figure id: 1a, 1b, 2-5, 7-10")->required();
    figure->add_option("--scale", scale, "desk or paper")->capture_default_str();
    figure->add_option("--out", out_dir, "Output directory")->required();
    add_common(figure);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (seed_flag >= 0) {
        opts.seed = static_cast<std::uint64_t>(seed_flag);
    }
    try {
        if (calibrate->parsed()) return cmd_calibrate(config_path, out_path, opts);
        if (pd->parsed()) return cmd_pd(config_path, thresholds_path, out_path, opts);
        if (sweep->parsed()) {
            return cmd_pfa_sweep(config_path, thresholds_path, param, values, out_path, opts);
        }
        return cmd_figure(figure_id, scale, out_dir, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace subdet::cli
