#include "subdet/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace subdet {

std::vector<double> SinrGrid::points() const {
    std::vector<double> grid;
    if (!(step_db > 0.0)) {
        throw PreconditionError("sinr step_db must be positive");
    }
    for (double v = start_db; v <= stop_db + 1e-9; v += step_db) {
        grid.push_back(v);
    }
    return grid;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, int line_no) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size()) {
        throw Error("config line " + std::to_string(line_no) + ": bad number '" + value + "'");
    }
    return out;
}

long parse_long(const std::string& value, int line_no) {
    std::size_t used = 0;
    long out = 0;
    try {
        out = std::stol(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size()) {
        throw Error("config line " + std::to_string(line_no) + ": bad integer '" + value + "'");
    }
    return out;
}

std::vector<DetectorId> parse_detector_list(const std::string& value, int line_no) {
    std::vector<DetectorId> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string name = trim(item);
        if (name.empty()) continue;
        const auto id = detector_from_name(name);
        if (!id) {
            throw Error("config line " + std::to_string(line_no) + ": unknown detector '" + name +
                        "'");
        }
        out.push_back(*id);
    }
    if (out.empty()) {
        throw Error("config line " + std::to_string(line_no) + ": empty detector list");
    }
    return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    RunConfig config;
    bool saw_detectors = false;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw Error("config line " + std::to_string(line_no) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "montecarlo" && section != "sinr") {
                throw Error("config line " + std::to_string(line_no) + ": unknown section [" +
                            section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            if (key == "detectors") {
                config.detectors = parse_detector_list(value, line_no);
                saw_detectors = true;
            } else {
                throw Error("config line " + std::to_string(line_no) + ": unknown top-level key '" +
                            key + "'");
            }
        } else if (section == "scenario") {
            auto& s = config.scenario;
            if (key == "n") s.n = static_cast<int>(parse_long(value, line_no));
            else if (key == "k_p") s.k_p = static_cast<int>(parse_long(value, line_no));
            else if (key == "k_s") s.k_s = static_cast<int>(parse_long(value, line_no));
            else if (key == "r") s.r = static_cast<int>(parse_long(value, line_no));
            else if (key == "cnr_db") s.cnr_db = parse_double(value, line_no);
            else if (key == "rho_c") s.rho_c = parse_double(value, line_no);
            else if (key == "gamma") s.gamma = parse_double(value, line_no);
            else if (key == "theta_rad") s.theta_rad = parse_double(value, line_no);
            else if (key == "phase_step") s.phase_step = parse_double(value, line_no);
            else if (key == "env") {
                if (value == "HE") s.env = Environment::HE;
                else if (value == "PHE") s.env = Environment::PHE;
                else throw Error("config line " + std::to_string(line_no) + ": env must be HE or PHE");
            } else if (key == "order") {
                if (value == "first") s.order = SignalOrder::First;
                else if (value == "second") s.order = SignalOrder::Second;
                else throw Error("config line " + std::to_string(line_no) +
                                 ": order must be first or second");
            } else {
                throw Error("config line " + std::to_string(line_no) + ": unknown scenario key '" +
                            key + "'");
            }
        } else if (section == "montecarlo") {
            auto& m = config.montecarlo;
            if (key == "pfa") m.pfa = parse_double(value, line_no);
            else if (key == "calib_trials") m.calib_trials = parse_long(value, line_no);
            else if (key == "pd_trials") m.pd_trials = parse_long(value, line_no);
            else if (key == "master_seed") {
                m.master_seed = static_cast<std::uint64_t>(parse_long(value, line_no));
            } else {
                throw Error("config line " + std::to_string(line_no) +
                            ": unknown montecarlo key '" + key + "'");
            }
        } else {  // sinr
            auto& g = config.sinr;
            if (key == "start_db") g.start_db = parse_double(value, line_no);
            else if (key == "stop_db") g.stop_db = parse_double(value, line_no);
            else if (key == "step_db") g.step_db = parse_double(value, line_no);
            else {
                throw Error("config line " + std::to_string(line_no) + ": unknown sinr key '" +
                            key + "'");
            }
        }
    }
    if (!saw_detectors) {
        throw Error("config is missing the top-level 'detectors = ...' list");
    }
    config.scenario.validate();
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

namespace {
std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}
}  // namespace

std::string serialize_run_config(const RunConfig& config) {
    std::ostringstream out;
    out << "detectors = ";
    for (std::size_t i = 0; i < config.detectors.size(); ++i) {
        if (i) out << ", ";
        out << detector_name(config.detectors[i]);
    }
    out << "\n\n[scenario]\n";
    const auto& s = config.scenario;
    out << "n = " << s.n << "\nk_p = " << s.k_p << "\nk_s = " << s.k_s << "\nr = " << s.r
        << "\ncnr_db = " << fmt17(s.cnr_db) << "\nrho_c = " << fmt17(s.rho_c)
        << "\ngamma = " << fmt17(s.gamma) << "\ntheta_rad = " << fmt17(s.theta_rad)
        << "\nphase_step = " << fmt17(s.phase_step) << "\nenv = " << to_string(s.env)
        << "\norder = " << to_string(s.order) << "\n";
    out << "\n[montecarlo]\n";
    const auto& m = config.montecarlo;
    out << "pfa = " << fmt17(m.pfa) << "\ncalib_trials = " << m.calib_trials
        << "\npd_trials = " << m.pd_trials << "\nmaster_seed = " << m.master_seed << "\n";
    out << "\n[sinr]\n";
    out << "start_db = " << fmt17(config.sinr.start_db) << "\nstop_db = "
        << fmt17(config.sinr.stop_db) << "\nstep_db = " << fmt17(config.sinr.step_db) << "\n";
    return out.str();
}

}  // namespace subdet
