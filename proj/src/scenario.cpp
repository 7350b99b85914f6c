#include "subdet/scenario.hpp"

#include <cassert>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace subdet {

std::string to_string(Environment env) { return env == Environment::HE ? "HE" : "PHE"; }
std::string to_string(SignalOrder order) {
    return order == SignalOrder::First ? "first" : "second";
}

void ScenarioConfig::validate() const {
    std::ostringstream bad;
    if (n < 1) bad << "N >= 1";
    else if (k_p < 1) bad << "K_P >= 1";
    else if (k_s < n) bad << "K_S >= N (got K_S=" << k_s << ", N=" << n << ")";
    else if (r < 1 || r > n) bad << "1 <= r <= N (got r=" << r << ", N=" << n << ")";
    else if (!(gamma > 0.0)) bad << "gamma > 0";
    else if (!(rho_c >= 0.0 && rho_c < 1.0)) bad << "0 <= rho_c < 1";
    else if (!(beta() > 0.0 && beta() < 1.0)) bad << "0 < sin(theta) < 1";
    else if (!(phase_step > 0.0)) bad << "phase_step > 0";
    if (!bad.str().empty()) {
        throw PreconditionError("scenario config: " + bad.str());
    }
}

namespace {

void hash_append(std::uint64_t& h, const std::string& s) {
    // FNV-1a, 64-bit: platform-independent and stable across runs.
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string scenario_hash(const ScenarioConfig& cfg) {
    std::ostringstream canon;
    canon << "N=" << cfg.n << ";K_P=" << cfg.k_p << ";K_S=" << cfg.k_s << ";r=" << cfg.r
          << ";cnr_db=" << fmt17(cfg.cnr_db) << ";rho_c=" << fmt17(cfg.rho_c)
          << ";gamma=" << fmt17(cfg.gamma) << ";theta_rad=" << fmt17(cfg.theta_rad)
          << ";phase_step=" << fmt17(cfg.phase_step) << ";env=" << to_string(cfg.env)
          << ";order=" << to_string(cfg.order);
    std::uint64_t h = 14695981039346656037ull;
    hash_append(h, canon.str());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

HermitianMatrix clutter_covariance(int n, double cnr_db, double rho_c) {
    const double sigma_c2 = std::pow(10.0, cnr_db / 10.0);
    ComplexMatrix r(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double clutter = sigma_c2 * std::pow(rho_c, std::abs(i - j));
            r(i, j) = (i == j ? 1.0 : 0.0) + clutter;
        }
    }
    return HermitianMatrix(r);
}

ComplexVector steering_vector(int n, double phi) {
    ComplexVector v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        v(k) = std::polar(scale, k * phi);
    }
    return v;
}

HermitianMatrix sector_correlation(int n, double beta) {
    ComplexMatrix rb(n, n);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const int d = k - m;
            rb(m, k) = d == 0 ? 2.0 * beta * M_PI : 2.0 * std::sin(M_PI * d * beta) / d;
        }
    }
    return HermitianMatrix(rb);
}

SubspaceBasis sector_subspace(int n, int r, double beta) {
    assert(r >= 1 && r <= n);
    const EigenSystem es = hermitian_eig(sector_correlation(n, beta));
    ComplexMatrix h(n, r);
    for (int j = 0; j < r; ++j) {
        h.col(j) = es.vectors.col(n - 1 - j);  // descending eigenvalue order
    }
    return SubspaceBasis{h};
}

std::vector<double> phase_grid(double beta, double step) {
    const double lo = -M_PI * beta;
    const double hi = M_PI * beta;
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (int k = 0; k < count; ++k) {
        grid[k] = lo + k * step;
    }
    return grid;
}

namespace {
const ScenarioConfig& validated(const ScenarioConfig& cfg) {
    cfg.validate();
    return cfg;
}
}  // namespace

ScenarioModel::ScenarioModel(const ScenarioConfig& cfg)
    : cfg_(validated(cfg)),
      covariance_(clutter_covariance(cfg.n, cfg.cnr_db, cfg.rho_c)),
      chol_r_(cholesky(covariance_)),
      subspace_(sector_subspace(cfg.n, cfg.r, cfg.beta())),
      grid_(phase_grid(cfg.beta(), cfg.phase_step)) {
    const double secondary_scale = cfg.env == Environment::PHE ? std::sqrt(cfg.gamma) : 1.0;
    chol_secondary_ = secondary_scale * chol_r_;
}

double ScenarioModel::whitened_steering_energy(double phi) const {
    // v† R^-1 v = ||L^-1 v||^2 with L the Cholesky factor of R.
    const ComplexVector v = steering_vector(cfg_.n, phi);
    const ComplexVector w = chol_r_.triangularView<Eigen::Lower>().solve(v);
    return w.squaredNorm();
}

SignalDraw ScenarioModel::draw_signal(double sinr_db, RngStream& rng) const {
    const int k_p = cfg_.k_p;
    SignalDraw draw;
    draw.phases.resize(k_p);
    draw.amplitudes.resize(k_p);
    double energy = 0.0;  // Tr(V_P† R^-1 V_P) for the realized phases
    for (int i = 0; i < k_p; ++i) {
        draw.phases[i] = grid_[rng.index(grid_.size())];
        energy += whitened_steering_energy(draw.phases[i]);
    }
    const double sinr = std::pow(10.0, sinr_db / 10.0);
    if (cfg_.order == SignalOrder::First) {
        const double magnitude = std::sqrt(sinr / energy);
        for (int i = 0; i < k_p; ++i) {
            draw.amplitudes[i] = std::polar(magnitude, 2.0 * M_PI * rng.uniform01());
        }
    } else {
        const double sigma_alpha = std::sqrt(sinr / energy);
        for (int i = 0; i < k_p; ++i) {
            draw.amplitudes[i] = sigma_alpha * rng.complex_normal();
        }
    }
    return draw;
}

Dataset ScenarioModel::generate_dataset(Truth truth, double sinr_db, RngStream& rng) const {
    Dataset data;
    data.truth = truth;
    // Primary noise first, then the signal, then secondary noise: trials with
    // the same stream share Z_P and the signal across different K_S settings.
    data.z_p = sample_colored_gaussian(chol_r_, cfg_.k_p, rng);
    if (truth == Truth::H1) {
        data.sinr_db = sinr_db;
        const SignalDraw draw = draw_signal(sinr_db, rng);
        for (int i = 0; i < cfg_.k_p; ++i) {
            data.z_p.col(i) += draw.amplitudes[i] * steering_vector(cfg_.n, draw.phases[i]);
        }
    }
    data.z_s = sample_colored_gaussian(chol_secondary_, cfg_.k_s, rng);
    return data;
}

}  // namespace subdet
