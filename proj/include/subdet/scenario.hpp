#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "subdet/linalg.hpp"

namespace subdet {

enum class Environment { HE, PHE };
enum class SignalOrder { First, Second };
enum class Truth { H0, H1 };

std::string to_string(Environment env);
std::string to_string(SignalOrder order);

/// All simulation parameters for one scenario.
struct ScenarioConfig {
    int n = 16;    // antenna/sample dimension
    int k_p = 16;  // primary (test) columns
    int k_s = 32;  // secondary (training) columns
    int r = 2;     // signal subspace dimension
    double cnr_db = 30.0;
    double rho_c = 0.95;
    double gamma = 2.0;  // secondary/primary power ratio (linear); used when env == PHE
    double theta_rad = 2.0 * M_PI * (2.0 / 360.0);
    double phase_step = 0.02;
    Environment env = Environment::HE;
    SignalOrder order = SignalOrder::First;

    int k_total() const { return k_p + k_s; }
    double beta() const { return std::sin(theta_rad); }

    /// Throws PreconditionError if any invariant fails (K_S >= N, 1 <= r <= N,
    /// K_P >= 1, gamma > 0, 0 <= rho_c < 1, 0 < beta < 1, phase_step > 0).
    void validate() const;
};

/// Canonical 16-hex-digit digest binding derived results (thresholds) to the
/// exact scenario they were computed for.
std::string scenario_hash(const ScenarioConfig& cfg);

/// Unitary N x r basis of the signal subspace (H†H = I_r).
struct SubspaceBasis {
    ComplexMatrix h;
};

/// Primary and secondary matrices for one trial.
struct Dataset {
    ComplexMatrix z_p;
    ComplexMatrix z_s;
    Truth truth = Truth::H0;
    std::optional<double> sinr_db;
};

struct SignalDraw {
    std::vector<double> phases;                     // radians, on the sector grid
    std::vector<std::complex<double>> amplitudes;
};

/// R = I_N + sigma_c^2 M_c with M_c(i,j) = rho_c^|i-j|, sigma_c^2 = 10^(cnr_db/10).
HermitianMatrix clutter_covariance(int n, double cnr_db, double rho_c);

/// v(phi): k-th entry (1/sqrt(N)) e^{j(k-1) phi}; unit Euclidean norm.
ComplexVector steering_vector(int n, double phi);

/// Sector correlation matrix: entry (m,n) is 2*beta*pi*sinc((n-m)*beta) with
/// the normalized convention sinc(x) = sin(pi x)/(pi x). Equals the integral
/// of e^{j w (n-m)} over w in [-pi*beta, pi*beta].
HermitianMatrix sector_correlation(int n, double beta);

/// The r dominant unit eigenvectors of sector_correlation(n, beta), ordered by
/// descending eigenvalue.
SubspaceBasis sector_subspace(int n, int r, double beta);

/// Discretized electrical-angle grid: -pi*beta + k*step while <= pi*beta.
std::vector<double> phase_grid(double beta, double step);

/// Precomputed scenario world shared across Monte Carlo trials.
class ScenarioModel {
public:
    explicit ScenarioModel(const ScenarioConfig& cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const SubspaceBasis& subspace() const { return subspace_; }
    const HermitianMatrix& covariance() const { return covariance_; }
    const std::vector<double>& grid() const { return grid_; }

    /// Draws phases on the sector grid and amplitudes scaled so the realized
    /// trial satisfies SINR = |alpha|^2 Tr(V_P† R^-1 V_P) exactly (first
    /// order) or in expectation (second order).
    SignalDraw draw_signal(double sinr_db, RngStream& rng) const;

    /// Z_P: covariance R (+ per-column signal alpha_i v(phi_i) under H1);
    /// Z_S: covariance gamma*R (gamma = 1 in a homogeneous environment).
    Dataset generate_dataset(Truth truth, double sinr_db, RngStream& rng) const;

    /// v(phi)† R^-1 v(phi), the per-column whitened steering energy.
    double whitened_steering_energy(double phi) const;

private:
    ScenarioConfig cfg_;
    HermitianMatrix covariance_;
    ComplexMatrix chol_r_;            // L with L L† = R
    ComplexMatrix chol_secondary_;    // sqrt(gamma) L under PHE, L under HE
    SubspaceBasis subspace_;
    std::vector<double> grid_;
};

}  // namespace subdet
