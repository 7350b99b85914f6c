#pragma once

#include <optional>
#include <span>

#include "subdet/linalg.hpp"
#include "subdet/scenario.hpp"

namespace subdet {

/// Scale estimate from the monotone stationary equation (see gamma_root).
struct GammaEstimate {
    double gamma_hat = 0.0;
    double log_objective = 0.0;  // a log(g) + sum_j log(1/g + mu_j) at the root
    int iterations = 0;
};

/// Unique positive root of sum_j 1/(1 + gamma mu_j) = a, which minimizes
/// f(gamma) = gamma^a prod_j (1/gamma + mu_j).
///
/// The left side decreases strictly from len(mu) at 0+ to the number of zero
/// entries at infinity, so a root exists iff #{mu_j = 0} < a < len(mu); that
/// is exactly the solvability condition behind the partially-homogeneous
/// statistics. Found by bracketing plus bisection; the residual of the
/// stationary equation at the returned root is below 1e-12.
GammaEstimate gamma_root(double a, std::span<const double> mu);

/// Shared per-trial input for the first-order GLR statistics. Whitening and
/// eigenvalue work is computed once and reused across the four detectors.
/// S_S = Z_S Z_S† (unnormalized secondary Gram).
class GlrInput {
public:
    GlrInput(ComplexMatrix z_p, ComplexMatrix z_s, std::optional<ComplexMatrix> h, int r);

    int n() const { return static_cast<int>(z_p_.rows()); }
    int k_p() const { return static_cast<int>(z_p_.cols()); }
    int k_s() const { return static_cast<int>(z_s_.cols()); }
    int k_total() const { return k_p() + k_s(); }
    int r() const { return r_; }
    bool has_subspace() const { return h_.has_value(); }

    /// Y = S_S^{-1/2} Z_P.
    const ComplexMatrix& whitened_primary();
    /// Orthonormal basis of span(S_S^{-1/2} H).
    const ComplexMatrix& whitened_subspace_basis();
    /// Ascending eigenvalues of M_0 = Y† Y.
    const RealVector& m0_eigenvalues();
    /// Ascending eigenvalues of M_1 = Y† P_G^⊥ Y.
    const RealVector& m1_eigenvalues();
    /// Ascending eigenvalues of Y Y† (N of them).
    const RealVector& whitened_gram_eigenvalues();

private:
    ComplexMatrix z_p_;
    ComplexMatrix z_s_;
    std::optional<ComplexMatrix> h_;
    int r_;
    std::optional<ComplexMatrix> whitening_;  // S_S^{-1/2}
    std::optional<ComplexMatrix> whitened_;
    std::optional<ComplexMatrix> basis_;
    std::optional<RealVector> m0_eigs_;
    std::optional<RealVector> m1_eigs_;
    std::optional<RealVector> tp_eigs_;
};

/// det[I + M_0] / det[I + M_1]; known subspace, homogeneous environment.
double stat_fo_ks_he(GlrInput& in);

/// Scale-profiled determinant ratio with gamma_hat from gamma_root; known
/// subspace, partially-homogeneous environment.
double stat_fo_ks_phe(GlrInput& in);

/// Product of (1 + sigma_i^2) over the r largest whitened-Gram eigenvalues
/// (full determinant when min(N, K_P) < r + 1); unknown subspace, homogeneous.
double stat_fo_us_he(GlrInput& in);

/// Scale-profiled eigenvalue-product ratio; unknown subspace,
/// partially-homogeneous environment.
double stat_fo_us_phe(GlrInput& in);

}  // namespace subdet
