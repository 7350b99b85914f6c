#pragma once

#include <optional>
#include <span>

#include "subdet/linalg.hpp"

namespace subdet {

/// Shared per-trial input for the eight estimate-and-plug statistics, all
/// built on the secondary-data sample covariance S = Z_S Z_S† / K_S.
/// Whitening and eigenvalue work is computed once and reused.
class EpInput {
public:
    EpInput(ComplexMatrix z_p, ComplexMatrix z_s, std::optional<ComplexMatrix> h, int r);

    int n() const { return static_cast<int>(z_p_.rows()); }
    int k_p() const { return static_cast<int>(z_p_.cols()); }
    int k_s() const { return static_cast<int>(z_s_.cols()); }
    int r() const { return r_; }
    bool has_subspace() const { return h_.has_value(); }

    /// Y = S^{-1/2} Z_P.
    const ComplexMatrix& whitened_primary();
    /// Orthonormal basis of span(S^{-1/2} H).
    const ComplexMatrix& whitened_subspace_basis();
    /// Eigenvalues of Y Y†, descending, rank noise zeroed (N values).
    const RealVector& whitened_gram_eigenvalues_desc();
    /// Numerical rank r_0 of Y Y†.
    int whitened_gram_rank();
    /// Eigenvalues of B = L^{-1} G† Y Y† G L^{-†}, descending, rank noise
    /// zeroed (r values); L is the Cholesky factor of G†G, G = S^{-1/2} H.
    const RealVector& b_eigenvalues_desc();
    /// Numerical rank r_B of B.
    int b_rank();
    /// Tr[Z_P† S^-1 Z_P] = ||Y||_F^2.
    double whitened_energy();
    /// Tr[Z_P† S^{-1/2} P_G^⊥ S^{-1/2} Z_P].
    double perp_energy();

private:
    ComplexMatrix z_p_;
    ComplexMatrix z_s_;
    std::optional<ComplexMatrix> h_;
    int r_;
    std::optional<ComplexMatrix> whitening_;
    std::optional<ComplexMatrix> whitened_;
    std::optional<ComplexMatrix> basis_;
    std::optional<RealVector> w_eigs_;
    std::optional<RealVector> b_eigs_;
    std::optional<double> perp_energy_;
};

/// Profile-ML disturbance scale for the second-order known-subspace
/// statistic: mode_eigs_desc are the nonzero eigenvalues of B and t_perp the
/// energy in the orthogonal complement of the whitened subspace.
double so_ks_scale_mle(double t_perp, std::span<const double> mode_eigs_desc, int k_p, int n);

/// Profile-ML disturbance scale for the second-order unknown-subspace
/// statistic: sigma2_desc_kept are the r_0 nonzero whitened-Gram eigenvalues;
/// the estimator switches form depending on whether r_0 exceeds r.
double so_us_scale_mle(std::span<const double> sigma2_desc_kept, int k_p, int n, int r);

double stat_ep_fo_ks_he(EpInput& in);
double stat_ep_fo_ks_phe(EpInput& in);
double stat_ep_fo_us_he(EpInput& in);
double stat_ep_fo_us_phe(EpInput& in);
double stat_ep_so_ks_he(EpInput& in);
double stat_ep_so_ks_phe(EpInput& in);
double stat_ep_so_us_he(EpInput& in);
double stat_ep_so_us_phe(EpInput& in);

}  // namespace subdet
