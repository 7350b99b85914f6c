#include "subdet/ep.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

namespace subdet {

namespace {

RealVector descending(const RealVector& ascending) {
    return ascending.reverse();
}

int count_nonzero(const RealVector& v) {
    int k = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) > 0.0) ++k;
    }
    return k;
}

/// Profile log-likelihood in gamma (additive constants dropped):
///   g(gamma) = -K_P sum_i log(max(e_i/K_P, gamma)) - K_P (N - m) log gamma
///              - sum_i e_i / max(e_i/K_P, gamma) - t_extra / gamma.
/// The per-mode max realizes the clamped shrinkage max(e_i/K_P - gamma, 0);
/// g is C^1 and unimodal: gamma^2 g'(gamma) is continuous, piecewise linear
/// with strictly negative slopes, so it crosses zero at most once.
double profile_objective(double gamma, int n, int k_p, std::span<const double> modes,
                         double t_extra) {
    const auto m = static_cast<int>(modes.size());
    double g = -static_cast<double>(k_p) * (n - m) * std::log(gamma) - t_extra / gamma;
    for (const double e : modes) {
        const double top = std::max(e / k_p, gamma);
        g -= k_p * std::log(top) + e / top;
    }
    return g;
}

/// Maximizes the profile objective over gamma > 0.
///
/// Each branch of the stationary equation solves in closed form to
///   gamma = (t_extra + sum of the modes at or below the branch) / (K_P * #active),
/// so the candidate set is those per-branch roots that land inside their own
/// interval plus the breakpoints e_i/K_P; when no stationary candidate lands
/// in any interval the maximizer is a breakpoint. Ties go to the smaller
/// gamma.
double scale_profile_mle(int n, int k_p, std::span<const double> modes_desc, double t_extra) {
    const auto m = static_cast<int>(modes_desc.size());
    assert(m <= n);
    if (m == 0) {
        if (!(t_extra > 0.0)) {
            throw Error("scale MLE undefined for zero primary energy");
        }
        return t_extra / (static_cast<double>(k_p) * n);
    }
    std::vector<double> suffix(m + 1, 0.0);
    for (int i = m - 1; i >= 0; --i) {
        suffix[i] = suffix[i + 1] + modes_desc[i];
    }

    std::vector<double> candidates;
    candidates.reserve(2 * m + 2);
    for (int i = 0; i < m; ++i) {
        candidates.push_back(modes_desc[i] / k_p);
    }
    if (t_extra > 0.0 && n > m) {
        const double c = t_extra / (static_cast<double>(k_p) * (n - m));
        if (c < modes_desc[m - 1] / k_p) candidates.push_back(c);
    }
    for (int i = 2; i <= m; ++i) {  // interval [e_i/K_P, e_{i-1}/K_P)
        const double c = (t_extra + suffix[i - 1]) / (static_cast<double>(k_p) * (n - i + 1));
        if (c >= modes_desc[i - 1] / k_p && c < modes_desc[i - 2] / k_p) candidates.push_back(c);
    }
    {
        const double c = (t_extra + suffix[0]) / (static_cast<double>(k_p) * n);
        if (c >= modes_desc[0] / k_p) candidates.push_back(c);
    }

    std::sort(candidates.begin(), candidates.end());
    double best_gamma = 0.0;
    double best_obj = -std::numeric_limits<double>::infinity();
    for (const double c : candidates) {
        if (!(c > 0.0)) continue;
        const double obj = profile_objective(c, n, k_p, modes_desc, t_extra);
        if (obj > best_obj) {
            best_obj = obj;
            best_gamma = c;
        }
    }
    if (!(best_gamma > 0.0) || !std::isfinite(best_gamma)) {
        throw Error("scale MLE: no positive candidate");
    }
#ifndef NDEBUG
    for (const double c : candidates) {
        if (!(c > 0.0)) continue;
        assert(best_obj + 1e-9 * (1.0 + std::abs(best_obj)) >=
               profile_objective(c, n, k_p, modes_desc, t_extra));
    }
#endif
    return best_gamma;
}

}  // namespace

double so_ks_scale_mle(double t_perp, std::span<const double> mode_eigs_desc, int k_p, int n) {
    return scale_profile_mle(n, k_p, mode_eigs_desc, t_perp);
}

double so_us_scale_mle(std::span<const double> sigma2_desc_kept, int k_p, int n, int r) {
    const auto r0 = static_cast<int>(sigma2_desc_kept.size());
    if (r0 <= r) {
        return scale_profile_mle(n, k_p, sigma2_desc_kept, 0.0);
    }
    double t_extra = 0.0;
    for (int i = r; i < r0; ++i) {
        t_extra += sigma2_desc_kept[i];
    }
    return scale_profile_mle(n, k_p, sigma2_desc_kept.first(r), t_extra);
}

EpInput::EpInput(ComplexMatrix z_p, ComplexMatrix z_s, std::optional<ComplexMatrix> h, int r)
    : z_p_(std::move(z_p)), z_s_(std::move(z_s)), h_(std::move(h)), r_(r) {
    assert(!h_ || h_->rows() == z_p_.rows());
}

const ComplexMatrix& EpInput::whitened_primary() {
    if (!whitened_) {
        const double k_s_inv = 1.0 / static_cast<double>(k_s());
        const HermitianMatrix scm(k_s_inv * (z_s_ * z_s_.adjoint()));
        whitening_ = inv_sqrt(scm).mat();
        whitened_ = *whitening_ * z_p_;
    }
    return *whitened_;
}

const ComplexMatrix& EpInput::whitened_subspace_basis() {
    if (!basis_) {
        if (!h_) {
            throw PreconditionError("known-subspace statistic requires the basis H");
        }
        whitened_primary();
        const ComplexMatrix g = *whitening_ * *h_;
        Eigen::HouseholderQR<ComplexMatrix> qr(g);
        basis_ = qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
    }
    return *basis_;
}

const RealVector& EpInput::whitened_gram_eigenvalues_desc() {
    if (!w_eigs_) {
        const ComplexMatrix& y = whitened_primary();
        const RealVector asc = hermitian_eig(HermitianMatrix(y * y.adjoint())).values;
        w_eigs_ = clamp_rank_noise(descending(asc));
    }
    return *w_eigs_;
}

int EpInput::whitened_gram_rank() { return count_nonzero(whitened_gram_eigenvalues_desc()); }

const RealVector& EpInput::b_eigenvalues_desc() {
    if (!b_eigs_) {
        if (!h_) {
            throw PreconditionError("known-subspace statistic requires the basis H");
        }
        whitened_primary();
        const ComplexMatrix g = *whitening_ * *h_;
        const ComplexMatrix l = cholesky(HermitianMatrix(g.adjoint() * g));
        const ComplexMatrix c =
            l.triangularView<Eigen::Lower>().solve(g.adjoint() * whitened_primary());
        const RealVector asc = hermitian_eig(HermitianMatrix(c * c.adjoint())).values;
        b_eigs_ = clamp_rank_noise(descending(asc));
    }
    return *b_eigs_;
}

int EpInput::b_rank() { return count_nonzero(b_eigenvalues_desc()); }

double EpInput::whitened_energy() { return whitened_primary().squaredNorm(); }

double EpInput::perp_energy() {
    if (!perp_energy_) {
        const ComplexMatrix& y = whitened_primary();
        const ComplexMatrix& q = whitened_subspace_basis();
        perp_energy_ = (y - q * (q.adjoint() * y)).squaredNorm();
    }
    return *perp_energy_;
}

double stat_ep_fo_ks_he(EpInput& in) {
    const ComplexMatrix proj = in.whitened_subspace_basis().adjoint() * in.whitened_primary();
    return proj.squaredNorm();
}

double stat_ep_fo_ks_phe(EpInput& in) {
    const double num = in.whitened_energy();
    const double den = in.perp_energy();
    if (!(den > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return num / den;
}

double stat_ep_fo_us_he(EpInput& in) {
    const RealVector& sig = in.whitened_gram_eigenvalues_desc();
    const int take = std::min({in.r(), in.k_p(), in.n()});
    double sum = 0.0;
    for (int i = 0; i < take; ++i) {
        sum += sig(i);
    }
    return sum;
}

double stat_ep_fo_us_phe(EpInput& in) {
    const RealVector& sig = in.whitened_gram_eigenvalues_desc();
    const int take = std::min({in.r(), in.k_p(), in.n()});
    double top = 0.0;
    double total = 0.0;
    for (int i = 0; i < in.n(); ++i) {
        total += sig(i);
        if (i < take) top += sig(i);
    }
    if (!(total > 0.0)) {
        throw Error("EP-FO-US-PHE undefined for Z_P = 0");
    }
    return top / total;
}

double stat_ep_so_ks_he(EpInput& in) {
    const RealVector& gam = in.b_eigenvalues_desc();
    const int r_b = in.b_rank();
    const double k_p = in.k_p();
    double stat = 0.0;
    for (Eigen::Index i = 0; i < gam.size(); ++i) {
        if (i < r_b) {
            const double lambda = std::max(gam(i) / k_p - 1.0, 0.0);
            stat += gam(i) - gam(i) / (1.0 + lambda) - k_p * std::log1p(lambda);
        } else {
            stat += gam(i);  // zeroed rank noise
        }
    }
    return stat;
}

double stat_ep_so_ks_phe(EpInput& in) {
    const RealVector& gam = in.b_eigenvalues_desc();
    const int r_b = in.b_rank();
    const int n = in.n();
    const double k_p = in.k_p();
    const double tr_m = in.whitened_energy();
    if (!(tr_m > 0.0)) {
        throw Error("EP-SO-KS-PHE undefined for Z_P = 0");
    }
    const double t_perp = in.perp_energy();
    const double gamma_hat =
        so_ks_scale_mle(t_perp, {gam.data(), static_cast<std::size_t>(r_b)}, in.k_p(), n);
    double stat = k_p * n * std::log(tr_m) - k_p * n * std::log(gamma_hat) - t_perp / gamma_hat;
    for (int i = 0; i < r_b; ++i) {
        const double delta = std::max(gam(i) / (k_p * gamma_hat) - 1.0, 0.0);
        stat -= k_p * std::log1p(delta) + (gam(i) / gamma_hat) / (1.0 + delta);
    }
    return stat;
}

double stat_ep_so_us_he(EpInput& in) {
    const RealVector& sig = in.whitened_gram_eigenvalues_desc();
    const int n = in.n();
    const int r_lim = std::min(in.r(), n);
    const double k_p = in.k_p();
    double stat = 0.0;
    // Modes past r carry no shrinkage: their trace and penalty terms cancel
    // exactly, so only the first r_lim modes can contribute.
    for (int i = 0; i < r_lim; ++i) {
        const double q = std::max(sig(i) / k_p - 1.0, 0.0);
        stat += sig(i) - sig(i) / (1.0 + q) - k_p * std::log1p(q);
    }
    return stat;
}

double stat_ep_so_us_phe(EpInput& in) {
    const RealVector& sig = in.whitened_gram_eigenvalues_desc();
    const int n = in.n();
    const int r_lim = std::min(in.r(), n);
    const int r0 = in.whitened_gram_rank();
    const double k_p = in.k_p();
    const double tr_m = sig.sum();
    if (!(tr_m > 0.0)) {
        throw Error("EP-SO-US-PHE undefined for Z_P = 0");
    }
    const double gamma_hat = so_us_scale_mle(
        {sig.data(), static_cast<std::size_t>(r0)}, in.k_p(), n, r_lim);
    const int modes = std::min(r0, r_lim);
    double stat = k_p * n * std::log(tr_m) - k_p * (n - modes) * std::log(gamma_hat);
    for (int i = 0; i < modes; ++i) {
        const double top = std::max(sig(i) / k_p, gamma_hat);
        stat -= k_p * std::log(top) + sig(i) / top;
    }
    if (r0 > r_lim) {
        double tail = 0.0;
        for (int i = r_lim; i < r0; ++i) {
            tail += sig(i);
        }
        stat -= tail / gamma_hat;
    }
    return stat;
}

}  // namespace subdet
