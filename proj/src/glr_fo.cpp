#include "subdet/glr_fo.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

namespace subdet {

namespace {

double stationary_lhs(double gamma, std::span<const double> mu) {
    double s = 0.0;
    for (const double m : mu) {
        s += 1.0 / (1.0 + gamma * m);
    }
    return s;
}

double log_objective_at(double a, double gamma, std::span<const double> mu) {
    double s = a * std::log(gamma);
    for (const double m : mu) {
        s += std::log(1.0 / gamma + m);
    }
    return s;
}

std::span<const double> as_span(const RealVector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

GammaEstimate gamma_root(double a, std::span<const double> mu) {
    const auto m = static_cast<int>(mu.size());
    int zeros = 0;
    double pos_sum = 0.0;
    for (const double v : mu) {
        if (v == 0.0) {
            ++zeros;
        } else {
            pos_sum += v;
        }
    }
    if (!(static_cast<double>(zeros) < a && a < static_cast<double>(m))) {
        std::ostringstream msg;
        msg << "gamma_root requires #{mu_j = 0} < a < len(mu); got a=" << a << ", len=" << m
            << ", zeros=" << zeros;
        throw PreconditionError(msg.str());
    }
    const double mean_pos = pos_sum / (m - zeros);

    double lo = 1.0 / mean_pos;
    double hi = lo;
    while (stationary_lhs(lo, mu) <= a && lo > 1e-300) {
        lo *= 0.5;
    }
    while (stationary_lhs(hi, mu) >= a && hi < 1e300) {
        hi *= 2.0;
    }
    int iterations = 0;
    while (hi - lo > 1e-15 * hi && iterations < 400) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi)) {
            break;
        }
        if (stationary_lhs(mid, mu) > a) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++iterations;
    }
    GammaEstimate est;
    est.gamma_hat = 0.5 * (lo + hi);
    est.log_objective = log_objective_at(a, est.gamma_hat, mu);
    est.iterations = iterations;
    assert(std::abs(stationary_lhs(est.gamma_hat, mu) - a) <= 1e-12);
    return est;
}

GlrInput::GlrInput(ComplexMatrix z_p, ComplexMatrix z_s, std::optional<ComplexMatrix> h, int r)
    : z_p_(std::move(z_p)), z_s_(std::move(z_s)), h_(std::move(h)), r_(r) {
    assert(!h_ || (h_->rows() == z_p_.rows()));
}

const ComplexMatrix& GlrInput::whitened_primary() {
    if (!whitened_) {
        const HermitianMatrix s_s(z_s_ * z_s_.adjoint());
        whitening_ = inv_sqrt(s_s).mat();
        whitened_ = *whitening_ * z_p_;
    }
    return *whitened_;
}

const ComplexMatrix& GlrInput::whitened_subspace_basis() {
    if (!basis_) {
        if (!h_) {
            throw PreconditionError("known-subspace statistic requires the basis H");
        }
        whitened_primary();  // ensures the whitening transform exists
        const ComplexMatrix g = *whitening_ * *h_;
        Eigen::HouseholderQR<ComplexMatrix> qr(g);
        basis_ = qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
    }
    return *basis_;
}

const RealVector& GlrInput::m0_eigenvalues() {
    if (!m0_eigs_) {
        const ComplexMatrix& y = whitened_primary();
        m0_eigs_ = hermitian_eig(HermitianMatrix(y.adjoint() * y)).values;
    }
    return *m0_eigs_;
}

const RealVector& GlrInput::m1_eigenvalues() {
    if (!m1_eigs_) {
        const ComplexMatrix& y = whitened_primary();
        const ComplexMatrix proj = whitened_subspace_basis().adjoint() * y;
        m1_eigs_ = hermitian_eig(HermitianMatrix(y.adjoint() * y - proj.adjoint() * proj)).values;
    }
    return *m1_eigs_;
}

const RealVector& GlrInput::whitened_gram_eigenvalues() {
    if (!tp_eigs_) {
        const ComplexMatrix& y = whitened_primary();
        tp_eigs_ = hermitian_eig(HermitianMatrix(y * y.adjoint())).values;
    }
    return *tp_eigs_;
}

double stat_fo_ks_he(GlrInput& in) {
    const RealVector& m0 = in.m0_eigenvalues();
    const RealVector& m1 = in.m1_eigenvalues();
    double log_ratio = 0.0;
    for (Eigen::Index i = 0; i < m0.size(); ++i) {
        log_ratio += std::log1p(std::max(m0(i), 0.0)) - std::log1p(std::max(m1(i), 0.0));
    }
    return std::exp(log_ratio);
}

double stat_fo_ks_phe(GlrInput& in) {
    const int n = in.n();
    const int k_p = in.k_p();
    const int k = in.k_total();
    if (!(in.r() < n && std::min(k_p, n - in.r()) * k > n * k_p)) {
        std::ostringstream msg;
        msg << "FO-KS-PHE requires r < N and min(K_P, N-r) > N*K_P/K; got N=" << n
            << ", K_P=" << k_p << ", K_S=" << in.k_s() << ", r=" << in.r();
        throw PreconditionError(msg.str());
    }
    const double a = static_cast<double>(k_p) * (k - n) / k;
    const RealVector mu0 = clamp_rank_noise(in.m0_eigenvalues());
    const RealVector mu1 = clamp_rank_noise(in.m1_eigenvalues());
    const GammaEstimate g0 = gamma_root(a, as_span(mu0));
    const GammaEstimate g1 = gamma_root(a, as_span(mu1));
    return std::exp(g0.log_objective - g1.log_objective);
}

double stat_fo_us_he(GlrInput& in) {
    const RealVector& sig = in.whitened_gram_eigenvalues();  // ascending
    const int n = in.n();
    double log_stat = 0.0;
    if (std::min(n, in.k_p()) >= in.r() + 1) {
        for (int i = n - in.r(); i < n; ++i) {
            log_stat += std::log1p(std::max(sig(i), 0.0));
        }
    } else {
        for (int i = 0; i < n; ++i) {
            log_stat += std::log1p(std::max(sig(i), 0.0));
        }
    }
    return std::exp(log_stat);
}

double stat_fo_us_phe(GlrInput& in) {
    const int n = in.n();
    const int k_p = in.k_p();
    const int k = in.k_total();
    const int r = in.r();
    if (!(std::min(n, k_p) >= r + 1 && std::min(n, k_p) * k > n * k_p + r * k)) {
        std::ostringstream msg;
        msg << "FO-US-PHE requires min(N,K_P) >= r+1 and min(N,K_P) > N*K_P/K + r; got N=" << n
            << ", K_P=" << k_p << ", K_S=" << in.k_s() << ", r=" << r;
        throw PreconditionError(msg.str());
    }
    const RealVector sig = clamp_rank_noise(in.whitened_gram_eigenvalues());  // ascending
    const double a0 = static_cast<double>(n) * in.k_s() / k;
    const double a1 = a0 - r;
    const GammaEstimate g0 = gamma_root(a0, as_span(sig));
    const GammaEstimate g1 =
        gamma_root(a1, std::span<const double>(sig.data(), static_cast<std::size_t>(n - r)));
    return std::exp(g0.log_objective - g1.log_objective);
}

}  // namespace subdet
