#include "subdet/linalg.hpp"

#include <cassert>
#include <cmath>
#include <complex>
#include <sstream>

namespace subdet {

EigenConvergenceError::EigenConvergenceError(int dim_, double cond_estimate_)
    : Error("hermitian_eig did not converge: dim=" + std::to_string(dim_) +
            ", condition estimate=" + std::to_string(cond_estimate_)),
      dim(dim_),
      cond_estimate(cond_estimate_) {}

NotPositiveDefiniteError::NotPositiveDefiniteError(const std::string& context,
                                                   double min_eigenvalue_, int pivot_)
    : Error([&] {
          std::ostringstream msg;
          msg << context << ": matrix is not positive definite (smallest eigenvalue "
              << min_eigenvalue_;
          if (pivot_ >= 0) msg << ", failing pivot " << pivot_;
          msg << ")";
          return msg.str();
      }()),
      min_eigenvalue(min_eigenvalue_),
      pivot(pivot_) {}

PreconditionError::PreconditionError(const std::string& condition_)
    : Error("precondition violated: " + condition_), condition(condition_) {}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a) {
    assert(a.rows() == a.cols());
    a_ = 0.5 * (a + a.adjoint());
}

EigenSystem hermitian_eig(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.mat());
    if (solver.info() != Eigen::Success) {
        // Crude conditioning hint from Gershgorin-style row sums.
        const double row_max = a.mat().cwiseAbs().rowwise().sum().maxCoeff();
        double diag_min = row_max;
        for (Eigen::Index i = 0; i < a.dim(); ++i) {
            diag_min = std::min(diag_min, std::abs(a.mat()(i, i)));
        }
        const double cond = row_max / std::max(diag_min, 1e-300);
        throw EigenConvergenceError(static_cast<int>(a.dim()), cond);
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianMatrix inv_sqrt(const HermitianMatrix& a) {
    const EigenSystem es = hermitian_eig(a);
    const Eigen::Index n = a.dim();
    const double max_ev = es.values(n - 1);
    const double min_ev = es.values(0);
    if (!(min_ev > 1e-12 * max_ev) || !(max_ev > 0.0)) {
        throw NotPositiveDefiniteError("inv_sqrt", min_ev);
    }
    const RealVector scale = es.values.cwiseSqrt().cwiseInverse();
    return HermitianMatrix(es.vectors * scale.asDiagonal() * es.vectors.adjoint());
}

ComplexMatrix cholesky(const HermitianMatrix& a) {
    const Eigen::Index n = a.dim();
    const ComplexMatrix& m = a.mat();
    ComplexMatrix l = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = m(j, j).real();
        for (Eigen::Index k = 0; k < j; ++k) {
            d -= std::norm(l(j, k));
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw NotPositiveDefiniteError("cholesky", d, static_cast<int>(j));
        }
        const double diag = std::sqrt(d);
        l(j, j) = diag;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            std::complex<double> s = m(i, j);
            for (Eigen::Index k = 0; k < j; ++k) {
                s -= l(i, k) * std::conj(l(j, k));
            }
            l(i, j) = s / diag;
        }
    }
    return l;
}

RealVector clamp_rank_noise(const RealVector& eigenvalues, double rel_cut) {
    const double top = eigenvalues.size() > 0 ? std::max(eigenvalues.maxCoeff(), 0.0) : 0.0;
    const double cut = rel_cut * top;
    RealVector out(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        out(i) = eigenvalues(i) > cut ? eigenvalues(i) : 0.0;
    }
    return out;
}

ComplexMatrix sample_colored_gaussian(const ComplexMatrix& chol_factor, Eigen::Index cols,
                                      RngStream& rng) {
    const Eigen::Index n = chol_factor.rows();
    ComplexMatrix w(n, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            w(i, j) = rng.complex_normal();
        }
    }
    return chol_factor * w;
}

}  // namespace subdet
