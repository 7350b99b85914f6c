#pragma once

#include <Eigen/Dense>

#include "subdet/errors.hpp"
#include "subdet/rng.hpp"

namespace subdet {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Hermitian-by-construction wrapper: stores (A + A†)/2 so round-off from
/// products like Z Z† cannot break downstream eigendecompositions.
class HermitianMatrix {
public:
    explicit HermitianMatrix(const ComplexMatrix& a);

    const ComplexMatrix& mat() const { return a_; }
    Eigen::Index dim() const { return a_.rows(); }

private:
    ComplexMatrix a_;
};

struct EigenSystem {
    RealVector values;       // ascending
    ComplexMatrix vectors;   // unitary; column i pairs with values[i]
};

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
EigenSystem hermitian_eig(const HermitianMatrix& a);

/// Inverse principal square root B = V diag(1/sqrt(lambda)) V†.
/// Requires min eigenvalue > 1e-12 * max eigenvalue.
HermitianMatrix inv_sqrt(const HermitianMatrix& a);

/// Lower-triangular Cholesky factor with positive real diagonal, L L† = A.
ComplexMatrix cholesky(const HermitianMatrix& a);

/// Draws L * W where W has i.i.d. unit-variance circular complex normal
/// entries, so the columns have covariance L L†.
ComplexMatrix sample_colored_gaussian(const ComplexMatrix& chol_factor, Eigen::Index cols,
                                      RngStream& rng);

/// Zeroes eigenvalues below rel_cut of the largest one. Exact ranks are
/// meaningless in floating point; structurally zero eigenvalues of projected
/// Grams come back as noise around 1e-16 of the largest and must read as
/// exact zeros in the scale stationary equations.
RealVector clamp_rank_noise(const RealVector& eigenvalues, double rel_cut = 1e-10);

}  // namespace subdet
