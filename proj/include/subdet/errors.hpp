#pragma once

#include <stdexcept>
#include <string>

namespace subdet {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Eigendecomposition iteration failed to converge.
struct EigenConvergenceError : Error {
    EigenConvergenceError(int dim, double cond_estimate);

    int dim;
    double cond_estimate;
};

// Input expected to be Hermitian positive definite is not.
struct NotPositiveDefiniteError : Error {
    NotPositiveDefiniteError(const std::string& context, double min_eigenvalue, int pivot = -1);

    double min_eigenvalue;  // smallest eigenvalue seen, when known
    int pivot;              // failing pivot index for factorizations, -1 otherwise
};

// A dimension or solvability condition required by a detector/estimator does not hold.
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& condition);

    std::string condition;
};

}  // namespace subdet
