#pragma once
// Smallest eigenvalue of the symmetric pencil Q x = lambda M x with M
// positive definite, by spectrum slicing.
//
// The inertia of Q - sigma M (negative pivot count of its LDL^T) equals the
// number of pencil eigenvalues below sigma, so bisection brackets lambda_min
// without ever missing it; shifted inverse iteration from the left edge of
// the bracket then delivers the eigenvector and a Rayleigh quotient accurate
// to roughly the square of the residual.  The returned lambda IS the Rayleigh
// quotient of the returned vector, so x^T Q x = lambda x^T M x holds to
// rounding by construction.

#include <Eigen/SparseCore>

namespace igstab {

struct EigenPair {
    double lambda = 0;
    Eigen::VectorXd x;       // M-normalised then scaled to |x|_2 = 1
    double residual = 0;     // |Q x - lambda M x|_2
    int factorizations = 0;  // work counter
};

// Throws std::invalid_argument when M is not positive definite and
// std::runtime_error (with the residual in the message) when iteration fails
// to converge.
EigenPair smallest_eigenpair(const Eigen::SparseMatrix<double>& Q,
                             const Eigen::SparseMatrix<double>& M, double tol = 1e-10,
                             int max_iterations = 200);

}  // namespace igstab
