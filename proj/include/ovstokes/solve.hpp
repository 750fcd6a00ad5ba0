#pragma once

#include <optional>
#include <string>

#include <Eigen/Sparse>

namespace ovs {

struct SolveReport {
    double residual = 0.0;  // ||Mx - b|| / ||b||
    std::string status;     // "ok" or the failure message
    std::string backend;    // umfpack | sparselu
    std::optional<double> kappa;
    double seconds = 0.0;
};

// Jacobi equilibrated direct solve; throws SolverError when the factorization
// fails or the relative residual exceeds tol
Eigen::VectorXd solve_direct(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& b, SolveReport& report,
                             double tol = 1e-9);

// kappa_2 of D^{-1/2} M D^{-1/2}, D = |diag M|; zero diagonal entries take the
// mean of the nonzero |diagonal| entries. M must be symmetric. When the double
// spectrum is too narrow to resolve the smallest eigenvalue it is recomputed in
// quad precision; +inf beyond that.
double condition_number(const Eigen::SparseMatrix<double>& M, int size_cap = 20000);

// the same scaling as a dense matrix (exposed for tests)
Eigen::MatrixXd jacobi_scaled(const Eigen::SparseMatrix<double>& M);

} // namespace ovs
