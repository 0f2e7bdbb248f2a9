#pragma once

#include <Eigen/Dense>

namespace topobus::testing {

/// Classic two-sided Jacobi eigensolver for dense Hermitian matrices, kept
/// deliberately independent of the library's solver so it can serve as an
/// oracle. Eigenvalues ascending, eigenvectors as columns.
struct JacobiResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  int sweeps = 0;
};

JacobiResult jacobi_hermitian(Eigen::MatrixXcd a, double tolerance = 1e-14,
                              int max_sweeps = 100);

}  // namespace topobus::testing
