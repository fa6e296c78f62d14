#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace walk3lp {

class RiccatiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DareResult {
  Eigen::MatrixXd X;
  int iterations = 0;
  double residual = 0;  // max-abs of the Riccati equation residual, relative
};

/// Stabilizing solution of X = A'XA - A'XB (R + B'XB)^-1 B'XA + Q via the
/// structured doubling algorithm. Throws RiccatiError on non-convergence.
DareResult solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                      int max_iterations = 100, double tolerance = 1e-13);

}  // namespace walk3lp
