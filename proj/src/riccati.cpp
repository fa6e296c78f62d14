#include "walk3lp/riccati.hpp"

#include <algorithm>
#include <sstream>

namespace walk3lp {

DareResult solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                      int max_iterations, double tolerance) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols()) {
    throw std::invalid_argument("dare: inconsistent matrix sizes");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Ak = A;
  Eigen::MatrixXd Gk = B * R.llt().solve(B.transpose());
  Eigen::MatrixXd Hk = Q;

  DareResult out;
  for (int k = 1; k <= max_iterations; ++k) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + Gk * Hk);
    const Eigen::MatrixXd w1 = lu.solve(Ak);
    const Eigen::MatrixXd w2 = lu.solve(Gk);
    const Eigen::MatrixXd h_next = Hk + Ak.transpose() * Hk * w1;
    const Eigen::MatrixXd g_next = Gk + Ak * w2 * Ak.transpose();
    Ak = Ak * w1;
    const double change = (h_next - Hk).cwiseAbs().maxCoeff() /
                          std::max(1.0, h_next.cwiseAbs().maxCoeff());
    Hk = 0.5 * (h_next + h_next.transpose());
    Gk = 0.5 * (g_next + g_next.transpose());
    out.iterations = k;
    if (!Hk.allFinite()) break;
    if (change < tolerance) break;
  }

  const Eigen::MatrixXd& X = Hk;
  const Eigen::MatrixXd S = R + B.transpose() * X * B;
  const Eigen::MatrixXd rhs = A.transpose() * X * A -
                              A.transpose() * X * B * S.ldlt().solve(B.transpose() * X * A) + Q;
  const double scale = std::max({1.0, X.cwiseAbs().maxCoeff(),
                                  (A.transpose() * X * A).cwiseAbs().maxCoeff()});
  out.residual = (X - rhs).cwiseAbs().maxCoeff() / scale;
  out.X = X;
  if (!X.allFinite() || out.residual > 1e-8) {
    std::ostringstream msg;
    msg << "dare: no convergence after " << out.iterations
        << " doubling steps (relative residual " << out.residual << ")";
    throw RiccatiError(msg.str());
  }
  return out;
}

}  // namespace walk3lp
