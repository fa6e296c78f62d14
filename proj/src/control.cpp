#include "walk3lp/control.hpp"

#include <cmath>

#include "walk3lp/riccati.hpp"

namespace walk3lp {

ErrorModel::ErrorModel(const PeriodicGait& gait)
    : ops_(build_symmetry_ops()), step_(gait.step) {
  const Mat8x12 oms = ops_.O * ops_.M * ops_.S;
  ahat_ = oms * gait.end.A * ops_.Mhat;
  bhat_ = oms * gait.end.B;
  chat_.setZero();
  chat_.block<2, 2>(0, 4).setIdentity();
  torque_unit_ = gait.body.total_mass * gait.body.gravity * gait.body.leg_length;
}

void ErrorModel::intra_phase(double t, Mat8& a, Mat8& b) const {
  const TransitionSet ts = step_.at(t);
  a = ops_.M * ts.A * ops_.Mhat;
  b = ops_.M * ts.B;
}

Mat8 ErrorModel::Atilde(double t) const {
  Mat8 a, b;
  intra_phase(t, a, b);
  return a;
}

Mat8 ErrorModel::Btilde(double t) const {
  Mat8 a, b;
  intra_phase(t, a, b);
  return b;
}

DlqrGain dlqr_gain(const ErrorModel& em, const ControlWeights& weights) {
  if (!(weights.state > 0) || !(weights.input > 0)) {
    throw std::invalid_argument("dlqr: weights must be positive");
  }
  Eigen::Matrix<double, 8, 4> bh;
  const double unit = em.torque_unit();
  for (int j = 0; j < 4; ++j) bh.col(j) = unit * em.Bhat().col(kHipInputs[j]);

  // Chat (Ahat E + Bh u) = 0  =>  u = -G^+ Chat Ahat E + Nc xi.
  const Eigen::Matrix<double, 2, 4> g = em.Chat() * bh;
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(g, Eigen::ComputeFullV);
  if (svd.singularValues()(1) < 1e-12 * std::max(1.0, svd.singularValues()(0))) {
    throw std::runtime_error("dlqr: hip torques cannot reach the swing-foot velocity");
  }
  const Eigen::Matrix<double, 4, 2> g_pinv =
      g.transpose() * (g * g.transpose()).inverse();
  const Eigen::Matrix<double, 4, 2> nc = svd.matrixV().rightCols<2>();

  const Eigen::Matrix<double, 4, 8> k0 = g_pinv * em.Chat() * em.Ahat();
  const Mat8 a_red = em.Ahat() - bh * k0;
  const Eigen::Matrix<double, 8, 2> b_red = bh * nc;

  const Eigen::MatrixXd q = weights.state * Eigen::MatrixXd::Identity(8, 8);
  const Eigen::MatrixXd r = weights.input * Eigen::MatrixXd::Identity(2, 2);
  const DareResult dare = solve_dare(a_red, b_red, q, r);
  const Eigen::Matrix<double, 2, 8> k_xi =
      (r + b_red.transpose() * dare.X * b_red).ldlt().solve(b_red.transpose() * dare.X * a_red);

  const Eigen::Matrix<double, 4, 8> k_hip = unit * (k0 + nc * k_xi);
  DlqrGain out;
  out.weights = weights;
  out.riccati_iterations = dare.iterations;
  for (int j = 0; j < 4; ++j) out.K.row(kHipInputs[j]) = k_hip.row(j);
  out.closed_loop = em.Ahat() - em.Bhat() * out.K;
  out.spectral_radius = out.closed_loop.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

Vec8 measure_error(const StateVec& q, const StateVec& qbar) {
  static const SymmetryOps ops = build_symmetry_ops();
  return ops.M * (q.q - qbar.q);
}

std::optional<Projection> time_project(const Vec8& e, double t, const ErrorModel& em,
                                       const Mat8& K) {
  Mat8 a, b;
  em.intra_phase(t, a, b);
  // a E + b dU = e with dU = -K E.
  const Mat8 m = a - b * K;
  const Eigen::PartialPivLU<Mat8> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) return std::nullopt;
  const Vec8 E = lu.solve(e);
  Projection out;
  out.E = E;
  out.du = -K * E;
  out.rcond = rcond;
  return out;
}

}  // namespace walk3lp
