#include "walk3lp/gait.hpp"

#include <cmath>

namespace walk3lp {

namespace {

using Constraint = Eigen::Matrix<double, Eigen::Dynamic, 20>;

// Rows [M - O M S A, -O M S B] z = O M S C v and N Q = 0 on z = [Q; U].
Constraint periodic_rows(const SymmetryOps& ops, const TransitionSet& end,
                         Eigen::VectorXd& rhs, const Vec5& v) {
  Constraint rows(12, 20);
  const Mat8x12 oms = ops.O * ops.M * ops.S;
  rows.block<8, 12>(0, 0) = ops.M - oms * end.A;
  rows.block<8, 8>(0, 12) = -oms * end.B;
  rows.block<4, 12>(8, 0) = ops.N;
  rows.block<4, 8>(8, 12).setZero();
  rhs.setZero(12);
  rhs.head<8>() = oms * end.C * v;
  return rows;
}

}  // namespace

SymmetryOps build_symmetry_ops() {
  SymmetryOps ops;
  ops.S = support_exchange_matrix();

  Eigen::Matrix<double, 4, 6> mx = Eigen::Matrix<double, 4, 6>::Zero();
  mx.block<2, 2>(0, idx::kSwing).setIdentity();
  mx.block<2, 2>(0, idx::kStance) = -Eigen::Matrix2d::Identity();
  mx.block<2, 2>(2, idx::kPelvis).setIdentity();
  mx.block<2, 2>(2, idx::kStance) = -Eigen::Matrix2d::Identity();
  ops.M.setZero();
  ops.M.block<4, 6>(0, 0) = mx;
  ops.M.block<4, 6>(4, 6) = mx;

  ops.N.setZero();
  ops.N.block<2, 2>(0, idx::kVel + idx::kSwing).setIdentity();
  ops.N.block<2, 2>(2, idx::kVel + idx::kStance).setIdentity();

  ops.O.setZero();
  for (int i = 0; i < 8; ++i) ops.O(i, i) = (i % 2 == 0) ? 1.0 : -1.0;

  Eigen::Matrix<double, 6, 4> mhx = Eigen::Matrix<double, 6, 4>::Zero();
  mhx.block<2, 2>(idx::kSwing, 0).setIdentity();
  mhx.block<2, 2>(idx::kPelvis, 2).setIdentity();
  ops.Mhat.setZero();
  ops.Mhat.block<6, 4>(0, 0) = mhx;
  ops.Mhat.block<6, 4>(6, 4) = mhx;
  return ops;
}

StateVec PeriodicGait::nominal_state(double t) const {
  return StateVec(step.at(t).apply(Qbar, Ubar, Vbar.v));
}

StateVec nominal_state(const PeriodicGait& gait, double t) { return gait.nominal_state(t); }

PeriodicGait solve_periodic_gait(const BodyModel& body, const GaitConfig& config) {
  return solve_periodic_gait(assemble_dynamics(body, config));
}

PeriodicGait solve_periodic_gait(const ContinuousDynamics& dyn) {
  const SymmetryOps ops = build_symmetry_ops();
  PeriodicGait gait;
  gait.config = dyn.config;
  gait.body = dyn.body;
  gait.Vbar = dyn.config.constants();
  gait.step = StepTransition(dyn);
  gait.end = gait.step.at(dyn.config.step_time);

  const double T = dyn.config.step_time;
  const double l = dyn.body.leg_length;
  const double weight = dyn.body.total_mass * dyn.body.gravity;
  const double cop_gain = weight * dyn.body.foot_length / l;

  Eigen::VectorXd rhs;
  const Constraint periodic = periodic_rows(ops, gait.end, rhs, gait.Vbar.v);

  Constraint rows(19, 20);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(19);
  rows.setZero();
  rows.topRows(12) = periodic;
  b.head(12) = rhs;
  constexpr int kU = 12;
  constexpr int kSagAnkle = 2;
  constexpr int kLatAnkle = 3;
  const int sw = idx::kSwing + idx::kSag;
  const int st = idx::kStance + idx::kSag;
  // Lateral ankle torques vanish.
  rows(12, kU + kLatAnkle) = 1.0;
  rows(13, kU + 4 + kLatAnkle) = 1.0;
  // Sagittal CoP moves linearly, centred on the step, spanning (h/2)(L/l) each
  // side of the foot point; L = x_stance - x_swing at the step start.
  rows(14, kU + kSagAnkle) = 1.0;
  rows(14, st) = -0.5 * cop_gain;
  rows(14, sw) = 0.5 * cop_gain;
  rows(15, kU + 4 + kSagAnkle) = 1.0;
  rows(15, st) = cop_gain / T;
  rows(15, sw) = -cop_gain / T;
  // Mean sagittal pelvis speed.
  const int p = idx::kPelvis + idx::kSag;
  rows.block<1, 12>(16, 0) = gait.end.A.row(p);
  rows(16, p) -= 1.0;
  rows.block<1, 8>(16, kU) = gait.end.B.row(p);
  b(16) = dyn.config.speed * T - gait.end.C.row(p).dot(gait.Vbar.v);
  // The stance foot sits at the origin.
  rows(17, idx::kStance) = 1.0;
  rows(18, idx::kStance + 1) = 1.0;

  // Torques are measured in units of weight * leg length and each row is
  // normalized, so the rank decision is unit-free.
  const double torque_unit = weight * l;
  rows.rightCols<8>() *= torque_unit;
  for (int r = 0; r < rows.rows(); ++r) {
    const double n = rows.row(r).norm();
    if (n > 0) {
      rows.row(r) /= n;
      b(r) /= n;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > tol ? 1 : 0;
  if (rank < rows.rows()) {
    throw GaitSolveError("periodic gait: constraint system is rank deficient (rank " +
                         std::to_string(rank) + " of " + std::to_string(rows.rows()) +
                         ", T=" + std::to_string(T) + ")");
  }
  Eigen::VectorXd z = svd.solve(b);
  Eigen::MatrixXd null_basis = svd.matrixV().rightCols(20 - rank);
  z.tail<8>() *= torque_unit;
  null_basis.bottomRows<8>() *= torque_unit;

  // Remaining freedom: least hip torque parameters.
  Eigen::Matrix<double, 4, 20> hip = Eigen::Matrix<double, 4, 20>::Zero();
  hip(0, kU + 0) = hip(1, kU + 1) = hip(2, kU + 4) = hip(3, kU + 5) = 1.0;
  const Eigen::MatrixXd hn = hip * null_basis;
  const Eigen::VectorXd xi =
      hn.completeOrthogonalDecomposition().solve(-(hip * z).eval());
  z += null_basis * xi;

  gait.Qbar = z.head<12>();
  gait.Ubar = z.tail<8>();
  if (!gait.Qbar.allFinite() || !gait.Ubar.allFinite()) {
    throw GaitSolveError("periodic gait: non-finite solution");
  }
  return gait;
}

GaitResiduals periodic_residuals(const PeriodicGait& gait) {
  const SymmetryOps ops = build_symmetry_ops();
  const Vec12 qT = gait.end.apply(gait.Qbar, gait.Ubar, gait.Vbar.v);
  GaitResiduals r;
  r.periodicity = (ops.M * gait.Qbar - ops.O * ops.M * ops.S * qT).cwiseAbs().maxCoeff();
  r.foot_velocity = std::max((ops.N * gait.Qbar).cwiseAbs().maxCoeff(),
                             qT.segment<2>(idx::kVel + idx::kSwing).cwiseAbs().maxCoeff());
  const double T = gait.config.step_time;
  const double mean = (qT(idx::kPelvis) - gait.Qbar(idx::kPelvis)) / T;
  r.speed = std::abs(mean - gait.config.speed);
  return r;
}

int periodic_null_dimension(const ContinuousDynamics& dyn) {
  const SymmetryOps ops = build_symmetry_ops();
  const StepTransition step(dyn);
  Eigen::VectorXd rhs;
  const Constraint rows =
      periodic_rows(ops, step.at(dyn.config.step_time), rhs, dyn.config.constants().v);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-10 * sv(0) ? 1 : 0;
  return 20 - rank;
}

}  // namespace walk3lp
