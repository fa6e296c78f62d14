#pragma once

#include <stdexcept>

#include "walk3lp/transition.hpp"

namespace walk3lp {

using Mat8x12 = Eigen::Matrix<double, 8, 12>;
using Mat4x12 = Eigen::Matrix<double, 4, 12>;
using Mat12x8m = Eigen::Matrix<double, 12, 8>;

/// Constant operators of the periodic-gait and error equations.
///   M: full state -> relative vectors s1 = swing - stance, s2 = pelvis - stance
///      and their derivatives
///   N: swing- and stance-foot velocity blocks
///   O: lateral sign flip of the 8-vector
///   Mhat: places an 8-vector error on swing and pelvis, leaving the stance foot
struct SymmetryOps {
  Mat12 S;
  Mat8x12 M;
  Mat4x12 N;
  Mat8 O;
  Mat12x8m Mhat;
};

SymmetryOps build_symmetry_ops();

class GaitSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One step of the open-loop periodic gait, starting at support exchange.
struct PeriodicGait {
  Vec12 Qbar = Vec12::Zero();
  Vec8 Ubar = Vec8::Zero();
  ConstVec Vbar;
  GaitConfig config;
  BodyModel body;
  StepTransition step;
  TransitionSet end;  // transition over the full step

  /// qbar(t) = A(t) Qbar + B(t) Ubar + C(t) Vbar; throws outside [0, T].
  StateVec nominal_state(double t) const;
  TorqueProfile torques() const { return TorqueProfile(Ubar); }
};

struct GaitResiduals {
  double periodicity = 0;    // max |M Q - O M S q(T)|
  double foot_velocity = 0;  // max |N Q|, plus final swing velocity
  double speed = 0;          // |mean pelvis speed - desired|
};

/// Solves the periodicity and foot-velocity equations with the ankle policy
/// and speed constraint; the remaining freedom minimizes the hip torque
/// parameters. The stance foot starts at the origin.
PeriodicGait solve_periodic_gait(const ContinuousDynamics& dyn);
PeriodicGait solve_periodic_gait(const BodyModel& body, const GaitConfig& config);

StateVec nominal_state(const PeriodicGait& gait, double t);

GaitResiduals periodic_residuals(const PeriodicGait& gait);

/// Dimension of the null space of the periodicity and foot-velocity equations
/// in the unknowns [Q; U] (translations of the whole walker included).
int periodic_null_dimension(const ContinuousDynamics& dyn);

}  // namespace walk3lp
