#pragma once

#include <array>

#include "walk3lp/dynamics.hpp"

namespace walk3lp {

/// q(t) = A q(0) + B [u_c; u_r] + C v.
struct TransitionSet {
  Mat12 A = Mat12::Identity();
  Mat12x8 B = Mat12x8::Zero();
  Mat12x5 C = Mat12x5::Zero();

  Vec12 apply(const Vec12& q0, const Vec8& u, const Vec5& v) const {
    return A * q0 + B * u + C * v;
  }
};

/// Exact propagation of one constant-coefficient phase. Axes are decoupled;
/// per axis the coordinates with zero acceleration rows (fixed feet) are
/// integrated as polynomials and the remaining block is diagonalized once, so
/// every query only evaluates scalar cosh/sinh-type kernels per mode.
class PhasePropagator {
 public:
  PhasePropagator() = default;
  explicit PhasePropagator(const PhaseDynamics& dyn);

  /// Transition over a duration `tau` >= 0 with the torque time origin at the
  /// start of the interval.
  TransitionSet over(double tau) const;

  /// Direct state propagation without forming the matrices.
  Vec12 propagate(const Vec12& q0, const TorqueProfile& u, const Vec5& v,
                  double tau) const;

  const PhaseDynamics& dynamics() const { return dyn_; }

 private:
  struct Kernels {
    Mat6 ch, sh, p2, p3, csh;  // cosh, sinh/w, (ch-1)/w^2, (sh-t)/w^2, Cx*sh
  };
  Kernels kernels(double tau) const;

  using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
  struct AxisModes {
    std::array<int, 3> active{};   // state indices with dynamics
    std::array<int, 3> passive{};  // state indices with zero acceleration
    int n_active = 0;
    int n_passive = 0;
    Small modes, modes_inv, coupling;  // coupling = Cx(active, passive)
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> eig;
  };

  PhaseDynamics dyn_;
  std::array<AxisModes, 2> axes_;
};

/// Closed-form transitions for one step: double support on [0, T_ds], then
/// single support on [T_ds, T].
class StepTransition {
 public:
  StepTransition() = default;
  StepTransition(const ContinuousDynamics& dyn);

  /// Throws std::out_of_range for t outside [0, T].
  TransitionSet at(double t) const;

  /// Propagates from phase time t_from to t_to (0 <= t_from <= t_to <= T) with
  /// the torque profile expressed in phase time.
  Vec12 propagate(const Vec12& q, const TorqueProfile& u, const Vec5& v,
                  double t_from, double t_to) const;

  double step_time() const { return step_time_; }
  double double_support_time() const { return ds_time_; }
  const ContinuousDynamics& dynamics() const { return dyn_; }

 private:
  ContinuousDynamics dyn_;
  PhasePropagator ds_;
  PhasePropagator ss_;
  TransitionSet ds_end_;
  double step_time_ = 0;
  double ds_time_ = 0;
};

/// Free-function form of the step transition.
TransitionSet transition_matrices(const ContinuousDynamics& dyn, double t);

/// q(t) for a full-step torque profile.
StateVec propagate(const ContinuousDynamics& dyn, const StateVec& q0,
                   const TorqueProfile& torque, const ConstVec& v, double t);

}  // namespace walk3lp
