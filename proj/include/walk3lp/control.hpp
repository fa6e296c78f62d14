#pragma once

#include <optional>

#include "walk3lp/gait.hpp"

namespace walk3lp {

using Mat2x8 = Eigen::Matrix<double, 2, 8>;

/// Linear error dynamics around a periodic gait.
///   E[k+1] = Ahat E[k] + Bhat dU[k],  Chat E[k+1] = 0
/// and inside a phase e(t) = Atilde(t) E[k] + Btilde(t) dU[k].
class ErrorModel {
 public:
  ErrorModel() = default;
  explicit ErrorModel(const PeriodicGait& gait);

  const Mat8& Ahat() const { return ahat_; }
  const Mat8& Bhat() const { return bhat_; }
  const Mat2x8& Chat() const { return chat_; }

  Mat8 Atilde(double t) const;
  Mat8 Btilde(double t) const;
  void intra_phase(double t, Mat8& a, Mat8& b) const;

  double step_time() const { return step_.step_time(); }
  /// Body weight times leg length, the natural torque scale [N m].
  double torque_unit() const { return torque_unit_; }
  const SymmetryOps& ops() const { return ops_; }

 private:
  SymmetryOps ops_;
  StepTransition step_;
  Mat8 ahat_ = Mat8::Zero();
  Mat8 bhat_ = Mat8::Zero();
  Mat2x8 chat_ = Mat2x8::Zero();
  double torque_unit_ = 1;
};

/// Q = state * I on E; R = input * I on the hip torque parameters measured in
/// units of torque_unit() (ramps in torque_unit() per second).
struct ControlWeights {
  double state = 1.0;
  double input = 1e-2;
};

/// Indices of the hip torque parameters in dU = [u_c; u_r].
inline constexpr int kHipInputs[4] = {0, 1, 4, 5};

struct DlqrGain {
  Mat8 K = Mat8::Zero();  // dU = -K E; ankle rows are zero
  ControlWeights weights;
  Mat8 closed_loop = Mat8::Zero();  // Ahat - Bhat K
  double spectral_radius = 0;
  int riccati_iterations = 0;
};

/// Constrained DLQR on the hip inputs: the constraint Chat E[k+1] = 0 is solved
/// exactly and the remaining input directions are optimized.
DlqrGain dlqr_gain(const ErrorModel& em, const ControlWeights& weights = {});

/// e = M (q - qbar) for states at the same phase time.
Vec8 measure_error(const StateVec& q, const StateVec& qbar);

struct Projection {
  Vec8 du = Vec8::Zero();  // correction dU
  Vec8 E = Vec8::Zero();   // equivalent error at the phase start
  double rcond = 0;        // reciprocal condition estimate of the reduced system
};

/// Solves [Atilde(t) Btilde(t); K I] [E; dU] = [e; 0] through the reduced system
/// (Atilde - Btilde K) E = e, dU = -K E. Returns nothing when that system is
/// numerically singular (condition number above 1e12).
std::optional<Projection> time_project(const Vec8& e, double t, const ErrorModel& em,
                                       const Mat8& K);

/// Error model and gain for one gait.
struct Controller {
  ErrorModel model;
  DlqrGain gain;

  Controller() = default;
  Controller(const PeriodicGait& gait, const ControlWeights& weights = {})
      : model(gait), gain(dlqr_gain(model, weights)) {}

  std::optional<Projection> project(const Vec8& e, double t) const {
    return time_project(e, t, model, gain.K);
  }
};

}  // namespace walk3lp
