#pragma once

#include <Eigen/Dense>

namespace walk3lp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat6x4 = Eigen::Matrix<double, 6, 4>;
using Mat6x5 = Eigen::Matrix<double, 6, 5>;
using Mat12x8 = Eigen::Matrix<double, 12, 8>;
using Mat12x5 = Eigen::Matrix<double, 12, 5>;

// Horizontal positions are 2-vectors [sagittal, lateral] in the frame
// attached to the slope. The 12-vector state is
//   [x_swing(2), x_pelvis(2), x_stance(2), v_swing(2), v_pelvis(2), v_stance(2)].
namespace idx {
inline constexpr int kSwing = 0;
inline constexpr int kPelvis = 2;
inline constexpr int kStance = 4;
inline constexpr int kVel = 6;
inline constexpr int kSag = 0;
inline constexpr int kLat = 1;
}  // namespace idx

/// Full 3LP state q = [x; xdot].
struct StateVec {
  Vec12 q = Vec12::Zero();

  StateVec() = default;
  explicit StateVec(const Vec12& value) : q(value) {}

  Vec2 swing() const { return q.segment<2>(idx::kSwing); }
  Vec2 pelvis() const { return q.segment<2>(idx::kPelvis); }
  Vec2 stance() const { return q.segment<2>(idx::kStance); }
  Vec2 swing_vel() const { return q.segment<2>(idx::kVel + idx::kSwing); }
  Vec2 pelvis_vel() const { return q.segment<2>(idx::kVel + idx::kPelvis); }
  Vec2 stance_vel() const { return q.segment<2>(idx::kVel + idx::kStance); }
};

/// Piecewise-linear torques u(t) = constant + t * ramp with entries
/// [swing hip sagittal, swing hip lateral, ankle sagittal, ankle lateral].
struct TorqueProfile {
  Vec4 constant = Vec4::Zero();
  Vec4 ramp = Vec4::Zero();

  TorqueProfile() = default;
  TorqueProfile(const Vec4& c, const Vec4& r) : constant(c), ramp(r) {}
  explicit TorqueProfile(const Vec8& stacked)
      : constant(stacked.head<4>()), ramp(stacked.tail<4>()) {}

  Vec8 stacked() const {
    Vec8 out;
    out << constant, ramp;
    return out;
  }
  /// Same profile expressed with time origin moved to `t0`.
  TorqueProfile rebased(double t0) const { return {constant + t0 * ramp, ramp}; }
};

/// Constant excitation v = [d, sin(theta + phi), sin(phi), F_drag, F_lateral].
struct ConstVec {
  Vec5 v = Vec5::Zero();

  ConstVec() = default;
  explicit ConstVec(const Vec5& value) : v(value) {}

  double support() const { return v(0); }
  double drag() const { return v(3); }
  double lateral_force() const { return v(4); }
};

}  // namespace walk3lp
