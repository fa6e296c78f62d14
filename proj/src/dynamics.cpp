#include "walk3lp/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace walk3lp {

namespace {

using idx::kLat;
using idx::kPelvis;
using idx::kSag;
using idx::kStance;
using idx::kSwing;

// Columns of the constant vector.
constexpr int kSupportCol = 0;
constexpr int kTorsoCol = 1;
constexpr int kSlopeCol = 2;
constexpr int kDragCol = 3;
constexpr int kLateralCol = 4;

struct Terms {
  double g, H, w;
  double m_sw, m_st, m_t;
  double I_sw, I_st;
  double torso_offset;
};

// Generalized-force row: coefficients of the per-axis force on one coordinate.
struct ForceRow {
  Vec6 x = Vec6::Zero();
  Vec4 u = Vec4::Zero();
  Vec5 v = Vec5::Zero();
};

ForceRow operator*(double s, const ForceRow& r) { return {s * r.x, s * r.u, s * r.v}; }
ForceRow operator+(const ForceRow& a, const ForceRow& b) {
  return {a.x + b.x, a.u + b.u, a.v + b.v};
}

void set_row(PhaseDynamics& out, int row, const ForceRow& r) {
  out.Cx.row(row) = r.x.transpose();
  out.Cu.row(row) = r.u.transpose();
  out.Cv.row(row) = r.v.transpose();
}

// Pelvis force terms shared by both phases: ankle torque, torso lean,
// tangential gravity and external forces.
ForceRow pelvis_common(const Terms& k, int axis) {
  ForceRow f;
  f.u(2 + axis) = 1.0 / k.H;
  if (axis == kSag) {
    const double lean = k.m_t * k.g * k.torso_offset / k.H;
    f.v(kTorsoCol) = lean;
    f.v(kSlopeCol) = -k.g * (0.5 * k.m_st + k.m_t + 0.5 * k.m_sw) - lean;
    f.v(kDragCol) = 1.0;
  } else {
    f.v(kLateralCol) = 1.0;
  }
  return f;
}

PhaseDynamics single_support(const Terms& k) {
  PhaseDynamics out;
  const double H2 = k.H * k.H;
  Eigen::Matrix2d mass;  // coordinates [pelvis, swing]
  mass(0, 0) = 0.25 * k.m_st + k.I_st / H2 + k.m_t + 0.25 * k.m_sw + k.I_sw / H2;
  mass(1, 1) = 0.25 * k.m_sw + k.I_sw / H2;
  mass(0, 1) = mass(1, 0) = 0.25 * k.m_sw - k.I_sw / H2;
  const Eigen::Matrix2d inv = mass.inverse();

  // Stance pendulum (inverted, carries torso and swing leg) and swing pendulum
  // (hanging from the hip) stiffnesses.
  const double k_stance = k.g * (0.5 * k.m_st + k.m_t + k.m_sw) / k.H;
  const double k_swing = k.g * k.m_sw / (2.0 * k.H);

  for (int axis = 0; axis < 2; ++axis) {
    ForceRow fp = pelvis_common(k, axis);
    fp.x(kPelvis + axis) += k_stance - k_swing;
    fp.x(kStance + axis) -= k_stance;
    fp.x(kSwing + axis) += k_swing;

    ForceRow fs;
    fs.x(kSwing + axis) = -k_swing;
    fs.x(kPelvis + axis) = k_swing;
    fs.u(axis) = 1.0 / k.H;
    if (axis == kSag) {
      fs.v(kSlopeCol) = -0.5 * k.g * k.m_sw;
    } else {
      // Hip offsets: stance hip at -d w/2, swing hip at +d w/2. The torso
      // weight acts at the pelvis centre since the stance hip holds it upright.
      fp.v(kSupportCol) =
          0.5 * k.w * (k.g * (k.m_sw - 0.5 * k.m_st) / k.H - k_swing);
      fs.v(kSupportCol) = k_swing * 0.5 * k.w;
    }
    set_row(out, kPelvis + axis, inv(0, 0) * fp + inv(0, 1) * fs);
    set_row(out, kSwing + axis, inv(1, 0) * fp + inv(1, 1) * fs);
  }
  return out;
}

PhaseDynamics double_support(const Terms& k) {
  PhaseDynamics out;
  const double H2 = k.H * k.H;
  const double mass =
      0.25 * k.m_st + k.I_st / H2 + k.m_t + 0.25 * k.m_sw + k.I_sw / H2;
  // Both legs are inverted pendulums; the torso weight is shared equally.
  const double k_front = k.g * (0.5 * k.m_st + 0.5 * k.m_t) / k.H;
  const double k_rear = k.g * (0.5 * k.m_sw + 0.5 * k.m_t) / k.H;

  for (int axis = 0; axis < 2; ++axis) {
    ForceRow fp = pelvis_common(k, axis);
    fp.x(kPelvis + axis) += k_front + k_rear;
    fp.x(kStance + axis) -= k_front;
    fp.x(kSwing + axis) -= k_rear;
    if (axis == kLat) {
      fp.v(kSupportCol) = (k_rear - k_front) * 0.5 * k.w;
    }
    set_row(out, kPelvis + axis, (1.0 / mass) * fp);
  }
  return out;
}

}  // namespace

ContinuousDynamics assemble_dynamics(const BodyModel& body, const GaitConfig& config) {
  body.validate();
  config.validate();
  ContinuousDynamics dyn;
  dyn.body = body;
  dyn.config = config;
  dyn.pelvis_height = body.leg_length * std::cos(config.slope);

  const Terms k{body.gravity,           dyn.pelvis_height,     body.pelvis_width,
                body.swing_leg_mass,    body.stance_leg_mass,  body.torso_mass,
                body.swing_leg_inertia, body.stance_leg_inertia, body.torso_com_offset};
  dyn.single_support = single_support(k);
  dyn.double_support = double_support(k);
  return dyn;
}

Mat12 support_exchange_matrix() {
  Mat6 sx = Mat6::Zero();
  sx.block<2, 2>(kSwing, kStance).setIdentity();
  sx.block<2, 2>(kPelvis, kPelvis).setIdentity();
  sx.block<2, 2>(kStance, kSwing).setIdentity();
  Mat12 s = Mat12::Zero();
  s.topLeftCorner<6, 6>() = sx;
  s.bottomRightCorner<6, 6>() = sx;
  return s;
}

StateVec exchange_support(const StateVec& q) {
  Vec12 out = q.q;
  for (int base : {0, idx::kVel}) {
    out.segment<2>(base + kSwing) = q.q.segment<2>(base + kStance);
    out.segment<2>(base + kStance) = q.q.segment<2>(base + kSwing);
  }
  return StateVec(out);
}

StateVec mirror_lateral(const StateVec& q) {
  Vec12 out = q.q;
  for (int i = kLat; i < 12; i += 2) out(i) = -out(i);
  return StateVec(out);
}

TorqueProfile mirror_lateral(const TorqueProfile& u) {
  TorqueProfile out = u;
  out.constant(1) = -out.constant(1);
  out.constant(3) = -out.constant(3);
  out.ramp(1) = -out.ramp(1);
  out.ramp(3) = -out.ramp(3);
  return out;
}

StateVec translated(const StateVec& q, const Vec2& offset) {
  StateVec out = q;
  for (int base : {kSwing, kPelvis, kStance}) out.q.segment<2>(base) += offset;
  return out;
}

}  // namespace walk3lp
