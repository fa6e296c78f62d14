#pragma once

#include "walk3lp/anthropometry.hpp"
#include "walk3lp/gait_config.hpp"
#include "walk3lp/types.hpp"

namespace walk3lp {

/// xddot = Cx x + Cu u + Cv v for one contact phase.
struct PhaseDynamics {
  Mat6 Cx = Mat6::Zero();
  Mat6x4 Cu = Mat6x4::Zero();
  Mat6x5 Cv = Mat6x5::Zero();

  Vec6 acceleration(const Vec6& x, const Vec4& u, const Vec5& v) const {
    return Cx * x + Cu * u + Cv * v;
  }
};

struct ContinuousDynamics {
  PhaseDynamics single_support;
  PhaseDynamics double_support;
  BodyModel body;
  GaitConfig config;
  double pelvis_height = 0;  // l cos(phi), height of the pendulum plane
};

/// Eliminates the internal forces of the three-pendulum chain and returns both
/// contact-phase variants. Derivation in docs/dynamics.md.
ContinuousDynamics assemble_dynamics(const BodyModel& body, const GaitConfig& config);

/// Swaps swing and stance blocks of positions and velocities.
StateVec exchange_support(const StateVec& q);

/// The 12x12 support-exchange operator S.
Mat12 support_exchange_matrix();

/// Negates every lateral component (positions and velocities).
StateVec mirror_lateral(const StateVec& q);
TorqueProfile mirror_lateral(const TorqueProfile& u);

/// Moves all three bodies horizontally by `offset`.
StateVec translated(const StateVec& q, const Vec2& offset);

}  // namespace walk3lp
