#include <random>

#include "doctest.h"
#include "walk3lp/gait.hpp"

using namespace walk3lp;

namespace {

GaitConfig default_config() {
  GaitConfig c = GaitConfig::from_frequency(1.7, 0.2, 1.0);
  c.clearance = 0.05;
  return c;
}

}  // namespace

TEST_CASE("symmetry operators") {
  const SymmetryOps ops = build_symmetry_ops();
  CHECK((ops.M * ops.Mhat).isIdentity(0));
  CHECK((ops.O * ops.O).isIdentity(0));
  CHECK((ops.S * ops.S).isIdentity(0));
  Vec12 q;
  for (int i = 0; i < 12; ++i) q(i) = 0.1 * (i + 1) * (i % 3 == 0 ? -1 : 1);
  const StateVec s(q);
  const Vec8 rel = ops.M * q;
  CHECK((rel.segment<2>(0) - (s.swing() - s.stance())).isZero(0));
  CHECK((rel.segment<2>(2) - (s.pelvis() - s.stance())).isZero(0));
  CHECK((rel.segment<2>(4) - (s.swing_vel() - s.stance_vel())).isZero(0));
  CHECK((rel.segment<2>(6) - (s.pelvis_vel() - s.stance_vel())).isZero(0));
  const Vec4 nq = ops.N * q;
  CHECK((nq.head<2>() - s.swing_vel()).isZero(0));
  CHECK((nq.tail<2>() - s.stance_vel()).isZero(0));
  for (int i = 0; i < 8; ++i) CHECK(ops.O(i, i) == (i % 2 == 0 ? 1.0 : -1.0));
}

TEST_CASE("default gait satisfies the periodic equations") {
  const PeriodicGait gait = solve_periodic_gait(scale_body(70, 1.7), default_config());
  const GaitResiduals r = periodic_residuals(gait);
  CHECK(r.periodicity < 1e-9);
  CHECK(r.foot_velocity < 1e-9);
  CHECK(r.speed < 1e-9);
  CHECK(gait.nominal_state(0).q == gait.Qbar);
  // Step length is positive for a forward gait and the lateral CoP stays put.
  CHECK(gait.Qbar(idx::kStance) - gait.Qbar(idx::kSwing) > 0.1);
  CHECK(std::abs(gait.Ubar(3)) < 1e-9);
  CHECK(std::abs(gait.Ubar(7)) < 1e-9);
  // Numerically averaged pelvis velocity.
  const int n = 2000;
  double sum = 0;
  const double T = gait.config.step_time;
  for (int i = 0; i < n; ++i) {
    sum += gait.nominal_state((i + 0.5) * T / n).pelvis_vel()(0);
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("null space of the periodic equations has dimension eight") {
  for (double ds : {0.0, 0.2, 0.4}) {
    GaitConfig c = default_config();
    c.double_support_time = ds * c.step_time;
    CHECK(periodic_null_dimension(assemble_dynamics(scale_body(70, 1.7), c)) == 8);
  }
}

TEST_CASE("in-place gait has no sagittal motion") {
  GaitConfig c = default_config();
  c.speed = 0;
  const PeriodicGait gait = solve_periodic_gait(scale_body(70, 1.7), c);
  for (int i = 0; i < 12; i += 2) CHECK(std::abs(gait.Qbar(i)) < 1e-12);
  CHECK(std::abs(gait.Ubar(0)) < 1e-9);
  CHECK(std::abs(gait.Ubar(2)) < 1e-9);
  // Lateral motion still bounces between the feet.
  CHECK(std::abs(gait.Qbar(idx::kVel + idx::kPelvis + 1)) > 1e-3);
}

TEST_CASE("standing still on a slope is periodic") {
  GaitConfig c = default_config();
  c.speed = 0;
  c.slope = 0.14;
  const PeriodicGait gait = solve_periodic_gait(scale_body(70, 1.7), c);
  const GaitResiduals r = periodic_residuals(gait);
  CHECK(r.periodicity < 1e-9);
  CHECK(r.speed < 1e-9);
}

TEST_CASE("gait kinematics do not depend on body mass") {
  const GaitConfig c = default_config();
  const PeriodicGait light = solve_periodic_gait(scale_body(40, 1.7), c);
  const PeriodicGait heavy = solve_periodic_gait(scale_body(110, 1.7), c);
  CHECK((light.Qbar - heavy.Qbar).norm() < 1e-10);
  CHECK((light.Ubar / 40 - heavy.Ubar / 110).norm() < 1e-10);
}

TEST_CASE("mirrored support gives the mirrored gait") {
  GaitConfig c = default_config();
  const PeriodicGait right = solve_periodic_gait(scale_body(70, 1.7), c);
  c.support = -1;
  const PeriodicGait left = solve_periodic_gait(scale_body(70, 1.7), c);
  CHECK((mirror_lateral(StateVec(right.Qbar)).q - left.Qbar).norm() < 1e-10);
}

TEST_CASE("consecutive steps are lateral mirror images") {
  const PeriodicGait gait = solve_periodic_gait(scale_body(70, 1.7), default_config());
  const StateVec end = gait.nominal_state(gait.config.step_time);
  const StateVec next = exchange_support(end);
  const SymmetryOps ops = build_symmetry_ops();
  CHECK((ops.O * ops.M * next.q - ops.M * gait.Qbar).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("randomized configs stay periodic") {
  std::mt19937_64 rng(21);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<>(a, b)(rng); };
  for (int i = 0; i < 60; ++i) {
    GaitConfig c = GaitConfig::from_frequency(uni(1.0, 2.5), uni(0, 0.4), uni(-1.5, 1.5));
    c.slope = uni(-0.2, 0.2);
    c.torso_bend = uni(-0.15, 0.3);
    c.drag = uni(-60, 60);
    const PeriodicGait gait = solve_periodic_gait(scale_body(uni(30, 120), uni(1, 2.5)), c);
    const GaitResiduals r = periodic_residuals(gait);
    CHECK(r.periodicity < 1e-9);
    CHECK(r.foot_velocity < 1e-9);
    CHECK(r.speed < 1e-9);
  }
}
