#include <random>

#include "doctest.h"
#include "walk3lp/control.hpp"
#include "walk3lp/riccati.hpp"

using namespace walk3lp;

namespace {

PeriodicGait default_gait() {
  return solve_periodic_gait(scale_body(70, 1.7), GaitConfig::from_frequency(1.7, 0.2, 1.0));
}

Vec8 random_error(std::mt19937_64& rng, double scale) {
  std::normal_distribution<> n(0, scale);
  Vec8 e;
  for (int i = 0; i < 8; ++i) e(i) = n(rng);
  return e;
}

}  // namespace

TEST_CASE("dare solver matches a scalar closed form") {
  // x+ = a x + b u: X = a^2 X - a^2 b^2 X^2 / (r + b^2 X) + q.
  Eigen::MatrixXd A(1, 1), B(1, 1), Q(1, 1), R(1, 1);
  A << 1.8;
  B << 0.7;
  Q << 1.0;
  R << 0.3;
  const DareResult d = solve_dare(A, B, Q, R);
  const double a = 1.8, b = 0.7, q = 1.0, r = 0.3;
  // b^2 X^2 + (r - a^2 r - q b^2) X - q r = 0, positive root.
  const double c1 = r - a * a * r - q * b * b;
  const double x = (-c1 + std::sqrt(c1 * c1 + 4 * b * b * q * r)) / (2 * b * b);
  CHECK(d.X(0, 0) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("dare solver reports unstabilizable systems") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2) * 2.0;
  Eigen::MatrixXd B(2, 1);
  B << 1, 0;
  CHECK_THROWS_AS(solve_dare(A, B, Eigen::MatrixXd::Identity(2, 2),
                             Eigen::MatrixXd::Identity(1, 1)),
                  RiccatiError);
}

TEST_CASE("error model identities") {
  const PeriodicGait gait = default_gait();
  const ErrorModel em(gait);
  CHECK(em.Atilde(0).isIdentity(1e-15));
  CHECK(em.Btilde(0).isZero(0));
  const SymmetryOps& ops = em.ops();
  const Mat8 a_ref = ops.O * ops.M * ops.S * gait.end.A * ops.Mhat;
  CHECK((em.Ahat() - a_ref).isZero(0));
  CHECK((em.Ahat() * Vec8::Zero()).isZero(0));
}

TEST_CASE("error model matches full-state propagation") {
  const PeriodicGait gait = default_gait();
  const ErrorModel em(gait);
  std::mt19937_64 rng(4);
  const double T = gait.config.step_time;
  for (int i = 0; i < 50; ++i) {
    const Vec8 E = random_error(rng, 0.02);
    Vec8 dU = random_error(rng, 20.0);
    const StateVec q0(gait.Qbar + em.ops().Mhat * E);
    const Vec12 qT = gait.step.propagate(q0.q, TorqueProfile(gait.Ubar + dU), gait.Vbar.v, 0, T);
    // Next step start: exchange roles and mirror the lateral axis.
    const StateVec next = mirror_lateral(exchange_support(StateVec(qT)));
    const Vec8 oracle = em.ops().M * (next.q - gait.Qbar);
    const Vec8 model = em.Ahat() * E + em.Bhat() * dU;
    CHECK((model - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("constrained dlqr stabilizes and zeroes the final swing velocity") {
  const PeriodicGait gait = default_gait();
  const ErrorModel em(gait);
  const DlqrGain gain = dlqr_gain(em);
  CHECK(gain.spectral_radius < 1.0);
  CHECK((em.Chat() * gain.closed_loop).cwiseAbs().maxCoeff() < 1e-10);
  for (int row : {2, 3, 6, 7}) CHECK(gain.K.row(row).isZero(0));

  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    Vec8 E = random_error(rng, 0.05);
    for (int k = 0; k < 4; ++k) {
      E = gain.closed_loop * E;
      CHECK(E.segment<2>(4).norm() < 1e-12);
    }
  }
}

TEST_CASE("time projection at the phase start is the discrete law") {
  const PeriodicGait gait = default_gait();
  const Controller ctl(gait);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Vec8 e = random_error(rng, 0.05);
    const auto p = ctl.project(e, 0.0);
    REQUIRE(p.has_value());
    CHECK((p->du + ctl.gain.K * e).cwiseAbs().maxCoeff() < 1e-12);
  }
  const auto zero = ctl.project(Vec8::Zero(), 0.3);
  REQUIRE(zero.has_value());
  CHECK(zero->du.isZero(0));
}

TEST_CASE("projection recovers the correction of an undisturbed phase") {
  const PeriodicGait gait = default_gait();
  const Controller ctl(gait);
  std::mt19937_64 rng(5);
  const double T = gait.config.step_time;
  for (int i = 0; i < 30; ++i) {
    const Vec8 E0 = random_error(rng, 0.03);
    const Vec8 dU = -ctl.gain.K * E0;
    const StateVec q0(gait.Qbar + ctl.model.ops().Mhat * E0);
    const TorqueProfile u(gait.Ubar + dU);
    for (double frac : {0.05, 0.19, 0.5, 0.93}) {
      const double t = frac * T;
      const StateVec q(gait.step.propagate(q0.q, u, gait.Vbar.v, 0, t));
      const Vec8 e = measure_error(q, gait.nominal_state(t));
      const auto p = ctl.project(e, t);
      REQUIRE(p.has_value());
      CHECK((p->du - dU).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, dU.norm()));
      CHECK((p->E - E0).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("measure_error definition") {
  const PeriodicGait gait = default_gait();
  const StateVec qbar = gait.nominal_state(0.2);
  CHECK(measure_error(qbar, qbar).isZero(0));
  const Vec2 shift(0.01, -0.02);
  StateVec q = qbar;
  q.q.segment<2>(idx::kPelvis) += shift;
  const Vec8 e = measure_error(q, qbar);
  CHECK(e.segment<2>(0).isZero(0));
  CHECK((e.segment<2>(2) - shift).norm() < 1e-15);
  CHECK(e.tail<4>().isZero(0));
  // A rigid translation of the whole walker is no error.
  CHECK(measure_error(translated(qbar, shift), qbar).norm() < 1e-15);
}

TEST_CASE("closed-loop spectral radius below one across configs") {
  std::mt19937_64 rng(17);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<>(a, b)(rng); };
  double worst = 0;
  for (int i = 0; i < 60; ++i) {
    GaitConfig c = GaitConfig::from_frequency(uni(1.0, 2.5), uni(0, 0.4), uni(-1.5, 1.5));
    c.slope = uni(-0.2, 0.2);
    c.torso_bend = uni(-0.15, 0.3);
    c.drag = uni(-60, 60);
    const Controller ctl(solve_periodic_gait(scale_body(70, 1.7), c));
    worst = std::max(worst, ctl.gain.spectral_radius);
  }
  MESSAGE("worst spectral radius " << worst);
  CHECK(worst < 1.0);
}
