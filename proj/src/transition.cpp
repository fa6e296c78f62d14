#include "walk3lp/transition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace walk3lp {

namespace {

// phi_n(l, t) = sum_j l^j t^(2j+n) / (2j+n)!, so phi_0 = cosh(sqrt(l) t),
// phi_1 = sinh(sqrt(l) t)/sqrt(l) and d/dt phi_(n+1) = phi_n.
std::array<double, 6> phi_kernels(double lambda, double t) {
  std::array<double, 6> k{};
  const double x = lambda * t * t;
  if (std::abs(x) < 1.0) {
    double tn = 1.0;  // t^n / n!
    for (int n = 0; n < 6; ++n) {
      if (n > 0) tn *= t / n;
      double term = 1.0, sum = 1.0;
      for (int j = 1; j < 40; ++j) {
        term *= x / ((2.0 * j + n - 1) * (2.0 * j + n));
        sum += term;
        if (std::abs(term) < 1e-19) break;
      }
      k[n] = sum * tn;
    }
    return k;
  }
  const double w = std::sqrt(std::abs(lambda));
  if (lambda > 0) {
    k[0] = std::cosh(w * t);
    k[1] = std::sinh(w * t) / w;
  } else {
    k[0] = std::cos(w * t);
    k[1] = std::sin(w * t) / w;
  }
  double tn = 1.0;
  for (int n = 0; n < 4; ++n) {
    if (n > 0) tn *= t / n;
    k[n + 2] = (k[n] - tn) / lambda;
  }
  return k;
}

}  // namespace

PhasePropagator::PhasePropagator(const PhaseDynamics& dyn) : dyn_(dyn) {
  for (int axis = 0; axis < 2; ++axis) {
    AxisModes& m = axes_[axis];
    for (int base : {idx::kSwing, idx::kPelvis, idx::kStance}) {
      const int i = base + axis;
      const bool moving = dyn.Cx.row(i).cwiseAbs().maxCoeff() > 0 ||
                          dyn.Cu.row(i).cwiseAbs().maxCoeff() > 0 ||
                          dyn.Cv.row(i).cwiseAbs().maxCoeff() > 0;
      if (moving) {
        m.active[m.n_active++] = i;
      } else {
        m.passive[m.n_passive++] = i;
      }
    }
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        const bool same_axis = (r % 2 == axis) && (c % 2 == axis);
        if (!same_axis && (r % 2 == axis || c % 2 == axis) && dyn.Cx(r, c) != 0) {
          throw std::runtime_error("transition: sagittal/lateral coupling in Cx");
        }
      }
    }
    const int na = m.n_active;
    Small g(na, na);
    m.coupling.resize(na, m.n_passive);
    for (int r = 0; r < na; ++r) {
      for (int c = 0; c < na; ++c) g(r, c) = dyn.Cx(m.active[r], m.active[c]);
      for (int c = 0; c < m.n_passive; ++c) {
        m.coupling(r, c) = dyn.Cx(m.active[r], m.passive[c]);
      }
    }
    if (na == 0) continue;
    Eigen::EigenSolver<Small> solver(g);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("transition: eigen-decomposition failed");
    }
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    m.eig.resize(na);
    for (int i = 0; i < na; ++i) {
      if (std::abs(solver.eigenvalues()(i).imag()) > 1e-9 * scale) {
        throw std::runtime_error("transition: complex pendulum eigenvalues");
      }
      m.eig(i) = solver.eigenvalues()(i).real();
    }
    m.modes = solver.eigenvectors().real();
    m.modes_inv = m.modes.inverse();
    const Small rebuilt = m.modes * m.eig.asDiagonal() * m.modes_inv;
    if (!rebuilt.allFinite() || (rebuilt - g).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw std::runtime_error("transition: pendulum block is not diagonalizable");
    }
  }
}

PhasePropagator::Kernels PhasePropagator::kernels(double tau) const {
  // For Cx = [[G, H], [0, 0]] (active first):
  //   phi_n(Cx) = [[phi_n(G), phi_(n+2)(G) H], [0, phi_n(0) I]]
  //   Cx phi_1(Cx) = [[G phi_1(G), phi_1(G) H], [0, 0]]
  Kernels out;
  for (Mat6* m : {&out.ch, &out.sh, &out.p2, &out.p3, &out.csh}) m->setZero();
  const std::array<double, 6> zero = phi_kernels(0.0, tau);
  for (const AxisModes& m : axes_) {
    const int na = m.n_active;
    std::array<Small, 6> phi;
    Small gphi1(na, na);
    if (na > 0) {
      std::array<Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>, 6> diag;
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> lsh(na);
      for (auto& d : diag) d.resize(na);
      for (int i = 0; i < na; ++i) {
        const std::array<double, 6> k = phi_kernels(m.eig(i), tau);
        for (int n = 0; n < 6; ++n) diag[n](i) = k[n];
        lsh(i) = m.eig(i) * k[1];
      }
      for (int n = 0; n < 6; ++n) {
        phi[n] = m.modes * diag[n].asDiagonal() * m.modes_inv;
      }
      gphi1 = m.modes * lsh.asDiagonal() * m.modes_inv;
    }
    auto fill = [&](Mat6& dst, int n) {
      for (int r = 0; r < na; ++r) {
        for (int c = 0; c < na; ++c) dst(m.active[r], m.active[c]) = phi[n](r, c);
      }
      if (na > 0 && m.n_passive > 0) {
        const Small off = phi[n + 2] * m.coupling;
        for (int r = 0; r < na; ++r) {
          for (int c = 0; c < m.n_passive; ++c) dst(m.active[r], m.passive[c]) = off(r, c);
        }
      }
      for (int p = 0; p < m.n_passive; ++p) dst(m.passive[p], m.passive[p]) = zero[n];
    };
    fill(out.ch, 0);
    fill(out.sh, 1);
    fill(out.p2, 2);
    fill(out.p3, 3);
    for (int r = 0; r < na; ++r) {
      for (int c = 0; c < na; ++c) out.csh(m.active[r], m.active[c]) = gphi1(r, c);
    }
    if (na > 0 && m.n_passive > 0) {
      const Small off = phi[1] * m.coupling;
      for (int r = 0; r < na; ++r) {
        for (int c = 0; c < m.n_passive; ++c) out.csh(m.active[r], m.passive[c]) = off(r, c);
      }
    }
  }
  return out;
}

TransitionSet PhasePropagator::over(double tau) const {
  const Kernels k = kernels(tau);
  TransitionSet out;
  out.A.topLeftCorner<6, 6>() = k.ch;
  out.A.topRightCorner<6, 6>() = k.sh;
  out.A.bottomLeftCorner<6, 6>() = k.csh;
  out.A.bottomRightCorner<6, 6>() = k.ch;
  out.B.block<6, 4>(0, 0) = k.p2 * dyn_.Cu;
  out.B.block<6, 4>(0, 4) = k.p3 * dyn_.Cu;
  out.B.block<6, 4>(6, 0) = k.sh * dyn_.Cu;
  out.B.block<6, 4>(6, 4) = k.p2 * dyn_.Cu;
  out.C.topRows<6>() = k.p2 * dyn_.Cv;
  out.C.bottomRows<6>() = k.sh * dyn_.Cv;
  return out;
}

Vec12 PhasePropagator::propagate(const Vec12& q0, const TorqueProfile& u,
                                 const Vec5& v, double tau) const {
  const Kernels k = kernels(tau);
  const Vec6 b0 = dyn_.Cu * u.constant + dyn_.Cv * v;
  const Vec6 b1 = dyn_.Cu * u.ramp;
  const Vec6 x0 = q0.head<6>();
  const Vec6 dx0 = q0.tail<6>();
  Vec12 out;
  out.head<6>() = k.ch * x0 + k.sh * dx0 + k.p2 * b0 + k.p3 * b1;
  out.tail<6>() = k.csh * x0 + k.ch * dx0 + k.sh * b0 + k.p2 * b1;
  return out;
}

StepTransition::StepTransition(const ContinuousDynamics& dyn)
    : dyn_(dyn),
      ds_(dyn.double_support),
      ss_(dyn.single_support),
      step_time_(dyn.config.step_time),
      ds_time_(dyn.config.double_support_time) {
  ds_end_ = ds_.over(ds_time_);
}

TransitionSet StepTransition::at(double t) const {
  constexpr double kSlack = 1e-12;
  if (!(t >= -kSlack) || !(t <= step_time_ + kSlack)) {
    throw std::out_of_range("transition: t=" + std::to_string(t) +
                            " outside [0, T]");
  }
  t = std::clamp(t, 0.0, step_time_);
  if (t <= ds_time_) return ds_.over(t);
  const TransitionSet ss = ss_.over(t - ds_time_);
  // Re-base the torque profile at T_ds: [u_c'; u_r] = R [u_c; u_r].
  Eigen::Matrix<double, 8, 8> rebase = Eigen::Matrix<double, 8, 8>::Identity();
  rebase.block<4, 4>(0, 4) = ds_time_ * Eigen::Matrix4d::Identity();
  TransitionSet out;
  out.A = ss.A * ds_end_.A;
  out.B = ss.A * ds_end_.B + ss.B * rebase;
  out.C = ss.A * ds_end_.C + ss.C;
  return out;
}

Vec12 StepTransition::propagate(const Vec12& q, const TorqueProfile& u,
                                const Vec5& v, double t_from, double t_to) const {
  constexpr double kSlack = 1e-12;
  if (t_from < -kSlack || t_to < t_from - kSlack || t_to > step_time_ + kSlack) {
    throw std::out_of_range("transition: invalid propagation interval");
  }
  Vec12 state = q;
  double t = t_from;
  if (t < ds_time_) {
    const double end = std::min(t_to, ds_time_);
    state = ds_.propagate(state, u.rebased(t), v, end - t);
    t = end;
  }
  if (t_to > t) state = ss_.propagate(state, u.rebased(t), v, t_to - t);
  return state;
}

TransitionSet transition_matrices(const ContinuousDynamics& dyn, double t) {
  return StepTransition(dyn).at(t);
}

StateVec propagate(const ContinuousDynamics& dyn, const StateVec& q0,
                   const TorqueProfile& torque, const ConstVec& v, double t) {
  const StepTransition step(dyn);
  if (t < 0 || t > step.step_time()) {
    throw std::out_of_range("propagate: t outside [0, T]");
  }
  return StateVec(step.propagate(q0.q, torque, v.v, 0.0, t));
}

}  // namespace walk3lp
