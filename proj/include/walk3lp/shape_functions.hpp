#pragma once

#include <array>

namespace walk3lp {

/// Time profiles used by the kinematic conversion.
///   alpha: cubic on [0, T_ds] and on [T_ds, T]; zero with slope -1 at the
///          three nodes
///   beta:  quintic on [0, T]; beta(0) = beta(T) = 0, beta'(0) = -2,
///          beta'(T) = -1, beta''(T) = 0, remaining freedom set so that
///          max|beta| = 2 max|alpha|
///   gamma: smoothstep over the single support window [T_ds, T]
///   delta: monotone cubic through (-1, -eps), (0, 0), (1, 1)
class ShapeFunctions {
 public:
  static constexpr double kEpsilon = 0.2;

  ShapeFunctions() : ShapeFunctions(0.0, 1.0) {}
  ShapeFunctions(double double_support_time, double step_time);

  double alpha(double t) const;
  double alpha_rate(double t) const;
  double beta(double t) const;
  double beta_rate(double t) const;
  double gamma(double t) const;
  double gamma_rate(double t) const;
  static double delta(double x);

  double max_abs_alpha() const { return max_alpha_; }
  double max_abs_beta() const;
  double double_support_time() const { return t_ds_; }
  double step_time() const { return t_; }

 private:
  double t_ds_;
  double t_;
  double max_alpha_;
  std::array<double, 6> beta_;  // coefficients in s = t / T, scaled by T
};

}  // namespace walk3lp
