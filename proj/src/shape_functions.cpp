#include "walk3lp/shape_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/interpolators/cubic_hermite.hpp>

namespace walk3lp {

namespace {

// g(s) = s (1 - s)(1 - 2 s): g(0) = g(1) = 0, g'(0) = g'(1) = 1.
double g_value(double s) { return s * (1 - s) * (1 - 2 * s); }
double g_rate(double s) { return 1 - 6 * s + 6 * s * s; }

double poly(const std::array<double, 6>& c, double s) {
  double v = 0;
  for (int k = 5; k >= 0; --k) v = v * s + c[k];
  return v;
}

double poly_rate(const std::array<double, 6>& c, double s) {
  double v = 0;
  for (int k = 5; k >= 1; --k) v = v * s + k * c[k];
  return v;
}

// Quintic f(s) with f(0)=0, f'(0)=-2, f(1)=0, f'(1)=-1, f''(1)=0 and
// f''(0)=0, on s in [0, 1]. beta(t) = T (f(s) + c s^2 (1-s)^3).
std::array<double, 6> base_quintic() {
  Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> b;
  a(0, 0) = 1;
  b(0) = 0;
  a(1, 1) = 1;
  b(1) = -2;
  a(2, 2) = 2;
  b(2) = 0;
  for (int k = 0; k < 6; ++k) {
    a(3, k) = 1;
    a(4, k) = k;
    a(5, k) = k * (k - 1);
  }
  b(3) = 0;
  b(4) = -1;
  b(5) = 0;
  const Eigen::Matrix<double, 6, 1> x = a.fullPivLu().solve(b);
  std::array<double, 6> out{};
  for (int k = 0; k < 6; ++k) out[k] = x(k);
  return out;
}

// Coefficients of s^2 (1-s)^3 = s^2 - 3 s^3 + 3 s^4 - s^5.
constexpr std::array<double, 6> kBump = {0, 0, 1, -3, 3, -1};

double max_abs(const std::array<double, 6>& c) {
  // Extremes of a quintic lie among the roots of its derivative; a dense scan
  // followed by local refinement is plenty for a smooth low-degree curve.
  constexpr int n = 400;
  double best = 0;
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = std::abs(poly(c, double(i) / n));
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double lo = std::max(0.0, double(best_i - 1) / n);
  double hi = std::min(1.0, double(best_i + 1) / n);
  for (int it = 0; it < 60; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (std::abs(poly(c, m1)) < std::abs(poly(c, m2))) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return std::max(best, std::abs(poly(c, 0.5 * (lo + hi))));
}

std::array<double, 6> with_bump(const std::array<double, 6>& base, double c) {
  std::array<double, 6> out = base;
  for (int k = 0; k < 6; ++k) out[k] += c * kBump[k];
  return out;
}

const boost::math::interpolators::cubic_hermite<std::vector<double>>& delta_curve() {
  // Fritsch-Carlson slopes for the three nodes: harmonic mean of the secants
  // inside, one-sided three-point estimates at the ends, reset to zero where
  // they would break monotonicity.
  static const auto curve = [] {
    const double eps = ShapeFunctions::kEpsilon;
    const double d0 = eps, d1 = 1.0;
    const double m1 = 2.0 / (1.0 / d0 + 1.0 / d1);
    double m0 = (3.0 * d0 - d1) / 2.0;
    if (m0 * d0 <= 0) m0 = 0;
    double m2 = (3.0 * d1 - d0) / 2.0;
    if (m2 > 3.0 * d1) m2 = 3.0 * d1;
    std::vector<double> x = {-1.0, 0.0, 1.0};
    std::vector<double> y = {-eps, 0.0, 1.0};
    std::vector<double> dy = {m0, m1, m2};
    return boost::math::interpolators::cubic_hermite<std::vector<double>>(
        std::move(x), std::move(y), std::move(dy));
  }();
  return curve;
}

}  // namespace

ShapeFunctions::ShapeFunctions(double double_support_time, double step_time)
    : t_ds_(double_support_time), t_(step_time) {
  if (!(step_time > 0) || double_support_time < 0 || double_support_time >= step_time) {
    throw std::invalid_argument("shape functions: need 0 <= T_ds < T");
  }
  const double g_max = std::sqrt(3.0) / 18.0;  // max |g| on [0, 1]
  max_alpha_ = g_max * std::max(t_ds_, t_ - t_ds_);

  // Work in s = t/T where beta = T f(s); target max|f| = 2 max|alpha| / T.
  const std::array<double, 6> base = base_quintic();
  const double target = 2.0 * max_alpha_ / t_;
  auto excess = [&](double c) { return max_abs(with_bump(base, c)) - target; };
  double c = 0;
  if (excess(0) < 0) {
    // Deepen the negative lobe until the target is met.
    double lo = -1.0;
    while (excess(lo) < 0) lo *= 2;
    double hi = 0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) < 0 ? hi : lo) = mid;
    }
    c = 0.5 * (lo + hi);
  } else {
    // Already large enough: take the bump that brings |f| closest to target.
    double lo = -50, hi = 50;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (std::abs(excess(m1)) < std::abs(excess(m2))) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    c = 0.5 * (lo + hi);
  }
  const std::array<double, 6> f = with_bump(base, c);
  for (int k = 0; k < 6; ++k) beta_[k] = t_ * f[k];
}

double ShapeFunctions::alpha(double t) const {
  t = std::clamp(t, 0.0, t_);
  if (t < t_ds_) return -t_ds_ * g_value(t / t_ds_);
  const double len = t_ - t_ds_;
  return -len * g_value((t - t_ds_) / len);
}

double ShapeFunctions::alpha_rate(double t) const {
  t = std::clamp(t, 0.0, t_);
  if (t < t_ds_) return -g_rate(t / t_ds_);
  return -g_rate((t - t_ds_) / (t_ - t_ds_));
}

double ShapeFunctions::beta(double t) const { return poly(beta_, std::clamp(t, 0.0, t_) / t_); }

double ShapeFunctions::beta_rate(double t) const {
  return poly_rate(beta_, std::clamp(t, 0.0, t_) / t_) / t_;
}

double ShapeFunctions::max_abs_beta() const {
  std::array<double, 6> f;
  for (int k = 0; k < 6; ++k) f[k] = beta_[k] / t_;
  return t_ * max_abs(f);
}

// Ramps over single support only, so the mixture keeps zero slope at T_ds.
double ShapeFunctions::gamma(double t) const {
  const double s = std::clamp((t - t_ds_) / (t_ - t_ds_), 0.0, 1.0);
  return s * s * (3 - 2 * s);
}

double ShapeFunctions::gamma_rate(double t) const {
  const double s = std::clamp((t - t_ds_) / (t_ - t_ds_), 0.0, 1.0);
  return 6 * s * (1 - s) / (t_ - t_ds_);
}

double ShapeFunctions::delta(double x) { return delta_curve()(std::clamp(x, -1.0, 1.0)); }

}  // namespace walk3lp
