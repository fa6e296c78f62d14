#include "walk3lp/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace walk3lp {

namespace {

using Pt = Eigen::Vector2d;

double cross(const Pt& a, const Pt& b) { return a.x() * b.y() - a.y() * b.x(); }

// Both intersections of two circles, or nothing when they do not meet.
std::optional<std::array<Pt, 2>> circle_intersections(const Pt& c0, double r0, const Pt& c1,
                                                      double r1) {
  const Pt d = c1 - c0;
  const double dist = d.norm();
  if (dist < 1e-15) return std::nullopt;
  const double a = (r0 * r0 - r1 * r1 + dist * dist) / (2 * dist);
  double h2 = r0 * r0 - a * a;
  if (h2 < 0) {
    if (h2 < -1e-12 * r0 * r0) return std::nullopt;
    h2 = 0;
  }
  const Pt base = c0 + (a / dist) * d;
  const Pt perp(-d.y() / dist, d.x() / dist);
  const double h = std::sqrt(h2);
  return std::array<Pt, 2>{base + h * perp, base - h * perp};
}

// Angle of a downward-pointing in-plane vector from the plane's down axis.
double pitch_from_down(const Pt& v) { return std::atan2(v.x(), -v.y()); }

}  // namespace

RelativeVectors relative_vectors(const StateVec& q, int support, double pelvis_width) {
  const Vec2 offset(0.0, 0.5 * pelvis_width * support);
  RelativeVectors rv;
  rv.p = q.stance() - q.pelvis() + offset;
  rv.r = q.swing() - q.pelvis() - offset;
  rv.p_rate = q.stance_vel() - q.pelvis_vel();
  rv.r_rate = q.swing_vel() - q.pelvis_vel();
  return rv;
}

CopOffsets cop_offsets(const Vec2& p, const Vec2& r, double foot_length, double leg_length) {
  const double half = 0.5 * foot_length;
  CopOffsets c;
  c.stance = std::clamp(half * (1 + (r.x() - p.x()) / leg_length), 0.0, foot_length);
  c.swing = std::clamp(half * (1 + (p.x() - r.x()) / leg_length), 0.0, foot_length);
  return c;
}

double delta_map(double x_cop, double foot_length) {
  return 0.5 * foot_length * ShapeFunctions::delta(2.0 * x_cop / foot_length - 1.0);
}

double fixed_arc(const Vec2& rel, double x_cop, double leg_length, double slope) {
  const double Z = leg_length * std::cos(slope);
  const double s = rel.x() + x_cop + leg_length * std::sin(slope);
  const double v = Z * Z - s * s - rel.y() * rel.y();
  if (v < 0) {
    throw GeometryError("fixed arc does not reach the pelvis (sagittal offset " +
                        std::to_string(s) + " m)");
  }
  return std::sqrt(v);
}

double pelvis_height_fixed(const Vec2& p_bar, const Vec2& r_bar, const CopOffsets& cops,
                           double leg_length, double slope, double gamma) {
  const double zp = fixed_arc(p_bar, cops.stance, leg_length, slope);
  const double zq = fixed_arc(r_bar, cops.swing, leg_length, slope);
  return (1 - gamma) * zp + gamma * zq;
}

double smooth_max(double a, double b) {
  if (a >= 0 && b >= 0) return std::hypot(a, b);
  if (b < 0 && a >= 0) return a;
  if (a < 0 && b >= 0) return b;
  return a + b + std::hypot(a, b);
}

double adaptive_arc(const Vec2& rel, double x_cop, double foot_length, double leg_length,
                    double slope) {
  const double l = leg_length;
  const double delta = delta_map(x_cop, foot_length);
  const double Z = l * std::cos(slope);
  const double k = std::tan(slope);
  // Hip relative to the heel along x moves with the world vertical:
  // xi(z) = xi0 + tan(phi) (z - Z); ellipsoid centred 2 Delta ahead of the heel.
  const double A = l + 2 * delta;
  const double C = l + delta;
  const double a0 = -rel.x() - k * Z - 2 * delta;
  const double R = 1 - (rel.y() / l) * (rel.y() / l);
  const double qa = k * k / (A * A) + 1 / (C * C);
  const double qb = 2 * a0 * k / (A * A);
  const double qc = a0 * a0 / (A * A) - R;
  const double disc = qb * qb - 4 * qa * qc;
  if (disc < 0) {
    throw GeometryError("adaptive arc: pelvis line misses the leg ellipsoid");
  }
  const double z = (-qb + std::sqrt(disc)) / (2 * qa);
  if (!(z > 0)) throw GeometryError("adaptive arc: no positive intersection");
  return z;
}

HeightCandidates pelvis_height_adaptive(const Vec2& p_bar, const Vec2& r_bar,
                                        const CopOffsets& cops, double foot_length,
                                        double leg_length, double slope) {
  HeightCandidates h;
  try {
    h.stance = adaptive_arc(p_bar, cops.stance, foot_length, leg_length, slope);
  } catch (const GeometryError& e) {
    throw GeometryError(std::string("stance leg: ") + e.what());
  }
  try {
    h.swing = adaptive_arc(r_bar, cops.swing, foot_length, leg_length, slope);
  } catch (const GeometryError& e) {
    throw GeometryError(std::string("swing leg: ") + e.what());
  }
  h.z = leg_length - smooth_max(leg_length - h.stance, leg_length - h.swing);
  return h;
}

double toe_clearance(double t, double double_support_time, double step_time,
                     double clearance, double leg_length) {
  if (t <= double_support_time || t >= step_time) return 0.0;
  const double swing = step_time - double_support_time;
  return clearance * leg_length * std::sin(M_PI * (t - double_support_time) / swing);
}

KneeTargets knee_targets(const RelativeVectors& rv, double alpha, double beta,
                         const CopOffsets& cops) {
  KneeTargets k;
  k.stance = rv.p + alpha * rv.p_rate + Vec2(cops.stance, 0.0);
  k.swing = rv.r + beta * rv.p_rate + Vec2(cops.swing, 0.0);
  return k;
}

LegPose solve_leg(const Vec3& hip, const Vec3& toe, const Vec3& target, const BodyModel& body) {
  const double l1 = body.thigh_length;
  const double l2 = body.shank_length;
  const double l3 = body.foot_length;
  const Vec3 d = toe - hip;
  const double n = std::hypot(d.y(), d.z());
  if (n < 1e-12) throw GeometryError("leg: toe level with the hip");
  const Vec3 e1 = Vec3::UnitX();
  const Vec3 e2(0.0, -d.y() / n, -d.z() / n);
  if (e2.z() <= 0) throw GeometryError("leg: toe above the hip");

  auto to_plane = [&](const Vec3& x) { return Pt((x - hip).dot(e1), (x - hip).dot(e2)); };
  auto to_space = [&](const Pt& u) { return Vec3(hip + u.x() * e1 + u.y() * e2); };

  const Pt P = to_plane(toe);
  if (P.norm() > l1 + l2 + l3 + 1e-12) {
    throw GeometryError("leg: toe out of reach (" + std::to_string(P.norm()) + " m)");
  }
  Pt aim = to_plane(target);
  if (aim.norm() < 1e-12) aim = P;
  Pt K = l1 * aim.normalized();

  // Keep the knee-toe distance within what shank and foot can span.
  const double far = l2 + l3;
  const double near = std::abs(l2 - l3);
  const double dist = (P - K).norm();
  if (dist > far || dist < near) {
    const double radius = dist > far ? far : near;
    const auto ks = circle_intersections(Pt::Zero(), l1, P, radius);
    if (!ks) throw GeometryError("leg: no knee position reaches the toe");
    K = ((*ks)[0] - K).norm() < ((*ks)[1] - K).norm() ? (*ks)[0] : (*ks)[1];
  }
  const auto as = circle_intersections(K, l2, P, l3);
  if (!as) throw GeometryError("leg: shank and foot cannot close the chain");
  Pt A = cross(P - K, (*as)[0] - K) < 0 ? (*as)[0] : (*as)[1];

  bool flat = false;
  if (A.y() < P.y()) {
    // Heel below the toe: lay the foot flat and bend the knee forward.
    const Pt heel(P.x() - l3, P.y());
    if (heel.norm() > l1 + l2) {
      const auto hs = circle_intersections(Pt::Zero(), l1 + l2, P, l3);
      if (!hs) throw GeometryError("leg: heel out of reach");
      A = (*hs)[0].y() > (*hs)[1].y() ? (*hs)[0] : (*hs)[1];
      K = (l1 / (l1 + l2)) * A;
    } else {
      const auto ks = circle_intersections(Pt::Zero(), l1, heel, l2);
      if (!ks) throw GeometryError("leg: hip too close to the heel");
      K = cross(heel, (*ks)[0]) > 0 ? (*ks)[0] : (*ks)[1];
      A = heel;
      flat = true;
    }
  }

  LegPose leg;
  leg.hip = hip;
  leg.knee = to_space(K);
  leg.ankle = to_space(A);
  leg.toe = to_space(P);
  const double thigh = pitch_from_down(K);
  const double shank = pitch_from_down(A - K);
  const Pt foot = P - A;
  leg.hip_pitch = thigh;
  leg.knee_angle = thigh - shank;
  leg.ankle_angle = std::atan2(foot.y(), foot.x()) - shank;
  leg.hip_roll = std::atan2(-e2.y(), e2.z());
  leg.foot_flat = flat;
  return leg;
}

LegPose leg_forward_kinematics(const Vec3& hip, double hip_roll, double hip_pitch,
                               double knee_angle, double ankle_angle, const BodyModel& body) {
  const Vec3 e1 = Vec3::UnitX();
  const Vec3 e2(0.0, -std::sin(hip_roll), std::cos(hip_roll));
  auto down = [&](double pitch) { return Vec3(std::sin(pitch) * e1 - std::cos(pitch) * e2); };
  LegPose leg;
  leg.hip = hip;
  leg.hip_pitch = hip_pitch;
  leg.knee_angle = knee_angle;
  leg.ankle_angle = ankle_angle;
  leg.hip_roll = hip_roll;
  const double shank = hip_pitch - knee_angle;
  const double foot = ankle_angle + shank;
  leg.knee = hip + body.thigh_length * down(hip_pitch);
  leg.ankle = leg.knee + body.shank_length * down(shank);
  leg.toe = leg.ankle + body.foot_length * (std::cos(foot) * e1 + std::sin(foot) * e2);
  return leg;
}

Vec3 slope_to_world(const Vec3& p, double slope) {
  const double c = std::cos(slope), s = std::sin(slope);
  return {c * p.x() - s * p.z(), p.y(), s * p.x() + c * p.z()};
}

Converter::Converter(const BodyModel& body, const GaitConfig& config, HeightMethod method)
    : body_(body),
      config_(config),
      method_(method),
      shapes_(config.double_support_time, config.step_time) {
  body_.validate();
  config_.validate();
}

Pose Converter::operator()(const StateVec& q, double t, const Vec2& origin) const {
  return convert(q, t, config_.support, origin);
}

Pose Converter::convert(const StateVec& q, double t, int support, const Vec2& origin) const {
  const double l = body_.leg_length;
  const double h = body_.foot_length;
  const double w = body_.pelvis_width;
  const double phi = config_.slope;
  const double Z = l * std::cos(phi);
  t = std::clamp(t, 0.0, config_.step_time);

  const RelativeVectors rv = relative_vectors(q, support, w);
  const CopOffsets cops = cop_offsets(rv.p, rv.r, h, l);
  const double alpha = shapes_.alpha(t);
  const Vec2 p_bar = rv.p + alpha * rv.p_rate;
  const Vec2 r_bar = rv.r + alpha * rv.p_rate;

  Pose pose;
  pose.t = t;
  pose.support = support;
  pose.method = method_;
  double z = 0;
  if (method_ == HeightMethod::kFixed) {
    try {
      z = pelvis_height_fixed(p_bar, r_bar, cops, l, phi, shapes_.gamma(t));
    } catch (const GeometryError&) {
      pose.fixed_fallback = true;
    }
  }
  if (method_ == HeightMethod::kAdaptive || pose.fixed_fallback) {
    z = pelvis_height_adaptive(p_bar, r_bar, cops, h, l, phi).z;
  }
  pose.pelvis_height = z;

  const Vec3 o(origin.x(), origin.y(), 0.0);
  const Vec3 pelvis(q.pelvis().x() + std::tan(phi) * (z - Z), q.pelvis().y(), z);
  const Vec3 side(0.0, 0.5 * w * support, 0.0);
  const Vec3 stance_hip = pelvis - side;
  const Vec3 swing_hip = pelvis + side;
  const Vec3 stance_toe(q.stance().x() + h, q.stance().y(), 0.0);
  const Vec3 swing_toe(q.swing().x() + h, q.swing().y(),
                       toe_clearance(t, config_.double_support_time, config_.step_time,
                                     config_.clearance, l));

  const KneeTargets kt = knee_targets(rv, alpha, shapes_.beta(t), cops);
  const Vec2 hip_st = q.pelvis() - side.head<2>();
  const Vec2 hip_sw = q.pelvis() + side.head<2>();
  const Vec3 target_st(hip_st.x() + kt.stance.x(), hip_st.y() + kt.stance.y(), 0.0);
  const Vec3 target_sw(hip_sw.x() + kt.swing.x(), hip_sw.y() + kt.swing.y(), 0.0);

  LegPose stance = solve_leg(stance_hip, stance_toe, target_st, body_);
  LegPose swing = solve_leg(swing_hip, swing_toe, target_sw, body_);
  for (LegPose* leg : {&stance, &swing}) {
    for (Vec3* p : {&leg->hip, &leg->knee, &leg->ankle, &leg->toe}) {
      *p = slope_to_world(*p + o, phi);
    }
  }
  pose.pelvis = slope_to_world(pelvis + o, phi);
  pose.right = support > 0 ? stance : swing;
  pose.left = support > 0 ? swing : stance;
  return pose;
}

double terrain_clearance(const Pose& pose, double slope) {
  double gap = std::numeric_limits<double>::infinity();
  for (const LegPose* leg : {&pose.left, &pose.right}) {
    for (const Vec3* p : {&leg->hip, &leg->knee, &leg->ankle, &leg->toe}) {
      gap = std::min(gap, p->z() - p->x() * std::tan(slope));
    }
  }
  return gap;
}

Pose Converter::convert_within_reach(const StateVec& q, double t, int support,
                                     const Vec2& origin) const {
  constexpr double kGroundTolerance = 1e-10;
  auto attempt = [&](const StateVec& x) -> std::optional<Pose> {
    try {
      Pose pose = convert(x, t, support, origin);
      if (terrain_clearance(pose, config_.slope) >= -kGroundTolerance) return pose;
    } catch (const GeometryError&) {
    }
    return std::nullopt;
  };
  if (auto pose = attempt(q)) return *pose;

  const Vec2 side(0.0, 0.5 * body_.pelvis_width * support);
  auto pulled = [&](double s, bool both) {
    Vec12 v = q.q;
    const Vec2 pelvis = q.pelvis();
    v.segment<2>(idx::kSwing) = pelvis + side + s * (q.swing() - pelvis - side);
    if (both) v.segment<2>(idx::kStance) = pelvis - side + s * (q.stance() - pelvis + side);
    return StateVec(v);
  };
  for (bool both : {false, true}) {
    if (!attempt(pulled(0.0, both))) continue;
    double lo = 0, hi = 1;
    for (int i = 0; i < 40; ++i) {
      const double mid = 0.5 * (lo + hi);
      (attempt(pulled(mid, both)) ? lo : hi) = mid;
    }
    Pose pose = *attempt(pulled(lo, both));
    pose.reach_scale = lo;
    return pose;
  }
  // Reachable but folded into the ground whatever the feet do.
  return convert(q, t, support, origin);
}

Pose convert(const StateVec& q, double t, const GaitConfig& config, const BodyModel& body,
             HeightMethod method) {
  return Converter(body, config, method)(q, t);
}

}  // namespace walk3lp
