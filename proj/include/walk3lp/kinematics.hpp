#pragma once

#include <stdexcept>
#include <string>

#include "walk3lp/anthropometry.hpp"
#include "walk3lp/gait_config.hpp"
#include "walk3lp/shape_functions.hpp"
#include "walk3lp/types.hpp"

namespace walk3lp {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Foot-minus-hip vectors: p for the stance leg, r for the swing leg.
struct RelativeVectors {
  Vec2 p = Vec2::Zero();
  Vec2 r = Vec2::Zero();
  Vec2 p_rate = Vec2::Zero();
  Vec2 r_rate = Vec2::Zero();
};

RelativeVectors relative_vectors(const StateVec& q, int support, double pelvis_width);

/// Sagittal CoP positions measured forward from each heel, clamped to [0, h].
struct CopOffsets {
  double stance = 0;
  double swing = 0;
};

CopOffsets cop_offsets(const Vec2& p, const Vec2& r, double foot_length, double leg_length);

/// (h/2) delta(2 x / h - 1).
double delta_map(double x_cop, double foot_length);

/// Fixed leg-length arc for one leg; `rel` is the smoothed foot-minus-hip
/// vector. Throws GeometryError when the arc misses the pelvis line.
double fixed_arc(const Vec2& rel, double x_cop, double leg_length, double slope);

double pelvis_height_fixed(const Vec2& p_bar, const Vec2& r_bar, const CopOffsets& cops,
                           double leg_length, double slope, double gamma);

double smooth_max(double a, double b);

/// Height where the line through the hip along the world vertical meets the
/// leg's CoP-dependent ellipsoid. Throws GeometryError without a positive root.
double adaptive_arc(const Vec2& rel, double x_cop, double foot_length, double leg_length,
                    double slope);

struct HeightCandidates {
  double stance = 0;
  double swing = 0;
  double z = 0;
};

HeightCandidates pelvis_height_adaptive(const Vec2& p_bar, const Vec2& r_bar,
                                        const CopOffsets& cops, double foot_length,
                                        double leg_length, double slope);

double toe_clearance(double t, double double_support_time, double step_time,
                     double clearance, double leg_length);

struct KneeTargets {
  Vec2 stance = Vec2::Zero();  // relative to the stance hip
  Vec2 swing = Vec2::Zero();   // relative to the swing hip
};

KneeTargets knee_targets(const RelativeVectors& rv, double alpha, double beta,
                         const CopOffsets& cops);

/// One leg in slope-frame coordinates. Angles live in the leg plane spanned by
/// the slope x axis and the hip-toe vector:
///   hip_pitch  thigh angle from the plane's downward axis, positive forward
///   knee       flexion (thigh pitch minus shank pitch)
///   ankle      dorsiflexion (foot pitch minus shank pitch, zero when the shank
///              is perpendicular to a flat foot)
///   hip_roll   tilt of the leg plane about the x axis, positive when the toe
///              lies to the +y side of the hip
struct LegPose {
  Vec3 hip = Vec3::Zero();
  Vec3 knee = Vec3::Zero();
  Vec3 ankle = Vec3::Zero();  // the heel
  Vec3 toe = Vec3::Zero();
  double hip_pitch = 0;
  double knee_angle = 0;
  double ankle_angle = 0;
  double hip_roll = 0;
  bool foot_flat = false;
};

/// Thigh towards the ground target, then shank and foot from the knee to the
/// toe. The heel never ends below the toe; when it would, the foot is laid flat
/// and the hip-knee-heel chain is solved with the knee forward.
LegPose solve_leg(const Vec3& hip, const Vec3& toe, const Vec3& target, const BodyModel& body);

/// Recomputes joint positions from hip, hip_roll and the three pitch angles.
LegPose leg_forward_kinematics(const Vec3& hip, double hip_roll, double hip_pitch,
                               double knee_angle, double ankle_angle, const BodyModel& body);

enum class HeightMethod { kFixed, kAdaptive };

struct Pose {
  Vec3 pelvis = Vec3::Zero();  // world frame
  LegPose left;                // world frame positions
  LegPose right;
  double t = 0;
  int support = 1;  // +1: right stance, -1: left stance
  HeightMethod method = HeightMethod::kAdaptive;
  bool fixed_fallback = false;  // fixed method failed, adaptive used instead
  double pelvis_height = 0;     // above the slope plane
  double reach_scale = 1;       // < 1 when feet were pulled in to stay reachable
};

/// Slope-frame point to world coordinates (terrain z = x tan(phi)).
Vec3 slope_to_world(const Vec3& p, double slope);

/// Smallest height of any joint above the terrain plane z = x tan(phi).
double terrain_clearance(const Pose& pose, double slope);

/// Stateless posture builder for one (body, config). `origin` is the slope-frame
/// position of the local 3LP frame.
class Converter {
 public:
  Converter() = default;
  Converter(const BodyModel& body, const GaitConfig& config,
            HeightMethod method = HeightMethod::kAdaptive);

  Pose operator()(const StateVec& q, double t, const Vec2& origin = Vec2::Zero()) const;
  Pose convert(const StateVec& q, double t, int support, const Vec2& origin = Vec2::Zero()) const;

  /// Like convert, but when the geometry is infeasible or a joint would end up
  /// below the terrain, the displayed feet are pulled towards their hips (swing
  /// foot first, then both) by the largest fraction that avoids both. Throws
  /// GeometryError only if no posture is reachable at all.
  Pose convert_within_reach(const StateVec& q, double t, int support,
                            const Vec2& origin = Vec2::Zero()) const;

  const ShapeFunctions& shapes() const { return shapes_; }

 private:
  BodyModel body_;
  GaitConfig config_;
  HeightMethod method_ = HeightMethod::kAdaptive;
  ShapeFunctions shapes_;
};

Pose convert(const StateVec& q, double t, const GaitConfig& config, const BodyModel& body,
             HeightMethod method = HeightMethod::kAdaptive);

}  // namespace walk3lp
