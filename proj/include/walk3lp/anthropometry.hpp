#pragma once

#include <string>

namespace walk3lp {

/// Segment proportions relative to total height (lengths) and total mass
/// (masses). Defaults follow the common Winter/Dempster table.
struct ProportionTable {
  double leg_length = 0.530;     // hip joint to ground
  double foot_length = 0.152;    // heel to toe
  double pelvis_width = 0.191;   // hip joint to hip joint
  double thigh_length = 0.245;
  double shank_length = 0.285;   // knee to ground, ankle height folded in
  double torso_com_offset = 0.180;  // hip joint to trunk/head/arms CoM
  double leg_mass = 0.161;       // per leg
  double torso_mass = 0.678;     // trunk + head + arms
  double gravity = 9.81;
};

struct BodyModel {
  double total_mass = 0;
  double total_height = 0;
  double leg_length = 0;    // l
  double foot_length = 0;   // h
  double pelvis_width = 0;  // w
  double thigh_length = 0;
  double shank_length = 0;
  double torso_com_offset = 0;
  double swing_leg_mass = 0;   // m1 in the state ordering [swing, pelvis, stance]
  double stance_leg_mass = 0;  // m2
  double torso_mass = 0;       // m3
  // Thin-rod inertia about the limb midpoint; identical in the sagittal and
  // lateral planes.
  double swing_leg_inertia = 0;
  double stance_leg_inertia = 0;
  double gravity = 9.81;

  /// Throws std::invalid_argument unless every invariant holds.
  void validate() const;
};

/// Builds a body from total mass [kg] and height [m].
BodyModel scale_body(double mass, double height,
                     const ProportionTable& table = ProportionTable{});

/// Reads `[anthropometry]` overrides from a key-value file; keys missing from
/// the file keep their default values.
ProportionTable load_proportions(const std::string& path);

}  // namespace walk3lp
