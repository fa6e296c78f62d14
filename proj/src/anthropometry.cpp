#include "walk3lp/anthropometry.hpp"

#include <cmath>
#include <stdexcept>

#include "walk3lp/config_file.hpp"

namespace walk3lp {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("body model: ") + name +
                                " must be positive and finite");
  }
}

}  // namespace

void BodyModel::validate() const {
  require_positive(total_mass, "total_mass");
  require_positive(total_height, "total_height");
  require_positive(leg_length, "leg_length");
  require_positive(foot_length, "foot_length");
  require_positive(pelvis_width, "pelvis_width");
  require_positive(thigh_length, "thigh_length");
  require_positive(shank_length, "shank_length");
  require_positive(swing_leg_mass, "swing_leg_mass");
  require_positive(stance_leg_mass, "stance_leg_mass");
  require_positive(torso_mass, "torso_mass");
  require_positive(swing_leg_inertia, "swing_leg_inertia");
  require_positive(stance_leg_inertia, "stance_leg_inertia");
  require_positive(gravity, "gravity");
  if (torso_com_offset < 0) {
    throw std::invalid_argument("body model: torso_com_offset must be >= 0");
  }
  if (std::abs(thigh_length + shank_length - leg_length) > 1e-9 * leg_length) {
    throw std::invalid_argument(
        "body model: thigh_length + shank_length must equal leg_length");
  }
}

BodyModel scale_body(double mass, double height, const ProportionTable& table) {
  if (!(mass > 0) || !(height > 0)) {
    throw std::invalid_argument("scale_body: mass and height must be positive");
  }
  BodyModel body;
  body.total_mass = mass;
  body.total_height = height;
  body.thigh_length = table.thigh_length * height;
  body.shank_length = table.shank_length * height;
  // The leg pendulum is the thigh + shank chain so that a stretched leg
  // reaches the pendulum's pelvis height exactly.
  body.leg_length = body.thigh_length + body.shank_length;
  body.foot_length = table.foot_length * height;
  body.pelvis_width = table.pelvis_width * height;
  body.torso_com_offset = table.torso_com_offset * height;
  body.swing_leg_mass = table.leg_mass * mass;
  body.stance_leg_mass = table.leg_mass * mass;
  body.torso_mass = mass - 2.0 * body.swing_leg_mass;
  const double rod = body.leg_length * body.leg_length / 12.0;
  body.swing_leg_inertia = body.swing_leg_mass * rod;
  body.stance_leg_inertia = body.stance_leg_mass * rod;
  body.gravity = table.gravity;
  body.validate();
  return body;
}

ProportionTable load_proportions(const std::string& path) {
  const ConfigFile file = ConfigFile::load(path);
  ProportionTable t;
  t.leg_length = file.get_double("anthropometry", "leg_length", t.leg_length);
  t.foot_length = file.get_double("anthropometry", "foot_length", t.foot_length);
  t.pelvis_width = file.get_double("anthropometry", "pelvis_width", t.pelvis_width);
  t.thigh_length = file.get_double("anthropometry", "thigh_length", t.thigh_length);
  t.shank_length = file.get_double("anthropometry", "shank_length", t.shank_length);
  t.torso_com_offset =
      file.get_double("anthropometry", "torso_com_offset", t.torso_com_offset);
  t.leg_mass = file.get_double("anthropometry", "leg_mass", t.leg_mass);
  t.torso_mass = file.get_double("anthropometry", "torso_mass", t.torso_mass);
  t.gravity = file.get_double("anthropometry", "gravity", t.gravity);
  if (std::abs(2.0 * t.leg_mass + t.torso_mass - 1.0) > 1e-6) {
    throw std::invalid_argument(
        "anthropometry: 2*leg_mass + torso_mass must sum to 1");
  }
  return t;
}

}  // namespace walk3lp
