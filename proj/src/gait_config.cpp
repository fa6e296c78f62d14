#include "walk3lp/gait_config.hpp"

#include <cmath>
#include <stdexcept>

namespace walk3lp {

GaitConfig GaitConfig::from_frequency(double steps_per_second, double ds_ratio,
                                      double speed) {
  if (!(steps_per_second > 0)) {
    throw std::invalid_argument("gait config: frequency must be positive");
  }
  GaitConfig c;
  c.step_time = 1.0 / steps_per_second;
  c.double_support_time = ds_ratio * c.step_time;
  c.speed = speed;
  return c;
}

ConstVec GaitConfig::constants() const {
  Vec5 v;
  v << static_cast<double>(support), std::sin(torso_bend + slope), std::sin(slope),
      drag, lateral_force;
  return ConstVec(v);
}

void GaitConfig::validate() const {
  if (!(step_time > 0) || !std::isfinite(step_time)) {
    throw std::invalid_argument("gait config: step time must be positive");
  }
  if (!(double_support_time >= 0) || !(double_support_time < step_time)) {
    throw std::invalid_argument("gait config: need 0 <= T_ds < T");
  }
  if (support != 1 && support != -1) {
    throw std::invalid_argument("gait config: support flag must be +1 or -1");
  }
  if (std::abs(slope) >= 0.5 * M_PI || std::abs(torso_bend + slope) >= 0.5 * M_PI) {
    throw std::invalid_argument("gait config: slope/torso angle out of range");
  }
  if (clearance < 0) {
    throw std::invalid_argument("gait config: clearance must be >= 0");
  }
}

const ParamRange* ParamBounds::find(const std::string& name) {
  for (const auto& r : kRanges) {
    if (name == r.name) return &r;
  }
  return nullptr;
}

void ParamBounds::check(const std::string& name, double value) {
  const ParamRange* r = find(name);
  if (r == nullptr) throw std::out_of_range("unknown parameter '" + name + "'");
  if (!std::isfinite(value) || value < r->min || value > r->max) {
    throw std::out_of_range("parameter '" + name + "'=" + std::to_string(value) +
                            " outside [" + std::to_string(r->min) + ", " +
                            std::to_string(r->max) + "]");
  }
}

void ParamBounds::check(const GaitConfig& c) {
  c.validate();
  check("speed", c.speed);
  check("freq", c.frequency());
  check("ds_ratio", c.ds_ratio());
  check("slope", c.slope);
  check("torso", c.torso_bend);
  check("clearance", c.clearance);
  check("drag", c.drag);
  check("lateral_force", c.lateral_force);
}

}  // namespace walk3lp
