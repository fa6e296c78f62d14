#pragma once

#include <string>

#include "walk3lp/types.hpp"

namespace walk3lp {

struct GaitConfig {
  double step_time = 1.0 / 1.7;      // T [s]
  double double_support_time = 0.0;  // T_ds [s], T_ss = T - T_ds
  double speed = 1.0;                // desired mean sagittal speed [m/s]
  double slope = 0.0;                // phi [rad], positive uphill
  double torso_bend = 0.0;           // theta [rad] from the world vertical
  double clearance = 0.05;           // swing toe lift, fraction of leg length
  double drag = 0.0;                 // constant sagittal force on the torso [N]
  double lateral_force = 0.0;        // constant lateral force on the torso [N]
  int support = 1;                   // d = +1 or -1

  static GaitConfig from_frequency(double steps_per_second, double ds_ratio,
                                   double speed);

  double single_support_time() const { return step_time - double_support_time; }
  double frequency() const { return 1.0 / step_time; }
  double ds_ratio() const { return double_support_time / step_time; }

  ConstVec constants() const;

  /// Throws std::invalid_argument for structurally invalid configs.
  void validate() const;
};

/// Parameter ranges within which the generated gait stays human-like; used
/// for validation of live parameter changes and sent to UI clients.
struct ParamRange {
  const char* name;
  double min;
  double max;
  const char* unit;
};

struct ParamBounds {
  static constexpr ParamRange kRanges[] = {
      {"speed", -1.5, 1.5, "m/s"},      {"freq", 1.0, 2.5, "steps/s"},
      {"ds_ratio", 0.0, 0.4, "1"},      {"slope", -0.2, 0.2, "rad"},
      {"torso", -0.15, 0.3, "rad"},     {"clearance", 0.0, 0.15, "1"},
      {"drag", -60.0, 60.0, "N"},       {"lateral_force", -60.0, 60.0, "N"},
      {"height", 0.8, 2.6, "m"},        {"mass", 10.0, 150.0, "kg"},
  };

  static const ParamRange* find(const std::string& name);
  /// Throws std::out_of_range with a message when outside the range.
  static void check(const std::string& name, double value);
  static void check(const GaitConfig& config);
};

}  // namespace walk3lp
