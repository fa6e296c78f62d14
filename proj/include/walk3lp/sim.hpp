#pragma once

#include <optional>
#include <vector>

#include "walk3lp/control.hpp"
#include "walk3lp/kinematics.hpp"

namespace walk3lp {

/// Constant force window on the torso, world horizontal axes [N].
struct Push {
  Vec2 force = Vec2::Zero();
  double start = 0;
  double duration = 0;
  double end() const { return start + duration; }
};

struct SimOptions {
  double control_rate = 30;  // control samples per second on the global clock
  HeightMethod method = HeightMethod::kAdaptive;
  ControlWeights weights;
};

/// Snapshot of the simulation clock and 3LP state. `q` is expressed in the
/// canonical frame of the current step: stance foot at the origin and lateral
/// axis flipped when the world support flag is -1.
struct SimState {
  double t_global = 0;
  double phase = 0;
  long step = 0;
  StateVec q;
  int support = 1;  // world support flag of the current step
  Vec2 anchor = Vec2::Zero();  // world (slope frame) position of the stance foot
  Vec8 du = Vec8::Zero();      // held torque correction
  Vec8 error = Vec8::Zero();   // error at the last control sample
};

struct Frame {
  double t_global = 0;
  long step = 0;
  double phase = 0;
  Pose pose;
  double error_norm = 0;
  Vec8 du = Vec8::Zero();
  bool push_active = false;
  bool geometry_ok = true;
};

class Simulation {
 public:
  Simulation(const BodyModel& body, const GaitConfig& config, const SimOptions& options = {});

  /// Advances by closed-form segments, splitting at support exchanges, push
  /// edges and control samples. Requires t_next >= time().
  void step_to(double t_next);

  /// Queues a push; the controller only sees its effect on the state.
  void apply_push(const Vec2& force, double start, double duration);

  /// Validates against ParamBounds and re-solves on the next control sample.
  /// Timing and body changes wait for the next support exchange so the phase
  /// clock stays meaningful. Throws std::out_of_range or std::invalid_argument.
  void set_params(const GaitConfig& config);
  void set_body(const BodyModel& body);

  Frame sample_frame(double t);

  /// Control samples fall on origin + k / rate.
  void set_control_rate(double rate, double origin);

  const SimState& state() const { return s_; }
  double time() const { return s_.t_global; }
  const PeriodicGait& gait() const { return gait_; }
  const Controller& controller() const { return controller_; }
  const GaitConfig& config() const { return config_; }
  const BodyModel& body() const { return body_; }
  /// Config and body after all pending changes.
  const GaitConfig& target_config() const { return pending_config_ ? *pending_config_ : config_; }
  const BodyModel& target_body() const { return pending_body_ ? *pending_body_ : body_; }
  /// Current state in world orientation, translated by the anchor.
  StateVec world_state() const;
  Vec8 current_error() const;
  bool push_active(double t) const;

 private:
  void rebuild();
  void advance(double dt);
  void exchange();
  void control_update();
  void apply_pending(bool at_exchange);
  Vec5 excitation(double t_mid) const;
  double next_sample(double t) const;
  double next_push_edge(double t) const;

  BodyModel body_;
  GaitConfig config_;
  SimOptions options_;
  PeriodicGait gait_;
  Controller controller_;
  Converter converter_;
  SimState s_;
  double control_origin_ = 0;
  std::vector<Push> pushes_;
  std::optional<GaitConfig> pending_config_;
  std::optional<BodyModel> pending_body_;
  Pose last_pose_;
};

}  // namespace walk3lp
