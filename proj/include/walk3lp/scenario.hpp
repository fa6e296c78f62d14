#pragma once

#include <deque>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "walk3lp/sim.hpp"

namespace walk3lp {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One scripted command: {"at": s, "op": "set_param", "name": ..., "value": ...}
/// or {"at": s, "op": "push", "fx": N, "fy": N, "duration": s}.
struct ScenarioEvent {
  enum class Op { kSetParam, kPush };
  double at = 0;
  Op op = Op::kPush;
  std::string name;
  double value = 0;
  Vec2 force = Vec2::Zero();
  double duration = 0;

  static ScenarioEvent push(double at, const Vec2& force, double duration);
  static ScenarioEvent set_param(double at, const std::string& name, double value);
};

/// Parses a JSONL script; blank lines are skipped, unknown fields ignored.
/// Events are returned ordered by time, preserving file order for ties.
std::vector<ScenarioEvent> parse_scenario(std::istream& in);
std::vector<ScenarioEvent> load_scenario(const std::string& path);

/// Applies a named parameter in SI units (slope and torso in rad, freq in
/// steps/s). Throws std::out_of_range for out-of-bounds values and
/// std::invalid_argument for unknown names.
void apply_param(Simulation& sim, const std::string& name, double value);
/// Same naming and checks, applied directly to a body and config.
void apply_param(BodyModel& body, GaitConfig& config, const std::string& name, double value);
double param_value(const BodyModel& body, const GaitConfig& config, const std::string& name);

/// Emits frames at k / fps and applies scripted events in time order. Commands
/// at a frame time act before that frame is sampled. The simulation's control
/// samples are aligned with the frames.
class FrameDriver {
 public:
  FrameDriver(Simulation& sim, double fps);

  void schedule(const ScenarioEvent& e);
  void schedule(const std::vector<ScenarioEvent>& events);

  /// Samples the next frame.
  Frame next();
  double next_time() const { return time_base_ + frame_ / fps_; }
  long frames_emitted() const { return frame_; }
  double fps() const { return fps_; }

  void set_fps(double fps);

 private:
  void apply(const ScenarioEvent& e);

  Simulation& sim_;
  double fps_;
  long frame_ = 0;
  double time_base_ = 0;  // global time of frame 0 at the current rate
  std::deque<ScenarioEvent> queue_;
};

}  // namespace walk3lp
