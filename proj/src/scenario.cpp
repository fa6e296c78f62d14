#include "walk3lp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>

#include "json.hpp"

namespace walk3lp {

ScenarioEvent ScenarioEvent::push(double at, const Vec2& force, double duration) {
  ScenarioEvent e;
  e.at = at;
  e.op = Op::kPush;
  e.force = force;
  e.duration = duration;
  return e;
}

ScenarioEvent ScenarioEvent::set_param(double at, const std::string& name, double value) {
  ScenarioEvent e;
  e.at = at;
  e.op = Op::kSetParam;
  e.name = name;
  e.value = value;
  return e;
}

std::vector<ScenarioEvent> parse_scenario(std::istream& in) {
  std::vector<ScenarioEvent> events;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "scenario line " + std::to_string(n) + ": ";
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      const double at = j.at("at").get<double>();
      if (!(at >= 0) || !std::isfinite(at)) throw ScenarioError(where + "'at' must be >= 0");
      const std::string op = j.at("op").get<std::string>();
      if (op == "push") {
        const double d = j.at("duration").get<double>();
        if (!(d >= 0)) throw ScenarioError(where + "push duration must be >= 0");
        events.push_back(ScenarioEvent::push(
            at, Vec2(j.value("fx", 0.0), j.value("fy", 0.0)), d));
      } else if (op == "set_param") {
        events.push_back(ScenarioEvent::set_param(at, j.at("name").get<std::string>(),
                                                  j.at("value").get<double>()));
      } else {
        throw ScenarioError(where + "unknown op '" + op + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ScenarioError(where + e.what());
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.at < b.at; });
  return events;
}

std::vector<ScenarioEvent> load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  return parse_scenario(in);
}

void apply_param(BodyModel& body, GaitConfig& c, const std::string& name, double value) {
  if (!ParamBounds::find(name)) throw std::invalid_argument("unknown parameter '" + name + "'");
  ParamBounds::check(name, value);
  if (name == "height") {
    body = scale_body(body.total_mass, value);
  } else if (name == "mass") {
    body = scale_body(value, body.total_height);
  } else if (name == "speed") {
    c.speed = value;
  } else if (name == "freq") {
    const double ratio = c.ds_ratio();
    c.step_time = 1 / value;
    c.double_support_time = ratio * c.step_time;
  } else if (name == "ds_ratio") {
    c.double_support_time = value * c.step_time;
  } else if (name == "slope") {
    c.slope = value;
  } else if (name == "torso") {
    c.torso_bend = value;
  } else if (name == "clearance") {
    c.clearance = value;
  } else if (name == "drag") {
    c.drag = value;
  } else if (name == "lateral_force") {
    c.lateral_force = value;
  }
}

void apply_param(Simulation& sim, const std::string& name, double value) {
  BodyModel b = sim.target_body();
  GaitConfig c = sim.target_config();
  apply_param(b, c, name, value);
  if (name == "height" || name == "mass") {
    sim.set_body(b);
  } else {
    sim.set_params(c);
  }
}

double param_value(const BodyModel& body, const GaitConfig& c, const std::string& name) {
  if (name == "speed") return c.speed;
  if (name == "freq") return c.frequency();
  if (name == "ds_ratio") return c.ds_ratio();
  if (name == "slope") return c.slope;
  if (name == "torso") return c.torso_bend;
  if (name == "clearance") return c.clearance;
  if (name == "drag") return c.drag;
  if (name == "lateral_force") return c.lateral_force;
  if (name == "height") return body.total_height;
  if (name == "mass") return body.total_mass;
  throw std::invalid_argument("unknown parameter '" + name + "'");
}

FrameDriver::FrameDriver(Simulation& sim, double fps) : sim_(sim), fps_(fps) {
  if (!(fps > 0)) throw std::invalid_argument("fps must be positive");
  time_base_ = sim.time();
  sim_.set_control_rate(fps_, time_base_);
}

void FrameDriver::schedule(const ScenarioEvent& e) {
  const auto pos = std::upper_bound(queue_.begin(), queue_.end(), e,
                                    [](const ScenarioEvent& a, const ScenarioEvent& b) {
                                      return a.at < b.at;
                                    });
  queue_.insert(pos, e);
}

void FrameDriver::schedule(const std::vector<ScenarioEvent>& events) {
  for (const ScenarioEvent& e : events) schedule(e);
}

void FrameDriver::set_fps(double fps) {
  if (!(fps > 0)) throw std::invalid_argument("fps must be positive");
  time_base_ = next_time();
  frame_ = 0;
  fps_ = fps;
  sim_.set_control_rate(fps_, time_base_);
}

void FrameDriver::apply(const ScenarioEvent& e) {
  if (e.at > sim_.time()) sim_.step_to(e.at);
  if (e.op == ScenarioEvent::Op::kPush) {
    sim_.apply_push(e.force, e.at, e.duration);
  } else {
    apply_param(sim_, e.name, e.value);
  }
}

Frame FrameDriver::next() {
  const double t = time_base_ + frame_ / fps_;
  while (!queue_.empty() && queue_.front().at <= t) {
    const ScenarioEvent e = queue_.front();
    queue_.pop_front();
    apply(e);
  }
  ++frame_;
  return sim_.sample_frame(t);
}

}  // namespace walk3lp
