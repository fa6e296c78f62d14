#include "walk3lp/sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "walk3lp/dynamics.hpp"

namespace walk3lp {

namespace {

constexpr double kTimeEps = 1e-12;

bool same_timing(const GaitConfig& a, const GaitConfig& b) {
  return a.step_time == b.step_time && a.double_support_time == b.double_support_time;
}

bool same_config(const GaitConfig& a, const GaitConfig& b) {
  return same_timing(a, b) && a.speed == b.speed && a.slope == b.slope &&
         a.torso_bend == b.torso_bend && a.clearance == b.clearance && a.drag == b.drag &&
         a.lateral_force == b.lateral_force;
}

}  // namespace

Simulation::Simulation(const BodyModel& body, const GaitConfig& config, const SimOptions& options)
    : body_(body), config_(config), options_(options) {
  if (!(options_.control_rate > 0)) throw std::invalid_argument("control rate must be positive");
  if (config.support != 1 && config.support != -1) {
    throw std::invalid_argument("support flag must be +1 or -1");
  }
  s_.support = config.support;
  rebuild();
  s_.q = StateVec(gait_.Qbar);
  control_update();
}

void Simulation::rebuild() {
  // The nominal gait lives in the canonical frame. A constant lateral force
  // has no one-step symmetric gait, so it stays outside the nominal model.
  GaitConfig canonical = config_;
  canonical.support = 1;
  canonical.lateral_force = 0;
  gait_ = solve_periodic_gait(body_, canonical);
  controller_ = Controller(gait_, options_.weights);
  converter_ = Converter(body_, canonical, options_.method);
}

void Simulation::apply_push(const Vec2& force, double start, double duration) {
  if (!(duration >= 0)) throw std::invalid_argument("push duration must be non-negative");
  pushes_.push_back({force, start, duration});
}

void Simulation::set_params(const GaitConfig& config) {
  config.validate();
  ParamBounds::check(config);
  GaitConfig next = config;
  next.support = config_.support;
  if (pending_config_ ? same_config(next, *pending_config_) : same_config(next, config_)) return;
  pending_config_ = next;
}

void Simulation::set_body(const BodyModel& body) {
  body.validate();
  ParamBounds::check("mass", body.total_mass);
  ParamBounds::check("height", body.total_height);
  pending_body_ = body;
}

void Simulation::apply_pending(bool at_exchange) {
  bool changed = false;
  if (pending_config_ && (at_exchange || same_timing(*pending_config_, config_))) {
    config_ = *pending_config_;
    pending_config_.reset();
    changed = true;
  }
  if (pending_body_ && at_exchange) {
    body_ = *pending_body_;
    pending_body_.reset();
    changed = true;
  }
  if (changed) rebuild();
}

bool Simulation::push_active(double t) const {
  for (const Push& p : pushes_) {
    if (p.start <= t && t < p.end()) return true;
  }
  return false;
}

Vec5 Simulation::excitation(double t_mid) const {
  Vec2 force(config_.drag, config_.lateral_force);
  for (const Push& p : pushes_) {
    if (p.start <= t_mid && t_mid < p.end()) force += p.force;
  }
  Vec5 v = gait_.Vbar.v;
  v(3) = force.x();
  v(4) = s_.support * force.y();
  return v;
}

void Simulation::set_control_rate(double rate, double origin) {
  if (!(rate > 0)) throw std::invalid_argument("control rate must be positive");
  options_.control_rate = rate;
  control_origin_ = origin;
}

double Simulation::next_sample(double t) const {
  const double n = std::floor((t - control_origin_) * options_.control_rate + 1e-9) + 1;
  return control_origin_ + n / options_.control_rate;
}

double Simulation::next_push_edge(double t) const {
  // Only edges where the total push force changes count as events, so a push
  // split into back-to-back pieces behaves like the single push.
  auto total = [&](double at) {
    Vec2 f = Vec2::Zero();
    for (const Push& p : pushes_) {
      if (p.start <= at && at < p.end()) f += p.force;
    }
    return f;
  };
  double best = std::numeric_limits<double>::infinity();
  for (const Push& p : pushes_) {
    for (double e : {p.start, p.end()}) {
      if (e > t + kTimeEps && e < best && total(e) != total(std::nextafter(e, -1e300))) {
        best = e;
      }
    }
  }
  return best;
}

void Simulation::advance(double dt) {
  if (dt <= 0) return;
  const double t_mid = s_.t_global + 0.5 * dt;
  const TorqueProfile u(gait_.Ubar + s_.du);
  const double to = std::min(s_.phase + dt, config_.step_time);
  s_.q = StateVec(gait_.step.propagate(s_.q.q, u, excitation(t_mid), s_.phase, to));
  s_.phase = to;
}

void Simulation::exchange() {
  const StateVec ex = exchange_support(s_.q);
  const Vec2 offset = ex.stance();
  s_.anchor += Vec2(offset.x(), s_.support * offset.y());
  s_.q = mirror_lateral(translated(ex, -offset));
  s_.support = -s_.support;
  s_.phase = 0;
  ++s_.step;
}

Vec8 Simulation::current_error() const {
  return measure_error(s_.q, gait_.nominal_state(s_.phase));
}

void Simulation::control_update() {
  s_.error = current_error();
  if (auto proj = controller_.project(s_.error, s_.phase)) s_.du = proj->du;
}

void Simulation::step_to(double t_next) {
  if (t_next < s_.t_global - kTimeEps) {
    throw std::invalid_argument("step_to: cannot go back in time");
  }
  while (s_.t_global < t_next) {
    const double phase_end = s_.t_global + (config_.step_time - s_.phase);
    const double sample = next_sample(s_.t_global);
    const double edge = next_push_edge(s_.t_global);
    const double t_ev = std::min({t_next, phase_end, sample, edge});
    const bool at_phase_end = t_ev >= phase_end - kTimeEps;
    advance(at_phase_end ? config_.step_time - s_.phase : t_ev - s_.t_global);
    s_.t_global = t_ev;
    if (at_phase_end) {
      exchange();
      apply_pending(true);
      control_update();
    } else if (std::abs(t_ev - sample) < kTimeEps || std::abs(t_ev - edge) < kTimeEps) {
      apply_pending(false);
      control_update();
    }
  }
}

StateVec Simulation::world_state() const {
  const StateVec oriented = s_.support > 0 ? s_.q : mirror_lateral(s_.q);
  return translated(oriented, s_.anchor);
}

Frame Simulation::sample_frame(double t) {
  step_to(t);
  Frame f;
  f.t_global = s_.t_global;
  f.step = s_.step;
  f.phase = s_.phase;
  f.du = s_.du;
  f.error_norm = current_error().norm();
  f.push_active = push_active(t);
  const StateVec oriented = s_.support > 0 ? s_.q : mirror_lateral(s_.q);
  try {
    f.pose = converter_.convert_within_reach(oriented, s_.phase, s_.support, s_.anchor);
    last_pose_ = f.pose;
  } catch (const GeometryError&) {
    f.geometry_ok = false;
    f.pose = last_pose_;
    f.pose.t = s_.phase;
  }
  return f;
}

}  // namespace walk3lp
