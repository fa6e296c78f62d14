// Acceptance suite: one PASS/FAIL line per primary criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "walk3lp/bench.hpp"
#include "walk3lp/control.hpp"
#include "walk3lp/gait.hpp"
#include "walk3lp/kinematics.hpp"
#include "walk3lp/sim.hpp"

using namespace walk3lp;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

constexpr double kDeg = std::numbers::pi / 180;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GaitConfig default_config() {
  GaitConfig c = GaitConfig::from_frequency(1.7, 0.2, 1.0);
  c.clearance = 0.05;
  return c;
}

const BodyModel& adult() {
  static const BodyModel b = scale_body(70, 1.7);
  return b;
}

std::vector<GaitConfig> parameter_grid() {
  std::vector<GaitConfig> grid;
  for (double speed : {-1.5, -0.75, 0.0, 0.75, 1.5})
    for (double freq : {1.0, 1.75, 2.5})
      for (double ds : {0.0, 0.2, 0.4})
        for (double slope : {-0.2, 0.0, 0.2})
          for (double torso : {-0.15, 0.3})
            for (double drag : {-60.0, 60.0}) {
              GaitConfig c = GaitConfig::from_frequency(freq, ds, speed);
              c.slope = slope;
              c.torso_bend = torso;
              c.drag = drag;
              grid.push_back(c);
            }
  return grid;
}

void oracle_equivalence() {
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(2024);
  double worst = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const oracle::RandomCase c = oracle::random_case(rng);
    const ContinuousDynamics dyn = assemble_dynamics(c.body, c.config);
    const StepTransition step(dyn);
    const Vec12 ref = oracle::rk_integrate(dyn, c.q0, c.u, c.v, c.t, 5e-5);
    worst = std::max(worst, oracle::relative_error(step.at(c.t).apply(c.q0, c.u, c.v), ref));
    worst = std::max(worst, oracle::relative_error(
                                step.propagate(c.q0, TorqueProfile(c.u), c.v, 0.0, c.t), ref));
  }
  const double s = seconds_since(t0);
  report("closed form vs numerical oracle", worst < 1e-8 && s < 30,
         fmt("%d cases, worst relative error %.2e (< 1e-8), %.1f s (< 30 s)", n, worst, s));
}

void periodicity_grid() {
  const auto t0 = clock_type::now();
  const auto grid = parameter_grid();
  double per = 0, foot = 0, speed = 0;
  int solved = 0;
  for (const GaitConfig& c : grid) {
    try {
      const GaitResiduals r = periodic_residuals(solve_periodic_gait(adult(), c));
      per = std::max(per, r.periodicity);
      foot = std::max(foot, r.foot_velocity);
      speed = std::max(speed, r.speed);
      ++solved;
    } catch (const GaitSolveError&) {
    }
  }
  const double s = seconds_since(t0);
  const bool ok = solved == static_cast<int>(grid.size()) && grid.size() >= 500 && per < 1e-9 &&
                  foot < 1e-9 && speed < 1e-9 && s < 60;
  report("periodic gaits over the parameter grid", ok,
         fmt("%d/%zu configs solved, periodicity %.1e, foot velocity %.1e, speed %.1e (< 1e-9), "
             "%.1f s (< 60 s)",
             solved, grid.size(), per, foot, speed, s));
}

void controller() {
  const auto grid = parameter_grid();
  double rho = 0;
  for (const GaitConfig& c : grid) {
    rho = std::max(rho, Controller(solve_periodic_gait(adult(), c)).gain.spectral_radius);
  }

  std::mt19937_64 rng(99);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<>(a, b)(rng); };
  auto random_error = [&](double scale) {
    Vec8 e;
    for (int i = 0; i < 8; ++i) e(i) = uni(-scale, scale);
    return e;
  };

  double t0_gap = 0;
  for (int i = 0; i < 50; ++i) {
    const GaitConfig& c = grid[i * grid.size() / 50];
    const Controller ctl(solve_periodic_gait(adult(), c));
    const Vec8 e = random_error(0.05);
    const auto p = ctl.project(e, 0.0);
    t0_gap = std::max(t0_gap, p ? (p->du + ctl.gain.K * e).cwiseAbs().maxCoeff() : 1e9);
  }

  double consistency = 0;
  int rollouts = 0;
  for (; rollouts < 100; ++rollouts) {
    GaitConfig c = GaitConfig::from_frequency(uni(1.0, 2.5), uni(0, 0.4), uni(-1.5, 1.5));
    c.slope = uni(-0.2, 0.2);
    c.torso_bend = uni(-0.15, 0.3);
    c.drag = uni(-60, 60);
    const PeriodicGait gait = solve_periodic_gait(adult(), c);
    const Controller ctl(gait);
    const Vec8 E0 = random_error(0.03);
    const Vec8 dU = -ctl.gain.K * E0;
    const StateVec q0(gait.Qbar + ctl.model.ops().Mhat * E0);
    const double t = uni(0, 0.95) * c.step_time;
    const StateVec q(gait.step.propagate(q0.q, TorqueProfile(gait.Ubar + dU), gait.Vbar.v, 0, t));
    const auto p = ctl.project(measure_error(q, gait.nominal_state(t)), t);
    if (!p) {
      consistency = 1e9;
      continue;
    }
    consistency = std::max({consistency, (p->E - E0).cwiseAbs().maxCoeff(),
                            (p->du - dU).cwiseAbs().maxCoeff() / std::max(1.0, dU.norm())});
  }
  report("time-projection controller", rho < 1 && t0_gap < 1e-12 && consistency < 1e-9,
         fmt("spectral radius max %.4f over %zu configs (< 1), |du + K e| at t=0 %.1e (< 1e-12), "
             "projection consistency %.1e on %d rollouts (< 1e-9)",
             rho, grid.size(), t0_gap, consistency, rollouts));
}

void push_recovery() {
  const GaitConfig cfg = default_config();
  const double T = cfg.step_time;
  int passed = 0, total = 0;
  double worst_ratio = 0;
  for (const Vec2& force : {Vec2(50, 0), Vec2(-50, 0), Vec2(0, 50), Vec2(0, -50)}) {
    for (double start : {2 * T, 2.5 * T}) {
      Simulation sim(adult(), cfg);
      sim.apply_push(force, start, T);
      const double end = start + T;
      double peak = 0, after = 0;
      for (int k = 0; k * (1 / 30.0) <= end + 8 * T; ++k) {
        const Frame f = sim.sample_frame(k / 30.0);
        peak = std::max(peak, f.error_norm);
        if (f.t_global >= end + 5 * T) after = std::max(after, f.error_norm);
      }
      ++total;
      const double ratio = peak > 0 ? after / peak : 1;
      worst_ratio = std::max(worst_ratio, ratio);
      if (peak > 0 && ratio < 0.05) ++passed;
    }
  }
  report("50 N push recovery", passed == total,
         fmt("%d/%d sagittal and lateral pushes over one step recovered; worst error after 5 "
             "steps %.2e of peak (< 5%%)",
             passed, total, worst_ratio));
}

struct Scenario {
  std::string name;
  BodyModel body;
  GaitConfig config;
};

std::vector<Scenario> scenarios() {
  std::vector<Scenario> out;
  auto add = [&](const std::string& name, const BodyModel& b, const std::function<void(GaitConfig&)>& f) {
    GaitConfig c = default_config();
    f(c);
    out.push_back({name, b, c});
  };
  // Treadmill speeds with a typical cadence for each.
  add("2 km/h", adult(), [](GaitConfig& c) { c = GaitConfig::from_frequency(1.5, 0.2, 2 / 3.6); c.clearance = 0.05; });
  add("4 km/h", adult(), [](GaitConfig& c) { c = GaitConfig::from_frequency(1.75, 0.2, 4 / 3.6); c.clearance = 0.05; });
  add("6 km/h", adult(), [](GaitConfig& c) { c = GaitConfig::from_frequency(2.0, 0.2, 6 / 3.6); c.clearance = 0.05; });
  add("backward", adult(), [](GaitConfig& c) { c.speed = -0.8; });
  add("slope +8", adult(), [](GaitConfig& c) { c.slope = 8 * kDeg; });
  add("slope -8", adult(), [](GaitConfig& c) { c.slope = -8 * kDeg; });
  add("torso +10", adult(), [](GaitConfig& c) { c.torso_bend = 10 * kDeg; });
  add("torso -10", adult(), [](GaitConfig& c) { c.torso_bend = -10 * kDeg; });
  add("clearance 0", adult(), [](GaitConfig& c) { c.clearance = 0; });
  add("clearance 10%", adult(), [](GaitConfig& c) { c.clearance = 0.1; });
  add("drag +50", adult(), [](GaitConfig& c) { c.drag = 50; });
  add("drag -50", adult(), [](GaitConfig& c) { c.drag = -50; });
  add("child 1.0 m", scale_body(20, 1.0), [](GaitConfig& c) { c = GaitConfig::from_frequency(2.3, 0.2, 0.6); c.clearance = 0.05; });
  add("tall 2.5 m", scale_body(120, 2.5), [](GaitConfig& c) { c = GaitConfig::from_frequency(1.3, 0.2, 1.2); c.clearance = 0.05; });
  return out;
}

bool same_leg(const LegPose& a, const LegPose& b) {
  return a.hip == b.hip && a.knee == b.knee && a.ankle == b.ankle && a.toe == b.toe &&
         a.hip_pitch == b.hip_pitch && a.knee_angle == b.knee_angle &&
         a.ankle_angle == b.ankle_angle && a.hip_roll == b.hip_roll && a.foot_flat == b.foot_flat;
}

bool same_pose(const Pose& a, const Pose& b) {
  return a.pelvis == b.pelvis && same_leg(a.left, b.left) && same_leg(a.right, b.right) &&
         a.pelvis_height == b.pelvis_height && a.fixed_fallback == b.fixed_fallback &&
         a.reach_scale == b.reach_scale && a.support == b.support;
}

void kinematic_invariants() {
  double length_err = 0, penetration = 0, dominance = 0, fixed_slope = 0;
  long frames = 0, mismatches = 0, dominance_checked = 0, clamped = 0, geometry_failed = 0;
  int slope_checks = 0, slope_skipped = 0;
  for (const Scenario& sc : scenarios()) {
    const BodyModel& b = sc.body;
    const double T = sc.config.step_time;
    for (HeightMethod method : {HeightMethod::kAdaptive, HeightMethod::kFixed}) {
      for (const Vec2& push : {Vec2(0, 0), Vec2(50, 0), Vec2(0, 50)}) {
        SimOptions opt;
        opt.method = method;
        Simulation sim(b, sc.config, opt);
        if (push.norm() > 0) sim.apply_push(push, 2 * T, T);
        const Converter fresh(b, sc.config, method);
        const double phi = sc.config.slope;
        for (int k = 0; k <= 30 * 8; ++k) {
          const Frame f = sim.sample_frame(k / 30.0);
          ++frames;
          if (!f.geometry_ok) {
            ++geometry_failed;
            continue;
          }
          for (const LegPose* leg : {&f.pose.left, &f.pose.right}) {
            length_err = std::max({length_err, std::abs((leg->knee - leg->hip).norm() - b.thigh_length),
                                   std::abs((leg->ankle - leg->knee).norm() - b.shank_length),
                                   std::abs((leg->toe - leg->ankle).norm() - b.foot_length)});
            for (const Vec3& p : {leg->hip, leg->knee, leg->ankle, leg->toe}) {
              penetration = std::max(penetration, p.x() * std::tan(phi) - p.z());
            }
          }
          const SimState& s = sim.state();
          const StateVec oriented = s.support > 0 ? s.q : mirror_lateral(s.q);
          if (!same_pose(fresh.convert_within_reach(oriented, s.phase, s.support, s.anchor), f.pose)) {
            ++mismatches;
          }
          if (f.pose.reach_scale < 1) {
            ++clamped;
          } else if (method == HeightMethod::kAdaptive || f.pose.fixed_fallback) {
            const RelativeVectors rv = relative_vectors(oriented, s.support, b.pelvis_width);
            const CopOffsets cops = cop_offsets(rv.p, rv.r, b.foot_length, b.leg_length);
            const double a = fresh.shapes().alpha(s.phase);
            const HeightCandidates hc =
                pelvis_height_adaptive(rv.p + a * rv.p_rate, rv.r + a * rv.p_rate, cops,
                                       b.foot_length, b.leg_length, phi);
            dominance = std::max(dominance, f.pose.pelvis_height - std::min(hc.stance, hc.swing));
            ++dominance_checked;
          }
        }
      }
    }
    // Boundary slopes of the fixed-method pelvis height on the periodic gait.
    const PeriodicGait gait = solve_periodic_gait(b, sc.config);
    const Converter fixed(b, sc.config, HeightMethod::kFixed);
    auto height = [&](double t) { return fixed(gait.nominal_state(t), t); };
    for (double tb : {sc.config.double_support_time, T}) {
      const double e = 1e-5;
      const double t0 = std::max(0.0, tb - e), t1 = std::min(T, tb + e);
      const Pose p0 = height(t0), p1 = height(t1);
      if (p0.fixed_fallback || p1.fixed_fallback) {
        ++slope_skipped;
        continue;
      }
      fixed_slope = std::max(fixed_slope, std::abs(p1.pelvis_height - p0.pelvis_height) / (t1 - t0));
      ++slope_checks;
    }
  }
  const bool ok = length_err <= 1e-9 && penetration <= 1e-9 && mismatches == 0 &&
                  dominance <= 1e-12 && fixed_slope < 1e-3 && slope_checks > 0;
  report("kinematic invariants over scenario rollouts", ok,
         fmt("%ld frames from %zu scenarios; segment length error %.1e (<= 1e-9), penetration "
             "%.1e m (<= 1e-9), reconversion mismatches %ld, adaptive height above candidates "
             "%.1e over %ld frames, fixed boundary slope %.1e m/s over %d boundaries (%d skipped "
             "on fixed fallback); %ld frames with feet pulled in, %ld held on geometry failure",
             frames, scenarios().size(), length_err, penetration, mismatches, dominance,
             dominance_checked, fixed_slope, slope_checks, slope_skipped, clamped, geometry_failed));
}

void qualitative() {
  const BodyModel& b = adult();
  auto touchdown_knee = [&](const GaitConfig& cfg) {
    const PeriodicGait gait = solve_periodic_gait(b, cfg);
    const Converter conv(b, cfg);
    const StateVec q = exchange_support(gait.nominal_state(cfg.step_time));
    const Pose pose = conv.convert(q, 0.0, -cfg.support);
    return (cfg.support > 0 ? pose.left : pose.right).knee_angle;
  };
  GaitConfig flat = default_config();
  GaitConfig up = flat;
  up.slope = 8 * kDeg;
  const double k_flat = touchdown_knee(flat), k_up = touchdown_knee(up);

  const PeriodicGait gait = solve_periodic_gait(b, flat);
  const ShapeFunctions sh(flat.double_support_time, flat.step_time);
  bool forward = true;
  double prev = -1e9;
  for (int i = 0; i <= 40; ++i) {
    const double t = flat.double_support_time * i / 40;
    const StateVec q = gait.nominal_state(t);
    const RelativeVectors rv = relative_vectors(q, flat.support, b.pelvis_width);
    const KneeTargets k = knee_targets(rv, sh.alpha(t), sh.beta(t),
                                       cop_offsets(rv.p, rv.r, b.foot_length, b.leg_length));
    const double x = q.pelvis().x() + k.swing.x();
    forward = forward && x > prev;
    prev = x;
  }

  GaitConfig still = flat;
  still.speed = 0;
  still.slope = 0.12;
  const PeriodicGait sg = solve_periodic_gait(b, still);
  const Converter sc(b, still);
  double lean = 0, reach = 1;
  for (double s : {0.0, 0.3, 0.6, 0.9}) {
    const double t = s * still.step_time;
    const LegPose st = sc(sg.nominal_state(t), t).right;
    lean = std::max(lean, std::abs(st.hip.x() - st.ankle.x()));
    reach = std::min(reach, (st.hip - st.ankle).norm() / b.leg_length);
  }
  const bool ok = k_flat > 0 && k_up > k_flat && forward && lean < 2e-3 && reach > 0.99;
  report("qualitative gait behaviours", ok,
         fmt("touch-down knee flexion %.1f deg flat (> 0), %.1f deg at +8 deg slope (> flat); "
             "swing knee target advancing through double support: %s; standing on a 0.12 rad "
             "slope: hip %.1e m from vertical over heel, hip-heel reach %.3f l",
             k_flat / kDeg, k_up / kDeg, forward ? "yes" : "no", lean, reach));
}

void performance() {
  const auto t0 = clock_type::now();
  const BenchReport r = run_bench(adult(), default_config(), 1000000, 1, 30, 500);
  const double s = seconds_since(t0);
  report("performance", r.median_frame_us < 100 && r.gait_solve_median_us < 1000 && s < 120,
         fmt("median frame %.1f us (< 100 us), p99 %.1f us, periodic gait solve median %.1f us "
             "max %.1f us (< 1 ms), 1e6-frame bench in %.1f s (< 2 min)",
             r.median_frame_us, r.p99_frame_us, r.gait_solve_median_us, r.gait_solve_max_us, s));
}

void no_secondary_component() {
  namespace fs = std::filesystem;
  const fs::path src(WALK3LP_SOURCE_DIR), bin(WALK3LP_BINARY_DIR);
  bool found = false;
  for (const fs::path& root : {src, bin}) {
    for (const char* name : {"ui_walker", "node_modules", "package.json"}) {
      if (fs::exists(root / name)) found = true;
    }
  }
  report("primary suite without secondary components", !found,
         found ? std::string("a browser UI tree is present in the source or build directory")
               : std::string("all criteria above ran from a build with no UI sources or targets"));
}

}  // namespace

int main() {
  oracle_equivalence();
  periodicity_grid();
  controller();
  push_recovery();
  kinematic_invariants();
  qualitative();
  performance();
  no_secondary_component();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
