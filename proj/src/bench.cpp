#include "walk3lp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "walk3lp/gait.hpp"
#include "walk3lp/sim.hpp"

namespace walk3lp {

namespace {

using Clock = std::chrono::steady_clock;

double micros(Clock::duration d) {
  return std::chrono::duration<double, std::micro>(d).count();
}

double quantile(std::vector<double>& v, double q) {
  const size_t k = static_cast<size_t>(q * (v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

}  // namespace

BenchReport run_bench(const BodyModel& body, const GaitConfig& config, long frames, int agents,
                      double fps, int gait_solves) {
  if (frames <= 0 || agents <= 0 || !(fps > 0) || gait_solves <= 0) {
    throw std::invalid_argument("bench: frames, agents, fps and solves must be positive");
  }
  BenchReport r;
  r.frames = frames;
  r.agents = agents;

  std::vector<std::vector<double>> lat(agents);
  const auto start = Clock::now();
  auto work = [&](int a) {
    SimOptions opt;
    opt.control_rate = fps;
    Simulation sim(body, config, opt);
    std::vector<double>& out = lat[a];
    out.reserve(frames);
    for (long k = 0; k < frames; ++k) {
      const auto t0 = Clock::now();
      const Frame f = sim.sample_frame(k / fps);
      out.push_back(micros(Clock::now() - t0));
      if (!f.geometry_ok) throw std::runtime_error("bench: infeasible frame");
    }
  };
  if (agents == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int a = 0; a < agents; ++a) pool.emplace_back(work, a);
    for (std::thread& t : pool) t.join();
  }
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  std::vector<double> all;
  all.reserve(static_cast<size_t>(frames) * agents);
  for (const auto& v : lat) all.insert(all.end(), v.begin(), v.end());
  r.max_frame_us = *std::max_element(all.begin(), all.end());
  r.median_frame_us = quantile(all, 0.5);
  r.p90_frame_us = quantile(all, 0.9);
  r.p99_frame_us = quantile(all, 0.99);
  r.frames_per_second = static_cast<double>(all.size()) / r.wall_seconds;

  std::vector<double> solves;
  for (int i = 0; i < gait_solves; ++i) {
    const auto t0 = Clock::now();
    const PeriodicGait g = solve_periodic_gait(body, config);
    solves.push_back(micros(Clock::now() - t0));
    if (!g.Qbar.allFinite()) throw std::runtime_error("bench: gait solve failed");
  }
  r.gait_solve_max_us = *std::max_element(solves.begin(), solves.end());
  r.gait_solve_median_us = quantile(solves, 0.5);
  return r;
}

std::string format_report(const BenchReport& r) {
  std::ostringstream o;
  o << "frames per agent   " << r.frames << "\n"
    << "agents             " << r.agents << "\n"
    << "frame median [us]  " << r.median_frame_us << "\n"
    << "frame p90 [us]     " << r.p90_frame_us << "\n"
    << "frame p99 [us]     " << r.p99_frame_us << "\n"
    << "frame max [us]     " << r.max_frame_us << "\n"
    << "frames per second  " << r.frames_per_second << "\n"
    << "gait solve median  " << r.gait_solve_median_us << " us\n"
    << "gait solve max     " << r.gait_solve_max_us << " us\n"
    << "wall time [s]      " << r.wall_seconds << "\n";
  return o.str();
}

}  // namespace walk3lp
