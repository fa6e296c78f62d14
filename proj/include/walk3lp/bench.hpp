#pragma once

#include <string>

#include "walk3lp/anthropometry.hpp"
#include "walk3lp/gait_config.hpp"

namespace walk3lp {

struct BenchReport {
  long frames = 0;  // frames per agent
  int agents = 1;
  double median_frame_us = 0;  // propagate + project + convert
  double p90_frame_us = 0;
  double p99_frame_us = 0;
  double max_frame_us = 0;
  double frames_per_second = 0;  // aggregate over agents, wall clock
  double gait_solve_median_us = 0;
  double gait_solve_max_us = 0;
  double wall_seconds = 0;
};

/// Times `frames` frames at `fps` of the closed-loop walker for each of
/// `agents` independent simulations run on separate threads, plus repeated
/// periodic-gait solves for the same config.
BenchReport run_bench(const BodyModel& body, const GaitConfig& config, long frames,
                      int agents = 1, double fps = 30, int gait_solves = 200);

std::string format_report(const BenchReport& r);

}  // namespace walk3lp
