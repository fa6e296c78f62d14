#include "cli.hpp"

#include <csignal>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "walk3lp/bench.hpp"
#include "walk3lp/frame_io.hpp"
#include "walk3lp/gait.hpp"
#include "walk3lp/scenario.hpp"
#include "walk3lp/service.hpp"

namespace walk3lp {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioEvent parse_push(const std::string& spec) {
  std::vector<double> v;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(x)) {
      throw UsageError("--push expects t,fx,fy,duration; got '" + spec + "'");
    }
    v.push_back(x);
  }
  if (v.size() != 4) throw UsageError("--push expects t,fx,fy,duration; got '" + spec + "'");
  if (v[0] < 0 || v[3] < 0) throw UsageError("--push time and duration must be >= 0");
  return ScenarioEvent::push(v[0], Vec2(v[1], v[2]), v[3]);
}

int serve_until_signal(const ServiceOptions& options, std::ostream& err) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  Server server(options);
  server.start();
  err << "listening on port " << server.port() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form 3LP walking trajectory generator", "walk3lp"};

  double height = 1.7, mass = 70, speed = 1.0, freq = 1.7, ds_ratio = 0.2;
  double slope_deg = 0, torso_deg = 0, clearance = 0.05, drag = 0, lateral = 0;
  double duration = 10, fps = 30;
  std::vector<std::string> pushes;
  std::string scenario, format = "csv", out_path = "-", method = "adaptive", proportions;
  bool serve = false;
  int port = 8080;
  long bench_frames = 0;
  int agents = 1;

  app.add_option("--height", height, "body height [m]");
  app.add_option("--mass", mass, "body mass [kg]");
  app.add_option("--speed", speed, "desired speed [m/s], negative walks backward");
  app.add_option("--freq", freq, "step frequency [steps/s]");
  app.add_option("--ds-ratio", ds_ratio, "double support fraction of the step");
  app.add_option("--slope", slope_deg, "ground slope [deg], positive uphill");
  app.add_option("--torso", torso_deg, "torso bend [deg], positive forward");
  app.add_option("--clearance", clearance, "swing toe lift, fraction of leg length");
  app.add_option("--drag", drag, "constant sagittal force on the torso [N]");
  app.add_option("--lateral-force", lateral, "constant lateral force on the torso [N]");
  app.add_option("--proportions", proportions, "key-value file with [anthropometry] overrides")
      ->check(CLI::ExistingFile);
  app.add_option("--duration", duration, "simulated time [s]")->check(CLI::NonNegativeNumber);
  app.add_option("--fps", fps, "frames per second")->check(CLI::Range(1.0, 1000.0));
  app.add_option("--push", pushes, "push t,fx,fy,duration (repeatable)")->take_all();
  app.add_option("--scenario", scenario, "JSONL scenario script")->check(CLI::ExistingFile);
  app.add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--out", out_path, "output file, - for stdout");
  app.add_option("--method", method, "pelvis height method")
      ->check(CLI::IsMember({"fixed", "adaptive"}));
  app.add_flag("--serve", serve, "run the live simulation service");
  app.add_option("--port", port, "service port")->check(CLI::Range(0, 65535));
  app.add_option("--bench", bench_frames, "time this many frames per agent")
      ->expected(0, 1)
      ->default_str("1000000");
  app.add_option("--agents", agents, "independent walkers in the benchmark")
      ->check(CLI::Range(1, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os;
    const int rc = app.exit(e, os, os);
    out << os.str();
    return rc;
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    err << os.str();
    return kExitUsage;
  }

  const bool bench = app.count("--bench") > 0;
  if (bench && app["--bench"]->results().front().empty()) bench_frames = 1000000;

  try {
    if (serve && bench) throw UsageError("--serve and --bench are exclusive");
    if (agents > 1 && !bench) throw UsageError("--agents requires --bench");
    if ((serve || bench) && (!pushes.empty() || !scenario.empty())) {
      throw UsageError("--push and --scenario apply to trajectory export only");
    }
    if (bench && bench_frames <= 0) throw UsageError("--bench needs a positive frame count");
    std::vector<ScenarioEvent> events;
    for (const std::string& p : pushes) events.push_back(parse_push(p));
    if (!scenario.empty()) {
      try {
        for (const ScenarioEvent& e : load_scenario(scenario)) events.push_back(e);
      } catch (const ScenarioError& e) {
        throw UsageError(e.what());
      }
    }

    const ProportionTable table = proportions.empty() ? ProportionTable{} : load_proportions(proportions);
    GaitConfig config = GaitConfig::from_frequency(1.7, 0.2, 1.0);
    BodyModel body = scale_body(70, 1.7, table);
    ParamBounds::check("height", height);
    ParamBounds::check("mass", mass);
    body = scale_body(mass, height, table);
    apply_param(body, config, "freq", freq);
    apply_param(body, config, "ds_ratio", ds_ratio);
    apply_param(body, config, "speed", speed);
    apply_param(body, config, "slope", slope_deg * std::numbers::pi / 180);
    apply_param(body, config, "torso", torso_deg * std::numbers::pi / 180);
    apply_param(body, config, "clearance", clearance);
    apply_param(body, config, "drag", drag);
    apply_param(body, config, "lateral_force", lateral);
    config.validate();

    SimOptions options;
    options.method = method == "fixed" ? HeightMethod::kFixed : HeightMethod::kAdaptive;

    if (serve) {
      ServiceOptions so;
      so.port = port;
      so.defaults.body = body;
      so.defaults.config = config;
      so.defaults.options = options;
      so.defaults.fps = fps;
      return serve_until_signal(so, err);
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (out_path != "-") {
      file.open(out_path);
      if (!file) throw UsageError("cannot open " + out_path);
      sink = &file;
    }

    if (bench) {
      *sink << format_report(run_bench(body, config, bench_frames, agents, fps)) << '\n';
      return kExitOk;
    }

    Simulation sim(body, config, options);
    FrameDriver driver(sim, fps);
    driver.schedule(events);
    FrameWriter writer(*sink, format == "csv" ? FrameFormat::kCsv : FrameFormat::kJsonl);
    const long n = static_cast<long>(std::ceil(duration * fps - 1e-9));
    for (long k = 0; k < n; ++k) writer.write(FrameRecord::from_frame(driver.next()));
    sink->flush();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "infeasible parameter: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const GaitSolveError& e) {
    err << "infeasible gait: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "infeasible parameter: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace walk3lp
