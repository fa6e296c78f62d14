#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "walk3lp/frame_io.hpp"

using namespace walk3lp;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "walk3lp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<FrameRecord> csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / ("walk3lp_test_" + name);
  std::ofstream(p) << content;
  return p.string();
}

}  // namespace

TEST_CASE("default run emits duration times fps frames") {
  const Run r = run({"--height", "1.7", "--mass", "70", "--speed", "1.0", "--freq", "1.7",
                     "--clearance", "0.05", "--duration", "10"});
  REQUIRE(r.code == kExitOk);
  const auto frames = csv(r.out);
  REQUIRE(frames.size() == 300);
  for (std::size_t k = 0; k < frames.size(); ++k) CHECK(frames[k]["t"] == k / 30.0);
  const double v = (frames[299]["pelvis_x"] - frames[0]["pelvis_x"]) / frames[299]["t"];
  CHECK(v == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("backward walking") {
  const Run r = run({"--speed", "-0.8", "--duration", "6"});
  REQUIRE(r.code == kExitOk);
  const auto f = csv(r.out);
  const double v = (f.back()["pelvis_x"] - f[60]["pelvis_x"]) / (f.back()["t"] - f[60]["t"]);
  CHECK(v == doctest::Approx(-0.8).epsilon(0.03));
  // The pelvis passes over the stance foot in the walking direction.
  auto stance_drift = [](const std::vector<FrameRecord>& frames) {
    double sum = 0;
    for (std::size_t k = 1; k < frames.size(); ++k) {
      if (frames[k]["step"] != frames[k - 1]["step"]) continue;
      const auto rel = [](const FrameRecord& r) {
        return (r["support"] > 0 ? r["right_ankle_x"] : r["left_ankle_x"]) - r["pelvis_x"];
      };
      sum += rel(frames[k]) - rel(frames[k - 1]);
    }
    return sum;
  };
  CHECK(stance_drift(f) > 0);
  CHECK(stance_drift(csv(run({"--speed", "0.8", "--duration", "6"}).out)) < 0);
}

TEST_CASE("push flag matches the scripted equivalent bit-exactly") {
  const Run flag = run({"--push", "2.0,50,0,0.6", "--duration", "6", "--format", "jsonl"});
  const std::string script = temp_file(
      "push.jsonl", "{\"at\": 2.0, \"op\": \"push\", \"fx\": 50, \"fy\": 0, \"duration\": 0.6}\n");
  const Run scripted = run({"--scenario", script, "--duration", "6", "--format", "jsonl"});
  const Run plain = run({"--duration", "6", "--format", "jsonl"});
  REQUIRE(flag.code == kExitOk);
  REQUIRE(scripted.code == kExitOk);
  CHECK(flag.out == scripted.out);
  CHECK(flag.out != plain.out);
}

TEST_CASE("formats and output file") {
  const std::string path = (std::filesystem::temp_directory_path() / "walk3lp_test_out.jsonl").string();
  const Run r = run({"--duration", "1", "--format", "jsonl", "--out", path});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const auto from_json = parse_jsonl(in);
  const auto from_csv = csv(run({"--duration", "1"}).out);
  CHECK(from_json == from_csv);
}

TEST_CASE("method and shape options") {
  for (const char* m : {"fixed", "adaptive"}) {
    const Run r = run({"--method", m, "--duration", "2"});
    CHECK(r.code == kExitOk);
  }
  CHECK(run({"--slope", "8", "--torso", "10", "--drag", "-50", "--duration", "2"}).code == kExitOk);
  CHECK(run({"--height", "1.0", "--mass", "20", "--duration", "2"}).code == kExitOk);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"--bogus"}).code == kExitUsage);
  CHECK(run({"--push", "1,2"}).code == kExitUsage);
  CHECK(run({"--push", "1,a,0,0.3"}).code == kExitUsage);
  CHECK(run({"--push", "-1,10,0,0.3"}).code == kExitUsage);
  CHECK(run({"--format", "xml"}).code == kExitUsage);
  CHECK(run({"--method", "magic"}).code == kExitUsage);
  CHECK(run({"--agents", "4"}).code == kExitUsage);
  CHECK(run({"--serve", "--bench", "10"}).code == kExitUsage);
  CHECK(run({"--bench", "10", "--push", "1,10,0,0.3"}).code == kExitUsage);
  CHECK(run({"--scenario", "/nonexistent/file.jsonl"}).code == kExitUsage);
  const std::string bad = temp_file("bad.jsonl", "{\"at\": 1, \"op\": \"jump\"}\n");
  const Run r = run({"--scenario", bad});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("infeasible parameters exit with 3") {
  CHECK(run({"--speed", "5"}).code == kExitInfeasible);
  CHECK(run({"--height", "3.5"}).code == kExitInfeasible);
  CHECK(run({"--slope", "30"}).code == kExitInfeasible);
  CHECK(run({"--ds-ratio", "0.9"}).code == kExitInfeasible);
  const std::string far = temp_file("far.jsonl", "{\"at\": 1, \"op\": \"set_param\", \"name\": \"speed\", \"value\": 4}\n");
  CHECK(run({"--scenario", far, "--duration", "2"}).code == kExitInfeasible);
}

TEST_CASE("bench reports deterministic frame counts") {
  const Run a = run({"--bench", "300"});
  const Run b = run({"--bench", "300"});
  REQUIRE(a.code == kExitOk);
  auto frames_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  CHECK(frames_line(a.out) == frames_line(b.out));
  CHECK(frames_line(a.out).find("300") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  const Run r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("--push") != std::string::npos);
}
