#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "walk3lp/sim.hpp"

namespace walk3lp {

/// Flat frame serialization. Column order is fixed:
///   t, step, phase, support,
///   pelvis_{x,y,z},
///   {left,right}_{hip,knee,ankle,toe}_{x,y,z},
///   {left,right}_{hip_pitch,hip_roll,knee,ankle},
///   pelvis_height, error_norm, push_active, geometry_ok, fixed_fallback,
///   reach_scale, du0..du7
/// Units are s, m and rad; du entries in N m and N m/s; flags are 0 or 1.
struct FrameRecord {
  static constexpr int kSize = 4 + 3 + 24 + 8 + 6 + 8;
  std::array<double, kSize> values{};

  static const std::array<std::string, kSize>& columns();
  static FrameRecord from_frame(const Frame& f);
  double operator[](const std::string& name) const;
  bool operator==(const FrameRecord&) const = default;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FrameFormat { kCsv, kJsonl };

/// Header line (CSV only) followed by one line per frame; numbers use the
/// shortest representation that parses back to the same double.
std::string csv_header();
std::string to_csv_line(const FrameRecord& r);
std::string to_json_line(const FrameRecord& r);

class FrameWriter {
 public:
  FrameWriter(std::ostream& out, FrameFormat format);
  void write(const FrameRecord& r);

 private:
  std::ostream& out_;
  FrameFormat format_;
  bool header_done_ = false;
};

std::vector<FrameRecord> parse_csv(std::istream& in);
std::vector<FrameRecord> parse_jsonl(std::istream& in);

}  // namespace walk3lp
