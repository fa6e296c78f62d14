#include "walk3lp/frame_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace walk3lp {

namespace {

std::array<std::string, FrameRecord::kSize> make_columns() {
  std::vector<std::string> c = {"t", "step", "phase", "support", "pelvis_x", "pelvis_y",
                                "pelvis_z"};
  for (const char* side : {"left", "right"}) {
    for (const char* joint : {"hip", "knee", "ankle", "toe"}) {
      for (const char* axis : {"x", "y", "z"}) {
        c.push_back(std::string(side) + "_" + joint + "_" + axis);
      }
    }
  }
  for (const char* side : {"left", "right"}) {
    for (const char* angle : {"hip_pitch", "hip_roll", "knee", "ankle"}) {
      c.push_back(std::string(side) + "_" + angle);
    }
  }
  for (const char* d : {"pelvis_height", "error_norm", "push_active", "geometry_ok",
                        "fixed_fallback", "reach_scale"}) {
    c.push_back(d);
  }
  for (int i = 0; i < 8; ++i) c.push_back("du" + std::to_string(i));
  std::array<std::string, FrameRecord::kSize> out;
  if (c.size() != out.size()) throw std::logic_error("frame record column count");
  std::copy(c.begin(), c.end(), out.begin());
  return out;
}

void append(std::string& s, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, res.ptr);
}

double parse_number(const std::string& field, int line) {
  double v = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw FormatError("line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

const std::array<std::string, FrameRecord::kSize>& FrameRecord::columns() {
  static const auto cols = make_columns();
  return cols;
}

FrameRecord FrameRecord::from_frame(const Frame& f) {
  FrameRecord r;
  int i = 0;
  auto put = [&](double v) { r.values[i++] = v; };
  auto put3 = [&](const Vec3& v) {
    put(v.x());
    put(v.y());
    put(v.z());
  };
  put(f.t_global);
  put(static_cast<double>(f.step));
  put(f.phase);
  put(f.pose.support);
  put3(f.pose.pelvis);
  for (const LegPose* leg : {&f.pose.left, &f.pose.right}) {
    put3(leg->hip);
    put3(leg->knee);
    put3(leg->ankle);
    put3(leg->toe);
  }
  for (const LegPose* leg : {&f.pose.left, &f.pose.right}) {
    put(leg->hip_pitch);
    put(leg->hip_roll);
    put(leg->knee_angle);
    put(leg->ankle_angle);
  }
  put(f.pose.pelvis_height);
  put(f.error_norm);
  put(f.push_active ? 1 : 0);
  put(f.geometry_ok ? 1 : 0);
  put(f.pose.fixed_fallback ? 1 : 0);
  put(f.pose.reach_scale);
  for (int k = 0; k < 8; ++k) put(f.du(k));
  return r;
}

double FrameRecord::operator[](const std::string& name) const {
  const auto& c = columns();
  const auto it = std::find(c.begin(), c.end(), name);
  if (it == c.end()) throw std::out_of_range("unknown frame column: " + name);
  return values[it - c.begin()];
}

std::string csv_header() {
  std::string s;
  for (const std::string& c : FrameRecord::columns()) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s;
}

std::string to_csv_line(const FrameRecord& r) {
  std::string s;
  s.reserve(FrameRecord::kSize * 12);
  for (int i = 0; i < FrameRecord::kSize; ++i) {
    if (i) s += ',';
    append(s, r.values[i]);
  }
  return s;
}

std::string to_json_line(const FrameRecord& r) {
  nlohmann::ordered_json j;
  const auto& c = FrameRecord::columns();
  for (int i = 0; i < FrameRecord::kSize; ++i) j[c[i]] = r.values[i];
  return j.dump();
}

FrameWriter::FrameWriter(std::ostream& out, FrameFormat format) : out_(out), format_(format) {}

void FrameWriter::write(const FrameRecord& r) {
  if (format_ == FrameFormat::kCsv) {
    if (!header_done_) {
      out_ << csv_header() << '\n';
      header_done_ = true;
    }
    out_ << to_csv_line(r) << '\n';
  } else {
    out_ << to_json_line(r) << '\n';
  }
}

std::vector<FrameRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line != csv_header()) throw FormatError("unexpected CSV header");
  std::vector<FrameRecord> out;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    FrameRecord r;
    std::stringstream ss(line);
    std::string field;
    int i = 0;
    while (std::getline(ss, field, ',')) {
      if (i >= FrameRecord::kSize) throw FormatError("line " + std::to_string(n) + ": too many fields");
      r.values[i++] = parse_number(field, n);
    }
    if (i != FrameRecord::kSize) throw FormatError("line " + std::to_string(n) + ": too few fields");
    out.push_back(r);
  }
  return out;
}

std::vector<FrameRecord> parse_jsonl(std::istream& in) {
  std::vector<FrameRecord> out;
  std::string line;
  int n = 0;
  const auto& c = FrameRecord::columns();
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(n) + ": " + e.what());
    }
    FrameRecord r;
    for (int i = 0; i < FrameRecord::kSize; ++i) {
      const auto it = j.find(c[i]);
      if (it == j.end() || !it->is_number()) {
        throw FormatError("line " + std::to_string(n) + ": missing " + c[i]);
      }
      r.values[i] = it->get<double>();
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace walk3lp
