#pragma once

#include <string>

#include <boost/property_tree/ptree.hpp>

namespace walk3lp {

/// INI-style key-value configuration (`[section]` / `key = value`).
class ConfigFile {
 public:
  static ConfigFile load(const std::string& path);
  static ConfigFile parse(const std::string& text);

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  bool has(const std::string& section, const std::string& key) const;

 private:
  boost::property_tree::ptree tree_;
};

}  // namespace walk3lp
