#include "walk3lp/config_file.hpp"

#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>

namespace walk3lp {

ConfigFile ConfigFile::load(const std::string& path) {
  ConfigFile file;
  try {
    boost::property_tree::ini_parser::read_ini(path, file.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::runtime_error("config: " + std::string(e.what()));
  }
  return file;
}

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile file;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, file.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::runtime_error("config: " + std::string(e.what()));
  }
  return file;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  const auto value = tree_.get_optional<double>(section + "." + key);
  return value ? *value : fallback;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return static_cast<bool>(tree_.get_child_optional(section + "." + key));
}

}  // namespace walk3lp
