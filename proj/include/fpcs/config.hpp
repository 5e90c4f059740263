#pragma once
// INI-style experiment configuration: one section per subcommand
// ([schedule], [search], [sweep], [noise], [table1], [spectral]) plus
// [problem:NAME] sections declaring custom problems, e.g.
//
//   [problem:bowl]
//   dimension = 2
//   objective = x1^2 + x2^2
//   box = -1 1; -1 1
//   constraints = x1 + x2 <= 1
//   epsilon = 0.1
//
// and operator terms for [spectral] as "coefficient x_power p_power; ...".

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fpcs/error.hpp"
#include "fpcs/problems.hpp"
#include "fpcs/spectral.hpp"

namespace fpcs {

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class Config {
 public:
  Config() = default;

  static Config from_string(const std::string& text, const std::string& origin = "<string>") {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    try {
      boost::property_tree::read_ini(in, c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("config " + origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    return c;
  }

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return from_string(os.str(), path);
  }

  bool has(std::string_view section, std::string_view key) const { return raw(section, key).has_value(); }

  std::optional<std::string> raw(std::string_view section, std::string_view key) const {
    const auto sec = tree_.get_child_optional(boost::property_tree::ptree::path_type(std::string(section), '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(boost::property_tree::ptree::path_type(std::string(key), '\0'));
    if (!v) return std::nullopt;
    return boost::algorithm::trim_copy(*v);
  }

  template <class T>
  std::optional<T> get(std::string_view section, std::string_view key) const {
    const auto text = raw(section, key);
    if (!text) return std::nullopt;
    return convert<T>(*text, section, key);
  }

  /// Comma- or space-separated list of numbers.
  std::optional<std::vector<double>> get_list(std::string_view section, std::string_view key) const {
    const auto text = raw(section, key);
    if (!text) return std::nullopt;
    return parse_number_list(*text, std::string(section) + "." + std::string(key));
  }

  std::vector<std::string> problem_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : tree_)
      if (name.rfind("problem:", 0) == 0) out.push_back(name.substr(8));
    return out;
  }

  std::optional<CustomProblemSpec> custom_problem(const std::string& name) const {
    const std::string section = "problem:" + name;
    if (!tree_.get_child_optional(boost::property_tree::ptree::path_type(section, '\0'))) return std::nullopt;
    CustomProblemSpec spec;
    spec.name = name;
    spec.dimension = get<int>(section, "dimension").value_or(2);
    const auto objective = raw(section, "objective");
    if (!objective) throw ConfigError("config [" + section + "]: missing 'objective'");
    spec.objective = *objective;
    const auto box = raw(section, "box");
    if (!box) throw ConfigError("config [" + section + "]: missing 'box'");
    for (const std::string& part : split_semicolons(*box)) {
      const auto v = parse_number_list(part, section + ".box");
      if (v.size() != 2) throw ConfigError("config [" + section + "]: each box interval needs 'lo hi'");
      spec.box.push_back({v[0], v[1]});
    }
    if (const auto cons = raw(section, "constraints"))
      for (const std::string& part : split_semicolons(*cons)) spec.constraints.push_back(part);
    spec.epsilon = get<double>(section, "epsilon").value_or(kDefaultEpsilon);
    spec.grid_resolution = get<int>(section, "resolution").value_or(1024);
    return spec;
  }

  /// "1 2 0; 1 0 2" -> {(1, x^2), (1, p^2)}.
  static OperatorSpec parse_operator_terms(const std::string& text) {
    OperatorSpec spec;
    for (const std::string& part : split_semicolons(text)) {
      const auto v = parse_number_list(part, "operator term");
      if (v.size() != 3) throw ConfigError("operator term '" + part + "' needs 'coefficient x_power p_power'");
      const auto as_power = [&](double d) {
        if (d != static_cast<int>(d)) throw ConfigError("operator term '" + part + "': powers must be integers");
        return static_cast<int>(d);
      };
      spec.push_back({v[0], as_power(v[1]), as_power(v[2])});
    }
    if (spec.empty()) throw ConfigError("operator specification has no terms");
    return spec;
  }

  static std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(", \t"), boost::algorithm::token_compress_on);
    std::vector<double> out;
    for (const std::string& p : parts) {
      if (p.empty()) continue;
      out.push_back(convert<double>(p, what, ""));
    }
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  static std::vector<std::string> split_semicolons(const std::string& text) {
    std::vector<std::string> parts, out;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(";"));
    for (std::string& p : parts) {
      boost::algorithm::trim(p);
      if (!p.empty()) out.push_back(p);
    }
    return out;
  }

  template <class T>
  static T convert(const std::string& text, std::string_view section, std::string_view key) {
    std::istringstream in(text);
    T value{};
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      const std::string t = boost::algorithm::to_lower_copy(text);
      if (t == "true" || t == "1" || t == "yes") return true;
      if (t == "false" || t == "0" || t == "no") return false;
    } else {
      in >> value;
      if (in && (in >> std::ws).eof()) return value;
    }
    throw ConfigError("config value '" + text + "' for " + std::string(section) + (key.empty() ? "" : "." + std::string(key)) +
                      " has the wrong type");
  }

  boost::property_tree::ptree tree_;
  std::string origin_;
};

}  // namespace fpcs
