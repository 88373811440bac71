#include "cxr/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cxr/error.hpp"

namespace cxr {
namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(ErrorKind::ConfigError, key + " = '" + value + "': " + why);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "expected true or false");
}

template <typename T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad(key, v, "expected an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    bad(key, v, "expected a number");
  }
  if (pos != v.size() || !std::isfinite(out)) bad(key, v, "expected a finite number");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "window_enabled") {
    window_enabled = parse_bool(key, value);
  } else if (key == "window_min") {
    window.hu_min = parse_double(key, value);
  } else if (key == "window_max") {
    window.hu_max = parse_double(key, value);
  } else if (key == "mask_min_voxels") {
    mask_min_voxels = parse_int<int>(key, value);
  } else if (key == "connectivity") {
    const int c = parse_int<int>(key, value);
    if (c != 4 && c != 8) bad(key, value, "expected 4 or 8");
    labeling.connectivity = c == 4 ? Connectivity::Four : Connectivity::Eight;
  } else if (key == "min_area") {
    labeling.min_area = parse_int<std::size_t>(key, value);
  } else if (key == "max_instances") {
    labeling.max_instances = parse_int<std::size_t>(key, value);
  } else if (key == "simplify_eps") {
    labeling.simplify_eps = parse_double(key, value);
  } else if (key == "seed") {
    seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "flip_lr") {
    flips.left_right = parse_bool(key, value);
  } else if (key == "flip_si") {
    flips.superior_inferior = parse_bool(key, value);
  } else if (key == "resample") {
    resample = parse_bool(key, value);
  } else if (key == "out") {
    out = value;
  } else {
    throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
  }
}

void PipelineConfig::validate() const {
  if (window_enabled) window.validate();
  if (mask_min_voxels < 1) throw Error(ErrorKind::ConfigError, "mask_min_voxels must be >= 1");
  if (labeling.max_instances < 1) throw Error(ErrorKind::ConfigError, "max_instances must be >= 1");
  if (!(labeling.simplify_eps >= 0.0 && labeling.simplify_eps <= 100.0)) {
    throw Error(ErrorKind::ConfigError, "simplify_eps must lie in [0, 100]");
  }
}

std::map<std::string, std::string> PipelineConfig::to_map() const {
  return {
      {"window_enabled", window_enabled ? "true" : "false"},
      {"window_min", num(window.hu_min)},
      {"window_max", num(window.hu_max)},
      {"mask_min_voxels", std::to_string(mask_min_voxels)},
      {"connectivity", labeling.connectivity == Connectivity::Four ? "4" : "8"},
      {"min_area", std::to_string(labeling.min_area)},
      {"max_instances", std::to_string(labeling.max_instances)},
      {"simplify_eps", num(labeling.simplify_eps)},
      {"seed", std::to_string(seed)},
      {"flip_lr", flips.left_right ? "true" : "false"},
      {"flip_si", flips.superior_inferior ? "true" : "false"},
      {"resample", resample ? "true" : "false"},
      {"out", out.string()},
  };
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : to_map()) os << k << " = " << v << "\n";
  return os.str();
}

PipelineConfig parse_config_text(const std::string& text, PipelineConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

}  // namespace cxr
