// Copyright 2026 The MeshDeform Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "meshdeform/config.hpp"

#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "meshdeform/errors.hpp"

namespace meshdeform {

namespace {

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_real(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, int line,
                            const char* expected) {
  std::ostringstream msg;
  msg << "config line " << line << ": key '" << key << "': cannot parse '" << value << "' as "
      << expected;
  throw ParseError(msg.str());
}

double parse_real(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) bad_value(key, value, line, "a real number");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, line, "a real number");
  }
}

int parse_int(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size() || v < INT_MIN || v > INT_MAX) {
      bad_value(key, value, line, "an integer");
    }
    return static_cast<int>(v);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, line, "an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value, int line) {
  try {
    if (!value.empty() && value[0] == '-') bad_value(key, value, line, "an unsigned integer");
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value, line, "an unsigned integer");
    return static_cast<std::uint64_t>(v);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, line, "an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, line, "a boolean (true/false/1/0)");
}

struct KeyInfo {
  const char* name;
  const char* type;
  const char* range;
  std::function<void(RunConfig&, const std::string&, int)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeyInfo>& key_table() {
  const auto real_key = [](const char* name, const char* range, double RunConfig::* field) {
    return KeyInfo{name, "real", range,
                   [name, field](RunConfig& c, const std::string& v, int line) {
                     c.*field = parse_real(name, v, line);
                   },
                   [field](const RunConfig& c) { return format_real(c.*field); }};
  };
  const auto int_key = [](const char* name, const char* range, int RunConfig::* field) {
    return KeyInfo{name, "int", range,
                   [name, field](RunConfig& c, const std::string& v, int line) {
                     c.*field = parse_int(name, v, line);
                   },
                   [field](const RunConfig& c) { return std::to_string(c.*field); }};
  };
  const auto bool_key = [](const char* name, bool RunConfig::* field) {
    return KeyInfo{name, "bool", "true/false",
                   [name, field](RunConfig& c, const std::string& v, int line) {
                     c.*field = parse_bool(name, v, line);
                   },
                   [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
  };

  static const std::vector<KeyInfo> table = {
      real_key("weight_cd_mesh", "[0, inf)", &RunConfig::weight_cd_mesh),
      real_key("weight_emd_mesh", "[0, inf)", &RunConfig::weight_emd_mesh),
      real_key("weight_cd_points", "[0, inf)", &RunConfig::weight_cd_points),
      real_key("weight_emd_points", "[0, inf)", &RunConfig::weight_emd_points),
      real_key("weight_sym", "[0, inf)", &RunConfig::weight_sym),
      real_key("weight_lap", "[0, inf)", &RunConfig::weight_lap),
      real_key("weight_lpi", "[0, inf)", &RunConfig::weight_lpi),
      int_key("mesh_samples", "[1, inf)", &RunConfig::mesh_samples),
      int_key("point_samples", "[1, inf)", &RunConfig::point_samples),
      int_key("iterations", "[0, inf)", &RunConfig::iterations),
      real_key("step_size", "(0, inf)", &RunConfig::step_size),
      int_key("epochs", "[0, inf)", &RunConfig::epochs),
      real_key("learning_rate", "[0, inf)", &RunConfig::learning_rate),
      KeyInfo{"seed", "uint64", "[0, 2^64)",
              [](RunConfig& c, const std::string& v, int line) {
                c.seed = parse_u64("seed", v, line);
              },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
      KeyInfo{"symmetry_plane", "enum", "xz, xy, yz",
              [](RunConfig& c, const std::string& v, int line) {
                if (v != "xz" && v != "xy" && v != "yz") {
                  bad_value("symmetry_plane", v, line, "one of xz, xy, yz");
                }
                c.symmetry_plane = v;
              },
              [](const RunConfig& c) { return c.symmetry_plane; }},
      int_key("voxel_resolution", "[2, inf)", &RunConfig::voxel_resolution),
      real_key("lpi_epsilon", "(0, inf)", &RunConfig::lpi_epsilon),
      bool_key("resample_per_step", &RunConfig::resample_per_step),
      bool_key("lpi_include_delta", &RunConfig::lpi_include_delta),
      bool_key("chamfer_brute_force", &RunConfig::chamfer_brute_force),
  };
  return table;
}

void check_nonnegative(const char* name, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("RunConfig: ") + name + " must be finite and >= 0");
  }
}

}  // namespace

void RunConfig::validate() const {
  check_nonnegative("weight_cd_mesh", weight_cd_mesh);
  check_nonnegative("weight_emd_mesh", weight_emd_mesh);
  check_nonnegative("weight_cd_points", weight_cd_points);
  check_nonnegative("weight_emd_points", weight_emd_points);
  check_nonnegative("weight_sym", weight_sym);
  check_nonnegative("weight_lap", weight_lap);
  check_nonnegative("weight_lpi", weight_lpi);
  if (mesh_samples < 1) throw std::invalid_argument("RunConfig: mesh_samples must be >= 1");
  if (point_samples < 1) throw std::invalid_argument("RunConfig: point_samples must be >= 1");
  if (iterations < 0) throw std::invalid_argument("RunConfig: iterations must be >= 0");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("RunConfig: step_size must be positive");
  }
  if (epochs < 0) throw std::invalid_argument("RunConfig: epochs must be >= 0");
  check_nonnegative("learning_rate", learning_rate);
  if (symmetry_plane != "xz" && symmetry_plane != "xy" && symmetry_plane != "yz") {
    throw std::invalid_argument("RunConfig: symmetry_plane must be one of xz, xy, yz");
  }
  if (voxel_resolution < 2) throw std::invalid_argument("RunConfig: voxel_resolution must be >= 2");
  if (!(lpi_epsilon > 0.0) || !std::isfinite(lpi_epsilon)) {
    throw std::invalid_argument("RunConfig: lpi_epsilon must be positive");
  }
}

SymmetryPlane RunConfig::plane() const {
  if (symmetry_plane == "xy") return SymmetryPlane::XY;
  if (symmetry_plane == "yz") return SymmetryPlane::YZ;
  return SymmetryPlane::XZ;
}

LossWeights RunConfig::loss_weights() const {
  LossWeights w;
  w.cd_mesh = weight_cd_mesh;
  w.emd_mesh = weight_emd_mesh;
  w.cd_points = weight_cd_points;
  w.emd_points = weight_emd_points;
  w.sym = weight_sym;
  w.lap = weight_lap;
  w.lpi = weight_lpi;
  return w;
}

PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions options;
  options.weights = loss_weights();
  options.mesh_samples = mesh_samples;
  options.point_samples = point_samples;
  options.symmetry_plane = plane();
  options.lpi.epsilon = lpi_epsilon;
  options.lpi.include_delta = lpi_include_delta;
  return options;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream stream(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << line_number << ": expected 'key = value', got '" << line << "'";
      throw ParseError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << "config line " << line_number << ": missing key before '='";
      throw ParseError(msg.str());
    }

    const KeyInfo* info = nullptr;
    for (const KeyInfo& candidate : key_table()) {
      if (key == candidate.name) {
        info = &candidate;
        break;
      }
    }
    if (info == nullptr) {
      std::ostringstream msg;
      msg << "config line " << line_number << ": unknown key '" << key
          << "' (run --print-config-schema for the accepted keys)";
      throw ParseError(msg.str());
    }
    if (!seen.insert(key).second) {
      std::ostringstream msg;
      msg << "config line " << line_number << ": duplicate key '" << key << "'";
      throw ParseError(msg.str());
    }
    info->set(config, value, line_number);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return parse_config_text(buffer.str());
}

std::string config_schema() {
  const RunConfig defaults;
  std::ostringstream out;
  out << "# Run configuration schema: flat 'key = value' lines, '#' starts a comment.\n";
  out << "# Unknown and duplicate keys are rejected.\n";
  for (const KeyInfo& info : key_table()) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-22s %-7s default = %-22s range: %s\n", info.name,
                  info.type, info.get(defaults).c_str(), info.range);
    out << line;
  }
  return out.str();
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  for (const KeyInfo& info : key_table()) {
    out << info.name << " = " << info.get(config) << "\n";
  }
  return out.str();
}

}  // namespace meshdeform
