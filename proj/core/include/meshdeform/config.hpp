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

#ifndef MESHDEFORM_CONFIG_HPP_
#define MESHDEFORM_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "meshdeform/geometry.hpp"
#include "meshdeform/pipeline.hpp"

namespace meshdeform {

/// Every tunable the command-line tools accept, with defaults. Configs are
/// flat `key = value` text: one pair per line, '#' starts a comment, keys
/// not in the schema are rejected so typos cannot silently revert a run to
/// defaults.
struct RunConfig {
  double weight_cd_mesh = 1.0;
  double weight_emd_mesh = 1.0;
  double weight_cd_points = 1.0;
  double weight_emd_points = 1.0;
  double weight_sym = 1.0;
  double weight_lap = 1.0;
  double weight_lpi = 1.0;

  int mesh_samples = 2048;
  int point_samples = 2048;
  int iterations = 500;
  double step_size = 1e-3;
  int epochs = 1;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  std::string symmetry_plane = "xz";
  int voxel_resolution = 32;
  double lpi_epsilon = 0.05;

  bool resample_per_step = true;
  bool lpi_include_delta = false;
  bool chamfer_brute_force = false;

  void validate() const;

  SymmetryPlane plane() const;
  LossWeights loss_weights() const;
  /// The deform/train option block this config describes.
  PipelineOptions pipeline_options() const;
};

/// Parses config text. Throws ParseError on malformed lines, unknown keys,
/// or unparsable values; the message carries the line number.
RunConfig parse_config_text(const std::string& text);

/// Reads and parses a config file. Throws IoError if unreadable.
RunConfig load_config(const std::string& path);

/// One schema line per key: name, type, default, and accepted range.
std::string config_schema();

/// Emits `key = value` lines for every field, parseable by parse_config_text.
std::string serialize_config(const RunConfig& config);

}  // namespace meshdeform

#endif  // MESHDEFORM_CONFIG_HPP_
