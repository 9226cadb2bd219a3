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

#pragma once

#include <iosfwd>
#include <string>

#include "meshdeform/errors.hpp"
#include "meshdeform/geometry.hpp"

namespace meshdeform {

struct ObjReadStats {
  /// OBJ records other than v/f (vn, vt, usemtl, ...) that were skipped.
  std::size_t skipped_records = 0;
};

/// Reads a Wavefront OBJ file. Only v and f records are honored; polygons
/// are fan-triangulated from their first vertex and 1-based indices are
/// converted to 0-based. Throws ParseError (with line number) on malformed
/// records or out-of-range indices, IoError if the file cannot be opened,
/// and ParseError if the result has no vertices or faces.
TriMesh load_mesh(const std::string& path, ObjReadStats* stats = nullptr);
TriMesh read_obj(std::istream& in, const std::string& name, ObjReadStats* stats = nullptr);

/// Writes v records then f records (1-based). Vertex coordinates are printed
/// with round-trip precision, so load(save(m)) reproduces them exactly.
void save_mesh(const TriMesh& mesh, const std::string& path);
void write_obj(const TriMesh& mesh, std::ostream& out);

/// Reads a point cloud. Paths ending in .obj are parsed as OBJ (vertices
/// only); anything else is XYZ text, one whitespace-separated triple per
/// line. Blank lines and lines starting with # are skipped.
PointCloud load_points(const std::string& path);
PointCloud read_xyz(std::istream& in, const std::string& name);

void save_points(const PointCloud& cloud, const std::string& path);
void write_xyz(const PointCloud& cloud, std::ostream& out);

}  // namespace meshdeform
