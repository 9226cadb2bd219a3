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

#include "meshdeform/obj_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace meshdeform {

namespace {

std::string where(const std::string& name, std::size_t line) {
  return name + ":" + std::to_string(line) + ": ";
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& tok, const std::string& name, std::size_t line) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(where(name, line) + "expected a number, got '" + tok + "'");
  }
  return value;
}

// Face vertex tokens may carry /vt/vn suffixes; only the vertex index is used.
int parse_face_index(const std::string& tok, const std::string& name, std::size_t line) {
  const std::size_t slash = tok.find('/');
  const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
  int value = 0;
  const char* begin = head.data();
  const char* end = begin + head.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(where(name, line) + "expected a face index, got '" + tok + "'");
  }
  return value;
}

std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TriMesh read_obj(std::istream& in, const std::string& name, ObjReadStats* stats) {
  TriMesh mesh;
  ObjReadStats local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) {
        throw ParseError(where(name, line_no) + "v record needs 3 coordinates");
      }
      mesh.vertices.emplace_back(parse_double(tokens[1], name, line_no),
                                 parse_double(tokens[2], name, line_no),
                                 parse_double(tokens[3], name, line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) {
        throw ParseError(where(name, line_no) + "f record needs at least 3 indices");
      }
      std::vector<int> poly;
      poly.reserve(tokens.size() - 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        int idx = parse_face_index(tokens[i], name, line_no);
        if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
        if (idx < 1 || idx > static_cast<int>(mesh.vertices.size())) {
          throw ParseError(where(name, line_no) + "face index " + std::to_string(idx) +
                           " out of range [1, " + std::to_string(mesh.vertices.size()) + "]");
        }
        poly.push_back(idx - 1);
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
      }
    } else {
      ++local.skipped_records;
    }
  }
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw ParseError(name + ": no usable mesh data (needs v and f records)");
  }
  mesh.validate();
  if (stats) *stats = local;
  return mesh;
}

TriMesh load_mesh(const std::string& path, ObjReadStats* stats) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open mesh file: " + path);
  }
  return read_obj(in, path, stats);
}

void write_obj(const TriMesh& mesh, std::ostream& out) {
  for (const Vec3& v : mesh.vertices) {
    out << "v " << format_coord(v.x()) << ' ' << format_coord(v.y()) << ' '
        << format_coord(v.z()) << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open file for writing: " + path);
  }
  write_obj(mesh, out);
  out.flush();
  if (!out) {
    throw IoError("failed to write mesh to " + path);
  }
}

PointCloud read_xyz(std::istream& in, const std::string& name) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens.size() != 3) {
      throw ParseError(where(name, line_no) + "expected 3 coordinates, got " +
                       std::to_string(tokens.size()) + " tokens");
    }
    cloud.points.emplace_back(parse_double(tokens[0], name, line_no),
                              parse_double(tokens[1], name, line_no),
                              parse_double(tokens[2], name, line_no));
  }
  if (cloud.points.empty()) {
    throw ParseError(name + ": no points found");
  }
  cloud.validate();
  return cloud;
}

PointCloud load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open point file: " + path);
  }
  const bool is_obj = path.size() >= 4 && path.compare(path.size() - 4, 4, ".obj") == 0;
  if (is_obj) {
    // Vertices only; a faceless OBJ is acceptable here.
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto tokens = split_ws(line);
      if (tokens.empty() || tokens[0] != "v") continue;
      if (tokens.size() < 4) {
        throw ParseError(where(path, line_no) + "v record needs 3 coordinates");
      }
      cloud.points.emplace_back(parse_double(tokens[1], path, line_no),
                                parse_double(tokens[2], path, line_no),
                                parse_double(tokens[3], path, line_no));
    }
    if (cloud.points.empty()) {
      throw ParseError(path + ": no vertices found");
    }
    cloud.validate();
    return cloud;
  }
  return read_xyz(in, path);
}

void write_xyz(const PointCloud& cloud, std::ostream& out) {
  for (const Vec3& p : cloud.points) {
    out << format_coord(p.x()) << ' ' << format_coord(p.y()) << ' ' << format_coord(p.z())
        << '\n';
  }
}

void save_points(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open file for writing: " + path);
  }
  write_xyz(cloud, out);
  out.flush();
  if (!out) {
    throw IoError("failed to write points to " + path);
  }
}

}  // namespace meshdeform
