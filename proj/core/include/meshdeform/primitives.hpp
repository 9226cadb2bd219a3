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

#include "meshdeform/geometry.hpp"

namespace meshdeform {

/// Axis-aligned box centered at the origin, each face a grid of
/// `subdiv` x `subdiv` quads split into triangles. subdiv >= 1.
TriMesh make_box(double size_x, double size_y, double size_z, int subdiv = 1);

/// UV sphere (lat/long triangulation) centered at the origin.
TriMesh make_uv_sphere(double radius, int rings, int segments);

/// Ellipsoid: UV sphere scaled per axis.
TriMesh make_ellipsoid(double rx, double ry, double rz, int rings, int segments);

/// Closed cylinder along +y, centered at the origin.
TriMesh make_cylinder(double radius, double height, int segments);

/// Closed cone along +y, apex up, base centered below the origin.
TriMesh make_cone(double radius, double height, int segments);

/// Torus in the xz-plane around the y axis.
TriMesh make_torus(double major_radius, double minor_radius, int major_segments,
                   int minor_segments);

}  // namespace meshdeform
