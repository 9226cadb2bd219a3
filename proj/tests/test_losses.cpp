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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "meshdeform/losses.hpp"
#include "meshdeform/primitives.hpp"
#include "test_util.hpp"

using namespace meshdeform;
using testutil::fd_gradient;
using testutil::max_rel_diff;
using testutil::random_cloud;
using testutil::random_mat;

namespace {

PointCloud cloud_of(const Mat& m) {
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) cloud.points.push_back(m.row(i).transpose());
  return cloud;
}

Mat mat_of(const PointCloud& cloud) {
  Mat m(cloud.size(), 3);
  for (int i = 0; i < cloud.size(); ++i) m.row(i) = cloud.points[static_cast<std::size_t>(i)];
  return m;
}

Mat mesh_vertices(const TriMesh& mesh) {
  Mat m(mesh.vertex_count(), 3);
  for (int v = 0; v < mesh.vertex_count(); ++v) m.row(v) = mesh.vertices[static_cast<std::size_t>(v)].transpose();
  return m;
}

// n! oracle for EMD values, n <= 8.
double emd_enumerated(const PointCloud& pc, const PointCloud& pc_t) {
  const int n = pc.size();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += (pc.points[static_cast<std::size_t>(i)] -
                pc_t.points[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])])
                   .norm();
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("chamfer of a singleton pair is pinned") {
  PointCloud pc, pc_t;
  pc.points = {Vec3(0, 0, 0)};
  pc_t.points = {Vec3(1, 0, 0)};
  const ChamferResult res = chamfer(pc, pc_t);
  CHECK(res.value == 2.0);
  REQUIRE(res.gradient.rows() == 1);
  CHECK(res.gradient(0, 0) == -4.0);
  CHECK(res.gradient(0, 1) == 0.0);
  CHECK(res.gradient(0, 2) == 0.0);
}

TEST_CASE("chamfer sums both directions") {
  PointCloud pc, pc_t;
  pc.points = {Vec3(0, 0, 0), Vec3(2, 0, 0)};
  pc_t.points = {Vec3(0, 0, 0)};
  CHECK(chamfer(pc, pc_t).value == 4.0);
}

TEST_CASE("chamfer ties go to the lowest index") {
  // The single pc point is equidistant to both targets; picking target 0
  // puts the forward pull along -x, which shows up in the gradient.
  PointCloud pc, pc_t;
  pc.points = {Vec3(0, 0, 0)};
  pc_t.points = {Vec3(1, 0, 0), Vec3(0, 1, 0)};
  const ChamferResult res = chamfer(pc, pc_t);
  CHECK(res.value == 3.0);
  CHECK(res.gradient(0, 0) == -4.0);
  CHECK(res.gradient(0, 1) == -2.0);
  CHECK(res.gradient(0, 2) == 0.0);
}

TEST_CASE("chamfer variants agree bitwise") {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(256));
    const int m = 1 + static_cast<int>(rng.below(256));
    PointCloud pc = random_cloud(rng, n, -1, 1);
    PointCloud pc_t = random_cloud(rng, m, -1, 1);
    if (trial % 3 == 0 && n > 2) {
      // Duplicates and shared points exercise tie handling.
      pc.points[0] = pc.points[1];
      pc_t.points[0] = pc.points[2];
    }
    const ChamferResult a = chamfer(pc, pc_t);
    const ChamferResult b = chamfer_brute(pc, pc_t);
    const KdTree tree(mat_of(pc_t));
    const ChamferResult c = chamfer_with_tree(pc, pc_t, tree);
    CHECK(a.value == b.value);
    CHECK(a.gradient == b.gradient);
    CHECK(a.value == c.value);
    CHECK(a.gradient == c.gradient);
  }
}

TEST_CASE("chamfer on lattice ties matches brute force exactly") {
  PointCloud pc, pc_t;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) pc_t.points.push_back(Vec3(x, y, 0));
  }
  pc.points = {Vec3(0.5, 0.5, 0), Vec3(1.5, 1.5, 0), Vec3(1, 1, 0)};
  const ChamferResult fast = chamfer(pc, pc_t);
  const ChamferResult brute = chamfer_brute(pc, pc_t);
  CHECK(fast.value == brute.value);
  CHECK(fast.gradient == brute.gradient);
}

TEST_CASE("chamfer gradient matches finite differences") {
  Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat x0 = random_mat(rng, 12, 3, -1, 1);
    const PointCloud pc_t = random_cloud(rng, 9, -1, 1);
    const ChamferResult res = chamfer(cloud_of(x0), pc_t);
    const Mat numeric =
        fd_gradient([&](const Mat& x) { return chamfer(cloud_of(x), pc_t).value; }, x0, 1e-6);
    CHECK(max_rel_diff(numeric, res.gradient) < 1e-5);
  }
}

TEST_CASE("chamfer is translation invariant") {
  Rng rng(47);
  const PointCloud pc = random_cloud(rng, 40, -1, 1);
  const PointCloud pc_t = random_cloud(rng, 33, -1, 1);
  const Vec3 shift(0.5, -0.25, 0.125);  // Representable: shifts are exact.
  PointCloud pc_s = pc, pct_s = pc_t;
  for (Vec3& p : pc_s.points) p += shift;
  for (Vec3& p : pct_s.points) p += shift;
  CHECK(std::abs(chamfer(pc_s, pct_s).value - chamfer(pc, pc_t).value) <= 1e-9);
}

TEST_CASE("chamfer validates inputs") {
  PointCloud ok, empty;
  ok.points = {Vec3(0, 0, 0)};
  CHECK_THROWS_AS(chamfer(empty, ok), std::invalid_argument);
  CHECK_THROWS_AS(chamfer(ok, empty), std::invalid_argument);
  const KdTree wrong(Mat::Zero(3, 3));
  CHECK_THROWS_AS(chamfer_with_tree(ok, ok, wrong), std::invalid_argument);
}

TEST_CASE("emd of a crossing pair picks the cheaper bijection") {
  PointCloud pc, pc_t;
  pc.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  pc_t.points = {Vec3(0, 0, 0), Vec3(0, 1, 0)};
  const EmdResult res = emd(pc, pc_t);
  CHECK(res.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(res.exact);
  CHECK(res.gap <= 1e-9);
  // Matched pair 0 is coincident: zero gradient, not NaN.
  CHECK(res.gradient.row(0) == Eigen::RowVector3d(0, 0, 0));
  const double inv = 1.0 / std::sqrt(2.0);
  CHECK(res.gradient(1, 0) == doctest::Approx(inv).epsilon(1e-12));
  CHECK(res.gradient(1, 1) == doctest::Approx(-inv).epsilon(1e-12));
  CHECK(res.gradient(1, 2) == 0.0);
}

TEST_CASE("emd of identical clouds is zero with zero gradient") {
  Rng rng(53);
  const PointCloud pc = random_cloud(rng, 17, -1, 1);
  const EmdResult res = emd(pc, pc);
  CHECK(res.value == 0.0);
  CHECK(res.gradient == Mat::Zero(17, 3));
}

TEST_CASE("emd matches permutation enumeration up to n=8") {
  Rng rng(59);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const PointCloud pc = random_cloud(rng, n, -2, 2);
    const PointCloud pc_t = random_cloud(rng, n, -2, 2);
    const EmdResult res = emd(pc, pc_t);
    CHECK(res.value == doctest::Approx(emd_enumerated(pc, pc_t)).epsilon(1e-9));
  }
}

TEST_CASE("emd gradient matches finite differences") {
  Rng rng(61);
  for (int trial = 0; trial < 4; ++trial) {
    const Mat x0 = random_mat(rng, 10, 3, -1, 1);
    const PointCloud pc_t = random_cloud(rng, 10, -1, 1);
    const EmdResult res = emd(cloud_of(x0), pc_t);
    const Mat numeric =
        fd_gradient([&](const Mat& x) { return emd(cloud_of(x), pc_t).value; }, x0, 1e-6);
    CHECK(max_rel_diff(numeric, res.gradient) < 1e-5);
  }
}

TEST_CASE("emd is translation invariant") {
  Rng rng(67);
  const PointCloud pc = random_cloud(rng, 24, -1, 1);
  const PointCloud pc_t = random_cloud(rng, 24, -1, 1);
  const Vec3 shift(-0.75, 1.5, 0.25);
  PointCloud pc_s = pc, pct_s = pc_t;
  for (Vec3& p : pc_s.points) p += shift;
  for (Vec3& p : pct_s.points) p += shift;
  CHECK(std::abs(emd(pc_s, pct_s).value - emd(pc, pc_t).value) <= 1e-9);
}

TEST_CASE("emd requires equal cardinalities") {
  Rng rng(71);
  const PointCloud pc = random_cloud(rng, 4);
  const PointCloud pc_t = random_cloud(rng, 5);
  CHECK_THROWS_AS(emd(pc, pc_t), std::invalid_argument);
}

TEST_CASE("emd warm start reproduces the cold value on repeat solves") {
  Rng rng(73);
  const PointCloud pc = random_cloud(rng, 40, -1, 1);
  const PointCloud pc_t = random_cloud(rng, 40, -1, 1);
  AssignmentOptions opts;
  opts.exact_threshold = 0;  // Route through the auction to exercise warm.
  AssignmentWarmStart warm;
  const EmdResult cold = emd(pc, pc_t, opts, &warm);
  const EmdResult reheated = emd(pc, pc_t, opts, &warm);
  CHECK(reheated.value <= cold.value + cold.gap + 1e-9);
  CHECK(reheated.value >= cold.value - cold.gap - 1e-9);
  const EmdResult exact = emd(pc, pc_t);
  CHECK(reheated.value - exact.value <= reheated.gap + 1e-9);
}

TEST_CASE("symmetry loss of a single off-plane point is pinned") {
  PointCloud pc;
  pc.points = {Vec3(0, 1, 0)};
  const SymmetryResult res = symmetry_loss(pc, pc, SymmetryPlane::XZ);
  CHECK(res.value == doctest::Approx(10.0).epsilon(1e-12));
  REQUIRE(res.gradient.rows() == 1);
  CHECK(res.gradient(0, 0) == 0.0);
  CHECK(res.gradient(0, 1) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(res.gradient(0, 2) == 0.0);
}

TEST_CASE("symmetry loss vanishes on mirror-symmetric clouds") {
  Rng rng(79);
  PointCloud pc;
  for (int i = 0; i < 12; ++i) {
    const Vec3 p(rng.uniform(-1, 1), rng.uniform(0.1, 1), rng.uniform(-1, 1));
    pc.points.push_back(p);
    pc.points.push_back(mirror_point(p, SymmetryPlane::XZ));
  }
  const SymmetryResult res = symmetry_loss(pc, pc, SymmetryPlane::XZ);
  CHECK(res.value == 0.0);
  CHECK(res.gradient == Mat::Zero(24, 3));
}

TEST_CASE("symmetry loss gradient matches finite differences on each plane") {
  Rng rng(83);
  for (SymmetryPlane plane : {SymmetryPlane::XZ, SymmetryPlane::XY, SymmetryPlane::YZ}) {
    const Mat x0 = random_mat(rng, 8, 3, -1, 1);
    const PointCloud pc_t = random_cloud(rng, 8, -1, 1);
    const SymmetryResult res = symmetry_loss(cloud_of(x0), pc_t, plane);
    const Mat numeric = fd_gradient(
        [&](const Mat& x) { return symmetry_loss(cloud_of(x), pc_t, plane).value; }, x0, 1e-6);
    CHECK(max_rel_diff(numeric, res.gradient) < 1e-5);
  }
}

TEST_CASE("laplacian loss is exactly zero for a constant translation") {
  const TriMesh mesh = make_uv_sphere(1.0, 6, 8);
  Mat deformed = mesh_vertices(mesh);
  deformed.col(0).array() += 0.5;  // Representable: 0.5 keeps sums exact.
  deformed.col(1).array() -= 0.25;
  deformed.col(2).array() += 2.0;
  for (LaplacianKind kind : {LaplacianKind::kUniform, LaplacianKind::kCotangent}) {
    const LaplacianResult res = laplacian_loss(mesh, deformed, kind);
    CHECK(res.value == 0.0);
    CHECK(res.gradient == Mat::Zero(mesh.vertex_count(), 3));
  }
}

TEST_CASE("umbrella laplacian loss matches a dense-matrix oracle") {
  // Fan mesh: vertex 0 is shared by every face, so its row mixes many
  // neighbors while rim vertices have few.
  TriMesh mesh;
  mesh.vertices.push_back(Vec3(0, 0, 0));
  const int rim = 7;
  for (int k = 0; k < rim; ++k) {
    const double a = 2.0 * M_PI * k / rim;
    mesh.vertices.push_back(Vec3(std::cos(a), std::sin(a), 0.1 * k));
  }
  for (int k = 0; k < rim; ++k) mesh.faces.push_back({0, 1 + k, 1 + (k + 1) % rim});

  Rng rng(89);
  const Mat deformed = mesh_vertices(mesh) + 0.2 * random_mat(rng, mesh.vertex_count(), 3, -1, 1);
  const LaplacianResult res = laplacian_loss(mesh, deformed);

  const Eigen::SparseMatrix<double> lap = laplacian_matrix(mesh);
  const Mat residual = Mat(lap * (deformed - mesh_vertices(mesh)));
  double want = 0.0;
  for (Eigen::Index i = 0; i < residual.rows(); ++i) want += residual.row(i).norm();
  CHECK(res.value == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("laplacian loss gradient matches finite differences") {
  const TriMesh mesh = make_box(1, 1, 1);
  Rng rng(97);
  for (LaplacianKind kind : {LaplacianKind::kUniform, LaplacianKind::kCotangent}) {
    // Jitter keeps every residual row away from the norm kink at zero.
    const Mat d0 = mesh_vertices(mesh) + 0.3 * random_mat(rng, mesh.vertex_count(), 3, -1, 1);
    const LaplacianResult res = laplacian_loss(mesh, d0, kind);
    const Mat numeric =
        fd_gradient([&](const Mat& d) { return laplacian_loss(mesh, d, kind).value; }, d0, 1e-6);
    CHECK(max_rel_diff(numeric, res.gradient) < 1e-5);
  }
}

TEST_CASE("laplacian matrix rows sum to zero and isolated vertices are zero rows") {
  TriMesh mesh = make_uv_sphere(1.0, 5, 6);
  mesh.vertices.push_back(Vec3(9, 9, 9));  // Isolated: referenced by no face.
  const int n = mesh.vertex_count();
  for (LaplacianKind kind : {LaplacianKind::kUniform, LaplacianKind::kCotangent}) {
    const Eigen::SparseMatrix<double> lap = laplacian_matrix(mesh, kind);
    REQUIRE(lap.rows() == n);
    REQUIRE(lap.cols() == n);
    const Mat dense = Mat(lap);
    for (int i = 0; i < n; ++i) CHECK(std::abs(dense.row(i).sum()) <= 1e-12);
    CHECK(dense.row(n - 1) == Mat::Zero(1, n));
    // Annihilates constant fields.
    const Mat ones = Mat::Ones(n, 3);
    CHECK(Mat(lap * ones).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("cotangent laplacian degrades degenerate rows instead of poisoning") {
  TriMesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0)};
  mesh.faces = {{0, 1, 2}, {0, 1, 3}};  // First face has zero area.
  const Eigen::SparseMatrix<double> lap = laplacian_matrix(mesh, LaplacianKind::kCotangent);
  const Mat dense = Mat(lap);
  CHECK(dense.allFinite());
  Mat deformed = mesh_vertices(mesh);
  deformed(3, 2) += 0.4;
  const LaplacianResult res = laplacian_loss(mesh, deformed, LaplacianKind::kCotangent);
  CHECK(std::isfinite(res.value));
  CHECK(res.gradient.allFinite());
}

TEST_CASE("laplacian loss validates the deformed shape") {
  const TriMesh mesh = make_box(1, 1, 1);
  CHECK_THROWS_AS(laplacian_loss(mesh, Mat::Zero(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(laplacian_loss(mesh, Mat::Zero(mesh.vertex_count(), 2)),
                  std::invalid_argument);
}

TEST_CASE("lpi penalty of a pinned linear field is its negative part") {
  // F(X) = X * A. Probing along x with epsilon 0.05 changes the offsets by
  // 0.05 * A.row(0) = (-0.1, 0.2, 0); only the -0.1 component is penalized.
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = -2.0;
  a(0, 1) = 4.0;
  const auto field = [&](const Mat& x) { return Mat(x * a); };
  LpiConfig config;
  config.epsilon = 0.05;
  config.axes = {true, false, false};
  const Mat vertices = Mat::Zero(1, 3);
  const LpiResult res = lpi_loss(field, vertices, config);
  CHECK(res.value == doctest::Approx(0.1).epsilon(1e-12));
  REQUIRE(res.axes == std::vector<int>{0});
  REQUIRE(res.grad_shifted.size() == 1);
  CHECK(res.grad_shifted[0](0, 0) == -1.0);
  CHECK(res.grad_shifted[0](0, 1) == 0.0);
  CHECK(res.grad_base(0, 0) == 1.0);
  CHECK(res.grad_base(0, 1) == 0.0);
}

TEST_CASE("lpi penalty is zero for fields growing along every axis") {
  Rng rng(101);
  const Mat vertices = random_mat(rng, 20, 3, -1, 1);
  const auto field = [](const Mat& x) { return Mat(0.5 * x); };
  const LpiResult res = lpi_loss(field, vertices, LpiConfig{});
  CHECK(res.value == 0.0);
  CHECK(res.grad_base == Mat::Zero(20, 3));
}

TEST_CASE("include_delta forgives shrinking fields that keep order") {
  // F(X) = -0.5 X shrinks offsets, but positions order is preserved since
  // delta + F(V+delta) - F(V) = 0.5 delta > 0.
  const auto field = [](const Mat& x) { return Mat(-0.5 * x); };
  const Mat vertices = Mat::Zero(1, 3);
  LpiConfig raw;
  raw.epsilon = 0.05;
  const LpiResult penalized = lpi_loss(field, vertices, raw);
  CHECK(penalized.value == doctest::Approx(0.075).epsilon(1e-12));
  LpiConfig ordered = raw;
  ordered.include_delta = true;
  const LpiResult forgiven = lpi_loss(field, vertices, ordered);
  CHECK(forgiven.value == 0.0);
}

TEST_CASE("lpi gradients chain correctly through a parametrized field") {
  // Differentiate the loss with respect to the field matrix A by chaining
  // the reported per-evaluation gradients, then compare against finite
  // differences in A.
  Rng rng(103);
  const Mat vertices = random_mat(rng, 6, 3, -1, 1);
  const Mat a0 = random_mat(rng, 3, 3, -1, 1);
  LpiConfig config;
  config.epsilon = 0.05;

  const auto loss_of = [&](const Mat& a) {
    const auto field = [&](const Mat& x) { return Mat(x * a); };
    return lpi_loss(field, vertices, config).value;
  };

  const auto field0 = [&](const Mat& x) { return Mat(x * a0); };
  const LpiResult res = lpi_loss(field0, vertices, config);
  Mat analytic = vertices.transpose() * res.grad_base;
  for (std::size_t k = 0; k < res.axes.size(); ++k) {
    Mat shifted = vertices;
    shifted.col(res.axes[k]).array() += config.epsilon;
    analytic += shifted.transpose() * res.grad_shifted[k];
  }
  const Mat numeric = fd_gradient(loss_of, a0, 1e-6);
  CHECK(max_rel_diff(numeric, analytic) < 1e-5);
}

TEST_CASE("lpi validates its configuration and field") {
  LpiConfig bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  const auto field = [](const Mat& x) { return x; };
  CHECK_THROWS_AS(lpi_loss(field, Mat::Zero(2, 2), LpiConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(lpi_loss(std::function<Mat(const Mat&)>(), Mat::Zero(2, 3), LpiConfig{}),
                  std::invalid_argument);
  const auto wrong_shape = [](const Mat& x) { return Mat(Mat::Zero(x.rows() + 1, 3)); };
  CHECK_THROWS_AS(lpi_loss(wrong_shape, Mat::Zero(2, 3), LpiConfig{}), std::invalid_argument);
}

TEST_CASE("loss weights validate") {
  LossWeights weights;
  weights.validate();
  weights.sym = -0.1;
  CHECK_THROWS_AS(weights.validate(), std::invalid_argument);
  weights.sym = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(weights.validate(), std::invalid_argument);
}

TEST_CASE("combine forms the weighted total and merges gradients") {
  LossBundle bundle;
  bundle.cd_mesh.value = 2.0;
  bundle.cd_mesh.gradients["offsets"] = Mat::Ones(2, 3);
  bundle.emd_mesh.value = 3.0;
  bundle.emd_mesh.gradients["offsets"] = 2.0 * Mat::Ones(2, 3);
  bundle.cd_points.value = 5.0;
  bundle.emd_points.value = 7.0;
  bundle.sym.value = 11.0;
  bundle.lap.value = 13.0;
  bundle.lpi.value = 17.0;
  bundle.emd_gap = 0.25;

  LossWeights weights;
  weights.cd_mesh = 1.0;
  weights.emd_mesh = 0.5;
  weights.cd_points = 2.0;
  weights.emd_points = 0.0;
  weights.sym = 1.0;
  weights.lap = 3.0;
  weights.lpi = 1.0;

  const LossReport report = combine(bundle, weights);
  // Per-term values stay unweighted.
  CHECK(report.cd_mesh == 2.0);
  CHECK(report.emd_mesh == 3.0);
  CHECK(report.emd_points == 7.0);
  const double expect = 1.0 * 2 + 0.5 * 3 + 2.0 * 5 + 0.0 * 7 + 1.0 * 11 + 3.0 * 13 + 1.0 * 17;
  CHECK(std::abs(report.total - expect) <= 1e-12 * expect);
  CHECK(report.emd_gap == 0.25);
  // Merged gradient on the shared key: 1.0 * ones + 0.5 * 2 * ones.
  REQUIRE(report.gradients.count("offsets") == 1);
  CHECK(report.gradients.at("offsets") == Mat(2.0 * Mat::Ones(2, 3)));

  // Doubling one weight raises the total by exactly that term.
  LossWeights doubled = weights;
  doubled.lap = 6.0;
  const LossReport report2 = combine(bundle, doubled);
  CHECK(report2.total == doctest::Approx(report.total + 3.0 * 13.0).epsilon(1e-12));
}

TEST_CASE("combine rejects missing terms with nonzero weight") {
  LossBundle bundle;  // Nothing computed.
  LossWeights weights;
  CHECK_THROWS_AS(combine(bundle, weights), std::invalid_argument);

  LossWeights zeros;
  zeros.cd_mesh = zeros.emd_mesh = zeros.cd_points = zeros.emd_points = 0.0;
  zeros.sym = zeros.lap = zeros.lpi = 0.0;
  const LossReport report = combine(bundle, zeros);
  CHECK(report.total == 0.0);
  CHECK(report.gradients.empty());
}

TEST_CASE("combine rejects gradient shape mismatches on a shared key") {
  LossBundle bundle;
  bundle.cd_mesh.value = 1.0;
  bundle.cd_mesh.gradients["offsets"] = Mat::Ones(2, 3);
  bundle.emd_mesh.value = 1.0;
  bundle.emd_mesh.gradients["offsets"] = Mat::Ones(3, 3);
  LossWeights weights;
  weights.cd_points = weights.emd_points = weights.sym = weights.lap = weights.lpi = 0.0;
  CHECK_THROWS_AS(combine(bundle, weights), std::invalid_argument);
}
