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

#include <vector>

#include "meshdeform/matrix.hpp"

namespace meshdeform {

struct AssignmentOptions {
  /// Problems up to this size run the exact shortest-augmenting-path solver;
  /// larger problems use the scaled auction.
  int exact_threshold = 512;
  /// Final auction epsilon. The reported gap is a certified bound, so this
  /// only controls how hard the auction tries, not how honest the answer is.
  double auction_eps_min = 1e-7;
  /// Epsilon divisor between scaling phases.
  double auction_eps_scale = 7.0;
};

/// Solution of a square min-cost assignment problem.
struct AssignmentResult {
  /// target_of_source[i] is the column matched to row i; a permutation.
  std::vector<int> target_of_source;
  /// Total cost of the returned matching.
  double cost = 0.0;
  /// Certified optimality gap: cost minus a dual-feasible lower bound,
  /// clamped at zero. Near machine precision for the exact solver.
  double gap = 0.0;
  bool exact = true;
  /// Dual potentials with u[i] + v[j] <= cost(i, j) up to roundoff; matched
  /// pairs are tight for the exact solver.
  std::vector<double> u;
  std::vector<double> v;
};

/// Reusable auction state. Passing the previous solve's prices and matching
/// back in makes a solve over slowly changing costs nearly incremental: kept
/// matches never re-bid, and the scaling ladder opens at the measured drift.
struct AssignmentWarmStart {
  std::vector<double> prices;
  std::vector<int> target_of_source;
  /// Opaque solver cache (per-row bid shortlists and their validity bounds).
  /// Leave default-initialized; carrying it between solves is a speedup only,
  /// never a semantic change.
  std::vector<int> candidates;
  std::vector<double> candidate_bounds;

  bool usable(int n) const;
};

/// Exact solver, shortest augmenting path with dual potentials, O(n^3).
AssignmentResult solve_assignment_exact(const Mat& cost);

/// Scaled auction. Approximate: the matching is within n*eps of optimal at
/// the final epsilon, and `gap` certifies the achieved bound. `warm`, when
/// non-null and sized to the problem, seeds prices and matching and receives
/// the final state back.
AssignmentResult solve_assignment_auction(const Mat& cost, const AssignmentOptions& options,
                                          AssignmentWarmStart* warm = nullptr);

/// Dispatches on problem size per `options.exact_threshold`.
AssignmentResult solve_assignment(const Mat& cost, const AssignmentOptions& options = {},
                                  AssignmentWarmStart* warm = nullptr);

}  // namespace meshdeform
