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

#include "meshdeform/assignment.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <deque>
#include <limits>
#include <stdexcept>

namespace meshdeform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_cost(const Mat& cost) {
  if (cost.rows() == 0 || cost.rows() != cost.cols()) {
    throw std::invalid_argument("assignment: cost matrix must be square and nonempty");
  }
  // A finite sum proves every entry finite unless the sum itself overflows,
  // so the expensive elementwise scan only runs to confirm a failure.
  if (!std::isfinite(cost.sum()) && !cost.allFinite()) {
    throw std::invalid_argument("assignment: cost matrix contains non-finite entries");
  }
}

/// Dual-feasible lower bound from column potentials: u_i = min_j (c_ij - v_j)
/// makes (u, v) feasible for any v, so sum(u) + sum(v) <= optimal cost.
double dual_lower_bound(const Mat& cost, const std::vector<double>& v) {
  const int n = static_cast<int>(cost.rows());
  double bound = 0.0;
  for (int i = 0; i < n; ++i) {
    double ui = kInf;
    for (int j = 0; j < n; ++j) ui = std::min(ui, cost(i, j) - v[j]);
    bound += ui;
  }
  for (int j = 0; j < n; ++j) bound += v[j];
  return bound;
}

double matching_cost(const Mat& cost, const std::vector<int>& target_of_source) {
  double total = 0.0;
  for (int i = 0; i < static_cast<int>(target_of_source.size()); ++i) {
    total += cost(i, target_of_source[i]);
  }
  return total;
}

constexpr int kCandidateWidth = 24;

/// Rebuilds one row's bid shortlist: the `width` highest-benefit objects under
/// the given prices, descending, ties keeping the lower index first. Returns
/// the width-th best value: every object outside the shortlist sits at or
/// below it, and prices only rise, so while the shortlist maximum stays at or
/// above this bound it equals the true row maximum.
double rebuild_row_candidates(const Mat& cost, const Eigen::VectorXd& prices, int row, int width,
                              int* out) {
  const int n = static_cast<int>(cost.rows());
  std::array<double, kCandidateWidth> vals;
  std::array<int, kCandidateWidth> idx;
  int count = 0;
  for (int j = 0; j < n; ++j) {
    const double value = -cost(row, j) - prices[j];
    if (count == width && value <= vals[width - 1]) continue;
    int pos = count < width ? count : width - 1;
    while (pos > 0 && vals[pos - 1] < value) {
      vals[pos] = vals[pos - 1];
      idx[pos] = idx[pos - 1];
      --pos;
    }
    vals[pos] = value;
    idx[pos] = j;
    if (count < width) ++count;
  }
  for (int c = 0; c < width; ++c) out[c] = idx[c];
  return vals[width - 1];
}

}  // namespace

AssignmentResult solve_assignment_exact(const Mat& cost) {
  check_cost(cost);
  const int n = static_cast<int>(cost.rows());

  // Shortest augmenting path with potentials, 1-based with column 0 as the
  // virtual root. Ties in the Dijkstra step resolve to the lowest column, so
  // the matching is deterministic.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentResult result;
  result.target_of_source.assign(n, -1);
  for (int j = 1; j <= n; ++j) result.target_of_source[p[j] - 1] = j - 1;
  result.cost = matching_cost(cost, result.target_of_source);
  result.exact = true;
  result.u.assign(u.begin() + 1, u.end());
  result.v.assign(v.begin() + 1, v.end());
  result.gap = std::max(0.0, result.cost - dual_lower_bound(cost, result.v));
  return result;
}

bool AssignmentWarmStart::usable(int n) const {
  if (static_cast<int>(prices.size()) != n) return false;
  if (static_cast<int>(target_of_source.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int j : target_of_source) {
    if (j < 0 || j >= n || seen[j]) return false;
    seen[j] = true;
  }
  return true;
}

AssignmentResult solve_assignment_auction(const Mat& cost, const AssignmentOptions& options,
                                          AssignmentWarmStart* warm) {
  check_cost(cost);
  const int n = static_cast<int>(cost.rows());
  if (options.auction_eps_min <= 0.0 || options.auction_eps_scale <= 1.0) {
    throw std::invalid_argument("assignment: auction epsilon parameters out of range");
  }

  // Internally a maximization over benefits b = -cost with object prices.
  // Mat is row-major, so -cost.row(i).transpose() - prices streams contiguously.
  Eigen::VectorXd prices = Eigen::VectorXd::Zero(n);
  const bool warm_prices = warm != nullptr && static_cast<int>(warm->prices.size()) == n;
  if (warm_prices) {
    for (int j = 0; j < n; ++j) prices[j] = warm->prices[j];
  }

  std::vector<int> owner(n, -1), object_of(n, -1);
  // Seeding the previous matching lets the epsilon-CS pass below keep every
  // pair the gradient step left near-optimal; only freed sources re-bid.
  if (warm != nullptr && warm->usable(n)) {
    object_of = warm->target_of_source;
    for (int i = 0; i < n; ++i) owner[object_of[i]] = i;
  }

  // Bids scan a per-row shortlist of the highest-benefit objects instead of
  // the full row. Within a call a shortlist is exact while its maximum stays
  // at or above its build bound (see rebuild_row_candidates) and is rebuilt
  // when it sinks below, which also breaks deadlocks among rows whose
  // shortlists saturate. Across calls the costs have moved, so carried
  // shortlists are heuristics; the verification loop at the bottom restores
  // the exact epsilon-CS guarantee either way.
  const int width = std::min(n, kCandidateWidth);
  std::vector<int> local_candidates;
  std::vector<double> local_bounds;
  std::vector<int>& candidates = warm != nullptr ? warm->candidates : local_candidates;
  std::vector<double>& bounds = warm != nullptr ? warm->candidate_bounds : local_bounds;
  auto row_candidates = [&](int i) { return candidates.data() + static_cast<std::size_t>(i) * width; };
  if (candidates.size() != static_cast<std::size_t>(n) * width ||
      bounds.size() != static_cast<std::size_t>(n)) {
    candidates.assign(static_cast<std::size_t>(n) * width, 0);
    bounds.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      bounds[i] = rebuild_row_candidates(cost, prices, i, width, row_candidates(i));
    }
  }

  // viol[i] upper-bounds the epsilon-CS violation of i's current match.
  // Prices only rise, and a rise on i's own object evicts i, so the true
  // violation of a surviving match never grows; cached bounds stay valid
  // until i rebids (then it equals eps) or the row is rescanned.
  std::vector<double> viol(n, kInf);
  // The scaling ladder opens at the measured epsilon-CS violation of the warm
  // state: tiny after a small cost drift (later phases are nearly free), and
  // at spread/2 from cold. Opening too low with a stale matching degenerates
  // into tiny-increment bid wars.
  double eps;
  if (object_of[0] >= 0) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double best = (-cost.row(i).transpose() - prices).maxCoeff();
      const double mine = -cost(i, object_of[i]) - prices[object_of[i]];
      viol[i] = best - mine;
      worst = std::max(worst, viol[i]);
    }
    eps = worst / 2.0;
  } else {
    eps = (cost.maxCoeff() - cost.minCoeff()) / 2.0;
  }
  eps = std::max(eps, options.auction_eps_min);

  std::deque<int> unassigned;
  // Row i takes its shortlist optimum and pays just enough to stay epsilon
  // competitive; the displaced owner re-enters the queue. A stale shortlist
  // is rebuilt before bidding; the runner-up estimate is clamped up to the
  // bound so the bid never overshoots epsilon-CS even with carried lists.
  const auto bid = [&](int i, double eps_now) {
    const int* cand = row_candidates(i);
    int best_j = cand[0];
    double best = -kInf, second = -kInf;
    const auto scan = [&] {
      best = -kInf;
      second = -kInf;
      for (int c = 0; c < width; ++c) {
        const int j = cand[c];
        const double value = -cost(i, j) - prices[j];
        if (value > best) {
          second = best;
          best = value;
          best_j = j;
        } else if (value > second) {
          second = value;
        }
      }
    };
    scan();
    if (best < bounds[i]) {
      bounds[i] = rebuild_row_candidates(cost, prices, i, width, row_candidates(i));
      scan();
    }
    const double runner_up = std::max(second, bounds[i]);
    prices[best_j] += (n == 1 ? eps_now : best - runner_up + eps_now);
    const int previous = owner[best_j];
    if (previous >= 0) {
      object_of[previous] = -1;
      unassigned.push_back(previous);
    }
    owner[best_j] = i;
    object_of[i] = best_j;
    viol[i] = eps_now;
  };

  while (true) {
    // Carry matches that already satisfy epsilon-complementary slackness at
    // the new epsilon into this phase; only the violators re-bid. Rows whose
    // cached bound already clears the threshold are not rescanned at all.
    unassigned.clear();
    for (int i = 0; i < n; ++i) {
      if (object_of[i] < 0) {
        unassigned.push_back(i);
        continue;
      }
      if (viol[i] <= eps) continue;
      const double best = (-cost.row(i).transpose() - prices).maxCoeff();
      const double mine = -cost(i, object_of[i]) - prices[object_of[i]];
      viol[i] = best - mine;
      if (viol[i] > eps) {
        owner[object_of[i]] = -1;
        object_of[i] = -1;
        bounds[i] = rebuild_row_candidates(cost, prices, i, width, row_candidates(i));
        unassigned.push_back(i);
      }
    }

    while (!unassigned.empty()) {
      const int i = unassigned.front();
      unassigned.pop_front();
      bid(i, eps);
    }

    if (eps <= options.auction_eps_min) break;
    eps = std::max(options.auction_eps_min, eps / options.auction_eps_scale);
  }

  // Carried shortlists can leave stale matches behind, so full passes enforce
  // epsilon-CS at the floor epsilon: violators re-bid on fresh shortlists
  // until a pass comes back clean. The clean pass doubles as the dual pass;
  // prices rise by at least the floor per re-bid, so this terminates. The
  // threshold carries a roundoff cushion: a winner's slack equals the floor
  // only up to recomputation error, and releasing on that ulp would creep
  // prices forever.
  AssignmentResult result;
  result.u.assign(n, 0.0);
  while (true) {
    unassigned.clear();
    for (int i = 0; i < n; ++i) {
      const double best = (-cost.row(i).transpose() - prices).maxCoeff();
      result.u[i] = -best;
      const double mine = -cost(i, object_of[i]) - prices[object_of[i]];
      const double tol = options.auction_eps_min + 1e-12 * (1.0 + std::abs(best));
      if (best - mine > tol) {
        owner[object_of[i]] = -1;
        object_of[i] = -1;
        unassigned.push_back(i);
      }
    }
    if (unassigned.empty()) break;
    for (int i : unassigned) {
      bounds[i] = rebuild_row_candidates(cost, prices, i, width, row_candidates(i));
    }
    while (!unassigned.empty()) {
      const int i = unassigned.front();
      unassigned.pop_front();
      bid(i, options.auction_eps_min);
    }
  }

  result.target_of_source = object_of;
  result.cost = matching_cost(cost, result.target_of_source);
  result.exact = false;
  result.v.assign(n, 0.0);
  for (int j = 0; j < n; ++j) result.v[j] = -prices[j];
  double bound = 0.0;
  for (int i = 0; i < n; ++i) bound += result.u[i];
  for (int j = 0; j < n; ++j) bound += result.v[j];
  result.gap = std::max(0.0, result.cost - bound);

  if (warm != nullptr) {
    warm->prices.assign(prices.data(), prices.data() + n);
    warm->target_of_source = object_of;
  }
  return result;
}

AssignmentResult solve_assignment(const Mat& cost, const AssignmentOptions& options,
                                  AssignmentWarmStart* warm) {
  if (cost.rows() != 0 && cost.rows() <= options.exact_threshold) {
    return solve_assignment_exact(cost);
  }
  return solve_assignment_auction(cost, options, warm);
}

}  // namespace meshdeform
