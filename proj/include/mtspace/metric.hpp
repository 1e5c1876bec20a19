#pragma once

#include <utility>
#include <vector>

#include "mtspace/assignment.hpp"
#include "mtspace/merge_tree.hpp"
#include "mtspace/preprocess.hpp"
#include "mtspace/task_pool.hpp"

namespace mts {

/// Result of a tree distance query: the optimal depth- and
/// structure-preserving partial matching plus its cost. Branch indices refer
/// to the input trees (ids are stable across the internal preprocessing).
struct TreeMatching {
  double distance = 0.0;
  std::vector<std::pair<int, int>> matched;
  std::vector<int> destroyed;  // first tree's branches mapped to the diagonal
  std::vector<int> created;    // second tree's branches mapped from the diagonal
};

/// Memo tables of the recursion: squared subtree-to-subtree costs (T) and
/// squared forest-to-forest costs (F), one cell per branch pair. Cells whose
/// branches sit at different depths are infinity and never evaluated.
struct DistanceTables {
  int ni = 0;
  int nj = 0;
  std::vector<double> subtree;  // T, squared
  std::vector<double> forest;   // F, squared

  double t(int i, int j) const { return subtree[static_cast<std::size_t>(i) * nj + j]; }
  double f(int i, int j) const { return forest[static_cast<std::size_t>(i) * nj + j]; }
};

/// q-Wasserstein distance between persistence diagrams via diagonal
/// augmentation. The matching reports pair indices; destroyed pairs of d_i
/// are matched to their diagonal projections, created pairs of d_j from
/// theirs.
TreeMatching diagram_distance(const Diagram& d_i, const Diagram& d_j,
                              double q = 2.0, Solver solver = Solver::Exact);

/// Cost of erasing the whole subtree rooted at `branch`: the square root of
/// the summed squared diagonal-deletion costs.
double subtree_empty_distance(const Bdt& b, int branch);

/// Squared deletion cost of a single (birth, death) point: half the squared
/// persistence.
inline double point_diagonal_sq(double birth, double death) {
  const double p = death - birth;
  return 0.5 * p * p;
}

/// A tree after the structural preprocessing (and normalization when
/// requested), ready for distance evaluation. Branch ids still refer to the
/// original input.
struct PreparedBdt {
  Bdt tree;
  bool normalized = false;
};

PreparedBdt prepare(const Bdt& b, const MetricParams& params);

/// Distance between already-prepared trees; exposes the memo tables on
/// request. `pool` enables the task-parallel evaluation order (results are
/// bitwise identical to the sequential order by construction).
TreeMatching mt_distance_prepared(const PreparedBdt& a, const PreparedBdt& b,
                                  Solver solver = Solver::Exact,
                                  DistanceTables* tables = nullptr,
                                  TaskPool* pool = nullptr);

/// Variant of mt_distance_prepared whose reported matching always takes the
/// matched-roots route, even when destroying both trees entirely is
/// cheaper. Interpolation needs a connected path, and the matched-roots
/// route is the best one among those that keep the roots paired. The
/// reported distance is the cost of the returned matching, which can exceed
/// the true distance in that degenerate case.
TreeMatching mt_distance_root_matched(const PreparedBdt& a,
                                      const PreparedBdt& b,
                                      Solver solver = Solver::Exact);

/// Wasserstein distance between branch decomposition trees: applies the
/// eps preprocessing (and normalization when params.normalize), then solves
/// the constrained matching problem bottom-up.
TreeMatching mt_distance(const Bdt& b_i, const Bdt& b_j,
                         const MetricParams& params = {},
                         Solver solver = Solver::Exact);

/// Task-parallel evaluation seeded at leaf pairs; a parent's cell is filled
/// by its last-completing child. thread_count <= 1 falls back to the
/// sequential path. Output is bitwise identical to mt_distance.
TreeMatching mt_distance_parallel(const Bdt& b_i, const Bdt& b_j,
                                  const MetricParams& params, Solver solver,
                                  int thread_count);

/// Distances from one prepared tree to many, sharing a single task pool for
/// all the per-pair cell tasks (pool == nullptr runs sequentially). Results
/// are bitwise identical to per-pair sequential evaluation.
std::vector<TreeMatching> mt_distance_many(const PreparedBdt& a,
                                           const std::vector<PreparedBdt>& bs,
                                           Solver solver = Solver::Exact,
                                           TaskPool* pool = nullptr);

}  // namespace mts
