#pragma once

#include <vector>

#include "mtspace/merge_tree.hpp"
#include "mtspace/metric.hpp"
#include "mtspace/preprocess.hpp"

namespace mts {

/// Outcome of a barycenter optimization.
struct BarycenterRun {
  Bdt result;                          ///< Minimizer (raw coordinates).
  /// Merge tree realizing `result`. Always present for normalized runs;
  /// left empty when a raw-coordinate run converges to a tree that violates
  /// the nesting condition (no realization exists then).
  MergeTree merge_tree;
  std::vector<double> energy_trace;    ///< Energy after each assignment.
  std::vector<TreeMatching> matchings; ///< Final matching per member.
  std::vector<double> weights;         ///< Member weights (sum to 1).
  int iterations = 0;                  ///< Assignment rounds performed.
};

/// Weighted sum of squared tree distances from `b` to every member:
/// sum_i w_i * d(b, ensemble[i])^2. Throws WeightError when the weights do
/// not form a distribution over the ensemble (size mismatch, negative
/// entries, or sum off 1 by more than 1e-12).
double frechet_energy(const Bdt& b, const std::vector<Bdt>& ensemble,
                      const std::vector<double>& weights,
                      const MetricParams& params = {},
                      Solver solver = Solver::Exact);

/// One update step of the barycenter loop, exposed for testing: moves every
/// branch of `b` to the weighted mean of its per-member targets (matched
/// image, or the diagonal projection of the branch itself when the member
/// destroys it), spawns branches the members create, and prunes branches
/// whose updated persistence is negligible. The step operates in locally
/// normalized coordinates when `params.normalize` is set and always returns
/// raw coordinates. `matchings[i]` must be a matching between `b` and
/// `ensemble[i]` as produced by mt_distance with the same params.
Bdt update_candidate(const Bdt& b, const std::vector<Bdt>& ensemble,
                     const std::vector<TreeMatching>& matchings,
                     const std::vector<double>& weights,
                     const MetricParams& params = {});

/// Minimizes the Fréchet energy by alternating per-member assignments and
/// the closed-form coordinate update, starting from an ensemble member.
///
/// `weights` empty means uniform 1/N. `init_index` -1 picks the member with
/// median total persistence; otherwise it must index the ensemble. The N
/// assignment problems of one round share a single task pool when
/// threads > 1; results are identical to the sequential order. Stops when
/// the relative energy decrease falls below 1% (or energy hits zero);
/// throws NonConvergence after `max_iterations` assignment rounds,
/// EmptyEnsemble for an empty ensemble, and WeightError for bad weights.
BarycenterRun barycenter(const std::vector<Bdt>& ensemble,
                         std::vector<double> weights = {},
                         const MetricParams& params = {},
                         int init_index = -1, Solver solver = Solver::Exact,
                         int threads = 1, int max_iterations = 500);

}  // namespace mts
