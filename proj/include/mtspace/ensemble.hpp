#pragma once

#include <cstdint>
#include <vector>

#include "mtspace/merge_tree.hpp"
#include "mtspace/metric.hpp"
#include "mtspace/preprocess.hpp"

namespace mts {

/// Outcome of k-means over an ensemble of BDTs.
struct ClusteringResult {
  std::vector<int> assignments;          ///< Member -> cluster id.
  std::vector<Bdt> centroids;            ///< One centroid tree per cluster.
  int iterations = 0;                    ///< Assignment rounds performed.
  std::vector<double> cluster_energies;  ///< Sum of squared distances per cluster.
};

/// k-means over tree space: distance-squared seeding from `seed`, nearest-
/// centroid assignment (ties to the lower cluster id), barycenter centroid
/// update (a cluster keeps its old centroid when the fresh barycenter does
/// not improve the cluster energy), and re-seeding of empty clusters with
/// the member farthest from its assigned centroid. Deterministic for a
/// fixed seed, independent of `threads`. Throws InvalidK unless
/// 1 <= k <= ensemble size, EmptyEnsemble for an empty ensemble.
ClusteringResult kmeans(const std::vector<Bdt>& ensemble, int k,
                        const MetricParams& params = {},
                        std::uint64_t seed = 0, Solver solver = Solver::Exact,
                        int threads = 1);

/// Normalized mutual information between two labelings of the same members,
/// in [0, 1]; 1 when both partitions carry no information (single class
/// each), 0 when exactly one does. Throws LengthMismatch on size mismatch
/// or empty input.
double nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

/// Adjusted Rand index between two labelings (<= 1, 1 for identical
/// partitions up to renaming); degenerate cases where the expected and
/// maximal index coincide score 1. Throws LengthMismatch on size mismatch
/// or empty input.
double ari(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

/// Distance between a sequence and its reconstruction from the kept key
/// frames: dropped frame i between kept flanks j < i < k is rebuilt by
/// interpolation at alpha = (i-j)/(k-j), and the square root of the sum of
/// squared tree distances to the originals is returned. `kept` must be
/// sorted, within range, and include the first and last frame, else
/// InvalidKeyFrames.
double sequence_distance(const std::vector<Bdt>& sequence,
                         const std::vector<int>& kept,
                         const MetricParams& params = {},
                         Solver solver = Solver::Exact);

/// Outcome of greedy key-frame selection.
struct ReductionResult {
  std::vector<int> kept;         ///< Sorted key frames, ends always kept.
  std::vector<double> ds_trace;  ///< Sequence distance after each removal.
};

/// Greedily removes interior frames, one per step, always the frame whose
/// removal yields the smallest sequence distance (ties to the smallest
/// frame index), until `target_size` frames remain. Throws InvalidParameter
/// unless 2 <= target_size <= |sequence|.
ReductionResult temporal_reduce(const std::vector<Bdt>& sequence,
                                int target_size,
                                const MetricParams& params = {},
                                Solver solver = Solver::Exact);

/// Matchings between consecutive frames, for feature correspondence over
/// time. Throws InvalidParameter when the sequence has fewer than 2 frames.
std::vector<TreeMatching> track(const std::vector<Bdt>& sequence,
                                const MetricParams& params = {},
                                Solver solver = Solver::Exact);

}  // namespace mts
