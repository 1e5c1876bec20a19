#pragma once

#include "mtspace/merge_tree.hpp"
#include "mtspace/metric.hpp"
#include "mtspace/preprocess.hpp"

namespace mts {

/// One point along the linear path between two branch decomposition trees.
struct GeodesicSample {
  double alpha = 0.0;     ///< Position along the path, in [0, 1].
  Bdt bdt;                ///< Interpolated tree at this position.
  TreeMatching matching;  ///< Matching that induced the path.
};

/// Interpolates between two BDTs along a matching at position alpha.
///
/// Matched branches travel linearly between their two intervals, destroyed
/// branches shrink toward the midpoint of their own interval, and created
/// branches grow out of the midpoint of theirs. Each interpolated branch
/// hangs off the image of its original parent. When `params.normalize` is
/// set the interpolation runs in locally normalized coordinates and the
/// result is mapped back to raw values, which keeps every child interval
/// nested inside its parent; with raw coordinates the nesting condition can
/// fail and surfaces later in bdt_to_merge_tree.
///
/// alpha == 0 and alpha == 1 return exact copies of the inputs. The matching
/// is expected to come from mt_distance on the same tree pair with the same
/// params; it must cover every branch of both trees exactly once and induce
/// a single connected tree at interior alpha, else MatchingMismatch.
/// Throws InvalidAlpha when alpha lies outside [0, 1].
GeodesicSample interpolate(const Bdt& b_i, const Bdt& b_j,
                           const TreeMatching& matching, double alpha,
                           const MetricParams& params = {});

}  // namespace mts
