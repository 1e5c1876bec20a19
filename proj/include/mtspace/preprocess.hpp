#pragma once

#include "mtspace/errors.hpp"
#include "mtspace/merge_tree.hpp"

namespace mts {

/// Knobs of the distance pipeline. eps1 merges near-degenerate adjacent
/// saddles, eps2/eps3 move high-relative-persistence branches up the branch
/// tree, and normalize switches the metric to locally normalized
/// coordinates.
struct MetricParams {
  double eps1 = 0.05;
  double eps2 = 0.95;
  double eps3 = 0.9;
  bool normalize = true;

  void validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(eps1) || !in01(eps2) || !in01(eps3))
      throw InvalidParameter("eps1/eps2/eps3 must lie in [0, 1]");
  }
};

/// Neutral configuration: no structural edits, raw coordinates. Used by
/// tests that exercise the plain metric.
inline MetricParams neutral_params(bool normalize = false) {
  MetricParams p;
  p.eps1 = 0.0;
  p.eps2 = 1.0;
  p.eps3 = 0.0;
  p.normalize = normalize;
  return p;
}

/// Groups adjacent saddles whose value gap, relative to the largest
/// adjacent-saddle gap of the tree, is < eps1, and re-attaches every branch
/// dying in a group to the branch that survives the group's topmost saddle.
/// Only the structure changes: the (birth, death) multiset is preserved.
/// eps1 >= 1 merges all saddles, flattening the branch tree.
Bdt merge_saddles_bdt(const Bdt& b, double eps1);

/// Tree-level form of the saddle merge: branch decomposition, group-based
/// re-parenting, reconstruction.
MergeTree merge_saddles(const MergeTree& t, double eps1);

/// Repeatedly re-parents one level up every branch whose persistence is
/// < eps3 relative to the tree range and > eps2 relative to its current
/// parent, until the ratio drops below eps2 or the branch reaches the root.
Bdt move_branches_up(const Bdt& b, double eps2, double eps3);

/// A Bdt whose non-root branches carry locally normalized coordinates
/// (each child rescaled into its parent's raw interval, landing in [0,1]);
/// the root keeps raw coordinates so the map stays invertible.
struct NormalizedBdt {
  Bdt tree;
};

NormalizedBdt normalize(const Bdt& b);
Bdt denormalize(const NormalizedBdt& nb);

/// Full structural pipeline in metric order: saddle merge, then branch
/// move-up. Coordinates are untouched; combine with normalize() as needed.
Bdt preprocess_structure(const Bdt& b, const MetricParams& p);

}  // namespace mts
