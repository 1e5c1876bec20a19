#pragma once

#include <cstdint>
#include <vector>

#include "mtspace/errors.hpp"
#include "mtspace/field.hpp"

namespace mts {

enum class TreeKind { Join, Split };

/// Node of a merge tree. `order` is the node's rank in the sweep total order
/// (0 = processed first); it encodes the simulation-of-simplicity tie-break
/// so that equal scalar values still give a deterministic Elder rule.
struct MergeTreeNode {
  double scalar = 0.0;
  std::int64_t vertex = -1;  // originating grid vertex, -1 when synthetic
  int parent = -1;
  std::vector<int> children;
  int order = -1;
};

/// Rooted merge tree of a scalar field. For a join tree the leaves are
/// minima and the root sits at the global maximum; for a split tree the
/// leaves are maxima and the root sits at the global minimum.
struct MergeTree {
  TreeKind kind = TreeKind::Join;
  std::vector<MergeTreeNode> nodes;
  int root = -1;

  int node_count() const { return static_cast<int>(nodes.size()); }
  bool is_leaf(int n) const { return nodes[n].children.empty(); }
  int leaf_count() const;

  /// Checks the rooted-tree shape and arc monotonicity under the sweep
  /// comparator; throws ParseError on violation.
  void validate() const;
};

MergeTree compute_merge_tree(const ScalarField& f, TreeKind kind);

/// Birth/death values are always stored sorted (birth <= death); birth_node
/// is the extremum node of the feature and death_node the merge node where
/// it dies, regardless of tree kind.
struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  int birth_node = -1;
  int death_node = -1;

  double persistence() const { return death - birth; }
};

struct Diagram {
  TreeKind kind = TreeKind::Join;
  std::vector<PersistencePair> pairs;
};

/// Elder-rule pairing: each leaf is paired with the merge node where its
/// component is absorbed by an older one; the global extremum pairs with
/// the tree root. Pair count equals leaf count.
Diagram elder_pairs(const MergeTree& t);

/// Removes every pair with persistence < threshold * (data range spanned by
/// the tree), keeping the global pair. threshold = 0 returns the input
/// unchanged.
MergeTree simplify(const MergeTree& t, double threshold);

/// One branch of a persistence-driven branch decomposition.
struct Branch {
  int id = 0;  // equals the index in Bdt::branches
  double birth = 0.0;
  double death = 0.0;
  int parent = -1;
  std::vector<int> children;      // sorted: persistence desc, then birth, then id
  std::int64_t birth_vertex = -1;  // grid vertex of the extremum, -1 if synthetic
  std::int64_t death_vertex = -1;  // grid vertex of the merge point, -1 if synthetic

  double persistence() const { return death - birth; }
};

/// Branch decomposition tree. Branch ids are stable array indices, which
/// lets matchings refer to branches across structure-only transforms.
struct Bdt {
  TreeKind kind = TreeKind::Join;
  std::vector<Branch> branches;
  int root = -1;

  int size() const { return static_cast<int>(branches.size()); }
  bool empty() const { return branches.empty(); }

  /// Depth of each branch (root = 0).
  std::vector<int> depths() const;

  /// Re-derives children lists from parent links and applies the canonical
  /// child order (persistence desc, birth, id).
  void rebuild_children();

  /// Throws NestingViolation if some child interval escapes its parent's.
  void validate_nesting() const;
};

Bdt build_bdt(const MergeTree& t);

/// Re-derives the sweep ranks of a tree that lost them (deserialized or
/// hand-built): value order under the kind's sweep direction, ties resolved
/// deeper-node-first so children precede parents and the Elder rule stays
/// well defined.
void assign_sweep_orders(MergeTree& t);

/// Reconstructs a merge tree realizing the given branch decomposition:
/// one monotone path per branch, children attached at their death values.
/// Throws NestingViolation when a child interval is not contained in its
/// parent interval.
MergeTree bdt_to_merge_tree(const Bdt& b);

/// Structural equality: same kind, same (birth, death) per branch, and the
/// same parent structure under the canonical child order.
bool same_bdt(const Bdt& a, const Bdt& b, double tol = 0.0);

}  // namespace mts
