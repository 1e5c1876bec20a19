#include "mtspace/merge_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mts {

namespace {

/// Plain union-find with path compression.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

/// Elder sweep shared by elder_pairs and build_bdt: processes nodes in sweep
/// order, records the surviving leaf per node and the pair list.
struct ElderResult {
  std::vector<PersistencePair> pairs;
  std::vector<int> survivor;   // per node: leaf whose feature survives there
  std::vector<int> pair_of;    // per node: pair index of survivor's feature
};

ElderResult elder_sweep(const MergeTree& t) {
  const int n = t.node_count();
  std::vector<int> by_order(n);
  std::iota(by_order.begin(), by_order.end(), 0);
  std::sort(by_order.begin(), by_order.end(),
            [&](int a, int b) { return t.nodes[a].order < t.nodes[b].order; });

  ElderResult r;
  r.survivor.assign(n, -1);
  r.pair_of.assign(n, -1);
  std::vector<int> pair_of_leaf(n, -1);

  auto make_pair = [&](int leaf, int death) {
    const double a = t.nodes[leaf].scalar;
    const double b = t.nodes[death].scalar;
    PersistencePair p;
    p.birth = std::min(a, b);
    p.death = std::max(a, b);
    p.birth_node = leaf;
    p.death_node = death;
    pair_of_leaf[leaf] = static_cast<int>(r.pairs.size());
    r.pairs.push_back(p);
  };

  for (int node : by_order) {
    if (t.is_leaf(node)) {
      r.survivor[node] = node;
      continue;
    }
    int oldest = -1;
    for (int c : t.nodes[node].children) {
      const int s = r.survivor[c];
      if (oldest == -1 || t.nodes[s].order < t.nodes[oldest].order)
        oldest = s;
    }
    for (int c : t.nodes[node].children) {
      const int s = r.survivor[c];
      if (s != oldest) make_pair(s, node);
    }
    r.survivor[node] = oldest;
  }
  // The overall survivor dies at the root: the global pair.
  make_pair(r.survivor[t.root], t.root);

  for (int node = 0; node < n; ++node)
    r.pair_of[node] = pair_of_leaf[r.survivor[node]];
  return r;
}

}  // namespace

int MergeTree::leaf_count() const {
  int c = 0;
  for (const auto& n : nodes)
    if (n.children.empty()) ++c;
  return c;
}

void MergeTree::validate() const {
  if (nodes.empty()) throw EmptyTree("merge tree has no nodes");
  int roots = 0;
  for (int i = 0; i < node_count(); ++i) {
    const auto& n = nodes[i];
    if (n.parent == -1) {
      ++roots;
      if (i != root) throw ParseError("root link does not match parentless node");
    } else {
      if (n.parent < 0 || n.parent >= node_count())
        throw ParseError("node parent out of range");
      const auto& p = nodes[n.parent];
      const bool mono = kind == TreeKind::Join ? p.scalar >= n.scalar
                                               : p.scalar <= n.scalar;
      if (!mono) throw ParseError("arc violates merge-tree monotonicity");
      if (std::find(p.children.begin(), p.children.end(), i) == p.children.end())
        throw ParseError("parent/child links inconsistent");
    }
    if (!std::isfinite(n.scalar)) throw NonFiniteValue("node scalar not finite");
  }
  if (roots != 1) throw ParseError("merge tree must have exactly one root");
}

MergeTree compute_merge_tree(const ScalarField& f, TreeKind kind) {
  f.validate();
  const std::size_t n = f.size();

  // Sweep order: ascending (value, index) for join trees, descending for
  // split trees; the index tie-break realizes simulation of simplicity.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (kind == TreeKind::Join) {
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return f.less(a, b); });
  } else {
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return f.less(b, a); });
  }
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

  MergeTree t;
  t.kind = kind;
  UnionFind uf(n);
  std::vector<int> head(n, -1);  // per component representative: open tree node
  std::vector<std::size_t> nbr;
  std::vector<std::size_t> comps;

  auto new_node = [&](std::size_t vertex) {
    MergeTreeNode node;
    node.scalar = f.values[vertex];
    node.vertex = static_cast<std::int64_t>(vertex);
    node.order = t.node_count();
    t.nodes.push_back(node);
    return t.node_count() - 1;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = order[i];
    f.neighbors(v, nbr);
    comps.clear();
    for (std::size_t u : nbr) {
      if (rank[u] >= i) continue;  // not processed yet
      const std::size_t r = uf.find(u);
      if (std::find(comps.begin(), comps.end(), r) == comps.end())
        comps.push_back(r);
    }
    if (comps.empty()) {
      const int leaf = new_node(v);
      head[uf.find(v)] = leaf;
    } else if (comps.size() == 1) {
      const int h = head[comps[0]];
      uf.unite(v, comps[0]);
      head[uf.find(v)] = h;
    } else {
      // Merge event: a saddle absorbing every adjacent component.
      const int saddle = new_node(v);
      std::vector<int> child_nodes;
      for (std::size_t r : comps) child_nodes.push_back(head[r]);
      std::sort(child_nodes.begin(), child_nodes.end());
      for (int c : child_nodes) {
        t.nodes[c].parent = saddle;
        t.nodes[saddle].children.push_back(c);
      }
      for (std::size_t r : comps) uf.unite(r, v);
      head[uf.find(v)] = saddle;
    }
  }

  // Close the sweep at the global extremum: if the last vertex was not
  // itself a merge node, grow a dedicated root above the final component.
  const std::size_t last = order[n - 1];
  int top = head[uf.find(last)];
  if (t.nodes[top].vertex != static_cast<std::int64_t>(last)) {
    const int root = new_node(last);
    t.nodes[top].parent = root;
    t.nodes[root].children.push_back(top);
    top = root;
  }
  t.root = top;
  return t;
}

Diagram elder_pairs(const MergeTree& t) {
  t.validate();
  Diagram d;
  d.kind = t.kind;
  d.pairs = elder_sweep(t).pairs;
  return d;
}

std::vector<int> Bdt::depths() const {
  std::vector<int> d(branches.size(), 0);
  // Parents always precede children after rebuild_children; walk ids in
  // topological order via repeated passes from the root.
  std::vector<int> stack = {root};
  while (!stack.empty()) {
    const int b = stack.back();
    stack.pop_back();
    for (int c : branches[b].children) {
      d[c] = d[b] + 1;
      stack.push_back(c);
    }
  }
  return d;
}

void Bdt::rebuild_children() {
  root = -1;
  for (auto& b : branches) b.children.clear();
  for (const auto& b : branches) {
    if (b.parent == -1) {
      root = b.id;
    } else {
      branches[b.parent].children.push_back(b.id);
    }
  }
  for (auto& b : branches) {
    std::sort(b.children.begin(), b.children.end(), [&](int x, int y) {
      const Branch& bx = branches[x];
      const Branch& by = branches[y];
      if (bx.persistence() != by.persistence())
        return bx.persistence() > by.persistence();
      if (bx.birth != by.birth) return bx.birth < by.birth;
      return x < y;
    });
  }
}

void Bdt::validate_nesting() const {
  for (const auto& b : branches) {
    if (b.birth > b.death)
      throw NestingViolation("branch has birth > death");
    if (b.parent == -1) continue;
    const Branch& p = branches[b.parent];
    if (b.birth < p.birth || b.death > p.death)
      throw NestingViolation("child interval escapes its parent interval");
  }
}

Bdt build_bdt(const MergeTree& t) {
  t.validate();
  const ElderResult er = elder_sweep(t);
  const int np = static_cast<int>(er.pairs.size());

  // Canonical branch order: the global pair first, then persistence
  // descending with (birth, leaf order) tie-breaks.
  const int root_pair = er.pair_of[t.root];
  std::vector<int> order(np);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (a == root_pair || b == root_pair) return a == root_pair;
    const auto& pa = er.pairs[a];
    const auto& pb = er.pairs[b];
    if (pa.persistence() != pb.persistence())
      return pa.persistence() > pb.persistence();
    if (pa.birth != pb.birth) return pa.birth < pb.birth;
    return t.nodes[pa.birth_node].order < t.nodes[pb.birth_node].order;
  });
  std::vector<int> branch_of_pair(np);
  for (int i = 0; i < np; ++i) branch_of_pair[order[i]] = i;

  Bdt b;
  b.kind = t.kind;
  b.branches.resize(np);
  for (int i = 0; i < np; ++i) {
    const auto& p = er.pairs[order[i]];
    Branch& br = b.branches[i];
    br.id = i;
    br.birth = p.birth;
    br.death = p.death;
    br.birth_vertex = t.nodes[p.birth_node].vertex;
    br.death_vertex = t.nodes[p.death_node].vertex;
    if (order[i] == root_pair) {
      br.parent = -1;
    } else {
      br.parent = branch_of_pair[er.pair_of[p.death_node]];
    }
  }
  b.rebuild_children();
  return b;
}

MergeTree simplify(const MergeTree& t, double threshold) {
  if (!(threshold >= 0.0) || threshold > 1.0)
    throw InvalidParameter("simplification threshold must be in [0, 1]");
  if (threshold == 0.0) return t;
  t.validate();

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& n : t.nodes) {
    lo = std::min(lo, n.scalar);
    hi = std::max(hi, n.scalar);
  }
  const double cutoff = threshold * (hi - lo);

  const Bdt full = build_bdt(t);
  Bdt pruned;
  pruned.kind = full.kind;
  std::vector<int> remap(full.size(), -1);
  for (const auto& br : full.branches) {
    // Nesting makes low persistence subtree-closed, so a flat filter prunes
    // whole subtrees; the global branch is always kept.
    if (br.id != full.root && br.persistence() < cutoff) continue;
    // A surviving branch whose parent is pruned cannot happen (see above),
    // but a defensive check keeps corrupt inputs loud.
    if (br.parent != -1 && remap[br.parent] == -1)
      throw NestingViolation("persistence not monotone along the branch tree");
    const int nid = pruned.size();
    remap[br.id] = nid;
    Branch nb = br;
    nb.id = nid;
    nb.parent = br.parent == -1 ? -1 : remap[br.parent];
    nb.children.clear();
    pruned.branches.push_back(nb);
  }
  pruned.rebuild_children();
  return bdt_to_merge_tree(pruned);
}

MergeTree bdt_to_merge_tree(const Bdt& b) {
  if (b.empty()) throw EmptyTree("cannot reconstruct from an empty branch tree");
  if (b.root < 0 || b.root >= b.size())
    throw ParseError("branch tree has no root");
  b.validate_nesting();
  const bool join = b.kind == TreeKind::Join;

  MergeTree t;
  t.kind = b.kind;
  auto add_node = [&](double scalar, std::int64_t vertex) {
    MergeTreeNode n;
    n.scalar = scalar;
    n.vertex = vertex;
    t.nodes.push_back(n);
    return t.node_count() - 1;
  };

  // One extremum node per branch, one attachment saddle per child, plus the
  // terminal node of the root branch.
  const int nb = b.size();
  std::vector<int> extremum(nb), attach(nb, -1);
  for (int i = 0; i < nb; ++i)
    extremum[i] = join ? add_node(b.branches[i].birth, b.branches[i].birth_vertex)
                       : add_node(b.branches[i].death, b.branches[i].death_vertex);
  for (int i = 0; i < nb; ++i) {
    if (i == b.root) continue;
    attach[i] = join ? add_node(b.branches[i].death, b.branches[i].death_vertex)
                     : add_node(b.branches[i].birth, b.branches[i].birth_vertex);
  }
  const int terminal = join
      ? add_node(b.branches[b.root].death, b.branches[b.root].death_vertex)
      : add_node(b.branches[b.root].birth, b.branches[b.root].birth_vertex);

  // Wire each branch's monotone path: extremum, then the children's saddles
  // ordered toward the root, then the branch's own terminal node.
  auto attach_value = [&](int c) {
    return join ? b.branches[c].death : b.branches[c].birth;
  };
  for (int i = 0; i < nb; ++i) {
    std::vector<int> kids = b.branches[i].children;
    std::sort(kids.begin(), kids.end(), [&](int x, int y) {
      const double ax = attach_value(x);
      const double ay = attach_value(y);
      if (ax != ay) return join ? ax < ay : ax > ay;
      const double px = b.branches[x].persistence();
      const double py = b.branches[y].persistence();
      if (px != py) return px < py;
      return x < y;
    });
    int prev = extremum[i];
    for (int c : kids) {
      t.nodes[prev].parent = attach[c];
      prev = attach[c];
    }
    t.nodes[prev].parent = i == b.root ? terminal : attach[i];
  }
  t.nodes[terminal].parent = -1;
  t.root = terminal;

  for (int i = 0; i < t.node_count(); ++i) {
    const int p = t.nodes[i].parent;
    if (p != -1) t.nodes[p].children.push_back(i);
  }
  for (auto& n : t.nodes) std::sort(n.children.begin(), n.children.end());

  assign_sweep_orders(t);

  t.validate();
  return t;
}

void assign_sweep_orders(MergeTree& t) {
  const bool join = t.kind == TreeKind::Join;
  std::vector<int> depth(t.node_count(), 0);
  {
    std::vector<int> stack = {t.root};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (int c : t.nodes[n].children) {
        depth[c] = depth[n] + 1;
        stack.push_back(c);
      }
    }
  }
  std::vector<int> by_value(t.node_count());
  std::iota(by_value.begin(), by_value.end(), 0);
  std::sort(by_value.begin(), by_value.end(), [&](int a, int bb) {
    if (t.nodes[a].scalar != t.nodes[bb].scalar)
      return join ? t.nodes[a].scalar < t.nodes[bb].scalar
                  : t.nodes[a].scalar > t.nodes[bb].scalar;
    if (depth[a] != depth[bb]) return depth[a] > depth[bb];
    return a < bb;
  });
  for (int i = 0; i < t.node_count(); ++i) t.nodes[by_value[i]].order = i;
}

bool same_bdt(const Bdt& a, const Bdt& b, double tol) {
  if (a.kind != b.kind || a.size() != b.size()) return false;
  if (a.empty()) return true;

  // Compare subtrees positionally after a value-based canonical child sort,
  // which is stable against id differences between the two trees.
  auto close = [tol](double x, double y) { return std::abs(x - y) <= tol; };
  std::vector<std::pair<int, int>> stack = {{a.root, b.root}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const Branch& bx = a.branches[x];
    const Branch& by = b.branches[y];
    if (!close(bx.birth, by.birth) || !close(bx.death, by.death)) return false;
    if (bx.children.size() != by.children.size()) return false;
    auto sorted = [](const Bdt& t, const std::vector<int>& kids) {
      std::vector<int> s = kids;
      std::sort(s.begin(), s.end(), [&](int p, int q) {
        const Branch& bp = t.branches[p];
        const Branch& bq = t.branches[q];
        if (bp.birth != bq.birth) return bp.birth < bq.birth;
        if (bp.death != bq.death) return bp.death < bq.death;
        return p < q;
      });
      return s;
    };
    const auto cx = sorted(a, bx.children);
    const auto cy = sorted(b, by.children);
    for (std::size_t i = 0; i < cx.size(); ++i) stack.push_back({cx[i], cy[i]});
  }
  return true;
}

}  // namespace mts
