#include "mtspace/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mts {

namespace {

int find_group(std::vector<int>& g, int x) {
  while (g[x] != x) {
    g[x] = g[g[x]];
    x = g[x];
  }
  return x;
}

}  // namespace

Bdt merge_saddles_bdt(const Bdt& b, double eps1) {
  if (eps1 <= 0.0 || b.size() <= 1) return b;
  const bool join = b.kind == TreeKind::Join;
  // Each non-root branch stands for the saddle where it dies; its value is
  // the attachment value on the parent's monotone path.
  auto saddle_value = [&](int i) {
    return join ? b.branches[i].death : b.branches[i].birth;
  };

  // Adjacent saddle pairs: consecutive attachments along one parent path,
  // plus the step from a parent's topmost attachment to the parent's own
  // saddle (when the parent is not the root branch).
  std::vector<std::pair<int, int>> adjacent;
  for (const auto& p : b.branches) {
    std::vector<int> kids = p.children;
    if (kids.empty()) continue;
    std::sort(kids.begin(), kids.end(), [&](int x, int y) {
      const double ax = saddle_value(x);
      const double ay = saddle_value(y);
      if (ax != ay) return join ? ax < ay : ax > ay;
      return x < y;
    });
    for (std::size_t i = 0; i + 1 < kids.size(); ++i)
      adjacent.push_back({kids[i], kids[i + 1]});
    if (p.id != b.root) adjacent.push_back({kids.back(), p.id});
  }
  if (adjacent.empty()) return b;

  double max_gap = 0.0;
  for (const auto& [x, y] : adjacent)
    max_gap = std::max(max_gap, std::abs(saddle_value(x) - saddle_value(y)));

  std::vector<int> group(b.size());
  std::iota(group.begin(), group.end(), 0);
  for (const auto& [x, y] : adjacent) {
    const double gap = std::abs(saddle_value(x) - saddle_value(y));
    // Strict comparison per the relative-gap rule; eps1 >= 1 merges every
    // adjacent pair (the largest gap has relative value exactly 1).
    const bool merge = eps1 >= 1.0 || (max_gap > 0.0 && gap < eps1 * max_gap) ||
                       (max_gap == 0.0);
    if (merge) group[find_group(group, x)] = find_group(group, y);
  }

  // Topmost member of each group: the saddle closest to the root. All group
  // members re-attach to that saddle's surviving branch (walking past
  // members that are themselves in the group).
  std::vector<int> top(b.size(), -1);
  for (int i = 0; i < b.size(); ++i) {
    if (i == b.root) continue;
    const int g = find_group(group, i);
    if (top[g] == -1) {
      top[g] = i;
    } else {
      const double vi = saddle_value(i);
      const double vt = saddle_value(top[g]);
      const bool higher = join ? vi > vt : vi < vt;
      if (higher || (vi == vt && i < top[g])) top[g] = i;
    }
  }

  Bdt out = b;
  for (int i = 0; i < b.size(); ++i) {
    if (i == b.root) continue;
    const int g = find_group(group, i);
    int parent = b.branches[top[g]].parent;
    while (parent != -1 && parent != b.root &&
           find_group(group, parent) == g)
      parent = b.branches[parent].parent;
    out.branches[i].parent = parent;
  }
  out.rebuild_children();
  return out;
}

MergeTree merge_saddles(const MergeTree& t, double eps1) {
  if (eps1 <= 0.0) return t;
  return bdt_to_merge_tree(merge_saddles_bdt(build_bdt(t), eps1));
}

Bdt move_branches_up(const Bdt& b, double eps2, double eps3) {
  if (b.size() <= 1) return b;
  Bdt out = b;
  const double range = out.branches[out.root].persistence();
  if (range <= 0.0) return out;

  std::vector<int> order;
  for (const auto& br : out.branches)
    if (br.id != out.root) order.push_back(br.id);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const Branch& bx = out.branches[x];
    const Branch& by = out.branches[y];
    if (bx.persistence() != by.persistence())
      return bx.persistence() > by.persistence();
    if (bx.birth != by.birth) return bx.birth < by.birth;
    return x < y;
  });

  for (int id : order) {
    Branch& br = out.branches[id];
    // eps3 guards persistent features: only branches small relative to the
    // range may move; eps2 is re-tested against each new parent.
    while (br.parent != -1 && br.parent != out.root &&
           br.persistence() / range < eps3 &&
           br.persistence() / out.branches[br.parent].persistence() > eps2) {
      br.parent = out.branches[br.parent].parent;
    }
  }
  out.rebuild_children();
  return out;
}

NormalizedBdt normalize(const Bdt& b) {
  NormalizedBdt nb;
  nb.tree = b;
  // Top-down is not required for the forward map (each branch only reads
  // its parent's raw interval), so a single pass over ids suffices.
  for (auto& br : nb.tree.branches) {
    if (br.parent == -1) continue;
    const Branch& p = b.branches[br.parent];
    const double span = p.death - p.birth;
    if (span <= 0.0)
      throw ZeroPersistenceParent(
          "cannot normalize: parent branch has zero persistence");
    br.birth = (br.birth - p.birth) / span;
    br.death = (br.death - p.birth) / span;
  }
  return nb;
}

Bdt denormalize(const NormalizedBdt& nb) {
  Bdt out = nb.tree;
  if (out.empty()) return out;
  // Children must be mapped after their parents since the inverse needs the
  // parent's reconstructed raw interval.
  std::vector<int> stack = {out.root};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const Branch& p = out.branches[i];
    const double span = p.death - p.birth;
    for (int c : p.children) {
      Branch& cb = out.branches[c];
      cb.birth = p.birth + cb.birth * span;
      cb.death = p.birth + cb.death * span;
      stack.push_back(c);
    }
  }
  return out;
}

Bdt preprocess_structure(const Bdt& b, const MetricParams& p) {
  p.validate();
  return move_branches_up(merge_saddles_bdt(b, p.eps1), p.eps2, p.eps3);
}

}  // namespace mts
