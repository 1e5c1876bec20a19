#include "mtspace/geodesic.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "mtspace/errors.hpp"

namespace mts {

GeodesicSample interpolate(const Bdt& b_i, const Bdt& b_j,
                           const TreeMatching& matching, double alpha,
                           const MetricParams& params) {
  params.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidAlpha("alpha must lie in [0, 1], got " +
                       std::to_string(alpha));
  if (b_i.empty() || b_j.empty())
    throw EmptyTree("interpolation endpoints must be non-empty");

  GeodesicSample out;
  out.alpha = alpha;
  out.matching = matching;
  if (alpha == 0.0) {
    out.bdt = b_i;
    return out;
  }
  if (alpha == 1.0) {
    out.bdt = b_j;
    return out;
  }

  // The matching indexes branches of the structurally preprocessed trees,
  // which share branch ids with the inputs.
  const PreparedBdt pa = prepare(b_i, params);
  const PreparedBdt pb = prepare(b_j, params);
  const Bdt& a = pa.tree;
  const Bdt& b = pb.tree;

  // map_a/map_b: branch id in a/b -> id in the interpolated tree. Output
  // ids run over matched pairs (ascending first id), then destroyed, then
  // created, so the layout is a pure function of the matching.
  std::vector<int> map_a(a.size(), -1);
  std::vector<int> map_b(b.size(), -1);
  auto claim = [](std::vector<int>& m, int id, int out_id) {
    if (id < 0 || static_cast<std::size_t>(id) >= m.size() || m[id] != -1)
      throw MatchingMismatch("matching references branch " +
                             std::to_string(id) +
                             " out of range or more than once");
    m[id] = out_id;
  };

  std::vector<std::pair<int, int>> matched = matching.matched;
  std::sort(matched.begin(), matched.end());
  std::vector<int> destroyed = matching.destroyed;
  std::sort(destroyed.begin(), destroyed.end());
  std::vector<int> created = matching.created;
  std::sort(created.begin(), created.end());

  int next = 0;
  for (const auto& [ma, mb] : matched) {
    claim(map_a, ma, next);
    claim(map_b, mb, next);
    ++next;
  }
  for (int id : destroyed) claim(map_a, id, next++);
  for (int id : created) claim(map_b, id, next++);
  for (int m : map_a)
    if (m == -1)
      throw MatchingMismatch(
          "matching leaves a branch of the first tree unaccounted for");
  for (int m : map_b)
    if (m == -1)
      throw MatchingMismatch(
          "matching leaves a branch of the second tree unaccounted for");

  Bdt tree;
  tree.kind = b_i.kind;
  tree.branches.resize(static_cast<std::size_t>(next));
  auto lerp = [alpha](double x, double y) {
    return (1.0 - alpha) * x + alpha * y;
  };

  int idx = 0;
  for (const auto& [ma, mb] : matched) {
    Branch& br = tree.branches[static_cast<std::size_t>(idx)];
    br.id = idx;
    br.birth = lerp(a.branches[ma].birth, b.branches[mb].birth);
    br.death = lerp(a.branches[ma].death, b.branches[mb].death);
    const int pa_id = a.branches[ma].parent;
    br.parent = pa_id < 0 ? -1 : map_a[pa_id];
    ++idx;
  }
  for (int id : destroyed) {
    Branch& br = tree.branches[static_cast<std::size_t>(idx)];
    br.id = idx;
    const double mid = 0.5 * (a.branches[id].birth + a.branches[id].death);
    br.birth = lerp(a.branches[id].birth, mid);
    br.death = lerp(a.branches[id].death, mid);
    const int pa_id = a.branches[id].parent;
    br.parent = pa_id < 0 ? -1 : map_a[pa_id];
    ++idx;
  }
  for (int id : created) {
    Branch& br = tree.branches[static_cast<std::size_t>(idx)];
    br.id = idx;
    const double mid = 0.5 * (b.branches[id].birth + b.branches[id].death);
    br.birth = lerp(mid, b.branches[id].birth);
    br.death = lerp(mid, b.branches[id].death);
    const int pb_id = b.branches[id].parent;
    br.parent = pb_id < 0 ? -1 : map_b[pb_id];
    ++idx;
  }

  int roots = 0;
  for (const Branch& br : tree.branches)
    if (br.parent < 0) ++roots;
  if (roots != 1)
    throw MatchingMismatch(
        "matching does not induce a single interpolated tree at interior "
        "alpha");

  tree.rebuild_children();
  if (pa.normalized) {
    NormalizedBdt nb;
    nb.tree = std::move(tree);
    tree = denormalize(nb);
  }
  out.bdt = std::move(tree);
  return out;
}

}  // namespace mts
