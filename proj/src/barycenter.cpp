#include "mtspace/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mtspace/errors.hpp"
#include "mtspace/task_pool.hpp"

namespace mts {

namespace {

constexpr double kPruneEps = 1e-12;

void check_weights(const std::vector<double>& w, std::size_t n) {
  if (w.size() != n)
    throw WeightError("expected " + std::to_string(n) + " weights, got " +
                      std::to_string(w.size()));
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw WeightError("weights must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw WeightError("weights must sum to 1, got " + std::to_string(sum));
}

/// Checks that a matching covers every branch of both trees exactly once.
void check_partition(const TreeMatching& m, std::size_t na, std::size_t nb) {
  std::vector<char> sa(na, 0);
  std::vector<char> sb(nb, 0);
  auto mark = [](std::vector<char>& s, int id) {
    if (id < 0 || static_cast<std::size_t>(id) >= s.size() || s[id])
      throw MatchingMismatch("matching references branch " +
                             std::to_string(id) +
                             " out of range or more than once");
    s[id] = 1;
  };
  for (const auto& [a, b] : m.matched) {
    mark(sa, a);
    mark(sb, b);
  }
  for (int id : m.destroyed) mark(sa, id);
  for (int id : m.created) mark(sb, id);
  for (char c : sa)
    if (!c)
      throw MatchingMismatch(
          "matching leaves a candidate branch unaccounted for");
  for (char c : sb)
    if (!c)
      throw MatchingMismatch("matching leaves a member branch unaccounted for");
}

/// Branch ids of `t` ordered parents-before-children (depth ascending,
/// stable by id).
std::vector<int> topological(const Bdt& t) {
  const std::vector<int> depth = t.depths();
  std::vector<int> ids(t.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  std::stable_sort(ids.begin(), ids.end(),
                   [&depth](int x, int y) { return depth[x] < depth[y]; });
  return ids;
}

/// One coordinate update with frozen matchings: weighted-mean move of the
/// existing branches, spawn of member-created branches, prune of
/// vanishing-persistence branches. Inputs are in prepared coordinates
/// (normalized when `normalized`); output is always raw.
Bdt update_prepared(const Bdt& cand, const std::vector<PreparedBdt>& members,
                    const std::vector<TreeMatching>& matchings,
                    const std::vector<double>& weights, bool normalized) {
  const std::size_t nc = cand.size();
  for (std::size_t i = 0; i < members.size(); ++i)
    check_partition(matchings[i], nc, members[i].tree.size());

  // Weighted mean of the per-member targets. A member that destroys a
  // branch pulls it toward the midpoint of its current interval, the
  // closest diagonal point.
  std::vector<double> nb(nc, 0.0);
  std::vector<double> nd(nc, 0.0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double w = weights[i];
    const Bdt& m = members[i].tree;
    for (const auto& [c, j] : matchings[i].matched) {
      nb[static_cast<std::size_t>(c)] += w * m.branches[j].birth;
      nd[static_cast<std::size_t>(c)] += w * m.branches[j].death;
    }
    for (int c : matchings[i].destroyed) {
      const double mid =
          0.5 * (cand.branches[c].birth + cand.branches[c].death);
      nb[static_cast<std::size_t>(c)] += w * mid;
      nd[static_cast<std::size_t>(c)] += w * mid;
    }
  }

  // Prune whole subtrees whose root moved onto the diagonal; they only
  // contribute noise-level destruction cost.
  const std::vector<int> order = topological(cand);
  const double prune_eps =
      normalized ? kPruneEps
                 : kPruneEps * std::abs(nd[static_cast<std::size_t>(
                                            cand.root)] -
                                        nb[static_cast<std::size_t>(
                                            cand.root)]);
  std::vector<char> pruned(nc, 0);
  for (int c : order) {
    if (c == cand.root) continue;
    const std::size_t ci = static_cast<std::size_t>(c);
    const int p = cand.branches[ci].parent;
    if (pruned[static_cast<std::size_t>(p)] ||
        std::abs(nd[ci] - nb[ci]) < prune_eps)
      pruned[ci] = 1;
  }

  std::vector<int> new_of(nc, -1);
  int next = 0;
  for (std::size_t c = 0; c < nc; ++c)
    if (!pruned[c]) new_of[c] = next++;
  // Attach point per old branch: itself when kept, else the nearest kept
  // ancestor (the root is never pruned, so this always resolves).
  std::vector<int> attach(nc, -1);
  for (int c : order) {
    const std::size_t ci = static_cast<std::size_t>(c);
    attach[ci] = pruned[ci]
                     ? attach[static_cast<std::size_t>(cand.branches[ci].parent)]
                     : new_of[ci];
  }

  Bdt out;
  out.kind = cand.kind;
  out.branches.reserve(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    if (pruned[c]) continue;
    Branch br;
    br.id = new_of[c];
    br.birth = nb[c];
    br.death = nd[c];
    const int p = cand.branches[c].parent;
    br.parent = p < 0 ? -1 : new_of[static_cast<std::size_t>(p)];
    out.branches.push_back(br);
  }

  // Spawn branches the members created, each one part-way between the
  // diagonal and the member's branch according to the member's weight, and
  // attached under the image of the member parent. A member matched by the
  // all-destroyed route has no anchor in the candidate, so it spawns
  // nothing.
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (matchings[i].matched.empty()) continue;
    const Bdt& m = members[i].tree;
    const double w = weights[i];
    std::vector<int> image(m.size(), -1);
    for (const auto& [c, j] : matchings[i].matched)
      image[static_cast<std::size_t>(j)] = attach[static_cast<std::size_t>(c)];
    std::vector<char> is_created(m.size(), 0);
    for (int j : matchings[i].created)
      is_created[static_cast<std::size_t>(j)] = 1;
    for (int j : topological(m)) {
      const std::size_t ji = static_cast<std::size_t>(j);
      if (!is_created[ji]) continue;
      const double mid = 0.5 * (m.branches[ji].birth + m.branches[ji].death);
      const double sb = w * m.branches[ji].birth + (1.0 - w) * mid;
      const double sd = w * m.branches[ji].death + (1.0 - w) * mid;
      const int p = m.branches[ji].parent;
      const int anchor = p < 0 ? -1 : image[static_cast<std::size_t>(p)];
      if (anchor < 0 || std::abs(sd - sb) <= prune_eps) {
        image[ji] = anchor;
        continue;
      }
      Branch br;
      br.id = static_cast<int>(out.branches.size());
      br.birth = sb;
      br.death = sd;
      br.parent = anchor;
      image[ji] = br.id;
      out.branches.push_back(br);
    }
  }

  out.root = new_of[static_cast<std::size_t>(cand.root)];
  out.rebuild_children();
  if (normalized) {
    NormalizedBdt wrapped;
    wrapped.tree = std::move(out);
    return denormalize(wrapped);
  }
  return out;
}

int median_persistence_member(const std::vector<Bdt>& ensemble) {
  std::vector<std::pair<double, int>> tp;
  tp.reserve(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    double total = 0.0;
    for (const Branch& br : ensemble[i].branches)
      total += std::abs(br.death - br.birth);
    tp.emplace_back(total, static_cast<int>(i));
  }
  std::sort(tp.begin(), tp.end());
  return tp[(tp.size() - 1) / 2].second;
}

}  // namespace

double frechet_energy(const Bdt& b, const std::vector<Bdt>& ensemble,
                      const std::vector<double>& weights,
                      const MetricParams& params, Solver solver) {
  params.validate();
  check_weights(weights, ensemble.size());
  double e = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double d = mt_distance(b, ensemble[i], params, solver).distance;
    e += weights[i] * d * d;
  }
  return e;
}

Bdt update_candidate(const Bdt& b, const std::vector<Bdt>& ensemble,
                     const std::vector<TreeMatching>& matchings,
                     const std::vector<double>& weights,
                     const MetricParams& params) {
  params.validate();
  check_weights(weights, ensemble.size());
  if (matchings.size() != ensemble.size())
    throw MatchingMismatch("one matching per ensemble member required");
  const PreparedBdt pc = prepare(b, params);
  std::vector<PreparedBdt> pm;
  pm.reserve(ensemble.size());
  for (const Bdt& m : ensemble) pm.push_back(prepare(m, params));
  return update_prepared(pc.tree, pm, matchings, weights, pc.normalized);
}

BarycenterRun barycenter(const std::vector<Bdt>& ensemble,
                         std::vector<double> weights,
                         const MetricParams& params, int init_index,
                         Solver solver, int threads, int max_iterations) {
  params.validate();
  if (ensemble.empty())
    throw EmptyEnsemble("barycenter needs at least one tree");
  const std::size_t n = ensemble.size();
  if (weights.empty()) weights.assign(n, 1.0 / static_cast<double>(n));
  check_weights(weights, n);
  for (const Bdt& m : ensemble)
    if (m.empty()) throw EmptyTree("ensemble members must be non-empty");
  if (init_index < -1 || init_index >= static_cast<int>(n))
    throw InvalidParameter("init_index out of range");
  if (max_iterations < 1)
    throw InvalidParameter("max_iterations must be positive");
  if (init_index == -1) init_index = median_persistence_member(ensemble);

  std::vector<PreparedBdt> pm;
  pm.reserve(n);
  for (const Bdt& m : ensemble) pm.push_back(prepare(m, params));

  std::unique_ptr<TaskPool> pool;
  if (threads > 1) pool = std::make_unique<TaskPool>(threads);

  BarycenterRun run;
  run.weights = weights;
  Bdt candidate = ensemble[static_cast<std::size_t>(init_index)];
  double prev = -1.0;
  for (int iter = 1;; ++iter) {
    const PreparedBdt pc = prepare(candidate, params);
    std::vector<TreeMatching> match =
        mt_distance_many(pc, pm, solver, pool.get());
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      energy += weights[i] * match[i].distance * match[i].distance;
    run.energy_trace.push_back(energy);
    run.matchings = std::move(match);
    if (energy == 0.0) break;
    if (prev >= 0.0 && (prev - energy) / prev < 0.01) break;
    if (iter == max_iterations)
      throw NonConvergence("barycenter did not converge in " +
                           std::to_string(max_iterations) + " iterations");
    candidate = update_prepared(pc.tree, pm, run.matchings, weights,
                                pc.normalized);
    prev = energy;
  }
  run.iterations = static_cast<int>(run.energy_trace.size());
  run.result = std::move(candidate);
  // Raw-coordinate updates can converge to a tree that violates nesting
  // (only the normalized update carries the containment guarantee); such a
  // result has no merge-tree realization, so the reconstruction is skipped.
  try {
    run.result.validate_nesting();
    run.merge_tree = bdt_to_merge_tree(run.result);
  } catch (const NestingViolation&) {
  }
  return run;
}

}  // namespace mts
