#include "mtspace/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mtspace/barycenter.hpp"
#include "mtspace/errors.hpp"
#include "mtspace/geodesic.hpp"
#include "mtspace/rng.hpp"
#include "mtspace/task_pool.hpp"

namespace mts {

namespace {

void check_labels(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw LengthMismatch("label vectors must have equal length");
  if (a.empty()) throw LengthMismatch("label vectors must be non-empty");
}

/// Contingency counts of two labelings, with labels compacted to dense ids.
struct Contingency {
  std::vector<std::vector<double>> cell;
  std::vector<double> row;
  std::vector<double> col;
  double total = 0.0;
};

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ra;
  std::map<int, int> rb;
  for (int v : a) ra.emplace(v, 0);
  for (int v : b) rb.emplace(v, 0);
  int next = 0;
  for (auto& [label, id] : ra) id = next++;
  next = 0;
  for (auto& [label, id] : rb) id = next++;
  Contingency c;
  c.cell.assign(ra.size(), std::vector<double>(rb.size(), 0.0));
  c.row.assign(ra.size(), 0.0);
  c.col.assign(rb.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int x = ra[a[i]];
    const int y = rb[b[i]];
    c.cell[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] += 1.0;
    c.row[static_cast<std::size_t>(x)] += 1.0;
    c.col[static_cast<std::size_t>(y)] += 1.0;
  }
  c.total = static_cast<double>(a.size());
  return c;
}

void check_kept(const std::vector<int>& kept, std::size_t n) {
  if (kept.empty() || kept.front() != 0 ||
      kept.back() != static_cast<int>(n) - 1)
    throw InvalidKeyFrames("key frames must include the first and last frame");
  for (std::size_t i = 0; i + 1 < kept.size(); ++i)
    if (kept[i] >= kept[i + 1])
      throw InvalidKeyFrames("key frames must be strictly increasing");
}

/// Memo for the greedy reduction: flank matchings and per-frame squared
/// reconstruction costs survive across candidate evaluations.
struct DsCache {
  std::map<std::pair<int, int>, TreeMatching> flank;
  std::map<std::tuple<int, int, int>, double> cost;
};

double ds_squared(const std::vector<Bdt>& seq,
                  const std::vector<PreparedBdt>& prepared,
                  const std::vector<int>& kept, const MetricParams& params,
                  Solver solver, DsCache& cache) {
  double total = 0.0;
  for (std::size_t g = 0; g + 1 < kept.size(); ++g) {
    const int j = kept[g];
    const int k = kept[g + 1];
    if (k - j < 2) continue;
    auto fit = cache.flank.find({j, k});
    if (fit == cache.flank.end()) {
      // The matched-roots route keeps the path connected even when the
      // metric would rather destroy both flanks entirely.
      TreeMatching m = mt_distance_root_matched(
          prepared[static_cast<std::size_t>(j)],
          prepared[static_cast<std::size_t>(k)], solver);
      fit = cache.flank.emplace(std::pair<int, int>{j, k}, std::move(m)).first;
    }
    for (int i = j + 1; i < k; ++i) {
      auto cit = cache.cost.find({i, j, k});
      if (cit == cache.cost.end()) {
        const double alpha =
            static_cast<double>(i - j) / static_cast<double>(k - j);
        const GeodesicSample s =
            interpolate(seq[static_cast<std::size_t>(j)],
                        seq[static_cast<std::size_t>(k)], fit->second, alpha,
                        params);
        const double d =
            mt_distance_prepared(prepare(s.bdt, params),
                                 prepared[static_cast<std::size_t>(i)], solver)
                .distance;
        cit = cache.cost.emplace(std::tuple<int, int, int>{i, j, k}, d * d)
                  .first;
      }
      total += cit->second;
    }
  }
  return total;
}

std::vector<PreparedBdt> prepare_all(const std::vector<Bdt>& trees,
                                     const MetricParams& params) {
  std::vector<PreparedBdt> out;
  out.reserve(trees.size());
  for (const Bdt& t : trees) {
    if (t.empty()) throw EmptyTree("trees must be non-empty");
    out.push_back(prepare(t, params));
  }
  return out;
}

}  // namespace

ClusteringResult kmeans(const std::vector<Bdt>& ensemble, int k,
                        const MetricParams& params, std::uint64_t seed,
                        Solver solver, int threads) {
  params.validate();
  const std::size_t n = ensemble.size();
  if (n == 0) throw EmptyEnsemble("k-means needs a non-empty ensemble");
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InvalidK("k must lie in [1, " + std::to_string(n) + "]");

  const std::vector<PreparedBdt> pm = prepare_all(ensemble, params);
  std::unique_ptr<TaskPool> pool;
  if (threads > 1) pool = std::make_unique<TaskPool>(threads);

  auto squared_row = [&](const Bdt& centroid) {
    const std::vector<TreeMatching> ms =
        mt_distance_many(prepare(centroid, params), pm, solver, pool.get());
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = ms[i].distance * ms[i].distance;
    return d2;
  };

  // Seeding: first centroid uniform over the ensemble, each further one
  // sampled proportionally to the squared distance to its closest centroid
  // so far. All-zero distances fall back to the first unchosen member.
  Rng rng(seed);
  std::vector<Bdt> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  std::vector<char> chosen(n, 0);
  const std::size_t first = static_cast<std::size_t>(rng.below(n));
  centroids.push_back(ensemble[first]);
  chosen[first] = 1;
  std::vector<double> dmin = squared_row(centroids.back());
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double v : dmin) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform01() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += dmin[i];
        if (r < cum) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;)
          if (dmin[i] > 0.0) {
            pick = i;
            break;
          }
      }
    }
    if (pick == n) {
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    chosen[pick] = 1;
    centroids.push_back(ensemble[pick]);
    const std::vector<double> row = squared_row(centroids.back());
    for (std::size_t i = 0; i < n; ++i) dmin[i] = std::min(dmin[i], row[i]);
  }

  ClusteringResult res;
  res.assignments.assign(n, -1);
  std::vector<double> assigned_d2(n, 0.0);
  const int max_rounds = 100;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k));
  for (int round = 1;; ++round) {
    for (int c = 0; c < k; ++c)
      rows[static_cast<std::size_t>(c)] =
          squared_row(centroids[static_cast<std::size_t>(c)]);
    std::vector<int> next_assign(n);
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c)
        if (rows[static_cast<std::size_t>(c)][i] <
            rows[static_cast<std::size_t>(best)][i])
          best = c;
      next_assign[i] = best;
      assigned_d2[i] = rows[static_cast<std::size_t>(best)][i];
    }

    // Empty clusters grab the member farthest from its centroid; clusters
    // down to their last member never donate.
    std::vector<int> size(static_cast<std::size_t>(k), 0);
    for (int a : next_assign) ++size[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (size[static_cast<std::size_t>(c)] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (size[static_cast<std::size_t>(next_assign[i])] < 2) continue;
        if (far == n || assigned_d2[i] > assigned_d2[far]) far = i;
      }
      if (far == n) continue;
      --size[static_cast<std::size_t>(next_assign[far])];
      next_assign[far] = c;
      size[static_cast<std::size_t>(c)] = 1;
      centroids[static_cast<std::size_t>(c)] = ensemble[far];
      assigned_d2[far] = 0.0;
    }

    const bool stable = next_assign == res.assignments;
    res.assignments = std::move(next_assign);
    res.iterations = round;
    if (stable) break;
    if (round == max_rounds)
      throw NonConvergence("k-means did not stabilize in 100 rounds");

    // Centroid update: barycenter per cluster, kept only when it improves
    // the cluster energy over the current centroid.
    for (int c = 0; c < k; ++c) {
      std::vector<Bdt> members;
      double old_energy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (res.assignments[i] != c) continue;
        members.push_back(ensemble[i]);
        old_energy += assigned_d2[i];
      }
      if (members.empty()) continue;
      const BarycenterRun run =
          barycenter(members, {}, params, -1, solver, threads);
      const double new_energy =
          run.energy_trace.back() * static_cast<double>(members.size());
      if (new_energy < old_energy)
        centroids[static_cast<std::size_t>(c)] = run.result;
    }
  }

  res.cluster_energies.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    res.cluster_energies[static_cast<std::size_t>(res.assignments[i])] +=
        assigned_d2[i];
  res.centroids = std::move(centroids);
  return res;
}

double nmi(const std::vector<int>& labels_a,
           const std::vector<int>& labels_b) {
  check_labels(labels_a, labels_b);
  const Contingency c = contingency(labels_a, labels_b);
  const double n = c.total;
  double ha = 0.0;
  double hb = 0.0;
  double mi = 0.0;
  for (double v : c.row)
    if (v > 0.0) ha -= (v / n) * std::log(v / n);
  for (double v : c.col)
    if (v > 0.0) hb -= (v / n) * std::log(v / n);
  for (std::size_t i = 0; i < c.row.size(); ++i)
    for (std::size_t j = 0; j < c.col.size(); ++j) {
      const double v = c.cell[i][j];
      if (v > 0.0) mi += (v / n) * std::log(v * n / (c.row[i] * c.col[j]));
    }
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

double ari(const std::vector<int>& labels_a,
           const std::vector<int>& labels_b) {
  check_labels(labels_a, labels_b);
  const Contingency c = contingency(labels_a, labels_b);
  auto pairs2 = [](double x) { return 0.5 * x * (x - 1.0); };
  double index = 0.0;
  double rowsum = 0.0;
  double colsum = 0.0;
  for (const auto& r : c.cell)
    for (double v : r) index += pairs2(v);
  for (double v : c.row) rowsum += pairs2(v);
  for (double v : c.col) colsum += pairs2(v);
  const double total = pairs2(c.total);
  if (total == 0.0) return 1.0;
  const double expected = rowsum * colsum / total;
  const double max_index = 0.5 * (rowsum + colsum);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double sequence_distance(const std::vector<Bdt>& sequence,
                         const std::vector<int>& kept,
                         const MetricParams& params, Solver solver) {
  params.validate();
  if (sequence.empty())
    throw InvalidKeyFrames("sequence must be non-empty");
  check_kept(kept, sequence.size());
  const std::vector<PreparedBdt> prepared = prepare_all(sequence, params);
  DsCache cache;
  return std::sqrt(
      ds_squared(sequence, prepared, kept, params, solver, cache));
}

ReductionResult temporal_reduce(const std::vector<Bdt>& sequence,
                                int target_size, const MetricParams& params,
                                Solver solver) {
  params.validate();
  const int n = static_cast<int>(sequence.size());
  if (n < 2) throw InvalidParameter("reduction needs at least 2 frames");
  if (target_size < 2 || target_size > n)
    throw InvalidParameter("target size must lie in [2, " +
                           std::to_string(n) + "]");
  const std::vector<PreparedBdt> prepared = prepare_all(sequence, params);

  ReductionResult res;
  res.kept.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) res.kept[static_cast<std::size_t>(i)] = i;

  DsCache cache;
  while (static_cast<int>(res.kept.size()) > target_size) {
    double best = 0.0;
    std::size_t best_pos = 0;
    bool have = false;
    for (std::size_t p = 1; p + 1 < res.kept.size(); ++p) {
      std::vector<int> candidate = res.kept;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(p));
      const double d2 =
          ds_squared(sequence, prepared, candidate, params, solver, cache);
      if (!have || d2 < best) {
        best = d2;
        best_pos = p;
        have = true;
      }
    }
    res.kept.erase(res.kept.begin() + static_cast<std::ptrdiff_t>(best_pos));
    res.ds_trace.push_back(std::sqrt(best));
  }
  return res;
}

std::vector<TreeMatching> track(const std::vector<Bdt>& sequence,
                                const MetricParams& params, Solver solver) {
  params.validate();
  if (sequence.size() < 2)
    throw InvalidParameter("tracking needs at least 2 frames");
  const std::vector<PreparedBdt> prepared = prepare_all(sequence, params);
  std::vector<TreeMatching> out;
  out.reserve(sequence.size() - 1);
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i)
    out.push_back(mt_distance_prepared(prepared[i], prepared[i + 1], solver));
  return out;
}

}  // namespace mts
