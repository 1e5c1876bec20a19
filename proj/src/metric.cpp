#include "mtspace/metric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <memory>

namespace mts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_q(double x, double q) {
  x = std::abs(x);
  if (q == 2.0) return x * x;
  if (q == 1.0) return x;
  return std::pow(x, q);
}

/// Children of a branch in ascending id order: the fixed row/column order of
/// every forest assignment, which pins the summation order and makes the
/// parallel path bitwise equal to the sequential one.
std::vector<int> children_by_id(const Bdt& t, int b) {
  std::vector<int> c = t.branches[b].children;
  std::sort(c.begin(), c.end());
  return c;
}

std::vector<double> subtree_empty_sq(const Bdt& t) {
  std::vector<double> e(t.branches.size(), 0.0);
  std::vector<int> order;
  order.reserve(t.branches.size());
  std::vector<int> stack = {t.root};
  while (!stack.empty()) {
    const int b = stack.back();
    stack.pop_back();
    order.push_back(b);
    for (int c : t.branches[b].children) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Branch& br = t.branches[*it];
    double s = point_diagonal_sq(br.birth, br.death);
    for (int c : children_by_id(t, *it)) s += e[c];
    e[*it] = s;
  }
  return e;
}

/// Squared matching cost of two branches (Euclidean in the birth/death
/// plane).
double gamma_sq(const Branch& a, const Branch& b) {
  const double dx = a.birth - b.birth;
  const double dy = a.death - b.death;
  return dx * dx + dy * dy;
}

struct DistanceWork {
  const Bdt* A = nullptr;
  const Bdt* B = nullptr;
  Solver solver = Solver::Exact;
  std::vector<int> depth_a, depth_b;
  std::vector<double> empty_a, empty_b;
  DistanceTables tables;
  // Forest assignment per cell (row_to_col over the augmented problem);
  // empty for cells where either child list is empty.
  std::vector<std::vector<int>> cell_assignment;

  std::size_t cell(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(B->size()) + b;
  }
};

void init_work(DistanceWork& w, const Bdt& a, const Bdt& b, Solver solver) {
  w.A = &a;
  w.B = &b;
  w.solver = solver;
  w.depth_a = a.depths();
  w.depth_b = b.depths();
  w.empty_a = subtree_empty_sq(a);
  w.empty_b = subtree_empty_sq(b);
  w.tables.ni = a.size();
  w.tables.nj = b.size();
  const std::size_t cells =
      static_cast<std::size_t>(a.size()) * static_cast<std::size_t>(b.size());
  w.tables.subtree.assign(cells, kInf);
  w.tables.forest.assign(cells, kInf);
  w.cell_assignment.assign(cells, {});
}

/// Fills the forest and subtree cells of one equal-depth branch pair. All
/// child cells must already be complete.
void compute_cell(DistanceWork& w, int a, int b) {
  const std::vector<int> ca = children_by_id(*w.A, a);
  const std::vector<int> cb = children_by_id(*w.B, b);
  const std::size_t idx = w.cell(a, b);

  double forest = 0.0;
  if (ca.empty() || cb.empty()) {
    // One side has no forest: everything on the other side is erased or
    // created wholesale (fixed ascending-id summation order).
    for (int c : ca) forest += w.empty_a[c];
    for (int c : cb) forest += w.empty_b[c];
  } else {
    std::vector<std::vector<double>> real(ca.size(),
                                          std::vector<double>(cb.size()));
    std::vector<double> da(ca.size()), db(cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
      for (std::size_t j = 0; j < cb.size(); ++j)
        real[i][j] = w.tables.subtree[w.cell(ca[i], cb[j])];
      da[i] = w.empty_a[ca[i]];
    }
    for (std::size_t j = 0; j < cb.size(); ++j) db[j] = w.empty_b[cb[j]];
    const AssignmentResult r = solve(augment(real, da, db), w.solver);
    forest = r.total;
    w.cell_assignment[idx] = r.row_to_col;
  }
  w.tables.forest[idx] = forest;
  w.tables.subtree[idx] =
      gamma_sq(w.A->branches[a], w.B->branches[b]) + forest;
}

void append_subtree(const Bdt& t, int b, std::vector<int>& out) {
  out.push_back(b);
  for (int c : children_by_id(t, b)) append_subtree(t, c, out);
}

/// Walks the stored assignments from the root pair and emits the matching.
/// `force_root` always reports the matched-roots route, even when the
/// all-destroyed one is cheaper.
TreeMatching extract_matching(const DistanceWork& w, bool force_root) {
  TreeMatching m;
  const double matched_total = w.tables.subtree[w.cell(w.A->root, w.B->root)];
  const double destroy_total = w.empty_a[w.A->root] + w.empty_b[w.B->root];

  // Ties prefer the matched route so identical trees map by identity.
  if (force_root || matched_total <= destroy_total) {
    m.distance = std::sqrt(matched_total);
    std::vector<std::pair<int, int>> stack = {{w.A->root, w.B->root}};
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      m.matched.push_back({a, b});
      const std::vector<int> ca = children_by_id(*w.A, a);
      const std::vector<int> cb = children_by_id(*w.B, b);
      if (ca.empty() || cb.empty()) {
        for (int c : ca) append_subtree(*w.A, c, m.destroyed);
        for (int c : cb) append_subtree(*w.B, c, m.created);
        continue;
      }
      const auto& assign = w.cell_assignment[w.cell(a, b)];
      const int na = static_cast<int>(ca.size());
      const int nb = static_cast<int>(cb.size());
      for (int i = 0; i < na + nb; ++i) {
        const int j = assign[i];
        if (i < na) {
          if (j < nb)
            stack.push_back({ca[i], cb[j]});
          else
            append_subtree(*w.A, ca[i], m.destroyed);
        } else if (j < nb) {
          append_subtree(*w.B, cb[j], m.created);
        }
      }
    }
  } else {
    m.distance = std::sqrt(destroy_total);
    append_subtree(*w.A, w.A->root, m.destroyed);
    append_subtree(*w.B, w.B->root, m.created);
  }

  std::sort(m.matched.begin(), m.matched.end());
  std::sort(m.destroyed.begin(), m.destroyed.end());
  std::sort(m.created.begin(), m.created.end());
  return m;
}

void run_sequential(DistanceWork& w) {
  int max_depth = 0;
  for (int d : w.depth_a) max_depth = std::max(max_depth, d);
  for (int d = max_depth; d >= 0; --d) {
    for (int a = 0; a < w.A->size(); ++a) {
      if (w.depth_a[a] != d) continue;
      for (int b = 0; b < w.B->size(); ++b) {
        if (w.depth_b[b] != d) continue;
        compute_cell(w, a, b);
      }
    }
  }
}

struct ParallelState {
  DistanceWork* w = nullptr;
  std::vector<std::atomic<int>> deps;
  std::promise<void> done;

  explicit ParallelState(std::size_t cells) : deps(cells) {}
};

/// Computes one cell, then cascades: the last child pair to finish also
/// fills the parent pair, so a chain of last-finishers climbs to the root.
void run_and_cascade(ParallelState& st, int a, int b) {
  DistanceWork& w = *st.w;
  for (;;) {
    compute_cell(w, a, b);
    if (a == w.A->root && b == w.B->root) {
      st.done.set_value();
      return;
    }
    const int pa = w.A->branches[a].parent;
    const int pb = w.B->branches[b].parent;
    const std::size_t pidx = w.cell(pa, pb);
    if (st.deps[pidx].fetch_sub(1, std::memory_order_acq_rel) != 1) return;
    a = pa;
    b = pb;
  }
}

void run_parallel(DistanceWork& w, TaskPool& pool) {
  ParallelState st(w.tables.subtree.size());
  st.w = &w;

  std::vector<std::pair<int, int>> seeds;
  for (int a = 0; a < w.A->size(); ++a) {
    for (int b = 0; b < w.B->size(); ++b) {
      if (w.depth_a[a] != w.depth_b[b]) continue;
      const int deps = static_cast<int>(w.A->branches[a].children.size()) *
                       static_cast<int>(w.B->branches[b].children.size());
      st.deps[w.cell(a, b)].store(deps, std::memory_order_relaxed);
      if (deps == 0) seeds.push_back({a, b});
    }
  }

  // Chunk the seed cells so scheduling overhead stays small relative to the
  // work per task.
  const std::size_t chunk = std::max<std::size_t>(
      1, seeds.size() / (4 * static_cast<std::size_t>(pool.thread_count())));
  auto future = st.done.get_future();
  for (std::size_t begin = 0; begin < seeds.size(); begin += chunk) {
    const std::size_t end = std::min(begin + chunk, seeds.size());
    pool.submit([&st, &seeds, begin, end] {
      for (std::size_t k = begin; k < end; ++k)
        run_and_cascade(st, seeds[k].first, seeds[k].second);
    });
  }
  future.wait();
}

TreeMatching finish(DistanceWork& w, DistanceTables* tables_out,
                    bool force_root = false) {
  TreeMatching m = extract_matching(w, force_root);
  if (tables_out != nullptr) *tables_out = w.tables;
  return m;
}

}  // namespace

TreeMatching diagram_distance(const Diagram& d_i, const Diagram& d_j, double q,
                              Solver solver) {
  if (q < 1.0) throw InvalidParameter("diagram distance requires q >= 1");
  const int na = static_cast<int>(d_i.pairs.size());
  const int nb = static_cast<int>(d_j.pairs.size());

  std::vector<std::vector<double>> real(na, std::vector<double>(nb));
  std::vector<double> da(na), db(nb);
  for (int i = 0; i < na; ++i) {
    const auto& p = d_i.pairs[i];
    for (int j = 0; j < nb; ++j) {
      const auto& r = d_j.pairs[j];
      real[i][j] = pow_q(p.birth - r.birth, q) + pow_q(p.death - r.death, q);
    }
    da[i] = 2.0 * pow_q(0.5 * p.persistence(), q);
  }
  for (int j = 0; j < nb; ++j)
    db[j] = 2.0 * pow_q(0.5 * d_j.pairs[j].persistence(), q);

  const AssignmentResult r = solve(augment(real, da, db), solver);

  TreeMatching m;
  m.distance = std::pow(r.total, 1.0 / q);
  for (int i = 0; i < na + nb; ++i) {
    const int j = r.row_to_col[i];
    if (i < na) {
      if (j < nb)
        m.matched.push_back({i, j});
      else
        m.destroyed.push_back(i);
    } else if (j < nb) {
      m.created.push_back(j);
    }
  }
  return m;
}

double subtree_empty_distance(const Bdt& b, int branch) {
  if (branch < 0 || branch >= b.size())
    throw InvalidParameter("branch id out of range");
  return std::sqrt(subtree_empty_sq(b)[branch]);
}

PreparedBdt prepare(const Bdt& b, const MetricParams& params) {
  params.validate();
  PreparedBdt p;
  p.tree = preprocess_structure(b, params);
  if (params.normalize) {
    p.tree = normalize(p.tree).tree;
    p.normalized = true;
  }
  return p;
}

TreeMatching mt_distance_prepared(const PreparedBdt& a, const PreparedBdt& b,
                                  Solver solver, DistanceTables* tables,
                                  TaskPool* pool) {
  if (a.tree.empty() || b.tree.empty())
    throw EmptyTree("tree distance needs non-empty trees");
  DistanceWork w;
  init_work(w, a.tree, b.tree, solver);
  if (pool != nullptr && pool->thread_count() > 1)
    run_parallel(w, *pool);
  else
    run_sequential(w);
  return finish(w, tables);
}

TreeMatching mt_distance_root_matched(const PreparedBdt& a,
                                      const PreparedBdt& b, Solver solver) {
  if (a.tree.empty() || b.tree.empty())
    throw EmptyTree("tree distance needs non-empty trees");
  DistanceWork w;
  init_work(w, a.tree, b.tree, solver);
  run_sequential(w);
  return finish(w, nullptr, /*force_root=*/true);
}

TreeMatching mt_distance(const Bdt& b_i, const Bdt& b_j,
                         const MetricParams& params, Solver solver) {
  if (b_i.empty() || b_j.empty())
    throw EmptyTree("tree distance needs non-empty trees");
  return mt_distance_prepared(prepare(b_i, params), prepare(b_j, params),
                              solver);
}

TreeMatching mt_distance_parallel(const Bdt& b_i, const Bdt& b_j,
                                  const MetricParams& params, Solver solver,
                                  int thread_count) {
  if (thread_count <= 1) return mt_distance(b_i, b_j, params, solver);
  if (b_i.empty() || b_j.empty())
    throw EmptyTree("tree distance needs non-empty trees");
  TaskPool pool(thread_count);
  return mt_distance_prepared(prepare(b_i, params), prepare(b_j, params),
                              solver, nullptr, &pool);
}

std::vector<TreeMatching> mt_distance_many(const PreparedBdt& a,
                                           const std::vector<PreparedBdt>& bs,
                                           Solver solver, TaskPool* pool) {
  std::vector<TreeMatching> out(bs.size());
  if (pool == nullptr || pool->thread_count() <= 1) {
    for (std::size_t k = 0; k < bs.size(); ++k)
      out[k] = mt_distance_prepared(a, bs[k], solver);
    return out;
  }

  // All problems share the pool: their cell tasks interleave freely, and
  // each problem signals its own promise when its root pair completes.
  std::vector<DistanceWork> works(bs.size());
  std::vector<std::unique_ptr<ParallelState>> states;
  std::vector<std::future<void>> futures;
  states.reserve(bs.size());
  for (std::size_t k = 0; k < bs.size(); ++k) {
    if (a.tree.empty() || bs[k].tree.empty())
      throw EmptyTree("tree distance needs non-empty trees");
    init_work(works[k], a.tree, bs[k].tree, solver);
    states.push_back(
        std::make_unique<ParallelState>(works[k].tables.subtree.size()));
    states.back()->w = &works[k];
    futures.push_back(states.back()->done.get_future());
  }

  std::vector<std::vector<std::pair<int, int>>> all_seeds(bs.size());
  for (std::size_t k = 0; k < bs.size(); ++k) {
    DistanceWork& w = works[k];
    ParallelState& st = *states[k];
    for (int x = 0; x < w.A->size(); ++x) {
      for (int y = 0; y < w.B->size(); ++y) {
        if (w.depth_a[x] != w.depth_b[y]) continue;
        const int deps = static_cast<int>(w.A->branches[x].children.size()) *
                         static_cast<int>(w.B->branches[y].children.size());
        st.deps[w.cell(x, y)].store(deps, std::memory_order_relaxed);
        if (deps == 0) all_seeds[k].push_back({x, y});
      }
    }
  }
  for (std::size_t k = 0; k < bs.size(); ++k) {
    ParallelState* st = states[k].get();
    const auto& seeds = all_seeds[k];
    const std::size_t chunk = std::max<std::size_t>(
        1, seeds.size() / (4 * static_cast<std::size_t>(pool->thread_count())));
    for (std::size_t begin = 0; begin < seeds.size(); begin += chunk) {
      const std::size_t end = std::min(begin + chunk, seeds.size());
      pool->submit([st, &seeds, begin, end] {
        for (std::size_t i = begin; i < end; ++i)
          run_and_cascade(*st, seeds[i].first, seeds[i].second);
      });
    }
  }
  for (auto& f : futures) f.wait();
  for (std::size_t k = 0; k < bs.size(); ++k) out[k] = finish(works[k], nullptr);
  return out;
}

}  // namespace mts
