#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "mtspace/errors.hpp"
#include "mtspace/merge_tree.hpp"
#include "mtspace/metric.hpp"
#include "mtspace/preprocess.hpp"
#include "mtspace/rng.hpp"
#include "mtspace/task_pool.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

namespace {

mts::Diagram diagram_of(const std::vector<std::pair<double, double>>& pts) {
  mts::Diagram d;
  for (const auto& [b, dth] : pts) d.pairs.push_back({b, dth, -1, -1});
  return d;
}

std::vector<std::pair<double, double>> random_points(std::uint64_t seed,
                                                     int max_points) {
  mts::Rng rng(seed);
  const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_points) + 1));
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < n; ++i) {
    const double b = rng.uniform(0.0, 5.0);
    pts.push_back({b, b + rng.uniform(0.0, 5.0)});
  }
  return pts;
}

bool is_ancestor(const mts::Bdt& b, int anc, int node) {
  for (int p = b.branches[static_cast<std::size_t>(node)].parent; p != -1;
       p = b.branches[static_cast<std::size_t>(p)].parent)
    if (p == anc) return true;
  return false;
}

void check_coverage(const mts::TreeMatching& m, int na, int nb) {
  std::set<int> a_ids(m.destroyed.begin(), m.destroyed.end());
  std::set<int> b_ids(m.created.begin(), m.created.end());
  REQUIRE(a_ids.size() == m.destroyed.size());
  REQUIRE(b_ids.size() == m.created.size());
  for (const auto& [ai, bi] : m.matched) {
    CHECK(a_ids.insert(ai).second);
    CHECK(b_ids.insert(bi).second);
  }
  CHECK(static_cast<int>(a_ids.size()) == na);
  CHECK(static_cast<int>(b_ids.size()) == nb);
}

}  // namespace

TEST_CASE("diagram distance reproduces the one-point worked example") {
  const mts::Diagram a = diagram_of({{1, 3}});
  const mts::Diagram b = diagram_of({{2, 5}});
  const mts::TreeMatching m = mts::diagram_distance(a, b);
  CHECK(m.distance == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(m.matched == std::vector<std::pair<int, int>>{{0, 0}});
  CHECK(m.destroyed.empty());
  CHECK(m.created.empty());
}

TEST_CASE("diagram distance agrees with exhaustive partial matchings") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto pa = random_points(seed * 2, 3);
    const auto pb = random_points(seed * 2 + 1, 3);
    const mts::TreeMatching m =
        mts::diagram_distance(diagram_of(pa), diagram_of(pb));
    CHECK(m.distance ==
          doctest::Approx(oracle::brute_diagram_distance(pa, pb)).epsilon(1e-9));
    check_coverage(m, static_cast<int>(pa.size()), static_cast<int>(pb.size()));
  }
  // Non-default exponent.
  const auto pa = random_points(123, 3);
  const auto pb = random_points(321, 3);
  const mts::TreeMatching m1 =
      mts::diagram_distance(diagram_of(pa), diagram_of(pb), 1.0);
  CHECK(m1.distance ==
        doctest::Approx(oracle::brute_diagram_distance(pa, pb, 1.0)).epsilon(1e-9));
}

TEST_CASE("erasing a subtree sums the squared diagonal projections") {
  const mts::Bdt b = gen::make_bdt({{0, 4, -1}, {1, 3, 0}});
  CHECK(mts::subtree_empty_distance(b, b.root) ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  CHECK(mts::subtree_empty_distance(b, 1) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(mts::point_diagonal_sq(0, 4) == doctest::Approx(8.0));
}

TEST_CASE("tree distance reproduces the nested worked example") {
  const mts::Bdt a = gen::make_bdt({{0, 10, -1}, {2, 5, 0}});
  const mts::Bdt b = gen::make_bdt({{0, 10, -1}, {4, 6, 0}});
  const mts::TreeMatching m = mts::mt_distance(a, b, mts::neutral_params(true));
  CHECK(m.distance == doctest::Approx(std::sqrt(0.05)).epsilon(1e-12));
  CHECK(m.matched == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
}

TEST_CASE("tree distance equals the exhaustive matching search on small trees") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const mts::Bdt a = gen::random_bdt(seed * 2, 4);
    const mts::Bdt b = gen::random_bdt(seed * 2 + 1, 4);

    const double raw = mts::mt_distance(a, b, mts::neutral_params()).distance;
    CHECK(raw == doctest::Approx(oracle::brute_tree_distance(a, b)).epsilon(1e-9));

    const mts::PreparedBdt na = mts::prepare(a, mts::neutral_params(true));
    const mts::PreparedBdt nb = mts::prepare(b, mts::neutral_params(true));
    const double normed =
        mts::mt_distance(a, b, mts::neutral_params(true)).distance;
    CHECK(normed ==
          doctest::Approx(oracle::brute_tree_distance(na.tree, nb.tree))
              .epsilon(1e-9));
  }
}

TEST_CASE("the metric axioms hold on random triples") {
  const mts::MetricParams params;  // production defaults
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const mts::Bdt a = gen::random_bdt(seed * 3, 8);
    const mts::Bdt b = gen::random_bdt(seed * 3 + 1, 8);
    const mts::Bdt c = gen::random_bdt(seed * 3 + 2, 8);
    const double ab = mts::mt_distance(a, b, params).distance;
    const double ba = mts::mt_distance(b, a, params).distance;
    const double bc = mts::mt_distance(b, c, params).distance;
    const double ac = mts::mt_distance(a, c, params).distance;
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(mts::mt_distance(a, a, params).distance == 0.0);
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("distance ignores the branch id numbering") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const mts::Bdt a = gen::random_bdt(seed, 7);
    const mts::Bdt b = gen::random_bdt(seed + 1000, 7);
    std::vector<int> perm(static_cast<std::size_t>(b.size()));
    for (int i = 0; i < b.size(); ++i)
      perm[static_cast<std::size_t>(i)] = (i + 1) % b.size();
    const mts::Bdt shuffled = gen::relabel(b, perm);
    const double d1 = mts::mt_distance(a, b).distance;
    const double d2 = mts::mt_distance(a, shuffled).distance;
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
  }
}

TEST_CASE("matchings cover both trees and preserve depth and ancestry") {
  const mts::MetricParams params = mts::neutral_params(true);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const mts::Bdt a = gen::random_bdt(seed * 2 + 500, 9);
    const mts::Bdt b = gen::random_bdt(seed * 2 + 501, 9);
    const mts::TreeMatching m = mts::mt_distance(a, b, params);
    check_coverage(m, a.size(), b.size());

    const std::vector<int> da = a.depths();
    const std::vector<int> db = b.depths();
    for (const auto& [ai, bi] : m.matched)
      CHECK(da[static_cast<std::size_t>(ai)] == db[static_cast<std::size_t>(bi)]);

    for (const auto& [a1, b1] : m.matched)
      for (const auto& [a2, b2] : m.matched) {
        if (a1 == a2) continue;
        CHECK(is_ancestor(a, a1, a2) == is_ancestor(b, b1, b2));
      }
  }
}

TEST_CASE("the memo tables expose the final route decision") {
  const mts::MetricParams params = mts::neutral_params();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const mts::Bdt a = gen::random_bdt(seed + 50, 6);
    const mts::Bdt b = gen::random_bdt(seed + 60, 6);
    const mts::PreparedBdt pa = mts::prepare(a, params);
    const mts::PreparedBdt pb = mts::prepare(b, params);
    mts::DistanceTables tables;
    const mts::TreeMatching m =
        mts::mt_distance_prepared(pa, pb, mts::Solver::Exact, &tables);
    REQUIRE(tables.ni == a.size());
    REQUIRE(tables.nj == b.size());
    const double ea = mts::subtree_empty_distance(pa.tree, pa.tree.root);
    const double eb = mts::subtree_empty_distance(pb.tree, pb.tree.root);
    const double best =
        std::min(tables.t(pa.tree.root, pb.tree.root), ea * ea + eb * eb);
    CHECK(m.distance * m.distance == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("parallel evaluation is bitwise identical to sequential") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const mts::Bdt a = gen::random_bdt(seed + 200, 20);
    const mts::Bdt b = gen::random_bdt(seed + 300, 20);
    const mts::MetricParams params;
    const mts::TreeMatching s = mts::mt_distance(a, b, params);
    for (int threads : {2, 8}) {
      const mts::TreeMatching p =
          mts::mt_distance_parallel(a, b, params, mts::Solver::Exact, threads);
      CHECK(p.distance == s.distance);
      CHECK(p.matched == s.matched);
      CHECK(p.destroyed == s.destroyed);
      CHECK(p.created == s.created);
    }
  }
}

TEST_CASE("one-to-many evaluation matches pairwise calls") {
  const mts::MetricParams params;
  const mts::PreparedBdt a = mts::prepare(gen::random_bdt(1, 10), params);
  std::vector<mts::PreparedBdt> bs;
  for (std::uint64_t seed = 2; seed < 8; ++seed)
    bs.push_back(mts::prepare(gen::random_bdt(seed, 10), params));

  const std::vector<mts::TreeMatching> seq = mts::mt_distance_many(a, bs);
  REQUIRE(seq.size() == bs.size());
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const mts::TreeMatching one = mts::mt_distance_prepared(a, bs[i]);
    CHECK(seq[i].distance == one.distance);
    CHECK(seq[i].matched == one.matched);
  }

  mts::TaskPool pool(4);
  const std::vector<mts::TreeMatching> par =
      mts::mt_distance_many(a, bs, mts::Solver::Exact, &pool);
  for (std::size_t i = 0; i < bs.size(); ++i) {
    CHECK(par[i].distance == seq[i].distance);
    CHECK(par[i].matched == seq[i].matched);
  }
}

TEST_CASE("root-pinned matching keeps the roots paired") {
  const mts::MetricParams params = mts::neutral_params();
  // Far-apart small trees: the optimum destroys everything, the pinned
  // variant still reports a usable root pairing.
  const mts::PreparedBdt a =
      mts::prepare(gen::make_bdt({{0, 1, -1}}), params);
  const mts::PreparedBdt b =
      mts::prepare(gen::make_bdt({{100, 101, -1}}), params);
  const mts::TreeMatching best = mts::mt_distance_prepared(a, b);
  CHECK(best.matched.empty());  // destroy-both is optimal here
  const mts::TreeMatching pinned = mts::mt_distance_root_matched(a, b);
  CHECK(pinned.matched == std::vector<std::pair<int, int>>{{0, 0}});
  CHECK(pinned.distance >= best.distance - 1e-12);
  CHECK(pinned.distance == doctest::Approx(std::sqrt(20000.0)).epsilon(1e-9));

  // When the optimum already pairs the roots the two variants agree.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [x, y] = gen::random_matched_pair(seed, 6);
    const mts::PreparedBdt px = mts::prepare(x, params);
    const mts::PreparedBdt py = mts::prepare(y, params);
    const mts::TreeMatching m = mts::mt_distance_prepared(px, py);
    if (m.matched.empty()) continue;
    const mts::TreeMatching r = mts::mt_distance_root_matched(px, py);
    CHECK(r.distance == m.distance);
    CHECK(r.matched == m.matched);
  }
}

TEST_CASE("the auction solver lands near the exact tree distance") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const mts::Bdt a = gen::random_bdt(seed + 700, 6);
    const mts::Bdt b = gen::random_bdt(seed + 800, 6);
    const double e = mts::mt_distance(a, b).distance;
    const double x =
        mts::mt_distance(a, b, mts::MetricParams{}, mts::Solver::Auction)
            .distance;
    CHECK(x >= e - 1e-9);
    CHECK(x <= e + 1e-3 + 1e-2 * e);
  }
}

TEST_CASE("empty trees are rejected") {
  const mts::Bdt empty;
  const mts::Bdt one = gen::make_bdt({{0, 1, -1}});
  CHECK_THROWS_AS(mts::mt_distance(empty, one), mts::EmptyTree);
  CHECK_THROWS_AS(mts::mt_distance(one, empty), mts::EmptyTree);
}
