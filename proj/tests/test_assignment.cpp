#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mtspace/assignment.hpp"
#include "mtspace/rng.hpp"
#include "support/oracles.hpp"

namespace {

mts::CostMatrix random_square(std::uint64_t seed, int n, bool with_ties) {
  mts::Rng rng(seed);
  mts::CostMatrix m;
  m.n = n;
  m.rows_real = n;
  m.cols_real = n;
  m.cost.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (auto& c : m.cost) {
    c = rng.uniform(0.0, 10.0);
    if (with_ties) c = std::round(c * 10.0) / 10.0;  // one decimal forces ties
  }
  return m;
}

std::vector<std::vector<double>> rows_of(const mts::CostMatrix& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) rows[static_cast<std::size_t>(i)].push_back(m.at(i, j));
  return rows;
}

bool is_permutation_of_columns(const std::vector<int>& p) {
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) return false;
  return true;
}

}  // namespace

TEST_CASE("diagonal augmentation lays out the documented blocks") {
  const mts::CostMatrix m = mts::augment({{5.0}}, {1.0}, {2.0});
  REQUIRE(m.n == 2);
  CHECK(m.rows_real == 1);
  CHECK(m.cols_real == 1);
  CHECK(m.at(0, 0) == 5.0);
  CHECK(m.at(0, 1) == 1.0);  // delete the only real row
  CHECK(m.at(1, 0) == 2.0);  // insert the only real column
  CHECK(m.at(1, 1) == 0.0);  // ghost to ghost is free

  const mts::CostMatrix r =
      mts::augment({{1.0}, {2.0}}, {0.5, 0.25}, {0.125});
  REQUIRE(r.n == 3);
  CHECK(r.at(0, 0) == 1.0);
  CHECK(r.at(1, 0) == 2.0);
  CHECK(r.at(0, 1) == 0.5);            // row 0 to its own ghost column
  CHECK(r.at(0, 2) >= mts::kForbidden / 2);  // row 0 to row 1's ghost
  CHECK(r.at(1, 1) >= mts::kForbidden / 2);
  CHECK(r.at(1, 2) == 0.25);
  CHECK(r.at(2, 0) == 0.125);          // ghost row to the real column
  CHECK(r.at(2, 1) == 0.0);
  CHECK(r.at(2, 2) == 0.0);
  CHECK(r.max_real_cost() == 2.0);
}

TEST_CASE("the worked example prefers the two diagonal moves") {
  const mts::CostMatrix m = mts::augment({{5.0}}, {1.0}, {2.0});
  const mts::AssignmentResult r = mts::solve_exact(m);
  CHECK(r.total == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.row_to_col == std::vector<int>{1, 0});
}

TEST_CASE("the exact solver matches exhaustive search, including on ties") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 1 + static_cast<int>(seed % 7);
    const mts::CostMatrix m = random_square(seed, n, seed % 2 == 0);
    const mts::AssignmentResult got = mts::solve_exact(m);
    const oracle::AssignmentOracle want = oracle::brute_assignment(rows_of(m));
    CHECK(got.total == doctest::Approx(want.total).epsilon(1e-9));
    // Either result is the lexicographically smallest optimal permutation.
    CHECK(got.row_to_col == want.row_to_col);
  }
}

TEST_CASE("forbidden entries are avoided whenever possible") {
  mts::CostMatrix m;
  m.n = 2;
  m.rows_real = m.cols_real = 2;
  m.cost = {mts::kForbidden, 1.0, 1.0, mts::kForbidden};
  const mts::AssignmentResult r = mts::solve_exact(m);
  CHECK(r.row_to_col == std::vector<int>{1, 0});
  CHECK(r.total == doctest::Approx(2.0));
}

TEST_CASE("empty problems solve to an empty zero-cost assignment") {
  const mts::CostMatrix m = mts::augment({}, {}, {});
  CHECK(m.n == 0);
  const mts::AssignmentResult e = mts::solve_exact(m);
  CHECK(e.total == 0.0);
  CHECK(e.row_to_col.empty());
  const mts::AssignmentResult a = mts::solve_auction(m);
  CHECK(a.total == 0.0);
}

TEST_CASE("the auction solver stays within its documented optimality bound") {
  for (std::uint64_t seed = 100; seed < 125; ++seed) {
    const int n = 2 + static_cast<int>(seed % 11);
    const mts::CostMatrix m = random_square(seed, n, false);
    const mts::AssignmentResult exact = mts::solve_exact(m);
    const mts::AssignmentResult auction = mts::solve_auction(m);
    CHECK(is_permutation_of_columns(auction.row_to_col));
    // A feasible assignment can never beat the optimum.
    CHECK(auction.total >= exact.total - 1e-9);
    const double bound = n * 1e-6 * m.max_real_cost();
    CHECK(auction.total <= exact.total + bound + 1e-9);
  }
}

TEST_CASE("the auction solver handles augmented problems with ghosts") {
  mts::Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const int na = 1 + static_cast<int>(rng.below(3));
    const int nb = 1 + static_cast<int>(rng.below(3));
    std::vector<std::vector<double>> real(static_cast<std::size_t>(na));
    for (auto& row : real)
      for (int j = 0; j < nb; ++j) row.push_back(rng.uniform(0.0, 4.0));
    std::vector<double> da, db;
    for (int i = 0; i < na; ++i) da.push_back(rng.uniform(0.0, 2.0));
    for (int j = 0; j < nb; ++j) db.push_back(rng.uniform(0.0, 2.0));
    const mts::CostMatrix m = mts::augment(real, da, db);
    const mts::AssignmentResult exact = mts::solve_exact(m);
    const mts::AssignmentResult auction = mts::solve_auction(m);
    CHECK(auction.total >= exact.total - 1e-9);
    CHECK(auction.total <=
          exact.total + m.n * 1e-6 * m.max_real_cost() + 1e-9);
    CHECK(auction.total < mts::kForbidden / 2);  // no forbidden edge chosen
  }
}

TEST_CASE("both solvers are deterministic") {
  const mts::CostMatrix m = random_square(42, 6, true);
  const mts::AssignmentResult e1 = mts::solve_exact(m);
  const mts::AssignmentResult e2 = mts::solve_exact(m);
  CHECK(e1.row_to_col == e2.row_to_col);
  CHECK(e1.total == e2.total);
  const mts::AssignmentResult a1 = mts::solve_auction(m);
  const mts::AssignmentResult a2 = mts::solve_auction(m);
  CHECK(a1.row_to_col == a2.row_to_col);
  CHECK(a1.total == a2.total);

  CHECK(mts::solve(m, mts::Solver::Exact).row_to_col == e1.row_to_col);
  CHECK(mts::solve(m, mts::Solver::Auction).row_to_col == a1.row_to_col);
}
