#pragma once

#include <cstdint>
#include <vector>

#include "mtspace/errors.hpp"

namespace mts {

/// Entries >= kForbidden/2 are treated as forbidden by both solvers; the
/// sentinel is never selected when a finite perfect matching exists.
constexpr double kForbidden = 1e30;

/// Square cost matrix produced by diagonal augmentation. The leading
/// rows_real x cols_real block holds real-to-real costs; the remaining rows
/// and columns are the diagonal ghosts.
struct CostMatrix {
  int n = 0;
  int rows_real = 0;
  int cols_real = 0;
  std::vector<double> cost;  // row-major, n * n

  double& at(int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return cost[static_cast<std::size_t>(i) * n + j];
  }

  /// Largest non-sentinel absolute cost; 0 for an empty matrix.
  double max_real_cost() const;
};

/// Builds the (|A|+|B|) x (|A|+|B|) balanced problem: the real block as
/// given, deletion costs on the A-to-ghost diagonal, insertion costs on the
/// ghost-to-B diagonal, forbidden elsewhere in those blocks, and a zero
/// ghost-to-ghost block.
CostMatrix augment(const std::vector<std::vector<double>>& real_costs,
                   const std::vector<double>& a_diag,
                   const std::vector<double>& b_diag);

struct AssignmentResult {
  std::vector<int> row_to_col;
  double total = 0.0;
};

/// Exact O(n^3) shortest-augmenting-path solver. Among all optimal
/// permutations, returns the lexicographically smallest (row 0's column
/// minimal, then row 1's, ...), which makes every downstream consumer
/// deterministic under cost ties.
AssignmentResult solve_exact(const CostMatrix& m);

/// epsilon-scaling schedule for the auction solver, expressed relative to
/// the largest non-sentinel cost M: epsilon runs from M/start_divisor down
/// by decay to final_factor * M.
struct AuctionSchedule {
  double start_divisor = 4.0;
  double decay = 4.0;
  double final_factor = 1e-6;
  std::int64_t max_bids = 50'000'000;
};

/// Gauss-Seidel forward auction with epsilon scaling; deterministic for a
/// fixed schedule (ascending-row bidding, lowest-column tie-break). Final
/// total is within n * epsilon_final of the optimum. Throws NonConvergence
/// if the bid budget is exhausted.
AssignmentResult solve_auction(const CostMatrix& m,
                               const AuctionSchedule& schedule = {});

enum class Solver { Exact, Auction };

AssignmentResult solve(const CostMatrix& m, Solver s);

}  // namespace mts
