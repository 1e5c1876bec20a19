#include "mtspace/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double selected_total(const CostMatrix& m, const std::vector<int>& row_to_col) {
  double t = 0.0;
  for (int i = 0; i < m.n; ++i) t += m.at(i, row_to_col[i]);
  return t;
}

}  // namespace

double CostMatrix::max_real_cost() const {
  double mx = 0.0;
  for (double c : cost)
    if (c < kForbidden / 2) mx = std::max(mx, std::abs(c));
  return mx;
}

CostMatrix augment(const std::vector<std::vector<double>>& real_costs,
                   const std::vector<double>& a_diag,
                   const std::vector<double>& b_diag) {
  const int na = static_cast<int>(a_diag.size());
  const int nb = static_cast<int>(b_diag.size());
  if (static_cast<int>(real_costs.size()) != na)
    throw InvalidParameter("real cost row count must equal |A|");
  for (const auto& row : real_costs)
    if (static_cast<int>(row.size()) != nb)
      throw InvalidParameter("real cost column count must equal |B|");

  auto check = [](double c) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw InvalidParameter("assignment costs must be finite and >= 0");
  };

  CostMatrix m;
  m.n = na + nb;
  m.rows_real = na;
  m.cols_real = nb;
  m.cost.assign(static_cast<std::size_t>(m.n) * m.n, 0.0);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      check(real_costs[i][j]);
      m.at(i, j) = real_costs[i][j];
    }
  for (int i = 0; i < na; ++i) {
    check(a_diag[i]);
    for (int j = 0; j < na; ++j) m.at(i, nb + j) = i == j ? a_diag[i] : kForbidden;
  }
  for (int j = 0; j < nb; ++j) {
    check(b_diag[j]);
    for (int i = 0; i < nb; ++i) m.at(na + i, j) = i == j ? b_diag[j] : kForbidden;
  }
  // Ghost-to-ghost block stays zero: two diagonal points are at distance 0.
  return m;
}

AssignmentResult solve_exact(const CostMatrix& m) {
  const int n = m.n;
  AssignmentResult res;
  if (n == 0) return res;

  // Shortest-augmenting-path method with potentials (1-based scratch
  // arrays; column 0 is the virtual start).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = m.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;

  // Lexicographic refinement: every optimal permutation lives inside the
  // tight graph (reduced cost ~ 0); greedily pin each row to its smallest
  // feasible tight column, re-augmenting the rest through tight edges only.
  const double tol = 1e-11 * std::max(1.0, m.max_real_cost());
  auto tight = [&](int i, int j) {
    return m.at(i, j) - u[i + 1] - v[j + 1] <= tol;
  };

  std::vector<int> col_to_row(n);
  for (int i = 0; i < n; ++i) col_to_row[row_to_col[i]] = i;
  std::vector<char> col_fixed(n, 0);
  std::vector<char> visited(n, 0);

  // Augmenting search over tight edges, never touching fixed columns.
  auto augment_row = [&](auto&& self, int row) -> bool {
    for (int j = 0; j < n; ++j) {
      if (col_fixed[j] || visited[j] || !tight(row, j)) continue;
      visited[j] = 1;
      if (col_to_row[j] == -1 || self(self, col_to_row[j])) {
        col_to_row[j] = row;
        row_to_col[row] = j;
        return true;
      }
    }
    return false;
  };

  for (int i = 0; i < n; ++i) {
    const int current = row_to_col[i];
    for (int j = 0; j < current; ++j) {
      if (col_fixed[j] || !tight(i, j)) continue;
      // Try moving row i to the smaller column j; the displaced row (if
      // any) must find an alternative through unfixed tight edges.
      const int displaced = col_to_row[j];
      col_to_row[current] = -1;
      col_to_row[j] = i;
      row_to_col[i] = j;
      bool ok = true;
      if (displaced != -1) {
        std::fill(visited.begin(), visited.end(), 0);
        visited[j] = 1;
        ok = augment_row(augment_row, displaced);
      }
      if (ok) break;
      // Revert.
      col_to_row[j] = displaced;
      col_to_row[current] = i;
      row_to_col[i] = current;
    }
    col_fixed[row_to_col[i]] = 1;
  }

  res.row_to_col = row_to_col;
  res.total = selected_total(m, row_to_col);
  return res;
}

AssignmentResult solve_auction(const CostMatrix& m,
                               const AuctionSchedule& schedule) {
  const int n = m.n;
  AssignmentResult res;
  if (n == 0) return res;

  const double scale = m.max_real_cost();
  double eps = scale > 0.0 ? scale / schedule.start_divisor : 1e-9;
  const double eps_final = scale > 0.0 ? schedule.final_factor * scale : eps;

  std::vector<double> price(n, 0.0);
  std::vector<int> row_to_col(n, -1), col_to_row(n, -1);
  std::int64_t bids = 0;

  while (true) {
    std::fill(row_to_col.begin(), row_to_col.end(), -1);
    std::fill(col_to_row.begin(), col_to_row.end(), -1);
    int assigned = 0;
    while (assigned < n) {
      // Gauss-Seidel: the lowest unassigned row bids next.
      int i = 0;
      while (row_to_col[i] != -1) ++i;
      double best = -kInf, second = -kInf;
      int bj = -1;
      for (int j = 0; j < n; ++j) {
        const double value = -m.at(i, j) - price[j];
        if (value > best) {
          second = best;
          best = value;
          bj = j;
        } else if (value > second) {
          second = value;
        }
      }
      if (second == -kInf) second = best;  // n == 1
      price[bj] += best - second + eps;
      const int prev = col_to_row[bj];
      if (prev != -1) {
        row_to_col[prev] = -1;
        --assigned;
      }
      col_to_row[bj] = i;
      row_to_col[i] = bj;
      ++assigned;
      if (++bids > schedule.max_bids)
        throw NonConvergence("auction exceeded its bid budget");
    }
    if (eps <= eps_final) break;
    eps = std::max(eps / schedule.decay, eps_final);
  }

  res.row_to_col = row_to_col;
  res.total = selected_total(m, row_to_col);
  return res;
}

AssignmentResult solve(const CostMatrix& m, Solver s) {
  return s == Solver::Exact ? solve_exact(m) : solve_auction(m);
}

}  // namespace mts
