#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mpta::oracle {

// Mixed solution of a zero-sum matrix game. The row player maximizes, the
// column player minimizes; `gap` is the exact duality gap of the averaged
// strategies (row best-response value minus column best-response value).
struct MatrixSolution {
  double value = 0;
  double gap = 0;
  std::vector<double> row;
  std::vector<double> col;
  std::uint64_t iters = 0;
};

namespace detail {

inline std::vector<double> regret_match(const std::vector<double>& r) {
  std::vector<double> p(r.size());
  double sum = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    p[i] = std::max(r[i], 0.0);
    sum += p[i];
  }
  if (sum <= 0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  } else {
    for (double& x : p) x /= sum;
  }
  return p;
}

}  // namespace detail

// Regret-matching+ with alternating updates and linearly weighted averaging.
// A is row-major MxN. Stops once the duality gap of the averages drops below
// tol or after max_iters iterations; the reported gap is always exact.
inline MatrixSolution solve_matrix(const std::vector<double>& a, int m, int n, double tol = 1e-9,
                                   std::uint64_t max_iters = 2000000) {
  if (m <= 0 || n <= 0 || a.size() != static_cast<std::size_t>(m) * n) {
    throw std::invalid_argument("solve_matrix: bad dimensions");
  }
  std::vector<double> rr(m, 0.0), rc(n, 0.0);  // cumulative positive regrets
  std::vector<double> sx(m, 0.0), sy(n, 0.0);  // weighted strategy sums

  MatrixSolution sol;
  auto measure = [&]() {
    std::vector<double> x = detail::regret_match(sx), y = detail::regret_match(sy);
    double wx = 0, wy = 0;
    for (double w : sx) wx += w;
    for (double w : sy) wy += w;
    if (wx > 0) {
      for (int i = 0; i < m; ++i) x[i] = sx[i] / wx;
    }
    if (wy > 0) {
      for (int j = 0; j < n; ++j) y[j] = sy[j] / wy;
    }
    double row_br = 0, col_br = 0, value = 0;
    for (int i = 0; i < m; ++i) {
      double u = 0;
      for (int j = 0; j < n; ++j) u += a[static_cast<std::size_t>(i) * n + j] * y[j];
      if (i == 0 || u > row_br) row_br = u;
      value += x[i] * u;
    }
    for (int j = 0; j < n; ++j) {
      double u = 0;
      for (int i = 0; i < m; ++i) u += a[static_cast<std::size_t>(i) * n + j] * x[i];
      if (j == 0 || u < col_br) col_br = u;
    }
    sol.value = value;
    sol.gap = row_br - col_br;
    sol.row = std::move(x);
    sol.col = std::move(y);
  };

  std::uint64_t check = 64;
  for (std::uint64_t t = 1; t <= max_iters; ++t) {
    const double w = static_cast<double>(t);
    std::vector<double> y = detail::regret_match(rc);
    {
      std::vector<double> x = detail::regret_match(rr);
      double v = 0;
      std::vector<double> u(m, 0.0);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) u[i] += a[static_cast<std::size_t>(i) * n + j] * y[j];
        v += x[i] * u[i];
      }
      for (int i = 0; i < m; ++i) {
        rr[i] = std::max(rr[i] + u[i] - v, 0.0);
        sx[i] += w * x[i];
      }
    }
    {
      std::vector<double> x = detail::regret_match(rr);
      double v = 0;
      std::vector<double> u(n, 0.0);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) u[j] += a[static_cast<std::size_t>(i) * n + j] * x[i];
      }
      for (int j = 0; j < n; ++j) v += y[j] * u[j];
      for (int j = 0; j < n; ++j) {
        rc[j] = std::max(rc[j] + v - u[j], 0.0);  // column player minimizes
        sy[j] += w * y[j];
      }
    }
    sol.iters = t;
    if (t >= check || t == max_iters) {
      measure();
      if (sol.gap < tol) return sol;
      check = check + check / 2;
    }
  }
  measure();
  return sol;
}

}  // namespace mpta::oracle
