#pragma once

// Textbook TOPSIS in long double, written without reference to the library.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline std::vector<long double> topsis(const std::vector<std::vector<double>>& x,
                                       const std::vector<double>& w,
                                       const std::vector<bool>& benefit) {
  const std::size_t m = x.size();
  const std::size_t n = w.size();
  long double wsum = 0.0L;
  for (double wj : w) wsum += wj;

  std::vector<std::vector<long double>> v(m, std::vector<long double>(n, 0.0L));
  for (std::size_t j = 0; j < n; ++j) {
    long double sq = 0.0L;
    for (std::size_t i = 0; i < m; ++i) sq += static_cast<long double>(x[i][j]) * x[i][j];
    const long double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < m; ++i) {
      const long double r = norm == 0.0L ? 0.0L : x[i][j] / norm;
      v[i][j] = (w[j] / wsum) * r;
    }
  }

  std::vector<long double> best(n), worst(n);
  for (std::size_t j = 0; j < n; ++j) {
    long double hi = v[0][j], lo = v[0][j];
    for (std::size_t i = 1; i < m; ++i) {
      if (v[i][j] > hi) hi = v[i][j];
      if (v[i][j] < lo) lo = v[i][j];
    }
    best[j] = benefit[j] ? hi : lo;
    worst[j] = benefit[j] ? lo : hi;
  }

  std::vector<long double> c(m);
  for (std::size_t i = 0; i < m; ++i) {
    long double dp = 0.0L, dm = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      dp += (v[i][j] - best[j]) * (v[i][j] - best[j]);
      dm += (v[i][j] - worst[j]) * (v[i][j] - worst[j]);
    }
    dp = std::sqrt(dp);
    dm = std::sqrt(dm);
    c[i] = dp + dm == 0.0L ? 1.0L : dm / (dp + dm);
  }
  return c;
}

}  // namespace oracle
