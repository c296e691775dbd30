#pragma once

#include <string>
#include <vector>

#include "derham/metric_space.hpp"
#include "derham/rng.hpp"

namespace derham::testutil {

inline FiniteMetricSpace space_from(const std::vector<std::string>& labels,
                                    const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(labels.size());
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return FiniteMetricSpace(labels, d);
}

inline FiniteMetricSpace k2(double d, const std::string& prefix = "p") {
  return space_from({prefix + "0", prefix + "1"}, {{0, d}, {d, 0}});
}

inline FiniteMetricSpace path3(double a, double b, const std::string& prefix = "q") {
  return space_from({prefix + "0", prefix + "1", prefix + "2"},
                    {{0, a, a + b}, {a, 0, b}, {a + b, b, 0}});
}

// generic point cloud metric; snowflake exponent keeps it a metric but
// destroys product structure that plain euclidean clouds could hide
inline FiniteMetricSpace random_cloud(Rng& rng, int n, double snowflake = 1.0,
                                      const std::string& prefix = "r") {
  const int dim = std::max(2, n / 2);
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) pts.push_back(rng.normal_vector(dim));
  Matrix d = Matrix::Zero(n, n);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = std::pow((pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]).norm(),
                                   snowflake);
    }
  }
  return FiniteMetricSpace(labels, d);
}

}  // namespace derham::testutil
