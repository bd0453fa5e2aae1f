// SPDX-License-Identifier: Apache-2.0
#include "cfm/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cfm/error.hpp"
#include "cfm/mesh.hpp"

namespace cfm {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least one point");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

const QuadratureRule& element_rule(ElementKind kind, int n) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{static_cast<int>(kind), n}];
  if (slot) return *slot;
  auto rule = std::make_unique<QuadratureRule>();
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  if (kind == ElementKind::Quad) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        rule->points.emplace_back(x[i], x[j]);
        rule->weights.push_back(w[i] * w[j]);
      }
  } else {
    // collapsed square -> triangle: xi = (1+r)(1-s)/4, eta = (1+s)/2
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double r = x[i], s = x[j];
        rule->points.emplace_back(0.25 * (1 + r) * (1 - s), 0.5 * (1 + s));
        rule->weights.push_back(w[i] * w[j] * (1 - s) / 8.0);
      }
  }
  slot = std::move(rule);
  return *slot;
}

}  // namespace cfm
