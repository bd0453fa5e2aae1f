// SPDX-License-Identifier: Apache-2.0
#include "cfm/basis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "cfm/error.hpp"
#include "cfm/quadrature.hpp"

namespace cfm {

void legendre(int n, double x, std::vector<double>& P, std::vector<double>& dP) {
  P.assign(n + 1, 0.0);
  dP.assign(n + 1, 0.0);
  P[0] = 1.0;
  if (n >= 1) {
    P[1] = x;
    dP[1] = 1.0;
  }
  for (int k = 1; k < n; ++k) {
    P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1);
    dP[k + 1] = dP[k - 1] + (2 * k + 1) * P[k];
  }
}

double lobatto(int k, double x) {
  std::vector<double> P, dP;
  legendre(k, x, P, dP);
  return (P[k] - P[k - 2]) / std::sqrt(2.0 * (2 * k - 1));
}

double lobatto_derivative(int k, double x) {
  std::vector<double> P, dP;
  legendre(k - 1, x, P, dP);
  return P[k - 1] * std::sqrt(0.5 * (2 * k - 1));
}

void lobatto_kernel(int k, double x, double& value, double& derivative) {
  // phi_{k-2} = c * P'_{k-1}, with P''_{n+1} = P''_{n-1} + (2n+1) P'_n
  const int n = k - 1;
  std::vector<double> P, dP;
  legendre(n, x, P, dP);
  std::vector<double> ddP(n + 1, 0.0);
  for (int m = 1; m < n; ++m) ddP[m + 1] = ddP[m - 1] + (2 * m + 1) * dP[m];
  const double c = -4.0 * (2 * k - 1) / ((k - 1.0) * k * std::sqrt(2.0 * (2 * k - 1)));
  value = c * dP[n];
  derivative = c * ddP[n];
}

LocalBasis make_local_basis(ElementKind kind, int degree, const std::array<int, 4>& edge_degree) {
  LocalBasis b;
  b.kind = kind;
  b.degree = degree;
  b.edge_degree = edge_degree;
  const int nv = kind == ElementKind::Quad ? 4 : 3;
  for (int i = 0; i < nv; ++i) b.modes.push_back({Mode::Type::Vertex, i, 0, 0});
  for (int e = 0; e < nv; ++e)
    for (int k = 2; k <= edge_degree[e]; ++k) b.modes.push_back({Mode::Type::Edge, e, k, 0});
  if (kind == ElementKind::Quad) {
    for (int i = 2; i <= degree; ++i)
      for (int j = 2; j <= degree; ++j) b.modes.push_back({Mode::Type::Interior, 0, i, j});
  } else {
    for (int s = 0; s <= degree - 3; ++s)
      for (int n1 = 0; n1 <= s; ++n1) b.modes.push_back({Mode::Type::Interior, 0, n1, s - n1});
  }
  return b;
}

namespace {

void eval_quad(const LocalBasis& b, const Point2& r, Eigen::VectorXd& val, Eigen::MatrixX2d& grad) {
  const double x = r.x(), y = r.y();
  const int pmax = std::max(b.degree, *std::max_element(b.edge_degree.begin(), b.edge_degree.end()));
  // l_k and derivatives at x, -x, y, -y for k <= pmax
  std::vector<double> lx(pmax + 1), dlx(pmax + 1), ly(pmax + 1), dly(pmax + 1);
  for (int k = 2; k <= pmax; ++k) {
    lx[k] = lobatto(k, x);
    dlx[k] = lobatto_derivative(k, x);
    ly[k] = lobatto(k, y);
    dly[k] = lobatto_derivative(k, y);
  }
  const int n = b.size();
  val.resize(n);
  grad.resize(n, 2);
  for (int m = 0; m < n; ++m) {
    const Mode& md = b.modes[m];
    double v = 0, gx = 0, gy = 0;
    if (md.type == Mode::Type::Vertex) {
      static const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
      const int i = md.entity;
      v = 0.25 * (1 + sx[i] * x) * (1 + sy[i] * y);
      gx = 0.25 * sx[i] * (1 + sy[i] * y);
      gy = 0.25 * sy[i] * (1 + sx[i] * x);
    } else if (md.type == Mode::Type::Edge) {
      const int k = md.i;
      const double par = (k % 2 == 0) ? 1.0 : -1.0;  // l_k(-s) = (-1)^k l_k(s)
      switch (md.entity) {
        case 0:  // s = x, blend (1-y)/2
          v = lx[k] * 0.5 * (1 - y);
          gx = dlx[k] * 0.5 * (1 - y);
          gy = -0.5 * lx[k];
          break;
        case 1:  // s = y, blend (1+x)/2
          v = ly[k] * 0.5 * (1 + x);
          gx = 0.5 * ly[k];
          gy = dly[k] * 0.5 * (1 + x);
          break;
        case 2:  // s = -x, blend (1+y)/2
          v = par * lx[k] * 0.5 * (1 + y);
          gx = par * dlx[k] * 0.5 * (1 + y);
          gy = par * 0.5 * lx[k];
          break;
        default:  // s = -y, blend (1-x)/2
          v = par * ly[k] * 0.5 * (1 - x);
          gx = -par * 0.5 * ly[k];
          gy = par * dly[k] * 0.5 * (1 - x);
          break;
      }
    } else {
      v = lx[md.i] * ly[md.j];
      gx = dlx[md.i] * ly[md.j];
      gy = lx[md.i] * dly[md.j];
    }
    val[m] = v;
    grad(m, 0) = gx;
    grad(m, 1) = gy;
  }
}

void eval_tri(const LocalBasis& b, const Point2& r, Eigen::VectorXd& val, Eigen::MatrixX2d& grad) {
  const double lam[3] = {1 - r.x() - r.y(), r.x(), r.y()};
  static const Eigen::Vector2d gl[3] = {Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  const int n = b.size();
  val.resize(n);
  grad.resize(n, 2);
  std::vector<double> P1, dP1, P2, dP2;
  if (b.degree >= 3) {
    legendre(b.degree - 3, lam[1] - lam[0], P1, dP1);
    legendre(b.degree - 3, 2 * lam[2] - 1, P2, dP2);
  }
  for (int m = 0; m < n; ++m) {
    const Mode& md = b.modes[m];
    Eigen::Vector2d g;
    double v;
    if (md.type == Mode::Type::Vertex) {
      v = lam[md.entity];
      g = gl[md.entity];
    } else if (md.type == Mode::Type::Edge) {
      const int a = md.entity, c = (md.entity + 1) % 3;
      const double s = lam[c] - lam[a];
      double phi, dphi;
      lobatto_kernel(md.i, s, phi, dphi);
      const double ll = lam[a] * lam[c];
      v = ll * phi;
      g = (lam[c] * gl[a] + lam[a] * gl[c]) * phi + ll * dphi * (gl[c] - gl[a]);
    } else {
      const double bub = lam[0] * lam[1] * lam[2];
      const Eigen::Vector2d gb =
          lam[1] * lam[2] * gl[0] + lam[0] * lam[2] * gl[1] + lam[0] * lam[1] * gl[2];
      const double a1 = P1[md.i], a2 = P2[md.j];
      const Eigen::Vector2d ga1 = dP1[md.i] * (gl[1] - gl[0]);
      const Eigen::Vector2d ga2 = dP2[md.j] * 2.0 * gl[2];
      v = bub * a1 * a2;
      g = gb * a1 * a2 + bub * (ga1 * a2 + a1 * ga2);
    }
    val[m] = v;
    grad(m, 0) = g.x();
    grad(m, 1) = g.y();
  }
}

}  // namespace

void eval_basis(const LocalBasis& basis, const Point2& xi, Eigen::VectorXd& value, Eigen::MatrixX2d& grad) {
  if (basis.kind == ElementKind::Quad) eval_quad(basis, xi, value, grad);
  else eval_tri(basis, xi, value, grad);
}

const BasisTable& tabulate(const LocalBasis& basis, int rule_order) {
  using Key = std::tuple<int, int, int, int, int, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<BasisTable>> cache;
  const Key key{static_cast<int>(basis.kind), basis.degree, basis.edge_degree[0], basis.edge_degree[1],
                basis.edge_degree[2], basis.edge_degree[3], rule_order};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  const QuadratureRule& rule = element_rule(basis.kind, rule_order);
  auto table = std::make_unique<BasisTable>();
  table->value.resize(rule.points.size());
  table->grad.resize(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) eval_basis(basis, rule.points[q], table->value[q], table->grad[q]);
  const BasisTable& ref = *table;
  cache.emplace(key, std::move(table));
  return ref;
}

}  // namespace cfm
