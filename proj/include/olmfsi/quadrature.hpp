#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "olmfsi/geometry.hpp"

namespace olmfsi {

/// Quadrature rule in physical coordinates. Weights may be negative for
/// subtractively composed rules on cut cells.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  void append(const QuadratureRule& other, double scale = 1.0) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    for (double w : other.weights) weights.push_back(scale * w);
  }

  template <typename F>
  auto integrate(F&& f) const -> decltype(f(Vec2{}) * 1.0) {
    using R = decltype(f(Vec2{}) * 1.0);
    R acc{};
    for (std::size_t q = 0; q < points.size(); ++q) acc += weights[q] * f(points[q]);
    return acc;
  }
};

/// Gauss-Legendre nodes and weights on [0, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: need at least one point");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = 0.5 * wi;
    w[n - 1 - i] = 0.5 * wi;
  }
  return {x, w};
}

/// Reference-triangle rule (barycentric xi, eta on the unit triangle, weights sum 1/2),
/// exact for polynomials of total degree <= order.
inline const std::vector<std::pair<Vec2, double>>& reference_triangle_rule(int order) {
  static const std::vector<std::pair<Vec2, double>> centroid{{{1.0 / 3.0, 1.0 / 3.0}, 0.5}};
  static const std::vector<std::pair<Vec2, double>> three{
      {{1.0 / 6.0, 1.0 / 6.0}, 1.0 / 6.0}, {{2.0 / 3.0, 1.0 / 6.0}, 1.0 / 6.0}, {{1.0 / 6.0, 2.0 / 3.0}, 1.0 / 6.0}};
  if (order <= 1) return centroid;
  if (order == 2) return three;

  static const std::vector<std::vector<std::pair<Vec2, double>>> collapsed = [] {
    // Duffy-collapsed tensor Gauss rules; the (1 - u) Jacobian raises the degree by one.
    std::vector<std::vector<std::pair<Vec2, double>>> table(32);
    for (int k = 3; k < static_cast<int>(table.size()); ++k) {
      const int n = (k + 2) / 2 + 1;
      auto [x, w] = gauss_legendre_unit(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) table[k].push_back({{x[i], (1.0 - x[i]) * x[j]}, w[i] * w[j] * (1.0 - x[i])});
    }
    return table;
  }();
  if (order >= static_cast<int>(collapsed.size())) throw std::invalid_argument("quadrature order too high");
  return collapsed[order];
}

inline QuadratureRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int order) {
  const double det = cross(b - a, c - a);
  QuadratureRule r;
  const auto& ref = reference_triangle_rule(order);
  r.points.reserve(ref.size());
  r.weights.reserve(ref.size());
  for (const auto& [xi, w] : ref) {
    r.points.push_back(a + xi.x * (b - a) + xi.y * (c - a));
    r.weights.push_back(w * std::abs(det));
  }
  return r;
}

/// Rule on a convex polygon via fan triangulation from its first vertex.
inline QuadratureRule polygon_rule(const Polygon& poly, int order) {
  QuadratureRule r;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    if (std::abs(triangle_signed_area(poly[0], poly[i], poly[i + 1])) == 0.0) continue;
    r.append(triangle_rule(poly[0], poly[i], poly[i + 1], order));
  }
  return r;
}

/// Gauss rule on a segment, exact for polynomials of degree <= order along it.
inline QuadratureRule segment_rule(const Vec2& a, const Vec2& b, int order) {
  const int n = std::max(1, (order + 2) / 2);
  auto [x, w] = gauss_legendre_unit(n);
  const double len = norm(b - a);
  QuadratureRule r;
  for (int i = 0; i < n; ++i) {
    r.points.push_back(a + x[i] * (b - a));
    r.weights.push_back(w[i] * len);
  }
  return r;
}

}  // namespace olmfsi
