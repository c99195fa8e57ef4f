#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace olmfsi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  constexpr double operator[](int i) const { return i == 0 ? x : y; }
  constexpr double& operator[](int i) { return i == 0 ? x : y; }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Dense 2x2 tensor, row-major: m[i][j].
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

  static constexpr Mat2 identity() { return Mat2{{{{1.0, 0.0}, {0.0, 1.0}}}}; }
  static constexpr Mat2 zero() { return Mat2{}; }
  static constexpr Mat2 from_rows(double a, double b, double c, double d) {
    return Mat2{{{{a, b}, {c, d}}}};
  }
  /// Outer product a (x) b.
  static constexpr Mat2 outer(const Vec2& a, const Vec2& b) {
    return from_rows(a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y);
  }

  constexpr double operator()(int i, int j) const { return m[i][j]; }
  constexpr double& operator()(int i, int j) { return m[i][j]; }

  constexpr Mat2 transpose() const { return from_rows(m[0][0], m[1][0], m[0][1], m[1][1]); }
  constexpr double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  constexpr double trace() const { return m[0][0] + m[1][1]; }
  constexpr Mat2 inverse() const {
    const double d = det();
    return from_rows(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d);
  }
  constexpr Mat2 sym() const {
    const double off = 0.5 * (m[0][1] + m[1][0]);
    return from_rows(m[0][0], off, off, m[1][1]);
  }

  constexpr Mat2& operator+=(const Mat2& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] += o.m[i][j];
    return *this;
  }
  constexpr Mat2& operator-=(const Mat2& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] -= o.m[i][j];
    return *this;
  }
  constexpr Mat2& operator*=(double s) {
    for (auto& row : m)
      for (double& v : row) v *= s;
    return *this;
  }
};

constexpr Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
constexpr Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
constexpr Mat2 operator*(double s, Mat2 a) { return a *= s; }
constexpr Mat2 operator*(Mat2 a, double s) { return a *= s; }
constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
  return r;
}
constexpr Vec2 operator*(const Mat2& a, const Vec2& v) {
  return {a.m[0][0] * v.x + a.m[0][1] * v.y, a.m[1][0] * v.x + a.m[1][1] * v.y};
}
/// Frobenius inner product A : B.
constexpr double ddot(const Mat2& a, const Mat2& b) {
  return a.m[0][0] * b.m[0][0] + a.m[0][1] * b.m[0][1] + a.m[1][0] * b.m[1][0] + a.m[1][1] * b.m[1][1];
}
inline double max_abs(const Mat2& a) {
  return std::max({std::abs(a.m[0][0]), std::abs(a.m[0][1]), std::abs(a.m[1][0]), std::abs(a.m[1][1])});
}

using Polygon = std::vector<Vec2>;

struct BoundingBox {
  Vec2 lo{1e300, 1e300};
  Vec2 hi{-1e300, -1e300};

  void extend(const Vec2& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  bool empty() const { return lo.x > hi.x || lo.y > hi.y; }
  bool overlaps(const BoundingBox& o, double tol = 0.0) const {
    return !(o.lo.x > hi.x + tol || o.hi.x < lo.x - tol || o.lo.y > hi.y + tol || o.hi.y < lo.y - tol);
  }
  double diagonal() const { return empty() ? 0.0 : norm(hi - lo); }
};

template <typename Range>
BoundingBox bounding_box(const Range& points) {
  BoundingBox b;
  for (const Vec2& p : points) b.extend(p);
  return b;
}

/// Signed area; positive for counterclockwise polygons.
inline double signed_area(const Polygon& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

inline double area(const Polygon& poly) { return std::abs(signed_area(poly)); }

inline double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

inline Vec2 centroid(const Polygon& poly) {
  Vec2 c;
  for (const Vec2& p : poly) c += p;
  return (1.0 / static_cast<double>(poly.size())) * c;
}

/// Point-in-triangle with a tolerance on the barycentric coordinates.
inline bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c, double tol = 0.0) {
  const double d = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / d;
  const double l2 = cross(b - a, p - a) / d;
  const double l0 = 1.0 - l1 - l2;
  return l0 >= -tol && l1 >= -tol && l2 >= -tol;
}

/// Point-in-polygon by crossing number; works for simple, possibly non-convex polygons.
inline bool point_in_polygon(const Vec2& p, const Polygon& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

namespace detail {

inline Polygon drop_near_duplicates(const Polygon& poly, double eps) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) {
    if (out.empty() || norm(p - out.back()) > eps) out.push_back(p);
  }
  while (out.size() > 1 && norm(out.front() - out.back()) <= eps) out.pop_back();
  return out;
}

}  // namespace detail

/// Intersection of two convex counterclockwise polygons (Sutherland-Hodgman).
///
/// Vertices within 1e-12 of the combined diameter are merged; results with
/// fewer than three distinct vertices or negligible area come back empty.
inline Polygon intersect_convex(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return {};
  const BoundingBox ba = bounding_box(a);
  const BoundingBox bb = bounding_box(b);
  const double h = std::max(ba.diagonal(), bb.diagonal());
  const double eps = 1e-12 * h;
  if (!ba.overlaps(bb, eps)) return {};

  Polygon out = a;
  const std::size_t nb = b.size();
  for (std::size_t e = 0; e < nb && !out.empty(); ++e) {
    const Vec2 p = b[e];
    const Vec2 q = b[(e + 1) % nb];
    const Vec2 dir = q - p;
    const double len = norm(dir);
    if (len <= eps) continue;
    auto dist = [&](const Vec2& x) { return cross(dir, x - p) / len; };

    Polygon next;
    next.reserve(out.size() + 2);
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& cur = out[i];
      const Vec2& nxt = out[(i + 1) % n];
      const double dc = dist(cur);
      const double dn = dist(nxt);
      if (dc >= -eps) next.push_back(dc < 0.0 ? cur + (-dc / len) * Vec2{-dir.y, dir.x} : cur);
      if ((dc > eps && dn < -eps) || (dc < -eps && dn > eps)) {
        const double t = dc / (dc - dn);
        next.push_back(cur + t * (nxt - cur));
      }
    }
    out = detail::drop_near_duplicates(next, eps);
    if (out.size() < 3) out.clear();
  }
  if (out.size() < 3 || area(out) <= eps * h) return {};
  return out;
}

struct Segment {
  Vec2 a;
  Vec2 b;
  double length() const { return norm(b - a); }
  Vec2 midpoint() const { return 0.5 * (a + b); }
};

/// Part of segment [a,b] inside a closed convex counterclockwise polygon (Cyrus-Beck).
/// Returns the parameter interval [t0, t1] along a + t (b - a), if nonempty.
/// Crossings are cut at the exact edge lines; `eps` only widens the parallel
/// test, so a segment lying on an edge counts as inside.
inline std::optional<std::array<double, 2>> clip_segment_parameters(const Vec2& a, const Vec2& b,
                                                                     const Polygon& poly, double eps) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = b - a;
  const std::size_t n = poly.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 p = poly[e];
    const Vec2 q = poly[(e + 1) % n];
    const Vec2 dir = q - p;
    const double len = norm(dir);
    if (len == 0.0) continue;
    // signed distance (positive inside) of a + t d is s0 + t ds
    const double s0 = cross(dir, a - p) / len;
    const double ds = cross(dir, d) / len;
    if (std::abs(ds) <= eps) {
      if (std::min(s0, s0 + ds) < -eps) return std::nullopt;
      continue;
    }
    const double t = -s0 / ds;
    if (ds > 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::array<double, 2>{t0, t1};
}

/// Segment clipped to a closed convex polygon; empty if the clipped length is <= eps.
inline std::optional<Segment> clip_segment(const Segment& s, const Polygon& poly, double eps) {
  auto t = clip_segment_parameters(s.a, s.b, poly, eps);
  if (!t) return std::nullopt;
  Segment r{s.a + (*t)[0] * (s.b - s.a), s.a + (*t)[1] * (s.b - s.a)};
  if (r.length() <= eps) return std::nullopt;
  return r;
}

}  // namespace olmfsi
