/*
 * Copyright 2026 the nbvrsc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace nbv {

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? *this / n : Vec3{};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Axis-aligned box given by its two extreme corners, lo <= hi per axis.
struct AABB {
  Vec3 lo;
  Vec3 hi;

  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  double volume() const {
    const Vec3 e = extent();
    return e.x * e.y * e.z;
  }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
           p.z >= lo.z && p.z <= hi.z;
  }
  /// Open-overlap test: boxes touching only at a face do not overlap.
  bool overlaps(const AABB& o) const {
    return lo.x < o.hi.x && hi.x > o.lo.x && lo.y < o.hi.y && hi.y > o.lo.y &&
           lo.z < o.hi.z && hi.z > o.lo.z;
  }
  bool contains_box(const AABB& o) const {
    return contains(o.lo) && contains(o.hi);
  }

  static AABB from_center(const Vec3& c, const Vec3& size) {
    return {c - size * 0.5, c + size * 0.5};
  }
};

/// Normalizes an angle into [-pi, pi).
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a + M_PI, two_pi);
  if (a < 0.0) a += two_pi;
  return a - M_PI;
}

/// Slab test for a ray against a closed box. Returns the parameter of the
/// first intersection with t > eps, or nullopt when the ray misses. The ray
/// origin is assumed to be outside the box.
inline std::optional<double> ray_box_hit(const Vec3& origin, const Vec3& dir,
                                         const AABB& box, double eps = 1e-12) {
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  const double blo[3] = {box.lo.x, box.lo.y, box.lo.z};
  const double bhi[3] = {box.hi.x, box.hi.y, box.hi.z};
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) {
      if (o[i] < blo[i] || o[i] > bhi[i]) return std::nullopt;
      continue;
    }
    double t1 = (blo[i] - o[i]) / d[i];
    double t2 = (bhi[i] - o[i]) / d[i];
    if (t1 > t2) std::swap(t1, t2);
    t_lo = std::max(t_lo, t1);
    t_hi = std::min(t_hi, t2);
  }
  if (t_hi < t_lo || t_hi <= eps) return std::nullopt;
  return t_lo > eps ? std::optional<double>(t_lo) : std::nullopt;
}

}  // namespace nbv
