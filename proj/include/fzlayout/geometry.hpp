#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace fzlayout {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) noexcept {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) noexcept { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Vec2 a) noexcept { return dot(a, a); }
inline double norm(Vec2 a) noexcept { return std::sqrt(a.x * a.x + a.y * a.y); }
constexpr Vec2 perp(Vec2 a) noexcept { return {-a.y, a.x}; }

inline bool is_finite(Vec2 a) noexcept { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Node positions, indexed by node id.
using Layout = std::vector<Vec2>;

/// Per-node force vectors, indexed by node id.
using ForceField = std::vector<Vec2>;

inline bool all_finite(const std::vector<Vec2>& v) noexcept {
  for (const auto& p : v)
    if (!is_finite(p)) return false;
  return true;
}

struct BoundingBox {
  Vec2 min;
  Vec2 max;

  double width() const noexcept { return max.x - min.x; }
  double height() const noexcept { return max.y - min.y; }
};

inline BoundingBox bounding_box(const Layout& x) noexcept {
  if (x.empty()) return {};
  BoundingBox box{x.front(), x.front()};
  for (const auto& p : x) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
  }
  return box;
}

}  // namespace fzlayout
