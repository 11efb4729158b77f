#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kpz {

struct LatticePoint {
  int x = 0;
  int y = 0;

  friend bool operator==(LatticePoint a, LatticePoint b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(LatticePoint a, LatticePoint b) { return !(a == b); }
  // coordinatewise partial order
  friend bool operator<=(LatticePoint a, LatticePoint b) { return a.x <= b.x && a.y <= b.y; }
};

inline LatticePoint operator+(LatticePoint a, LatticePoint b) { return {a.x + b.x, a.y + b.y}; }
inline LatticePoint operator-(LatticePoint a, LatticePoint b) { return {a.x - b.x, a.y - b.y}; }

inline constexpr LatticePoint e1{1, 0};
inline constexpr LatticePoint e2{0, 1};

// Closed integer rectangle [x0,x1] x [y0,y1].  Empty iff x0 > x1 or y0 > y1.
struct Window {
  int x0 = 0, x1 = -1;
  int y0 = 0, y1 = -1;

  bool empty() const { return x0 > x1 || y0 > y1; }
  int width() const { return empty() ? 0 : x1 - x0 + 1; }
  int height() const { return empty() ? 0 : y1 - y0 + 1; }
  bool contains(LatticePoint p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains(const Window& w) const {
    return w.empty() || (x0 <= w.x0 && w.x1 <= x1 && y0 <= w.y0 && w.y1 <= y1);
  }

  friend bool operator==(const Window& a, const Window& b) {
    return a.x0 == b.x0 && a.x1 == b.x1 && a.y0 == b.y0 && a.y1 == b.y1;
  }
};

inline std::string to_string(LatticePoint p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace kpz
