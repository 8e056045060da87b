#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lwh/branches.hpp"

namespace lwh {

struct Window {
  long x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // inclusive
  long width() const { return x1 - x0 + 1; }
  long height() const { return y1 - y0 + 1; }
  bool contains(long x, long y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool contains(const Window& w) const { return w.x0 >= x0 && w.x1 <= x1 && w.y0 >= y0 && w.y1 <= y1; }
  static Window square(long half) { return {-half, half, -half, half}; }
};

// Site values on a rectangular window; v is used only on the honeycomb lattice.
struct FieldGrid {
  Lattice lattice = Lattice::square;
  Window win;
  std::vector<cplx> u, v;
  std::map<std::string, std::string> meta;

  FieldGrid() = default;
  FieldGrid(Lattice l, Window w);
  bool has_v() const { return lattice == Lattice::honeycomb; }
  std::size_t index(long x, long y) const {
    return std::size_t((y - win.y0) * win.width() + (x - win.x0));
  }
  cplx& U(long x, long y) { return u[index(x, y)]; }
  cplx& V(long x, long y) { return v[index(x, y)]; }
  cplx U(long x, long y) const { return win.contains(x, y) ? u[index(x, y)] : cplx(0.0); }
  cplx V(long x, long y) const { return win.contains(x, y) && has_v() ? v[index(x, y)] : cplx(0.0); }
};

void write_field_csv(std::ostream& os, const FieldGrid& g);
FieldGrid read_field_csv(std::istream& is);

}  // namespace lwh
