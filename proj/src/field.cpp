#include "lwh/field.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "lwh/errors.hpp"

namespace lwh {

FieldGrid::FieldGrid(Lattice l, Window w) : lattice(l), win(w) {
  if (w.x1 < w.x0 || w.y1 < w.y0) throw Error(ErrorCode::InvalidSpec, "empty window");
  std::size_t n = std::size_t(w.width() * w.height());
  u.assign(n, 0.0);
  if (has_v()) v.assign(n, 0.0);
}

namespace {

std::string num(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

}  // namespace

void write_field_csv(std::ostream& os, const FieldGrid& g) {
  os << "# lattice=" << lattice_name(g.lattice) << "\n";
  os << "# window=" << g.win.x0 << "," << g.win.x1 << "," << g.win.y0 << "," << g.win.y1 << "\n";
  for (auto& [k, val] : g.meta) os << "# " << k << "=" << val << "\n";
  os << (g.has_v() ? "x,y,re_u,im_u,re_v,im_v\n" : "x,y,re_u,im_u\n");
  for (long y = g.win.y0; y <= g.win.y1; ++y)
    for (long x = g.win.x0; x <= g.win.x1; ++x) {
      cplx a = g.U(x, y);
      os << x << "," << y << "," << num(a.real()) << "," << num(a.imag());
      if (g.has_v()) {
        cplx b = g.V(x, y);
        os << "," << num(b.real()) << "," << num(b.imag());
      }
      os << "\n";
    }
}

FieldGrid read_field_csv(std::istream& is) {
  std::string line;
  Lattice lat = Lattice::square;
  Window w;
  bool have_win = false;
  std::map<std::string, std::string> meta;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
      if (key == "lattice") {
        lat = parse_lattice(val);
      } else if (key == "window") {
        if (std::sscanf(val.c_str(), "%ld,%ld,%ld,%ld", &w.x0, &w.x1, &w.y0, &w.y1) != 4)
          throw Error(ErrorCode::InvalidConfig, "bad window header");
        have_win = true;
      } else {
        meta[key] = val;
      }
      continue;
    }
    if (line[0] == 'x') continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(std::move(r));
  }
  if (!have_win) throw Error(ErrorCode::InvalidConfig, "field CSV lacks a window header");
  FieldGrid g(lat, w);
  g.meta = meta;
  std::size_t need = g.has_v() ? 6 : 4;
  for (auto& r : rows) {
    if (r.size() < need) throw Error(ErrorCode::InvalidConfig, "short CSV row");
    long x = long(r[0]), y = long(r[1]);
    if (!w.contains(x, y)) throw Error(ErrorCode::InvalidConfig, "CSV site outside window");
    g.U(x, y) = cplx(r[2], r[3]);
    if (g.has_v()) g.V(x, y) = cplx(r[4], r[5]);
  }
  return g;
}

}  // namespace lwh
