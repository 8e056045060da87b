#include "lwh/oracle.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "lwh/errors.hpp"

namespace lwh {

namespace {

struct Nb {
  int dx, dy, sub;
};

const std::vector<Nb>& neighbours(Lattice lat, int sub) {
  static const std::vector<Nb> sq = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  static const std::vector<Nb> tri = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                      {0, -1, 0}, {-1, 1, 0}, {1, -1, 0}};
  static const std::vector<Nb> hu = {{0, 0, 1}, {-1, 0, 1}, {0, -1, 1}};
  static const std::vector<Nb> hv = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  switch (lat) {
    case Lattice::square: return sq;
    case Lattice::triangular: return tri;
    case Lattice::honeycomb: return sub == 0 ? hu : hv;
  }
  return sq;
}

double mass(Lattice lat) {
  switch (lat) {
    case Lattice::square: return 1.0;
    case Lattice::triangular: return 1.5;
    case Lattice::honeycomb: return 0.75;
  }
  return 1.0;
}

long pmod(long a, long p) { return ((a % p) + p) % p; }

struct Geometry {
  const std::vector<Defect>& defects;
  std::optional<BlochSpec> bloch;

  bool same_row(long y, long r) const {
    return bloch ? pmod(y, bloch->period) == pmod(r, bloch->period) : y == r;
  }
  bool pinned(long x, long y) const {
    for (auto& d : defects)
      if (d.kind == DefectKind::constraint && same_row(y, d.row) && d.covers(x)) return true;
    return false;
  }
  // bond between (x,y) and (x2,y2)
  bool broken(long x, long y, long x2, long y2) const {
    if (y == y2) return false;
    long xu = y > y2 ? x : x2, yu = std::max(y, y2);
    for (auto& d : defects)
      if (d.kind == DefectKind::crack && same_row(yu, d.row) && d.covers(xu)) return true;
    return false;
  }
};

cplx inc_at(const IncidentField& inc, int sub, long x, long y) {
  return sub == 0 ? inc.u(x, y) : inc.v(x, y);
}

}  // namespace

std::shared_ptr<const IncidentField> LatticeProblemSpec::incident_field() const {
  if (incident) return incident;
  return std::make_shared<PlaneWave>(incidence);
}

AssembledSystem assemble(const LatticeProblemSpec& spec, long L) {
  if (L < 20) throw Error(ErrorCode::WindowTooSmall, "half width " + std::to_string(L) + " < 20");
  if (!(spec.omega().imag() > 0))
    throw Error(ErrorCode::InvalidSpec, "the oracle needs Im(omega) > 0");
  std::set<std::pair<int, long>> seen;
  for (auto& d : spec.defects) {
    if (std::abs(d.M) >= L / 2.0)
      throw Error(ErrorCode::WindowTooSmall,
                  "tip offset " + std::to_string(d.M) + " too close to the truncation edge");
    if (!spec.bloch && std::abs(d.row) >= L - 1)
      throw Error(ErrorCode::WindowTooSmall, "defect row outside the window");
    long key = spec.bloch ? pmod(d.row, spec.bloch->period) : d.row;
    if (!seen.insert({int(d.kind), key}).second)
      throw Error(ErrorCode::InvalidSpec, "two defects of the same kind on row " + std::to_string(d.row));
  }
  if (spec.bloch && spec.bloch->period < 1) throw Error(ErrorCode::InvalidSpec, "Bloch period < 1");
  auto incp = spec.incident_field();
  const IncidentField& inc = *incp;
  if (inc.lattice() != spec.lattice)
    throw Error(ErrorCode::InvalidSpec, "incident field lattice does not match the problem");

  AssembledSystem sys;
  sys.lattice = spec.lattice;
  sys.bloch = spec.bloch;
  sys.nsub = spec.lattice == Lattice::honeycomb ? 2 : 1;
  sys.win = spec.bloch ? Window{-L, L, 0, spec.bloch->period - 1} : Window::square(L);
  const Window& w = sys.win;
  Geometry geo{spec.defects, spec.bloch};
  const int ns = sys.nsub;
  auto slot = [&](long x, long y, int s) {
    return std::size_t(((y - w.y0) * w.width() + (x - w.x0)) * ns + s);
  };
  std::size_t nslots = std::size_t(w.width() * w.height() * ns);
  sys.index.assign(nslots, -1);
  sys.fixed.assign(nslots, 0.0);
  long n = 0;
  for (long y = w.y0; y <= w.y1; ++y)
    for (long x = w.x0; x <= w.x1; ++x)
      for (int s = 0; s < ns; ++s) {
        if (geo.pinned(x, y))
          sys.fixed[slot(x, y, s)] = -inc_at(inc, s, x, y);
        else
          sys.index[slot(x, y, s)] = n++;
      }

  const cplx mw2 = mass(spec.lattice) * spec.omega() * spec.omega();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(std::size_t(n) * 7);
  sys.b = CVecE::Zero(n);
  for (long y = w.y0; y <= w.y1; ++y)
    for (long x = w.x0; x <= w.x1; ++x)
      for (int s = 0; s < ns; ++s) {
        long row = sys.index[slot(x, y, s)];
        if (row < 0) continue;
        cplx diag = mw2, rhs = 0.0;
        for (const Nb& nb : neighbours(spec.lattice, s)) {
          long x2 = x + nb.dx, y2 = y + nb.dy;
          if (geo.broken(x, y, x2, y2)) {
            rhs += inc_at(inc, nb.sub, x2, y2) - inc_at(inc, s, x, y);
            continue;
          }
          diag -= 1.0;
          cplx fac = 1.0;
          long yw = y2;
          if (spec.bloch) {
            long P = spec.bloch->period;
            long j = (y2 - pmod(y2, P)) / P;
            yw = y2 - j * P;
            fac = std::pow(spec.bloch->psi, double(j));
          }
          if (x2 < w.x0 || x2 > w.x1 || yw < w.y0 || yw > w.y1) continue;
          long col = sys.index[slot(x2, yw, nb.sub)];
          if (col < 0)
            rhs += inc_at(inc, nb.sub, x2, y2);
          else
            trip.emplace_back(row, col, fac);
        }
        trip.emplace_back(row, row, diag);
        sys.b(row) = rhs;
      }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  return sys;
}

FieldGrid solve_direct(const AssembledSystem& sys, SolveReport* report) {
  CVecE x = CVecE::Zero(sys.unknowns());
  double bn = sys.b.norm(), res = 0.0;
  int refine = 0;
  if (bn > 0) {
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys.A);
    if (lu.info() != Eigen::Success)
      throw Error(ErrorCode::SolveFailure, "sparse LU factorization failed: " + lu.lastErrorMessage());
    x = lu.solve(sys.b);
    res = (sys.A * x - sys.b).norm() / bn;
    while (res >= 1e-10 && refine < 3) {
      x += lu.solve(sys.b - sys.A * x);
      res = (sys.A * x - sys.b).norm() / bn;
      ++refine;
    }
    if (!(res < 1e-10))
      throw Error(ErrorCode::SolveFailure, "relative residual " + std::to_string(res));
  }
  if (report) *report = {res, refine};

  FieldGrid g(sys.lattice, sys.win);
  const Window& w = sys.win;
  std::size_t k = 0;
  for (long y = w.y0; y <= w.y1; ++y)
    for (long xx = w.x0; xx <= w.x1; ++xx)
      for (int s = 0; s < sys.nsub; ++s, ++k) {
        long i = sys.index[k];
        cplx val = i < 0 ? sys.fixed[k] : x(i);
        if (s == 0)
          g.U(xx, y) = val;
        else
          g.V(xx, y) = val;
      }
  g.meta["source"] = "oracle";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", res);
  g.meta["solve_residual"] = buf;
  if (sys.bloch) g.meta["bloch_period"] = std::to_string(sys.bloch->period);
  return g;
}

FieldGrid oracle_solve(const LatticeProblemSpec& spec, long L, SolveReport* report) {
  return solve_direct(assemble(spec, L), report);
}

FieldGrid point_source_incident(Lattice lat, cplx omega, long sx, long sy, long L) {
  LatticeProblemSpec spec;
  spec.lattice = lat;
  spec.incidence.lattice = lat;
  spec.incidence.omega = omega;
  AssembledSystem sys = assemble(spec, L);
  if (!sys.win.contains(sx, sy)) throw Error(ErrorCode::WindowTooSmall, "source outside the window");
  long src = sys.index[std::size_t(((sy - sys.win.y0) * sys.win.width() + (sx - sys.win.x0)) * sys.nsub)];
  sys.b(src) = 1.0;
  FieldGrid g = solve_direct(sys);
  cplx s = g.U(sx, sy);
  for (auto& a : g.u) a /= s;
  for (auto& a : g.v) a /= s;
  g.meta["source"] = "point_source";
  g.meta["source_site"] = std::to_string(sx) + "," + std::to_string(sy);
  return g;
}

ComparisonReport compare_fields(const FieldGrid& a, const FieldGrid& b, const Window& w) {
  if (a.lattice != b.lattice) throw Error(ErrorCode::WindowMismatch, "fields are on different lattices");
  if (!a.win.contains(w) || !b.win.contains(w))
    throw Error(ErrorCode::WindowMismatch, "comparison window not inside both fields");
  double num = 0.0, den = 0.0, mx = 0.0;
  for (long y = w.y0; y <= w.y1; ++y)
    for (long x = w.x0; x <= w.x1; ++x) {
      cplx d = a.U(x, y) - b.U(x, y);
      num += std::norm(d);
      den += std::norm(b.U(x, y));
      mx = std::max(mx, std::abs(d));
      if (a.has_v()) {
        d = a.V(x, y) - b.V(x, y);
        num += std::norm(d);
        den += std::norm(b.V(x, y));
        mx = std::max(mx, std::abs(d));
      }
    }
  ComparisonReport r;
  r.rel_l2 = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
  r.max_abs = mx;
  r.win = w;
  return r;
}

double interior_residual(const FieldGrid& f, const std::vector<Defect>& defects, cplx omega,
                         long margin) {
  const Window& w = f.win;
  const int ns = f.has_v() ? 2 : 1;
  const cplx mw2 = mass(f.lattice) * omega * omega;
  auto val = [&](int s, long x, long y) { return s == 0 ? f.U(x, y) : f.V(x, y); };
  double worst = 0.0;
  for (long y = w.y0 + 1; y < w.y1; ++y) {
    bool near = false;
    for (auto& d : defects) {
      long lo = d.kind == DefectKind::crack ? d.row - 1 : d.row;
      if (y > lo - margin && y < d.row + margin) near = true;
    }
    if (near) continue;
    for (long x = w.x0 + 1; x < w.x1; ++x)
      for (int s = 0; s < ns; ++s) {
        cplx us = val(s, x, y), r = mw2 * us;
        double scale = std::abs(us);
        for (const Nb& nb : neighbours(f.lattice, s)) {
          cplx ut = val(nb.sub, x + nb.dx, y + nb.dy);
          r += ut - us;
          scale = std::max(scale, std::abs(ut));
        }
        if (scale > 0) worst = std::max(worst, std::abs(r) / scale);
      }
  }
  return worst;
}

FieldGrid bloch_unroll(const FieldGrid& period, const BlochSpec& b, long y0, long y1) {
  const long P = b.period;
  if (period.win.y0 != 0 || period.win.y1 != P - 1)
    throw Error(ErrorCode::WindowMismatch, "field does not span exactly one period");
  FieldGrid g(period.lattice, {period.win.x0, period.win.x1, y0, y1});
  g.meta = period.meta;
  for (long y = y0; y <= y1; ++y) {
    long j = (y - pmod(y, P)) / P, yy = y - j * P;
    cplx f = std::pow(b.psi, double(j));
    for (long x = g.win.x0; x <= g.win.x1; ++x) {
      g.U(x, y) = f * period.U(x, yy);
      if (g.has_v()) g.V(x, y) = f * period.V(x, yy);
    }
  }
  return g;
}

LatticeProblemSpec family_problem(ScalarFamily f, const Incidence& inc) {
  LatticeProblemSpec p;
  p.lattice = family_lattice(f);
  p.incidence = inc;
  bool crack = f == ScalarFamily::sq_crack || f == ScalarFamily::hex_crack;
  p.defects = {{crack ? DefectKind::crack : DefectKind::constraint, 0, DefectSide::left, 0}};
  return p;
}

LatticeProblemSpec family_problem(MatrixKernelSpec& s, const Incidence& inc) {
  s.validate();
  LatticeProblemSpec p;
  p.incidence = inc;
  const long N = s.N, M = s.offset(0);
  const auto C = DefectKind::crack, R = DefectKind::constraint;
  const auto Lf = DefectSide::left, Rt = DefectSide::right;
  switch (s.family) {
    case MatrixFamily::tri_crack_2x2:
      p.lattice = Lattice::triangular;
      p.defects = {{C, 0, Lf, 0}};
      break;
    case MatrixFamily::hex_constraint_2x2:
      p.lattice = Lattice::honeycomb;
      p.defects = {{R, 0, Lf, 0}};
      break;
    case MatrixFamily::array_cracks:
    case MatrixFamily::array_constraints:
      for (int j = 0; j < s.nu; ++j)
        p.defects.push_back({s.family == MatrixFamily::array_cracks ? C : R, j * N, Lf, s.offset(j)});
      break;
    case MatrixFamily::mixed_array:
      p.defects = {{R, 0, Lf, 0}, {C, 0, Lf, 0}};
      s.psi = std::exp(-cplx(0.0, 1.0) * inc.kappa_y * double(N));
      p.bloch = BlochSpec{s.N, s.psi};
      break;
    case MatrixFamily::pair_crack_constraint:
      p.defects = {{R, N, Lf, 0}, {C, 0, Lf, 0}};
      break;
    case MatrixFamily::opposing_cracks:
      p.defects = {{C, N, Rt, M}, {C, 0, Lf, 0}};
      break;
    case MatrixFamily::opposing_constraints:
      p.defects = {{R, N, Rt, M}, {R, 0, Lf, 0}};
      break;
    case MatrixFamily::opposing_mixed:
      p.defects = {{R, N, Rt, M}, {C, 0, Lf, 0}};
      break;
  }
  if (inc.lattice != p.lattice)
    throw Error(ErrorCode::InvalidConfig, std::string(family_name(s.family)) + " needs a " +
                                              lattice_name(p.lattice) + " incidence");
  return p;
}

bool needs_point_source(MatrixFamily f) {
  return f == MatrixFamily::opposing_cracks || f == MatrixFamily::opposing_constraints ||
         f == MatrixFamily::opposing_mixed;
}

std::pair<long, long> default_source(const MatrixKernelSpec& s) {
  return {std::max(0L, s.offset(0) / 2), long(s.N) / 2};
}

FamilyOracle family_oracle(MatrixKernelSpec& s, const Incidence& inc, long L,
                           std::optional<std::pair<long, long>> source) {
  FamilyOracle out;
  out.problem = family_problem(s, inc);
  if (needs_point_source(s.family) || source) {
    auto [sx, sy] = source ? *source : default_source(s);
    out.problem.incident = std::make_shared<SampledIncident>(
        point_source_incident(out.problem.lattice, inc.omega, sx, sy, L));
  }
  out.field = oracle_solve(out.problem, L, &out.report);
  if (out.problem.bloch) out.field = bloch_unroll(out.field, *out.problem.bloch, -L, L);
  return out;
}

namespace {

cplx row_half(const FieldGrid& g, const RowComb& rc, Side side, cplx z) {
  cplx s = 0.0;
  for (auto& [y, c] : rc.rows) s += c * grid_half_sum(g, rc.vrow, y, rc.M, side, z);
  return s;
}

std::vector<cplx> read_constants(const FieldGrid& g, const std::vector<ConstantSite>& sites) {
  std::vector<cplx> out;
  for (auto& c : sites) {
    if (!g.win.contains(c.x, c.y)) throw Error(ErrorCode::WindowMismatch, c.id + " outside the field");
    out.push_back(c.vsite ? g.V(c.x, c.y) : g.U(c.x, c.y));
  }
  return out;
}

}  // namespace

double wh_residual(const MatrixKernelSpec& s, const FieldGrid& field,
                   std::shared_ptr<const IncidentField> inc, const WHResidualOptions& o) {
  CircleGrid grid(o.rho, o.nq);
  auto rows = unknown_rows(s);
  for (auto& rc : rows)
    for (auto& [y, c] : rc.rows)
      if (y < field.win.y0 || y > field.win.y1)
        throw Error(ErrorCode::WindowMismatch, "row " + std::to_string(y) + " outside the field");
  std::vector<cplx> alpha = read_constants(field, forcing_constants(s));
  AffineForcing forcing = vector_forcing(s, inc);
  const int n = s.dim();
  double worst = 0.0, cmax = 0.0;
  for (int k = 0; k < grid.nq; ++k) {
    cplx z = grid.node(k);
    CVecE fp(n), fm(n);
    for (int i = 0; i < n; ++i) {
      fp(i) = row_half(field, rows[std::size_t(i)], Side::plus, z);
      fm(i) = row_half(field, rows[std::size_t(i)], Side::minus, z);
    }
    CVecE c = forcing.eval(z, alpha);
    CVecE r = fp + eval_matrix_kernel(s, z) * fm - c;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
    cmax = std::max(cmax, c.cwiseAbs().maxCoeff());
  }
  return worst / std::max(1.0, cmax);
}

double wh_residual(ScalarFamily f, cplx omega, const FieldGrid& field,
                   std::shared_ptr<const IncidentField> inc, const WHResidualOptions& o) {
  CircleGrid grid(o.rho, o.nq);
  RowComb rc = scalar_unknown_row(f);
  std::vector<cplx> alpha = read_constants(field, scalar_constants(f));
  AffineForcing forcing = scalar_forcing(f, omega, inc);
  ScalarKernel k{f, omega};
  double worst = 0.0, cmax = 0.0;
  for (int j = 0; j < grid.nq; ++j) {
    cplx z = grid.node(j);
    cplx c = forcing.eval(z, alpha)(0);
    cplx r = row_half(field, rc, Side::plus, z) +
             eval_scalar_kernel(k, z) * row_half(field, rc, Side::minus, z) - c;
    worst = std::max(worst, std::abs(r));
    cmax = std::max(cmax, std::abs(c));
  }
  return worst / std::max(1.0, cmax);
}

}  // namespace lwh
