#include "lwh/whsolver.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lwh/errors.hpp"

namespace lwh {

namespace {

cplx mean(const CVec& v) {
  cplx s = 0.0;
  for (auto& x : v) s += x;
  return s / double(v.size());
}

// coefficient of z^n of the function sampled on the grid
cplx grid_coeff(const CVec& f, const CircleGrid& g, int n) {
  cplx s = 0.0;
  for (int k = 0; k < g.nq; ++k) s += f[std::size_t(k)] * std::pow(g.node(k), -n);
  return s / double(g.nq);
}

std::string fmt(cplx c) {
  std::ostringstream os;
  os.precision(17);
  os << c.real() << "," << c.imag();
  return os.str();
}

}  // namespace

ScalarWHProblem make_scalar_problem(ScalarFamily f, const Incidence& inc, const CircleGrid& grid) {
  if (inc.lattice != family_lattice(f))
    throw Error(ErrorCode::InvalidConfig, std::string(family_name(f)) + " needs a " +
                                              lattice_name(family_lattice(f)) + " incidence");
  auto [lo, hi] = annulus_bounds(inc);
  if (!(grid.rho > lo && grid.rho < hi))
    throw Error(ErrorCode::DivergentSeries, "grid radius " + std::to_string(grid.rho) +
                                                " outside annulus (" + std::to_string(lo) + ", " +
                                                std::to_string(hi) + ")");
  ScalarWHProblem p;
  p.kernel = {f, inc.omega};
  p.incidence = inc;
  p.incident = std::make_shared<PlaneWave>(inc);
  p.forcing = scalar_forcing(f, inc.omega, p.incident);
  p.grid = grid;
  return p;
}

Closure close_constants(const ScalarWHProblem& p, const WHSolution& s) {
  const CircleGrid& g = p.grid;
  const std::size_t nq = std::size_t(g.nq);
  const std::size_t nk = p.forcing.terms.size();
  Closure out;
  if (nk == 0) return out;
  if (s.columns.size() != nk + 1)
    throw Error(ErrorCode::LengthMismatch, "affine solution has the wrong column count");

  // G(alpha) = g0 + Gm alpha
  Eigen::VectorXcd g0(nk);
  Eigen::MatrixXcd Gm(nk, nk);
  auto put = [&](std::size_t row, std::size_t col, cplx v) {
    if (col == 0)
      g0(Eigen::Index(row)) = v;
    else
      Gm(Eigen::Index(row), Eigen::Index(col - 1)) = v;
  };

  switch (p.kernel.family) {
    case ScalarFamily::sq_constraint: {
      // u_{0,0} is the constant term of u_0^+ = u_1/lambda + u0in^-
      CVec lam(nq);
      for (std::size_t k = 0; k < nq; ++k) lam[k] = square_branches(g.node(int(k)), p.kernel.omega).lam;
      for (std::size_t c = 0; c <= nk; ++c) {
        CVec q(nq);
        for (std::size_t k = 0; k < nq; ++k)
          q[k] = (s.columns[c].fplus[k] + s.columns[c].fminus[k]) / lam[k];
        put(0, c, mean(q));
      }
      break;
    }
    case ScalarFamily::tri_dirichlet: {
      // u_{-1,1}: coefficient of z of u_1; u_{0,0}: constant term of
      // u_0^+ = (2(1+1/z) u_1^+ - Y)/d, Y = u^in_{-1,0} - 2 u_{-1,1} + z u_{0,0}
      cplx w2 = tri_w2(p.kernel.omega);
      cplx uin = p.incident->u(-1, 0);
      for (std::size_t c = 0; c <= nk; ++c) {
        CVec full(nq), q(nq);
        for (std::size_t k = 0; k < nq; ++k) {
          cplx z = g.node(int(k));
          cplx d = 6.0 - z - 1.0 / z - w2;
          cplx ymin = c == 0 ? -uin : c == 1 ? cplx(2.0) : -z;
          full[k] = s.columns[c].fplus[k] + s.columns[c].fminus[k];
          q[k] = (2.0 * (1.0 + 1.0 / z) * s.columns[c].fplus[k] + ymin) / d;
        }
        put(0, c, grid_coeff(full, g, 1));
        put(1, c, mean(q));
      }
      break;
    }
    default:
      throw Error(ErrorCode::InvalidSpec, "no closure rule for this family");
  }

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(Eigen::Index(nk), Eigen::Index(nk)) - Gm;
  out.det = std::abs(A.determinant());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  auto sv = svd.singularValues();
  out.cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (out.det < 1e-10)
    throw Error(ErrorCode::IllConditionedClosure, "det(I - dG) = " + std::to_string(out.det));
  Eigen::VectorXcd a = A.partialPivLu().solve(g0);
  for (Eigen::Index i = 0; i < a.size(); ++i) out.alpha.push_back(a(i));
  return out;
}

namespace {

WHColumn solve_column(const Factorization& f, const CVec& c, const CircleGrid& g) {
  const std::size_t nq = std::size_t(g.nq);
  if (c.size() != nq) throw Error(ErrorCode::LengthMismatch, "forcing samples do not match the grid");
  WHColumn col;
  col.c = c;
  CVec G(nq);
  for (std::size_t k = 0; k < nq; ++k) G[k] = c[k] / f.kplus_samples[k];
  SplitPair sp = additive_split(coefficients(G, g));
  CVec Cp = evaluate_on_grid(sp.plus), Cm = evaluate_on_grid(sp.minus);
  col.fplus.resize(nq);
  col.fminus.resize(nq);
  for (std::size_t k = 0; k < nq; ++k) {
    col.fplus[k] = f.kplus_samples[k] * Cp[k];
    col.fminus[k] = Cm[k] / f.kminus_samples[k];
  }
  return col;
}

double support_leak(const LaurentSeries& fp, const LaurentSeries& fm) {
  double big = std::max(fp.max_abs(), fm.max_abs()), leak = 0.0;
  for (int n = fp.nmin(); n <= fp.nmax(); ++n) leak = std::max(leak, std::abs(n >= 1 ? fp.coeff(n) : fm.coeff(n)));
  return big > 0 ? leak / big : 0.0;
}

}  // namespace

WHSolution solve_samples(const CVec& kernel, const CVec& c, const CircleGrid& g) {
  const std::size_t nq = std::size_t(g.nq);
  WHSolution s;
  s.kernel_samples = kernel;
  s.factors = mult_factorize(kernel, g);
  s.columns.push_back(solve_column(s.factors, c, g));
  s.fplus_samples = s.columns[0].fplus;
  s.fminus_samples = s.columns[0].fminus;
  s.f_plus = coefficients(s.fplus_samples, g);
  s.f_minus = coefficients(s.fminus_samples, g);
  for (std::size_t k = 0; k < nq; ++k) {
    cplx r = s.fplus_samples[k] + kernel[k] * s.fminus_samples[k] - c[k];
    s.residual = std::max(s.residual, std::abs(r) / std::max(1.0, std::abs(c[k])));
  }
  s.residual_offgrid = s.residual;
  s.support_leak = support_leak(s.f_plus, s.f_minus);
  return s;
}

WHSolution solve_scalar(const ScalarWHProblem& p) {
  const CircleGrid& g = p.grid;
  const std::size_t nq = std::size_t(g.nq);
  WHSolution s;
  ScalarKernel kern = p.kernel;
  auto kfun = [kern](cplx z) { return eval_scalar_kernel(kern, z); };
  s.kernel_samples = sample(kfun, g);
  s.factors = mult_factorize(s.kernel_samples, g);

  auto column = [&](const VecFn& fn) {
    return solve_column(s.factors, sample([&fn](cplx z) { return fn(z)(0); }, g), g);
  };
  s.columns.push_back(column(p.forcing.base));
  for (auto& t : p.forcing.terms) {
    s.columns.push_back(column(t.fn));
    s.constant_ids.push_back(t.id);
  }

  Closure cl = close_constants(p, s);
  s.constants = cl.alpha;
  s.closure_det = cl.det;
  s.closure_cond = cl.cond;

  s.fplus_samples = s.columns[0].fplus;
  s.fminus_samples = s.columns[0].fminus;
  CVec c = s.columns[0].c;
  for (std::size_t j = 0; j < s.constants.size(); ++j)
    for (std::size_t k = 0; k < nq; ++k) {
      s.fplus_samples[k] += s.constants[j] * s.columns[j + 1].fplus[k];
      s.fminus_samples[k] += s.constants[j] * s.columns[j + 1].fminus[k];
      c[k] += s.constants[j] * s.columns[j + 1].c[k];
    }
  s.f_plus = coefficients(s.fplus_samples, g);
  s.f_minus = coefficients(s.fminus_samples, g);

  for (std::size_t k = 0; k < nq; ++k) {
    cplx r = s.fplus_samples[k] + s.kernel_samples[k] * s.fminus_samples[k] - c[k];
    s.residual = std::max(s.residual, std::abs(r) / std::max(1.0, std::abs(c[k])));
  }

  CVec fp = evaluate_on_grid(s.f_plus, 0.5), fm = evaluate_on_grid(s.f_minus, 0.5);
  for (std::size_t k = 0; k < nq; ++k) {
    cplx z = g.node(int(k), 0.5);
    cplx cz = p.forcing.eval(z, s.constants)(0);
    cplx r = fp[k] + kfun(z) * fm[k] - cz;
    s.residual_offgrid = std::max(s.residual_offgrid, std::abs(r) / std::max(1.0, std::abs(cz)));
  }

  s.support_leak = support_leak(s.f_plus, s.f_minus);
  return s;
}

CVec inverse_transform_row(const LaurentSeries& s, long x0, long x1) {
  CVec out;
  for (long x = x0; x <= x1; ++x) out.push_back(s.coeff(int(-x)));
  return out;
}

FieldGrid reconstruct_field(const ScalarWHProblem& p, const WHSolution& s, const Window& w) {
  const CircleGrid& g = p.grid;
  const std::size_t nq = std::size_t(g.nq);
  const ScalarFamily fam = p.kernel.family;
  const cplx omega = p.kernel.omega;
  const Lattice lat = family_lattice(fam);

  long ymax = std::max(w.y1, fam == ScalarFamily::sq_constraint || fam == ScalarFamily::tri_dirichlet
                                 ? -w.y0
                                 : -1 - w.y0);
  ymax = std::max(ymax, 0L);
  long xlo = w.x0, xhi = w.x1;
  if (fam == ScalarFamily::tri_dirichlet) xlo -= ymax;
  if (fam == ScalarFamily::hex_crack) xlo -= ymax + 1;
  long lim = g.nq / 4;
  if (std::max(std::abs(xlo), std::abs(xhi)) >= lim || ymax >= lim)
    throw Error(ErrorCode::WindowTooLarge,
                "window needs |x|, y up to " + std::to_string(std::max({std::abs(xlo), std::abs(xhi), ymax})) +
                    " but the grid resolves only " + std::to_string(lim));

  // full transform of row 0 and the per-row multiplier
  CVec U0(nq), P(nq), vfac(nq, 0.0);
  for (std::size_t k = 0; k < nq; ++k) {
    cplx z = g.node(int(k));
    cplx f = s.fplus_samples[k] + s.fminus_samples[k];
    switch (fam) {
      case ScalarFamily::sq_crack:
        P[k] = square_branches(z, omega).lam;
        U0[k] = f;
        break;
      case ScalarFamily::sq_constraint:
        P[k] = square_branches(z, omega).lam;
        U0[k] = f / P[k];
        break;
      case ScalarFamily::tri_dirichlet: {
        cplx w2 = tri_w2(omega);
        P[k] = tri_roots(z, w2).t;
        cplx d = 6.0 - z - 1.0 / z - w2;
        cplx Y = p.incident->u(-1, 0) - 2.0 * s.constants[0] + z * s.constants[1];
        U0[k] = (2.0 * (1.0 + 1.0 / z) * s.fplus_samples[k] - Y) / d -
                p.incident->half_u(0, 0, Side::minus, z);
        break;
      }
      case ScalarFamily::hex_crack:
        P[k] = tri_roots(z, hex_w2(omega)).t;
        U0[k] = f;
        vfac[k] = (1.0 + z + P[k]) / hex_cw(omega);
        break;
    }
  }

  std::map<long, CVec> urow, vrow;
  CVec Uy = U0;
  for (long y = 0; y <= ymax; ++y) {
    urow[y] = inverse_transform_row(coefficients(Uy, g), xlo, xhi);
    if (fam == ScalarFamily::hex_crack) {
      CVec Vy(nq);
      for (std::size_t k = 0; k < nq; ++k) Vy[k] = Uy[k] * vfac[k];
      vrow[y] = inverse_transform_row(coefficients(Vy, g), xlo, xhi);
    }
    for (std::size_t k = 0; k < nq; ++k) Uy[k] *= P[k];
  }
  auto U = [&](long x, long y) { return urow.at(y)[std::size_t(x - xlo)]; };
  auto V = [&](long x, long y) { return vrow.at(y)[std::size_t(x - xlo)]; };

  FieldGrid out(lat, w);
  for (long y = w.y0; y <= w.y1; ++y)
    for (long x = w.x0; x <= w.x1; ++x) {
      switch (fam) {
        case ScalarFamily::sq_crack:
          out.U(x, y) = y >= 0 ? U(x, y) : -U(x, -1 - y);
          break;
        case ScalarFamily::sq_constraint:
          out.U(x, y) = U(x, std::abs(y));
          break;
        case ScalarFamily::tri_dirichlet:
          out.U(x, y) = y >= 0 ? U(x, y) : U(x + y, -y);
          break;
        case ScalarFamily::hex_crack:
          if (y >= 0) {
            out.U(x, y) = U(x, y);
            out.V(x, y) = V(x, y);
          } else {
            long yy = -1 - y;
            out.U(x, y) = -V(x - 1 - yy, yy);
            out.V(x, y) = -U(x - yy, yy);
          }
          break;
      }
    }
  out.meta["source"] = "wh";
  out.meta["family"] = family_name(fam);
  out.meta["omega"] = fmt(omega);
  std::ostringstream th;
  th.precision(17);
  th << p.incidence.theta;
  out.meta["theta"] = th.str();
  out.meta["amplitude"] = fmt(p.incidence.amplitude);
  return out;
}

}  // namespace lwh
