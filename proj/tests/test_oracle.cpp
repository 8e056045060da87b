#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <optional>

#include "doctest.h"
#include "lwh/errors.hpp"
#include "lwh/oracle.hpp"

using namespace lwh;

namespace {

const cplx W(1.0, 0.1);

// Total-field solve written from the equations of motion: every bond pulls
// with unit stiffness, broken bonds are dropped, pinned sites carry u = 0
// and the truncation boundary carries the incident wave.
struct TotalField {
  Lattice lat;
  cplx w;
  long L;
  std::function<bool(long, long, int, long, long, int)> broken;  // bond between two sites
  std::function<bool(long, long, int)> pinned;
  std::function<cplx(long, long, int)> uin;
  // point load on the sublattice-0 site (sx, sy)
  std::optional<std::pair<long, long>> src;
  cplx load = 0.0;

  int nsub() const { return lat == Lattice::honeycomb ? 2 : 1; }
  double mass() const { return lat == Lattice::square ? 1.0 : lat == Lattice::triangular ? 1.5 : 0.75; }

  struct Nb {
    long x, y;
    int s;
  };
  std::vector<Nb> neighbours(long x, long y, int s) const {
    if (lat == Lattice::square) return {{x + 1, y, 0}, {x - 1, y, 0}, {x, y + 1, 0}, {x, y - 1, 0}};
    if (lat == Lattice::triangular)
      return {{x + 1, y, 0}, {x - 1, y, 0}, {x, y + 1, 0}, {x, y - 1, 0}, {x - 1, y + 1, 0}, {x + 1, y - 1, 0}};
    if (s == 0) return {{x, y, 1}, {x - 1, y, 1}, {x, y - 1, 1}};
    return {{x, y, 0}, {x + 1, y, 0}, {x, y + 1, 0}};
  }

  // scattered field u^t - u^in on the full window
  FieldGrid solve() const {
    const long n = 2 * L + 1;
    auto idx = [&](long x, long y, int s) { return ((y + L) * n + (x + L)) * nsub() + s; };
    auto inside = [&](long x, long y) { return std::abs(x) <= L && std::abs(y) <= L; };
    const long N = n * n * nsub();
    std::vector<Eigen::Triplet<cplx>> t;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(N);
    for (long y = -L; y <= L; ++y)
      for (long x = -L; x <= L; ++x)
        for (int s = 0; s < nsub(); ++s) {
          long i = idx(x, y, s);
          if (pinned(x, y, s)) {
            t.emplace_back(i, i, 1.0);
            continue;
          }
          cplx diag = mass() * w * w;
          for (auto nb : neighbours(x, y, s)) {
            if (broken(x, y, s, nb.x, nb.y, nb.s)) continue;
            diag -= 1.0;
            if (inside(nb.x, nb.y))
              t.emplace_back(i, idx(nb.x, nb.y, nb.s), 1.0);
            else
              b(i) -= uin(nb.x, nb.y, nb.s);
          }
          t.emplace_back(i, i, diag);
          if (src && s == 0 && x == src->first && y == src->second) b(i) += load;
        }
    Eigen::SparseMatrix<cplx> A(N, N);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(A);
    REQUIRE(lu.info() == Eigen::Success);
    Eigen::VectorXcd u = lu.solve(b);
    FieldGrid f(lat, Window::square(L));
    for (long y = -L; y <= L; ++y)
      for (long x = -L; x <= L; ++x) {
        f.U(x, y) = u(idx(x, y, 0)) - uin(x, y, 0);
        if (nsub() == 2) f.V(x, y) = u(idx(x, y, 1)) - uin(x, y, 1);
      }
    return f;
  }
};

TotalField plane(Lattice lat, const Incidence& inc, long L) {
  TotalField tf;
  tf.lat = lat;
  tf.w = inc.omega;
  tf.L = L;
  tf.broken = [](long, long, int, long, long, int) { return false; };
  tf.pinned = [](long, long, int) { return false; };
  tf.uin = [inc](long x, long y, int s) { return s == 0 ? inc.u(x, y) : inc.v(x, y); };
  return tf;
}

// crack between rows r and r-1 on the given x range of the upper site
std::function<bool(long, long, int, long, long, int)> crack(long r, std::function<bool(long)> on) {
  return [=](long x, long y, int, long nx, long ny, int) {
    bool up = y == r && ny == r - 1, down = y == r - 1 && ny == r;
    if (!up && !down) return false;
    return on(up ? x : nx);
  };
}

MatrixKernelSpec mspec(MatrixFamily f, cplx w, int nu, int N, std::vector<long> off = {}) {
  MatrixKernelSpec s;
  s.family = f;
  s.omega = w;
  s.nu = nu;
  s.N = N;
  s.offsets = std::move(off);
  return s;
}

template <class F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("assembly bookkeeping") {
  Incidence inc = dispersion_solve(Lattice::square, W, M_PI / 6, 1.0);
  LatticeProblemSpec c = family_problem(ScalarFamily::sq_crack, inc);
  AssembledSystem a = assemble(c, 40);
  CHECK(a.unknowns() == 81 * 81);
  LatticeProblemSpec k = family_problem(ScalarFamily::sq_constraint, inc);
  CHECK(assemble(k, 40).unknowns() == 81 * 81 - 40);

  SolveReport rep;
  FieldGrid f = solve_direct(a, &rep);
  CHECK(rep.residual < 1e-10);
  CHECK(f.meta.count("solve_residual") == 1);
}

TEST_CASE("oracle matches an independent total-field solve") {
  const long L = 25;
  SUBCASE("square crack") {
    Incidence inc = dispersion_solve(Lattice::square, W, M_PI / 6, 1.0);
    TotalField tf = plane(Lattice::square, inc, L);
    tf.broken = crack(0, [](long x) { return x < 0; });
    FieldGrid ref = tf.solve();
    FieldGrid o = oracle_solve(family_problem(ScalarFamily::sq_crack, inc), L);
    CHECK(compare_fields(o, ref, Window::square(L)).rel_l2 < 1e-10);
  }
  SUBCASE("square constraint") {
    Incidence inc = dispersion_solve(Lattice::square, W, 0.4, 1.0);
    TotalField tf = plane(Lattice::square, inc, L);
    tf.pinned = [](long x, long y, int) { return y == 0 && x < 0; };
    FieldGrid ref = tf.solve();
    FieldGrid o = oracle_solve(family_problem(ScalarFamily::sq_constraint, inc), L);
    CHECK(compare_fields(o, ref, Window::square(L)).rel_l2 < 1e-10);
    double worst = 0.0;
    for (long x = -L; x < 0; ++x) worst = std::max(worst, std::abs(o.U(x, 0) + inc.u(x, 0)));
    CHECK(worst < 1e-12);
  }
  SUBCASE("triangular constraint") {
    Incidence inc = dispersion_solve(Lattice::triangular, W, 0.3, 1.0);
    TotalField tf = plane(Lattice::triangular, inc, L);
    tf.pinned = [](long x, long y, int) { return y == 0 && x < 0; };
    FieldGrid ref = tf.solve();
    FieldGrid o = oracle_solve(family_problem(ScalarFamily::tri_dirichlet, inc), L);
    CHECK(compare_fields(o, ref, Window::square(L)).rel_l2 < 1e-10);
  }
  SUBCASE("honeycomb crack") {
    Incidence inc = dispersion_solve(Lattice::honeycomb, W, 0.0, 1.0);
    TotalField tf = plane(Lattice::honeycomb, inc, L);
    tf.broken = crack(0, [](long x) { return x < 0; });
    FieldGrid ref = tf.solve();
    FieldGrid o = oracle_solve(family_problem(ScalarFamily::hex_crack, inc), L);
    CHECK(compare_fields(o, ref, Window::square(L)).rel_l2 < 1e-10);
    double dv = 0.0;
    for (long y = -L; y <= L; ++y)
      for (long x = -L; x <= L; ++x) dv = std::max(dv, std::abs(o.V(x, y) - ref.V(x, y)));
    CHECK(dv < 1e-10);
  }
  SUBCASE("opposing cracks with a point source") {
    MatrixKernelSpec s = mspec(MatrixFamily::opposing_cracks, W, 2, 3, {3});
    Incidence inc = dispersion_solve(Lattice::square, W, M_PI / 6, 1.0);
    FamilyOracle fo = family_oracle(s, inc, L);
    auto incf = fo.problem.incident_field();
    TotalField tf = plane(Lattice::square, inc, L);
    tf.uin = [incf](long x, long y, int) { return incf->u(x, y); };
    auto [sx, sy] = default_source(s);
    tf.src = std::make_pair(sx, sy);
    tf.load = incf->u(sx + 1, sy) + incf->u(sx - 1, sy) + incf->u(sx, sy + 1) + incf->u(sx, sy - 1) +
              (W * W - 4.0) * incf->u(sx, sy);
    auto lower = crack(0, [](long x) { return x < 0; });
    auto upper = crack(3, [](long x) { return x >= 3; });
    tf.broken = [=](long x, long y, int a, long nx, long ny, int b) {
      return lower(x, y, a, nx, ny, b) || upper(x, y, a, nx, ny, b);
    };
    FieldGrid ref = tf.solve();
    CHECK(compare_fields(fo.field, ref, Window::square(L)).rel_l2 < 1e-10);
  }
}

TEST_CASE("opposing cracks: printed row equations at spot sites") {
  const cplx w(1.0, 0.15);
  MatrixKernelSpec s = mspec(MatrixFamily::opposing_cracks, w, 2, 3, {3});
  Incidence inc = dispersion_solve(Lattice::square, w, M_PI / 6, 1.0);
  FamilyOracle fo = family_oracle(s, inc, 40);
  auto incf = fo.problem.incident_field();
  const long N = 3, M = 3;
  auto ut = [&](long x, long y) { return fo.field.U(x, y) + incf->u(x, y); };
  auto H = [](long k) { return k >= 0 ? 1.0 : 0.0; };
  const cplx m3 = w * w - 3.0;
  for (long x : {-4L, 2L, 7L}) {
    cplx e1 = ut(x + 1, N) + ut(x - 1, N) + ut(x, N + 1) + m3 * ut(x, N) + (ut(x, N - 1) - ut(x, N)) * H(-x + M - 1);
    cplx e2 = ut(x + 1, N - 1) + ut(x - 1, N - 1) + ut(x, N - 2) + m3 * ut(x, N - 1) +
              (ut(x, N) - ut(x, N - 1)) * H(-x + M - 1);
    cplx e3 = ut(x + 1, 0) + ut(x - 1, 0) + ut(x, 1) + m3 * ut(x, 0) + (ut(x, -1) - ut(x, 0)) * H(x);
    cplx e4 = ut(x + 1, -1) + ut(x - 1, -1) + ut(x, -2) + m3 * ut(x, -1) + (ut(x, 0) - ut(x, -1)) * H(x);
    double scale = std::abs(ut(x, 0)) + std::abs(ut(x, N));
    CHECK(std::abs(e1) < 1e-9 * scale);
    CHECK(std::abs(e2) < 1e-9 * scale);
    CHECK(std::abs(e3) < 1e-9 * scale);
    CHECK(std::abs(e4) < 1e-9 * scale);
  }
}

TEST_CASE("no defects gives no scattered field") {
  Incidence inc = dispersion_solve(Lattice::square, W, M_PI / 6, 1.0);
  LatticeProblemSpec p;
  p.lattice = Lattice::square;
  p.incidence = inc;
  FieldGrid f = oracle_solve(p, 20);
  for (auto v : f.u) REQUIRE(v == cplx(0.0));
}

TEST_CASE("damping decay away from the crack") {
  const cplx w(1.0, 0.2);
  Incidence inc = dispersion_solve(Lattice::square, w, M_PI / 6, 1.0);
  FieldGrid f = oracle_solve(family_problem(ScalarFamily::sq_crack, inc), 60);
  // the scattered field radiates from the tip; compare shells of growing radius
  auto shell = [&](long r) {
    double m = 0.0;
    for (long y = -r; y <= r; ++y)
      for (long x = -r; x <= r; ++x)
        if (std::max(std::abs(x), std::abs(y)) == r) m = std::max(m, std::abs(f.U(x, y)));
    return m;
  };
  // least-squares slope of log|u| over radii 5..40: a factor e per roughly 1/w2 sites
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 36;
  for (long r = 5; r <= 40; ++r) {
    double ly = std::log(shell(r));
    sx += double(r);
    sy += ly;
    sxx += double(r * r);
    sxy += double(r) * ly;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope < -0.8 * w.imag());
}

TEST_CASE("truncation self-convergence") {
  const cplx w(1.0, 0.2);
  Incidence inc = dispersion_solve(Lattice::square, w, M_PI / 6, 1.0);
  LatticeProblemSpec p = family_problem(ScalarFamily::sq_crack, inc);
  FieldGrid a = oracle_solve(p, 20), b = oracle_solve(p, 40), c = oracle_solve(p, 80);
  double d1 = compare_fields(a, c, Window::square(10)).rel_l2;
  double d2 = compare_fields(b, c, Window::square(10)).rel_l2;
  CHECK(d2 < 1e-3);
  CHECK(d2 < d1);
}

TEST_CASE("Bloch oracle is twisted-periodic and source free") {
  MatrixKernelSpec s = mspec(MatrixFamily::mixed_array, W, 2, 3);
  Incidence inc = dispersion_solve(Lattice::square, W, M_PI / 6, 1.0);
  FamilyOracle fo = family_oracle(s, inc, 30);
  REQUIRE(fo.problem.bloch.has_value());
  cplx psi = fo.problem.bloch->psi;
  CHECK(std::abs(psi - std::exp(cplx(0.0, -1.0) * inc.kappa_y * 3.0)) < 1e-14);
  double worst = 0.0;
  for (long y = -30; y + 3 <= 30; ++y)
    for (long x = -30; x <= 30; ++x) worst = std::max(worst, std::abs(fo.field.U(x, y + 3) - psi * fo.field.U(x, y)));
  CHECK(worst < 1e-12);
}

TEST_CASE("compare_fields") {
  FieldGrid a(Lattice::square, Window::square(5));
  for (std::size_t i = 0; i < a.u.size(); ++i) a.u[i] = cplx(double(i), 1.0);
  FieldGrid b = a;
  CHECK(compare_fields(a, b, Window::square(3)).rel_l2 == 0.0);
  for (auto& v : b.u) v *= 1.01;
  ComparisonReport r = compare_fields(b, a, Window::square(5));
  CHECK(std::abs(r.rel_l2 - 0.01) < 1e-14);
  CHECK(error_of([&] { compare_fields(a, b, Window::square(6)); }) == ErrorCode::WindowMismatch);
}

TEST_CASE("spec errors") {
  Incidence inc = dispersion_solve(Lattice::square, W, M_PI / 6, 1.0);
  LatticeProblemSpec p = family_problem(ScalarFamily::sq_crack, inc);
  CHECK(error_of([&] { assemble(p, 10); }) == ErrorCode::WindowTooSmall);
  p.defects.push_back(p.defects[0]);
  CHECK(error_of([&] { assemble(p, 30); }) == ErrorCode::InvalidSpec);

  LatticeProblemSpec q = family_problem(ScalarFamily::sq_crack, inc);
  q.defects[0].M = 15;
  CHECK(error_of([&] { assemble(q, 30); }) == ErrorCode::WindowTooSmall);

  Incidence undamped = dispersion_solve(Lattice::square, 1.0, M_PI / 6, 1.0);
  CHECK(error_of([&] { assemble(family_problem(ScalarFamily::sq_crack, undamped), 30); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("WH residuals of oracle data") {
  const cplx w(1.0, 0.15);
  Incidence inc = dispersion_solve(Lattice::square, w, M_PI / 6, 1.0);

  SUBCASE("array of cracks, and the sensitivity to a wrong power") {
    MatrixKernelSpec s = mspec(MatrixFamily::array_cracks, w, 2, 3, {0, 2});
    FamilyOracle fo = family_oracle(s, inc, 100);
    double r = wh_residual(s, fo.field, fo.problem.incident_field());
    CHECK(r <= 5e-2);
    s.perturb = true;
    CHECK(wh_residual(s, fo.field, fo.problem.incident_field()) >= 10.0 * r);
  }
  SUBCASE("opposing constraints") {
    MatrixKernelSpec s = mspec(MatrixFamily::opposing_constraints, w, 2, 3, {3});
    FamilyOracle fo = family_oracle(s, inc, 100);
    double r = wh_residual(s, fo.field, fo.problem.incident_field());
    CHECK(r <= 5e-2);
    s.perturb = true;
    CHECK(wh_residual(s, fo.field, fo.problem.incident_field()) >= 10.0 * r);
  }
  SUBCASE("scalar problems") {
    for (auto f : {ScalarFamily::sq_crack, ScalarFamily::sq_constraint, ScalarFamily::tri_dirichlet,
                   ScalarFamily::hex_crack}) {
      CAPTURE(family_name(f));
      Incidence i2 = dispersion_solve(family_lattice(f), w, f == ScalarFamily::hex_crack ? 0.0 : 0.3, 1.0);
      LatticeProblemSpec p = family_problem(f, i2);
      FieldGrid o = oracle_solve(p, 100);
      CHECK(wh_residual(f, w, o, p.incident_field()) <= 5e-2);
    }
  }
}
