#include "verify.hpp"

#include <cmath>
#include <random>

#include "lwh/errors.hpp"
#include "lwh/oracle.hpp"
#include "lwh/whsolver.hpp"

namespace lwhcli {

using namespace lwh;
using json = nlohmann::json;

namespace {

struct Checks {
  json list = json::array();
  bool pass = true;

  void add(const std::string& name, double value, double limit, bool below = true) {
    bool ok = below ? value <= limit : value >= limit;
    pass = pass && ok;
    list.push_back({{"name", name}, {"value", value}, {"limit", limit},
                    {"relation", below ? "<=" : ">="}, {"pass", ok}});
  }
  void fail(const std::string& name, const std::string& why) {
    pass = false;
    list.push_back({{"name", name}, {"error", why}, {"pass", false}});
  }
};

const cplx kOmegas[] = {{0.5, 0.05}, {1.0, 0.1}, {2.0, 0.2}};

void suite_branches(Checks& c) {
  CircleGrid g(1.0, 4096);
  for (cplx w : kOmegas) {
    double lq = 0, rh = 0, lm = 0, tq = 0, tm = 0, hq = 0, hm = 0;
    for (int k = 0; k < g.nq; ++k) {
      cplx z = g.node(k);
      SquareBranch b = square_branches(z, w);
      lq = std::max(lq, std::abs(b.lam + 1.0 / b.lam + z + 1.0 / z - 4.0 + w * w));
      rh = std::max(rh, std::abs(b.r * b.r - b.h * b.h - 4.0));
      lm = std::max(lm, std::abs(b.lam));
      for (int lat = 0; lat < 2; ++lat) {
        cplx w2 = lat == 0 ? tri_w2(w) : hex_w2(w);
        cplx t = tri_roots(z, w2).t;
        cplx d = 6.0 - z - 1.0 / z - w2;
        double r = std::abs((1.0 + 1.0 / z) * t * t - d * t + 1.0 + z);
        (lat == 0 ? tq : hq) = std::max(lat == 0 ? tq : hq, r);
        (lat == 0 ? tm : hm) = std::max(lat == 0 ? tm : hm, std::abs(t));
      }
    }
    std::string tag = "omega=" + std::to_string(w.real()) + "," + std::to_string(w.imag()) + " ";
    c.add(tag + "lambda quadratic", lq, 1e-11);
    c.add(tag + "r^2-h^2-4", rh, 1e-12);
    c.add(tag + "max|lambda|", lm, 1.0 + 1e-12);
    c.add(tag + "t quadratic", tq, 1e-11);
    c.add(tag + "max|t|", tm, 1.0 - 1e-12);
    c.add(tag + "hex t quadratic", hq, 1e-11);
    c.add(tag + "hex max|t|", hm, 1.0 - 1e-12);
  }
}

void suite_scalar(Checks& c) {
  const cplx w(1.0, 0.1);
  for (auto f : {ScalarFamily::sq_crack, ScalarFamily::sq_constraint, ScalarFamily::tri_dirichlet,
                 ScalarFamily::hex_crack}) {
    std::string n = family_name(f);
    try {
      ScalarKernel k{f, w};
      Factorization fa = mult_factorize([k](cplx z) { return eval_scalar_kernel(k, z); },
                                        CircleGrid(1.0, 4096));
      c.add(n + " winding", std::abs(fa.winding), 0);
      c.add(n + " factor residual", fa.residual_offgrid, 1e-8);
      c.add(n + " factor leakage", std::max(fa.leak_plus, fa.leak_minus), 1e-9);
      Incidence inc = dispersion_solve(family_lattice(f), w, M_PI / 6, 1.0);
      WHSolution s = solve_scalar(make_scalar_problem(f, inc, CircleGrid(1.0, 4096)));
      c.add(n + " WH residual", s.residual, 1e-8);
      c.add(n + " WH support leakage", s.support_leak, 1e-10);
      if (!s.constants.empty()) c.add(n + " closure condition", s.closure_cond, 1e6);
    } catch (const Error& e) {
      c.fail(n, e.what());
    }
  }
}

MatrixKernelSpec mspec(MatrixFamily f, cplx w, int nu, int N, std::vector<long> off) {
  MatrixKernelSpec s;
  s.family = f;
  s.omega = w;
  s.nu = nu;
  s.N = N;
  s.offsets = std::move(off);
  return s;
}

void suite_dets(Checks& c) {
  const cplx w(1.0, 0.1);
  CircleGrid g(1.0, 256);
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> off(0, 8);
  std::uniform_real_distribution<double> ph(-M_PI, M_PI);
  for (auto f : all_matrix_families()) {
    if (f == MatrixFamily::tri_crack_2x2 || f == MatrixFamily::hex_constraint_2x2) continue;
    for (int nu : {2, 3, 5})
      for (int N : {1, 2, 4}) {
        bool array = f == MatrixFamily::array_cracks || f == MatrixFamily::array_constraints;
        if (!array && nu != 2) continue;
        std::vector<long> o;
        for (int j = 0; j < (array ? nu : 1); ++j) o.push_back(off(rng));
        MatrixKernelSpec s = mspec(f, w, nu, N, o);
        s.psi = 0.9 * std::exp(cplx(0.0, ph(rng)));
        bool unit = f == MatrixFamily::opposing_cracks || f == MatrixFamily::opposing_constraints;
        double worst = 0.0;
        for (int k = 0; k < g.nq; ++k) {
          cplx z = g.node(k);
          cplx d = eval_matrix_kernel(s, z).determinant(), e = det_closed_form(s, z);
          worst = std::max(worst, unit ? std::abs(d - 1.0) : std::abs(d - e) / std::abs(e));
        }
        std::string name = std::string(family_name(f)) + (array ? " nu=" + std::to_string(nu) : "") +
                           " N=" + std::to_string(N) + (unit ? " |det-1|" : " det rel err");
        c.add(name, worst, unit ? 1e-12 : 1e-10);
      }
  }
}

void suite_dk(Checks& c) {
  const cplx w(1.0, 0.1);
  CircleGrid g(1.0, 256);
  for (auto f : {MatrixFamily::tri_crack_2x2, MatrixFamily::hex_constraint_2x2}) {
    MatrixKernelSpec s = mspec(f, w, 2, 1, {});
    DKForm dk = dk_form(s);
    double ek = 0, er = 0, ed = 0;
    for (int k = 0; k < g.nq; ++k) {
      cplx z = g.node(k);
      Eigen::Matrix2cd K = eval_matrix_kernel(s, z);
      ek = std::max(ek, (K - dk.K(z)).cwiseAbs().maxCoeff() / K.cwiseAbs().maxCoeff());
      Eigen::Matrix2cd R = DKForm::R(z);
      er = std::max(er, (R * R - z * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
      cplx a1 = dk.a1(z), a2 = dk.a2(z);
      ed = std::max(ed, std::abs(K.determinant() * (a1 * a1 - z * a2 * a2) - 1.0));
    }
    std::string n = family_name(f);
    c.add(n + " K vs DK form", ek, 1e-12);
    c.add(n + " R^2 = zI", er, 1e-12);
    if (f == MatrixFamily::tri_crack_2x2) c.add(n + " det identity", ed, 1e-12);
  }
}

void suite_limits(Checks& c) {
  const cplx w(1.0, 0.1);
  CircleGrid g(1.0, 64);
  for (auto f : {MatrixFamily::array_cracks, MatrixFamily::array_constraints,
                 MatrixFamily::pair_crack_constraint, MatrixFamily::opposing_cracks,
                 MatrixFamily::opposing_constraints, MatrixFamily::opposing_mixed}) {
    double spread = 0.0;
    for (int k = 0; k < g.nq; ++k) {
      cplx z = g.node(k);
      double lam = std::abs(square_branches(z, w).lam);
      double lo = INFINITY, hi = 0.0;
      for (int N : {10, 15, 20}) {
        MatrixKernelSpec s = mspec(f, w, 2, N, {});
        CMat d = eval_matrix_kernel(s, z) - diag_limit_defect(s)(z);
        double e = d.cwiseAbs().rowwise().sum().maxCoeff() / std::pow(lam, N);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      spread = std::max(spread, hi / lo);
    }
    c.add(std::string(family_name(f)) + " |K_N - limit| / |lambda|^N spread", spread, 3.0);
  }
}

void suite_residuals(Checks& c, long L) {
  const cplx w(1.0, 0.15);
  struct Case {
    MatrixFamily f;
    int nu, N;
    std::vector<long> off;
  };
  const std::vector<Case> cases = {
      {MatrixFamily::array_cracks, 2, 3, {0, 2}},
      {MatrixFamily::array_cracks, 3, 3, {0, 2, -3}},
      {MatrixFamily::array_constraints, 2, 3, {0, 2}},
      {MatrixFamily::array_constraints, 3, 2, {1, -2, 0}},
      {MatrixFamily::mixed_array, 2, 3, {}},
      {MatrixFamily::pair_crack_constraint, 2, 3, {}},
      {MatrixFamily::opposing_cracks, 2, 3, {3}},
      {MatrixFamily::opposing_constraints, 2, 3, {3}},
      {MatrixFamily::opposing_mixed, 2, 3, {3}},
  };
  for (auto& k : cases) {
    std::string n = std::string(family_name(k.f)) +
                    (k.f == MatrixFamily::array_cracks || k.f == MatrixFamily::array_constraints
                         ? " nu=" + std::to_string(k.nu)
                         : "");
    try {
      MatrixKernelSpec s = mspec(k.f, w, k.nu, k.N, k.off);
      Incidence inc = dispersion_solve(Lattice::square, w, M_PI / 6, 1.0);
      FamilyOracle o = family_oracle(s, inc, L);
      auto incf = o.problem.incident_field();
      double r = wh_residual(s, o.field, incf);
      s.perturb = true;
      double rp = wh_residual(s, o.field, incf);
      c.add(n + " wh_residual", r, 5e-2);
      c.add(n + " perturbed/correct", rp / r, 10.0, false);
    } catch (const Error& e) {
      c.fail(n, e.what());
    }
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"branches", "scalar", "dets", "dk", "limits", "residuals", "all"};
  return n;
}

json run_suite(const std::string& name, long L) {
  Checks c;
  bool all = name == "all";
  if (all || name == "branches") suite_branches(c);
  if (all || name == "scalar") suite_scalar(c);
  if (all || name == "dets") suite_dets(c);
  if (all || name == "dk") suite_dk(c);
  if (all || name == "limits") suite_limits(c);
  if (all || name == "residuals") suite_residuals(c, L);
  return {{"suite", name}, {"checks", c.list}, {"pass", c.pass}};
}

}  // namespace lwhcli
