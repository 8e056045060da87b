// lwh: lattice Wiener-Hopf kernels, factorization, scalar solves and the
// finite-lattice oracle.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "lwh/errors.hpp"
#include "lwh/oracle.hpp"
#include "lwh/whsolver.hpp"
#include "verify.hpp"

using namespace lwhcli;
using lwh::CircleGrid;
using lwh::Error;
using lwh::ErrorCode;
using lwh::FieldGrid;
using lwh::Window;

namespace {

std::string num(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path + "'");
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

FieldGrid crop(const FieldGrid& g, const Window& w) {
  if (!g.win.contains(w)) throw Error(ErrorCode::WindowMismatch, "window exceeds the field");
  FieldGrid out(g.lattice, w);
  out.meta = g.meta;
  for (long y = w.y0; y <= w.y1; ++y)
    for (long x = w.x0; x <= w.x1; ++x) {
      out.U(x, y) = g.U(x, y);
      if (g.has_v()) out.V(x, y) = g.V(x, y);
    }
  return out;
}

std::string field_text(const FieldGrid& g) {
  std::ostringstream os;
  write_field_csv(os, g);
  return os.str();
}

lwh::Incidence make_incidence(const RunConfig& c) {
  return lwh::dispersion_solve(config_lattice(c), c.omega, c.theta, c.amplitude);
}

json incidence_json(const lwh::Incidence& inc) {
  return {{"lattice", lwh::lattice_name(inc.lattice)},
          {"omega", complex_json(inc.omega)},
          {"theta", inc.theta},
          {"amplitude", complex_json(inc.amplitude)},
          {"kappa_x", complex_json(inc.kappa_x)},
          {"kappa_y", complex_json(inc.kappa_y)}};
}

std::string header(const RunConfig& c) {
  std::ostringstream os;
  os << "# family=" << c.family << "\n# omega=" << num(c.omega.real()) << "," << num(c.omega.imag())
     << "\n# nq=" << c.nq << "\n# rho=" << num(c.rho) << "\n";
  return os.str();
}

int cmd_kernel(const RunConfig& c) {
  CircleGrid g(c.rho, c.nq);
  std::ostringstream os;
  os << header(c);
  lwh::ScalarFamily sf;
  if (lwh::parse_scalar_family(c.family, sf)) {
    lwh::ScalarKernel k{sf, c.omega};
    os << "k,re_z,im_z,re_K,im_K\n";
    for (int i = 0; i < g.nq; ++i) {
      lwh::cplx z = g.node(i), v = lwh::eval_scalar_kernel(k, z);
      os << i << "," << num(z.real()) << "," << num(z.imag()) << "," << num(v.real()) << ","
         << num(v.imag()) << "\n";
    }
  } else {
    lwh::MatrixKernelSpec s = matrix_spec(c);
    const int n = s.dim();
    os << "# dim=" << n << "\nk,re_z,im_z";
    for (int r = 0; r < n; ++r)
      for (int q = 0; q < n; ++q) os << ",re_K" << r << q << ",im_K" << r << q;
    os << "\n";
    for (int i = 0; i < g.nq; ++i) {
      lwh::cplx z = g.node(i);
      lwh::CMat K = lwh::eval_matrix_kernel(s, z);
      os << i << "," << num(z.real()) << "," << num(z.imag());
      for (int r = 0; r < n; ++r)
        for (int q = 0; q < n; ++q) os << "," << num(K(r, q).real()) << "," << num(K(r, q).imag());
      os << "\n";
    }
  }
  emit(c.out, os.str());
  return 0;
}

int cmd_factorize(const RunConfig& c) {
  lwh::ScalarFamily sf;
  lwh::parse_scalar_family(c.family, sf);
  lwh::ScalarKernel k{sf, c.omega};
  CircleGrid g(c.rho, c.nq);
  lwh::Factorization f = lwh::mult_factorize([k](lwh::cplx z) { return lwh::eval_scalar_kernel(k, z); }, g);
  if (!c.out.empty()) {
    std::ostringstream os;
    os << header(c) << "n,re_kplus,im_kplus,re_kminus,im_kminus\n";
    for (int n = f.kplus.nmin(); n <= f.kplus.nmax(); ++n)
      os << n << "," << num(f.kplus.coeff(n).real()) << "," << num(f.kplus.coeff(n).imag()) << ","
         << num(f.kminus.coeff(n).real()) << "," << num(f.kminus.coeff(n).imag()) << "\n";
    emit(c.out, os.str());
  }
  json r = {{"family", c.family},     {"omega", complex_json(c.omega)},
            {"nq", c.nq},             {"rho", c.rho},
            {"winding", f.winding},   {"residual", f.residual},
            {"residual_offgrid", f.residual_offgrid},
            {"leak_plus", f.leak_plus}, {"leak_minus", f.leak_minus}};
  emit(c.report, dump(r));
  return 0;
}

int cmd_solve(const RunConfig& c) {
  lwh::ScalarFamily sf;
  lwh::parse_scalar_family(c.family, sf);
  lwh::Incidence inc = make_incidence(c);
  lwh::ScalarWHProblem p = lwh::make_scalar_problem(sf, inc, CircleGrid(c.rho, c.nq));
  lwh::WHSolution s = lwh::solve_scalar(p);
  FieldGrid f = lwh::reconstruct_field(p, s, Window::square(c.window));
  if (!c.out.empty()) emit(c.out, field_text(f));
  json consts = json::object();
  for (std::size_t i = 0; i < s.constants.size(); ++i) consts[s.constant_ids[i]] = complex_json(s.constants[i]);
  json r = {{"family", c.family},
            {"incidence", incidence_json(inc)},
            {"nq", c.nq},
            {"rho", c.rho},
            {"window", c.window},
            {"winding", s.factors.winding},
            {"factor_residual", s.factors.residual},
            {"residual", s.residual},
            {"residual_offgrid", s.residual_offgrid},
            {"support_leak", s.support_leak},
            {"constants", consts},
            {"closure_det", s.closure_det},
            {"closure_cond", s.closure_cond}};
  emit(c.report, dump(r));
  return 0;
}

int cmd_oracle(const RunConfig& c) {
  lwh::Incidence inc = make_incidence(c);
  json r = {{"family", c.family}, {"incidence", incidence_json(inc)}, {"L", c.L}, {"window", c.window}};
  FieldGrid field;
  lwh::ScalarFamily sf;
  if (lwh::parse_scalar_family(c.family, sf)) {
    lwh::LatticeProblemSpec p = lwh::family_problem(sf, inc);
    lwh::SolveReport rep;
    field = lwh::oracle_solve(p, c.L, &rep);
    r["solve_residual"] = rep.residual;
    r["wh_residual"] = lwh::wh_residual(sf, c.omega, field, p.incident_field());
  } else {
    lwh::MatrixKernelSpec s = matrix_spec(c);
    lwh::FamilyOracle o = lwh::family_oracle(s, inc, c.L, c.source);
    field = o.field;
    r["solve_residual"] = o.report.residual;
    r["wh_residual"] = lwh::wh_residual(s, field, o.problem.incident_field());
    if (o.problem.incident) {
      auto [sx, sy] = c.source ? *c.source : lwh::default_source(s);
      r["point_source"] = {sx, sy};
    }
    if (o.problem.bloch) r["psi"] = complex_json(o.problem.bloch->psi);
  }
  field.meta["family"] = c.family;
  if (!c.out.empty()) emit(c.out, field_text(crop(field, Window::square(c.window))));
  emit(c.report, dump(r));
  return 0;
}

FieldGrid read_field(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "'");
  return lwh::read_field_csv(f);
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& win, const std::string& report) {
  FieldGrid fa = read_field(a), fb = read_field(b);
  Window w;
  if (win.empty()) {
    w = {std::max(fa.win.x0, fb.win.x0), std::min(fa.win.x1, fb.win.x1),
         std::max(fa.win.y0, fb.win.y0), std::min(fa.win.y1, fb.win.y1)};
    if (w.x1 < w.x0 || w.y1 < w.y0) throw Error(ErrorCode::WindowMismatch, "fields do not overlap");
  } else {
    auto v = parse_longs(win);
    if (v.size() == 1 && v[0] >= 0)
      w = Window::square(v[0]);
    else if (v.size() == 4)
      w = {v[0], v[1], v[2], v[3]};
    else
      throw Error(ErrorCode::InvalidConfig, "window must be a half width or x0,x1,y0,y1");
  }
  lwh::ComparisonReport r = lwh::compare_fields(fa, fb, w);
  json j = {{"rel_l2", r.rel_l2}, {"max_abs", r.max_abs}, {"window", {w.x0, w.x1, w.y0, w.y1}}};
  emit(report, dump(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice Wiener-Hopf toolkit"};
  app.require_subcommand(1);

  std::string config, family, omega, theta, amplitude, offsets, psi, source, nq, rho, nu, sep, L, window,
      out, report;
  auto problem_opts = [&](CLI::App* s) {
    s->add_option("--config", config, "JSON run config");
    s->add_option("--family", family, "kernel family");
    s->add_option("--omega", omega, "frequency re[,im]");
    s->add_option("--nq", nq, "grid nodes");
    s->add_option("--rho", rho, "grid radius");
    s->add_option("--nu", nu, "number of array defects");
    s->add_option("--sep,--N", sep, "row separation N");
    s->add_option("--offsets", offsets, "tip offsets M_j, comma separated");
    s->add_option("--psi", psi, "Floquet multiplier re[,im]");
    s->add_option("--out", out, "CSV output path");
    s->add_option("--report", report, "JSON report path (default stdout)");
  };
  auto incidence_opts = [&](CLI::App* s) {
    s->add_option("--theta", theta, "incidence angle (rad)");
    s->add_option("--amplitude", amplitude, "amplitude re[,im]");
    s->add_option("--window", window, "half width of the output window");
  };

  auto* kernel = app.add_subcommand("kernel", "sample a kernel on the grid");
  problem_opts(kernel);
  auto* factorize = app.add_subcommand("factorize", "factorize a scalar kernel");
  problem_opts(factorize);
  auto* solve = app.add_subcommand("solve", "solve a scalar WH problem");
  problem_opts(solve);
  incidence_opts(solve);
  auto* oracle = app.add_subcommand("oracle", "finite-lattice direct solve");
  problem_opts(oracle);
  incidence_opts(oracle);
  oracle->add_option("--L", L, "half width of the oracle domain");
  oracle->add_option("--source", source, "point-source site x,y");

  auto* compare = app.add_subcommand("compare", "compare two field CSV files");
  std::string fa, fb, cwin;
  compare->add_option("a", fa, "first field")->required();
  compare->add_option("b", fb, "reference field")->required();
  compare->add_option("--window", cwin, "half width, or x0,x1,y0,y1");
  compare->add_option("--report", report, "JSON report path (default stdout)");

  auto* verify = app.add_subcommand("verify", "run a named check suite");
  std::string suite;
  long vL = 100;
  verify->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
  verify->add_option("--L", vL, "oracle half width for the residual suite");
  verify->add_option("--report", report, "JSON report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*compare) return cmd_compare(fa, fb, cwin, report);
    if (*verify) {
      json r = run_suite(suite, vL);
      emit(report, dump(r));
      return r["pass"].get<bool>() ? 0 : 2;
    }

    RunConfig c;
    if (!config.empty()) c = load_config(config);
    if (!family.empty()) c.family = family;
    if (!omega.empty()) c.omega = parse_complex(omega);
    if (!theta.empty()) c.theta = parse_complex(theta).real();
    if (!amplitude.empty()) c.amplitude = parse_complex(amplitude);
    if (!nq.empty()) c.nq = int(parse_longs(nq).at(0));
    if (!rho.empty()) c.rho = parse_complex(rho).real();
    if (!nu.empty()) c.nu = int(parse_longs(nu).at(0));
    if (!sep.empty()) c.N = int(parse_longs(sep).at(0));
    if (!offsets.empty()) c.offsets = parse_longs(offsets);
    if (!psi.empty()) c.psi = parse_complex(psi);
    if (!L.empty()) c.L = parse_longs(L).at(0);
    if (!window.empty()) c.window = parse_longs(window).at(0);
    if (!source.empty()) {
      auto v = parse_longs(source);
      if (v.size() != 2) throw Error(ErrorCode::InvalidConfig, "source must be x,y");
      c.source = std::make_pair(v[0], v[1]);
    }
    if (!out.empty()) c.out = out;
    if (!report.empty()) c.report = report;

    Command cmd = *kernel ? Command::kernel
                  : *factorize ? Command::factorize
                  : *solve     ? Command::solve
                               : Command::oracle;
    validate(c, cmd);
    switch (cmd) {
      case Command::kernel: return cmd_kernel(c);
      case Command::factorize: return cmd_factorize(c);
      case Command::solve: return cmd_solve(c);
      default: return cmd_oracle(c);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lwh::is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
