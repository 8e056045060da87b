#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lwh/errors.hpp"

namespace lwhcli {

using lwh::Error;
using lwh::ErrorCode;

namespace {

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "not a number: '" + s + "'");
  }
  if (pos != s.size()) throw Error(ErrorCode::InvalidConfig, "not a number: '" + s + "'");
  return v;
}

cplx json_complex(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be a number or [re, im]");
}

template <class T>
T json_get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "'");
  }
}

void check_keys(const json& j, const char* section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(section) + " must be an object");
  for (auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto* kk : keys) ok = ok || k == kk;
    if (!ok) throw Error(ErrorCode::InvalidConfig, "unknown key '" + k + "' in " + section);
  }
}

}  // namespace

cplx parse_complex(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) return {to_double(s), 0.0};
  return {to_double(s.substr(0, comma)), to_double(s.substr(comma + 1))};
}

std::vector<long> parse_longs(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    double d = to_double(cell);
    if (d != std::floor(d)) throw Error(ErrorCode::InvalidConfig, "not an integer: '" + cell + "'");
    out.push_back(long(d));
  }
  return out;
}

void apply_json(RunConfig& c, const json& j) {
  check_keys(j, "config", {"problem", "incidence", "numerics", "output"});
  if (j.contains("problem")) {
    const json& p = j["problem"];
    check_keys(p, "problem", {"family", "nu", "N", "sep", "offsets", "psi", "source"});
    if (p.contains("family")) c.family = json_get<std::string>(p, "family");
    if (p.contains("nu")) c.nu = json_get<int>(p, "nu");
    if (p.contains("N")) c.N = json_get<int>(p, "N");
    if (p.contains("sep")) c.N = json_get<int>(p, "sep");
    if (p.contains("offsets")) c.offsets = json_get<std::vector<long>>(p, "offsets");
    if (p.contains("psi")) c.psi = json_complex(p["psi"], "psi");
    if (p.contains("source")) {
      auto v = json_get<std::vector<long>>(p, "source");
      if (v.size() != 2) throw Error(ErrorCode::InvalidConfig, "source must be [x, y]");
      c.source = std::make_pair(v[0], v[1]);
    }
  }
  if (j.contains("incidence")) {
    const json& p = j["incidence"];
    check_keys(p, "incidence", {"omega", "theta", "amplitude"});
    if (p.contains("omega")) c.omega = json_complex(p["omega"], "omega");
    if (p.contains("theta")) c.theta = json_get<double>(p, "theta");
    if (p.contains("amplitude")) c.amplitude = json_complex(p["amplitude"], "amplitude");
  }
  if (j.contains("numerics")) {
    const json& p = j["numerics"];
    check_keys(p, "numerics", {"nq", "rho", "L", "window"});
    if (p.contains("nq")) c.nq = json_get<int>(p, "nq");
    if (p.contains("rho")) c.rho = json_get<double>(p, "rho");
    if (p.contains("L")) c.L = json_get<long>(p, "L");
    if (p.contains("window")) c.window = json_get<long>(p, "window");
  }
  if (j.contains("output")) {
    const json& p = j["output"];
    check_keys(p, "output", {"field", "report"});
    if (p.contains("field")) c.out = json_get<std::string>(p, "field");
    if (p.contains("report")) c.report = json_get<std::string>(p, "report");
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  apply_json(c, j);
  return c;
}

bool is_scalar_family(const std::string& f) {
  lwh::ScalarFamily s;
  return lwh::parse_scalar_family(f, s);
}

bool is_matrix_family(const std::string& f) {
  lwh::MatrixFamily m;
  return lwh::parse_matrix_family(f, m);
}

lwh::Lattice config_lattice(const RunConfig& c) {
  lwh::ScalarFamily s;
  if (lwh::parse_scalar_family(c.family, s)) return lwh::family_lattice(s);
  lwh::MatrixFamily m;
  if (lwh::parse_matrix_family(c.family, m)) {
    if (m == lwh::MatrixFamily::tri_crack_2x2) return lwh::Lattice::triangular;
    if (m == lwh::MatrixFamily::hex_constraint_2x2) return lwh::Lattice::honeycomb;
    return lwh::Lattice::square;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown family '" + c.family + "'");
}

lwh::MatrixKernelSpec matrix_spec(const RunConfig& c) {
  lwh::MatrixKernelSpec s;
  if (!lwh::parse_matrix_family(c.family, s.family))
    throw Error(ErrorCode::InvalidConfig, "'" + c.family + "' is not a matrix family");
  s.omega = c.omega;
  s.nu = c.nu;
  s.N = c.N;
  s.offsets = c.offsets;
  if (c.psi) s.psi = *c.psi;
  s.validate();
  return s;
}

void validate(const RunConfig& c, Command cmd) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (cmd == Command::compare || cmd == Command::verify) return;
  if (c.family.empty()) bad("no family given");
  bool scalar = is_scalar_family(c.family), matrix = is_matrix_family(c.family);
  if (!scalar && !matrix) bad("unknown family '" + c.family + "'");
  if (!(c.omega.real() > 0)) bad("Re(omega) must be positive");
  if ((cmd == Command::solve || cmd == Command::oracle) && !(c.omega.imag() > 0))
    bad("Im(omega) must be positive for " + std::string(cmd == Command::solve ? "solve" : "oracle"));
  if (c.omega.imag() < 0) bad("Im(omega) must not be negative");
  if (!(c.nq > 0) || c.nq % 2 != 0) bad("nq must be a positive even integer");
  if (!(c.rho > 0)) bad("rho must be positive");
  if (!(std::abs(c.theta) < M_PI / 2)) bad("theta must lie in (-pi/2, pi/2)");
  if (c.window < 0) bad("window half width must be non-negative");
  if (cmd == Command::oracle) {
    if (c.L < 20) bad("L must be at least 20");
    if (c.window > c.L) bad("window larger than the oracle domain");
  }
  if (matrix) {
    matrix_spec(c);
    if (cmd == Command::factorize || cmd == Command::solve)
      throw Error(ErrorCode::UnsupportedFamily, c.family + " is a matrix kernel; only scalar kernels factorize");
  }
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace lwhcli
