#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lwh/kernels.hpp"

namespace lwhcli {

using lwh::cplx;
using json = nlohmann::json;

enum class Command { kernel, factorize, solve, oracle, compare, verify };

struct RunConfig {
  // problem
  std::string family;
  int nu = 2;
  int N = 1;
  std::vector<long> offsets;
  std::optional<cplx> psi;
  std::optional<std::pair<long, long>> source;
  // incidence
  cplx omega{1.0, 0.1};
  double theta = 0.5235987755982988;  // pi/6
  cplx amplitude{1.0, 0.0};
  // numerics
  int nq = 4096;
  double rho = 1.0;
  long L = 100;
  long window = 20;
  // output
  std::string out, report;
};

cplx parse_complex(const std::string& s);
std::vector<long> parse_longs(const std::string& s);

// {"problem": {...}, "incidence": {...}, "numerics": {...}, "output": {...}}
void apply_json(RunConfig& c, const json& j);
RunConfig load_config(const std::string& path);

bool is_scalar_family(const std::string& f);
bool is_matrix_family(const std::string& f);
lwh::Lattice config_lattice(const RunConfig& c);
lwh::MatrixKernelSpec matrix_spec(const RunConfig& c);

// throws lwh::Error(InvalidConfig, ...) on the first violation
void validate(const RunConfig& c, Command cmd);

json complex_json(cplx z);

}  // namespace lwhcli
