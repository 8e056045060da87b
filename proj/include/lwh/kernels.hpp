#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lwh/branches.hpp"
#include "lwh/field.hpp"
#include "lwh/series.hpp"

namespace lwh {

using CMat = Eigen::MatrixXcd;
using CVecE = Eigen::VectorXcd;

// ------------------------------------------------------------ incident fields

// Incident wave seen by the forcing terms: point values plus recentred
// half-range row transforms
//   minus: sum_{m<0} u_{m+M,y} z^{-m},  plus: sum_{m>=0} u_{m+M,y} z^{-m}.
class IncidentField {
 public:
  virtual ~IncidentField() = default;
  virtual Lattice lattice() const = 0;
  virtual cplx u(long x, long y) const = 0;
  virtual cplx v(long x, long y) const = 0;
  virtual cplx half_u(long y, long M, Side side, cplx z) const = 0;
  virtual cplx half_v(long y, long M, Side side, cplx z) const = 0;
};

class PlaneWave : public IncidentField {
 public:
  explicit PlaneWave(const Incidence& inc) : inc_(inc) {}
  Lattice lattice() const override { return inc_.lattice; }
  cplx u(long x, long y) const override { return inc_.u(x, y); }
  cplx v(long x, long y) const override { return inc_.v(x, y); }
  cplx half_u(long y, long M, Side side, cplx z) const override;
  cplx half_v(long y, long M, Side side, cplx z) const override;
  const Incidence& incidence() const { return inc_; }

 private:
  Incidence inc_;
};

// Incident field known only on a window (e.g. a damped point-source response);
// half-range transforms are finite sums over the window columns.
class SampledIncident : public IncidentField {
 public:
  explicit SampledIncident(FieldGrid g) : g_(std::move(g)) {}
  Lattice lattice() const override { return g_.lattice; }
  cplx u(long x, long y) const override { return g_.U(x, y); }
  cplx v(long x, long y) const override { return g_.V(x, y); }
  cplx half_u(long y, long M, Side side, cplx z) const override;
  cplx half_v(long y, long M, Side side, cplx z) const override;
  const FieldGrid& grid() const { return g_; }

 private:
  FieldGrid g_;
};

// finite half-range sum of one row of a grid (u or v sublattice)
cplx grid_half_sum(const FieldGrid& g, bool vrow, long y, long M, Side side, cplx z);

// ------------------------------------------------------------ scalar kernels

enum class ScalarFamily { sq_crack, sq_constraint, tri_dirichlet, hex_crack };

struct ScalarKernel {
  ScalarFamily family = ScalarFamily::sq_crack;
  cplx omega{1.0, 0.1};
};

const char* family_name(ScalarFamily f);
Lattice family_lattice(ScalarFamily f);
bool parse_scalar_family(const std::string& s, ScalarFamily& out);

cplx eval_scalar_kernel(const ScalarKernel& k, cplx z);
// the second printed algebraic form (lambda / Vieta form); used for cross-checks
cplx eval_scalar_kernel_dual(const ScalarKernel& k, cplx z);

using VecFn = std::function<CVecE(cplx)>;

struct AffineTerm {
  std::string id;
  VecFn fn;
};

// c(z; alpha) = base(z) + sum_k alpha_k terms_k(z)
struct AffineForcing {
  int dim = 1;
  VecFn base;
  std::vector<AffineTerm> terms;
  CVecE eval(cplx z, const std::vector<cplx>& alpha) const;
};

AffineForcing scalar_forcing(ScalarFamily f, const Incidence& inc);
AffineForcing scalar_forcing(ScalarFamily f, cplx omega, std::shared_ptr<const IncidentField> inc);

// ------------------------------------------------------------ matrix kernels

enum class MatrixFamily {
  tri_crack_2x2,
  hex_constraint_2x2,
  array_cracks,
  array_constraints,
  mixed_array,
  pair_crack_constraint,
  opposing_cracks,
  opposing_constraints,
  opposing_mixed,
};

const char* family_name(MatrixFamily f);
bool parse_matrix_family(const std::string& s, MatrixFamily& out);
std::vector<MatrixFamily> all_matrix_families();

struct MatrixKernelSpec {
  MatrixFamily family = MatrixFamily::array_cracks;
  cplx omega{1.0, 0.1};
  int nu = 2;
  int N = 1;
  std::vector<long> offsets;  // M_j for arrays, {M} for opposing families
  cplx psi{1.0, 0.0};
  // test hook: raise one off-diagonal lambda power by one
  bool perturb = false;

  int dim() const;
  long offset(int j) const { return j < int(offsets.size()) ? offsets[std::size_t(j)] : 0; }
  void validate() const;
};

CMat eval_matrix_kernel(const MatrixKernelSpec& s, cplx z);

struct DKForm {
  ScalarFn a1, a2;
  static Eigen::Matrix2cd R(cplx z);
  Eigen::Matrix2cd K(cplx z) const;
};

DKForm dk_form(const MatrixKernelSpec& s);
cplx det_closed_form(const MatrixKernelSpec& s, cplx z);
std::function<CMat(cplx)> diag_limit_defect(const MatrixKernelSpec& s);

// Row quantity entering component i of f: sum_k coeff_k u_{x, row_k}, recentred at M.
struct RowComb {
  std::vector<std::pair<long, double>> rows;
  long M = 0;
  bool vrow = false;  // honeycomb v sublattice
};

std::vector<RowComb> unknown_rows(const MatrixKernelSpec& s);

// Lattice point whose scattered value an affine constant stands for.
struct ConstantSite {
  std::string id;
  long x, y;
  bool vsite = false;  // honeycomb v sublattice
};

std::vector<ConstantSite> scalar_constants(ScalarFamily f);
RowComb scalar_unknown_row(ScalarFamily f);

std::vector<ConstantSite> forcing_constants(const MatrixKernelSpec& s);

AffineForcing vector_forcing(const MatrixKernelSpec& s, const Incidence& inc);
AffineForcing vector_forcing(const MatrixKernelSpec& s, std::shared_ptr<const IncidentField> inc);

}  // namespace lwh
