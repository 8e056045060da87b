#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <vector>

#include "lwh/field.hpp"
#include "lwh/kernels.hpp"

namespace lwh {

enum class DefectKind { crack, constraint };
enum class DefectSide { left, right };

// crack: bonds between rows `row` and `row-1` are broken, keyed by the x of the upper site.
// constraint: every site of row `row` is pinned (total field zero).
// left covers x < M, right covers x >= M.
struct Defect {
  DefectKind kind = DefectKind::crack;
  long row = 0;
  DefectSide side = DefectSide::left;
  long M = 0;
  bool covers(long x) const { return side == DefectSide::left ? x < M : x >= M; }
};

struct BlochSpec {
  int period = 1;
  cplx psi{1.0, 0.0};  // u_{x, y+period} = psi u_{x, y}
};

struct LatticeProblemSpec {
  Lattice lattice = Lattice::square;
  std::vector<Defect> defects;
  Incidence incidence;
  std::optional<BlochSpec> bloch;
  // when null a plane wave built from `incidence` is used
  std::shared_ptr<const IncidentField> incident;

  cplx omega() const { return incidence.omega; }
  std::shared_ptr<const IncidentField> incident_field() const;
};

struct AssembledSystem {
  Lattice lattice = Lattice::square;
  Window win;
  int nsub = 1;
  std::vector<long> index;  // site slot -> unknown, -1 when pinned
  std::vector<cplx> fixed;  // scattered value of pinned slots (-u^in)
  Eigen::SparseMatrix<cplx> A;
  CVecE b;
  std::optional<BlochSpec> bloch;
  long unknowns() const { return long(b.size()); }
};

AssembledSystem assemble(const LatticeProblemSpec& spec, long L);

struct SolveReport {
  double residual = 0.0;
  int refinements = 0;
};

FieldGrid solve_direct(const AssembledSystem& sys, SolveReport* report = nullptr);

// assemble + solve, with pinned sites filled with -u^in
FieldGrid oracle_solve(const LatticeProblemSpec& spec, long L, SolveReport* report = nullptr);

// Damped response of the defect-free lattice to a unit source at (sx, sy),
// scaled so the value at the source is 1.
FieldGrid point_source_incident(Lattice lat, cplx omega, long sx, long sy, long L);

struct ComparisonReport {
  double rel_l2 = 0.0;
  double max_abs = 0.0;
  Window win;
};

ComparisonReport compare_fields(const FieldGrid& a, const FieldGrid& b, const Window& w);

// Max relative residual of the defect-free equation of motion on a scattered
// field, at window sites at least `margin` rows away from every defect row.
double interior_residual(const FieldGrid& f, const std::vector<Defect>& defects, cplx omega,
                         long margin = 2);

// Rows outside one period filled from u_{x, y+P} = psi u_{x, y}.
FieldGrid bloch_unroll(const FieldGrid& period, const BlochSpec& b, long y0, long y1);

LatticeProblemSpec family_problem(ScalarFamily f, const Incidence& inc);
// For mixed_array the Bloch multiplier is taken from the incidence and written into `s.psi`.
LatticeProblemSpec family_problem(MatrixKernelSpec& s, const Incidence& inc);

// Families with a defect reaching x -> +infinity see a plane wave that grows
// along it; those are driven by a point source placed between the defect rows.
bool needs_point_source(MatrixFamily f);
std::pair<long, long> default_source(const MatrixKernelSpec& s);

struct FamilyOracle {
  LatticeProblemSpec problem;
  FieldGrid field;  // Bloch fields are unrolled to the full square window
  SolveReport report;
};

// Oracle run for the defect geometry of a matrix family, with the incident
// chosen as above (point source at `source`, or default_source).
FamilyOracle family_oracle(MatrixKernelSpec& s, const Incidence& inc, long L,
                           std::optional<std::pair<long, long>> source = std::nullopt);

struct WHResidualOptions {
  int nq = 512;
  double rho = 1.0;
};

double wh_residual(const MatrixKernelSpec& s, const FieldGrid& field,
                   std::shared_ptr<const IncidentField> inc, const WHResidualOptions& o = {});
double wh_residual(ScalarFamily f, cplx omega, const FieldGrid& field,
                   std::shared_ptr<const IncidentField> inc, const WHResidualOptions& o = {});

}  // namespace lwh
