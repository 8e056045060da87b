#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lwh/field.hpp"
#include "lwh/kernels.hpp"
#include "lwh/series.hpp"

namespace lwh {

struct ScalarWHProblem {
  ScalarKernel kernel;
  AffineForcing forcing;
  CircleGrid grid;
  Incidence incidence;
  std::shared_ptr<const IncidentField> incident;
};

// Builds kernel, forcing and incident for a plane wave; the grid radius must lie in the annulus.
ScalarWHProblem make_scalar_problem(ScalarFamily f, const Incidence& inc, const CircleGrid& grid);

struct WHColumn {
  CVec c, fplus, fminus;  // samples on the grid
};

struct WHSolution {
  LaurentSeries f_plus, f_minus;
  Factorization factors;
  std::vector<std::string> constant_ids;
  std::vector<cplx> constants;
  std::vector<WHColumn> columns;  // base, then one per unknown constant
  double residual = 0.0;          // at grid nodes
  double residual_offgrid = 0.0;  // at half-step nodes, factors evaluated from their series
  double closure_det = 1.0;       // det(I - dG)
  double closure_cond = 1.0;      // condition number of I - dG
  double support_leak = 0.0;      // wrong-side coefficients of f+/f- relative to the largest
  CVec fplus_samples, fminus_samples, kernel_samples;
};

WHSolution solve_scalar(const ScalarWHProblem& p);

// f+ + K f- = c for a kernel and a fully known forcing given by samples on the grid
WHSolution solve_samples(const CVec& kernel, const CVec& c, const CircleGrid& g);

// Solves alpha = G(alpha) for the unknown lattice constants from the affine columns.
struct Closure {
  std::vector<cplx> alpha;
  double det = 1.0;
  double cond = 1.0;
};
Closure close_constants(const ScalarWHProblem& p, const WHSolution& affine);

FieldGrid reconstruct_field(const ScalarWHProblem& p, const WHSolution& s, const Window& w);

// u_x = coefficient of z^{-x}
CVec inverse_transform_row(const LaurentSeries& s, long x0, long x1);

}  // namespace lwh
