#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "lwh/branches.hpp"

namespace lwh {

using CVec = std::vector<cplx>;
using ScalarFn = std::function<cplx(cplx)>;

struct CircleGrid {
  double rho = 1.0;
  int nq = 4096;

  CircleGrid() = default;
  CircleGrid(double r, int n);
  cplx node(int k) const;
  // node shifted by a fraction of a step, used for off-grid checks
  cplx node(int k, double shift) const;
};

// f(z) = sum_n a_n z^n, n in [-nq/2, nq/2)
struct LaurentSeries {
  double rho = 1.0;
  int nq = 0;
  CVec a;

  LaurentSeries() = default;
  LaurentSeries(double r, int n) : rho(r), nq(n), a(std::size_t(n), cplx(0.0)) {}
  int nmin() const { return -nq / 2; }
  int nmax() const { return nq / 2 - 1; }
  cplx coeff(int n) const;
  cplx& at(int n);
  double max_abs() const;
};

struct SplitPair {
  LaurentSeries plus;   // n <= 0
  LaurentSeries minus;  // n >= 1
};

// In-place discrete Fourier transform, forward uses exp(-2 pi i k m / N).
// Radix-2 for powers of two, Bluestein otherwise.
void fft(CVec& x, bool inverse);

CVec sample(const ScalarFn& f, const CircleGrid& grid, double shift = 0.0);
LaurentSeries coefficients(const CVec& samples, const CircleGrid& grid);
cplx evaluate(const LaurentSeries& s, cplx z);
// values of the series at the grid nodes (optionally shifted by a fraction of a step)
CVec evaluate_on_grid(const LaurentSeries& s, double shift = 0.0);
SplitPair additive_split(const LaurentSeries& s);

int winding_number(const CVec& samples);

struct Factorization {
  LaurentSeries kplus, kminus;
  int winding = 0;
  double residual = 0.0;          // at grid nodes
  double residual_offgrid = -1.0; // at half-step nodes, when the kernel function is known
  double leak_plus = 0.0;         // max |K+ coeff, n >= 1| / max |K+ coeff|
  double leak_minus = 0.0;        // max |K- coeff, n <= -1| / max |K- coeff|
  CVec kplus_samples, kminus_samples;
};

Factorization mult_factorize(const CVec& samples, const CircleGrid& grid);
Factorization mult_factorize(const ScalarFn& f, const CircleGrid& grid);

enum class Side { plus, minus };

// minus: sum_{m>=1} A (q z)^m = A q z / (1 - q z)
// plus:  sum_{m>=0} A (q/z)^m = A / (1 - q/z)
struct HalfExp {
  cplx A;
  cplx q;
  Side side;
  cplx operator()(cplx z) const;
};

HalfExp half_transform_exp(cplx A, cplx q, Side side);

}  // namespace lwh
