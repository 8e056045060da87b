#pragma once

#include <complex>
#include <string>
#include <utility>

namespace lwh {

using cplx = std::complex<double>;

enum class Lattice { square, triangular, honeycomb };

const char* lattice_name(Lattice l);
Lattice parse_lattice(const std::string& s);

// Plane wave A exp(-i(kx x + ky y)); on the honeycomb v sites the amplitude is A*hex_ratio.
struct Incidence {
  Lattice lattice = Lattice::square;
  cplx omega{1.0, 0.1};
  cplx amplitude{1.0, 0.0};
  double theta = 0.0;
  cplx kappa_x, kappa_y;
  cplx hex_ratio{1.0, 0.0};

  cplx kappa() const;
  double kappa2() const { return kappa().imag(); }
  cplx u(long x, long y) const;
  cplx v(long x, long y) const;
};

struct SquareBranch {
  cplx h, r, lam;
};

struct TriBranch {
  cplx t;  // small root, |t| < 1 on the annulus
  cplx F;
};

// Roots of (1+1/z) t^2 - d t + (1+z) = 0, d = 6 - z - 1/z - w2, written as
// t_small = (1+z)/q and t_large = q/(1+1/z). Finite at z = -1 (t_small = 0).
struct TriRoots {
  cplx t;
  cplx q;
};

cplx principal_sqrt(cplx w);

SquareBranch square_branches(cplx z, cplx omega);
TriBranch tri_branch(cplx z, cplx omega);
TriBranch hex_branch(cplx z, cplx omega);

// Same roots without the pole guard at z = -1; used by kernels, which are
// regular there once multiplied through by (1+1/z).
TriRoots tri_roots(cplx z, cplx w2);
cplx tri_w2(cplx omega);   // 3/2 w^2
cplx hex_w2(cplx omega);   // 3/2 w_T^2
cplx omega_T2(cplx omega); // 3/2 w^2 (2 - w^2/4)
cplx hex_cw(cplx omega);   // 3 (1 - w^2/4)

Incidence dispersion_solve(Lattice lattice, cplx omega, double theta, cplx amplitude);

// Residual of the lattice dispersion relation at (kx, ky).
cplx dispersion_residual(Lattice lattice, cplx omega, cplx kx, cplx ky);

std::pair<double, double> annulus_bounds(const Incidence& inc);

}  // namespace lwh
