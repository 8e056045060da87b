#include "lwh/branches.hpp"

#include <cmath>

#include "lwh/errors.hpp"

namespace lwh {

namespace {

const cplx I(0.0, 1.0);

bool near_negative_axis(cplx w) {
  return w.real() < 0.0 && std::abs(w.imag()) <= 1e-14 * (std::abs(w) + 1.0);
}

}  // namespace

const char* lattice_name(Lattice l) {
  switch (l) {
    case Lattice::square: return "square";
    case Lattice::triangular: return "triangular";
    case Lattice::honeycomb: return "honeycomb";
  }
  return "?";
}

Lattice parse_lattice(const std::string& s) {
  if (s == "square") return Lattice::square;
  if (s == "triangular") return Lattice::triangular;
  if (s == "honeycomb") return Lattice::honeycomb;
  throw Error(ErrorCode::InvalidConfig, "unknown lattice '" + s + "'");
}

cplx Incidence::kappa() const { return std::sqrt(kappa_x * kappa_x + kappa_y * kappa_y); }

cplx Incidence::u(long x, long y) const {
  return amplitude * std::exp(-I * (kappa_x * double(x) + kappa_y * double(y)));
}

cplx Incidence::v(long x, long y) const { return hex_ratio * u(x, y); }

cplx principal_sqrt(cplx w) { return std::sqrt(w); }

SquareBranch square_branches(cplx z, cplx omega) {
  if (std::abs(z) < 1e-300) throw Error(ErrorCode::DegeneratePoint, "z = 0");
  cplx h2 = 2.0 - z - 1.0 / z - omega * omega;
  cplx r2 = h2 + 4.0;
  if (near_negative_axis(h2) || near_negative_axis(r2))
    throw Error(ErrorCode::OnBranchCut, "square branch cut at z = " + std::to_string(z.real()) +
                                            "+" + std::to_string(z.imag()) + "i");
  SquareBranch b;
  b.h = principal_sqrt(h2);
  b.r = principal_sqrt(r2);
  if (std::abs(b.r + b.h) < 1e-14 || std::abs(b.r - b.h) < 1e-14)
    throw Error(ErrorCode::DegeneratePoint, "r + h vanishes");
  b.lam = (b.r - b.h) / (b.r + b.h);
  if (std::abs(b.lam) > 1.0) {
    // other sheet of h keeps h/r = (1-lam)/(1+lam) with |lam| <= 1
    b.h = -b.h;
    b.lam = 1.0 / b.lam;
  }
  return b;
}

TriRoots tri_roots(cplx z, cplx w2) {
  if (std::abs(z) < 1e-300) throw Error(ErrorCode::DegeneratePoint, "z = 0");
  cplx a = 1.0 + 1.0 / z;
  cplx b = 1.0 + z;
  cplx d = 6.0 - z - 1.0 / z - w2;
  cplx s = std::sqrt(d * d - 4.0 * a * b);
  cplx q1 = 0.5 * (d + s), q2 = 0.5 * (d - s);
  cplx q = std::abs(q1) >= std::abs(q2) ? q1 : q2;
  cplx qo = std::abs(q1) >= std::abs(q2) ? q2 : q1;
  if (std::abs(q) < 1e-300) throw Error(ErrorCode::DegeneratePoint, "quadratic degenerates");
  if (std::abs(q) - std::abs(qo) <= 1e-12 * std::abs(q))
    throw Error(ErrorCode::RootSelectionAmbiguous, "roots of equal modulus");
  return {b / q, q};
}

cplx tri_w2(cplx omega) { return 1.5 * omega * omega; }

cplx omega_T2(cplx omega) { return 1.5 * omega * omega * (2.0 - 0.25 * omega * omega); }

cplx hex_w2(cplx omega) { return 1.5 * omega_T2(omega); }

cplx hex_cw(cplx omega) { return 3.0 * (1.0 - 0.25 * omega * omega); }

namespace {

TriBranch tri_like(cplx z, cplx w2) {
  if (std::abs(z) < 1e-300) throw Error(ErrorCode::DegeneratePoint, "z = 0");
  cplx a = 1.0 + 1.0 / z;
  if (std::abs(a) < 1e-13) throw Error(ErrorCode::PoleAtMinusOne, "F has a pole at z = -1");
  TriRoots r = tri_roots(z, w2);
  return {r.t, (6.0 - z - 1.0 / z - w2) / a};
}

}  // namespace

TriBranch tri_branch(cplx z, cplx omega) { return tri_like(z, tri_w2(omega)); }

TriBranch hex_branch(cplx z, cplx omega) {
  if (std::abs(1.0 - 0.25 * omega * omega) < 1e-14)
    throw Error(ErrorCode::DegeneratePoint, "omega = 2");
  return tri_like(z, hex_w2(omega));
}

// ---------------------------------------------------------------- dispersion

cplx dispersion_residual(Lattice lattice, cplx omega, cplx kx, cplx ky) {
  switch (lattice) {
    case Lattice::square:
      return 4.0 - 2.0 * std::cos(kx) - 2.0 * std::cos(ky) - omega * omega;
    case Lattice::triangular:
      return 6.0 - 2.0 * std::cos(kx) - 2.0 * std::cos(ky) - 2.0 * std::cos(kx - ky) -
             tri_w2(omega);
    case Lattice::honeycomb: {
      cplx cw = hex_cw(omega);
      return 3.0 + 2.0 * std::cos(kx) + 2.0 * std::cos(ky) + 2.0 * std::cos(kx - ky) - cw * cw;
    }
  }
  return 0.0;
}

namespace {

cplx dispersion_derivative(Lattice lattice, cplx k, double c, double s) {
  switch (lattice) {
    case Lattice::square:
      return 2.0 * c * std::sin(k * c) + 2.0 * s * std::sin(k * s);
    case Lattice::triangular:
      return 2.0 * c * std::sin(k * c) + 2.0 * s * std::sin(k * s) +
             2.0 * (c - s) * std::sin(k * (c - s));
    case Lattice::honeycomb:
      return -2.0 * c * std::sin(k * c) - 2.0 * s * std::sin(k * s) -
             2.0 * (c - s) * std::sin(k * (c - s));
  }
  return 1.0;
}

}  // namespace

Incidence dispersion_solve(Lattice lattice, cplx omega, double theta, cplx amplitude) {
  if (!(std::abs(theta) < M_PI / 2))
    throw Error(ErrorCode::InvalidConfig, "incidence angle must lie in (-pi/2, pi/2)");
  double w1 = omega.real();
  double band = lattice == Lattice::square ? 2.0 * std::sqrt(2.0)
                : lattice == Lattice::triangular ? std::sqrt(6.0)
                                                 : 2.0;
  if (!(w1 > 0.0 && w1 < band))
    throw Error(ErrorCode::OutsidePassBand,
                "Re(omega) = " + std::to_string(w1) + " outside (0, " + std::to_string(band) + ")");
  double c = std::cos(theta), s = std::sin(theta);
  double speed = lattice == Lattice::square ? 1.0
                 : lattice == Lattice::triangular
                     ? std::sqrt(1.5 / (2.0 - std::sin(2.0 * theta)))
                     : std::sqrt(4.5 / (2.0 - std::sin(2.0 * theta)));
  cplx k = omega * speed;
  bool done = false;
  for (int it = 0; it < 100; ++it) {
    cplx D = dispersion_residual(lattice, omega, k * c, k * s);
    if (std::abs(D) < 1e-15) {
      done = true;
      break;
    }
    cplx dk = D / dispersion_derivative(lattice, k, c, s);
    k -= dk;
    if (std::abs(dk) < 1e-15 * std::abs(k)) {
      done = true;
      break;
    }
  }
  if (!done || std::abs(dispersion_residual(lattice, omega, k * c, k * s)) > 1e-12)
    throw Error(ErrorCode::NoConvergence, "dispersion Newton iteration did not converge");
  if (k.real() < 0.0) k = -k;

  Incidence inc;
  inc.lattice = lattice;
  inc.omega = omega;
  inc.amplitude = amplitude;
  inc.theta = theta;
  inc.kappa_x = k * c;
  inc.kappa_y = k * s;
  if (lattice == Lattice::honeycomb)
    inc.hex_ratio =
        (1.0 + std::exp(-I * inc.kappa_x) + std::exp(-I * inc.kappa_y)) / hex_cw(omega);
  return inc;
}

std::pair<double, double> annulus_bounds(const Incidence& inc) {
  double k2 = inc.kappa2();
  double lo = std::exp(-k2), hi = std::exp(k2 * std::cos(inc.theta));
  if (!(lo < hi)) throw Error(ErrorCode::EmptyAnnulus, "annulus is empty (kappa2 <= 0)");
  return {lo, hi};
}

}  // namespace lwh
