#include "lwh/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lwh/errors.hpp"

namespace lwh {

namespace {

bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

void fft_radix2(CVec& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sgn = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // twiddles computed directly rather than by recurrence to keep rounding flat
    CVec w(half);
    for (std::size_t k = 0; k < half; ++k) {
      double ang = sgn * 2.0 * M_PI * double(k) / double(len);
      w[k] = cplx(std::cos(ang), std::sin(ang));
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx u = a[i + k], v = a[i + k + half] * w[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

void fft_bluestein(CVec& x, bool inverse) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  const double sgn = inverse ? 1.0 : -1.0;
  CVec w(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the chirp argument small
    unsigned long long kk = (unsigned long long)k * k % (2ull * n);
    double ang = sgn * M_PI * double(kk) / double(n);
    w[k] = cplx(std::cos(ang), std::sin(ang));
  }
  CVec a(m, 0.0), b(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
  b[0] = std::conj(w[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(w[k]);
  fft_radix2(a, false);
  fft_radix2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_radix2(a, true);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * w[k] / double(m);
}

int wrap_index(int n, int nq) { return ((n % nq) + nq) % nq; }

}  // namespace

void fft(CVec& x, bool inverse) {
  if (x.size() <= 1) return;
  if (is_pow2(x.size()))
    fft_radix2(x, inverse);
  else
    fft_bluestein(x, inverse);
}

CircleGrid::CircleGrid(double r, int n) : rho(r), nq(n) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidConfig, "grid radius must be positive");
  if (n <= 0 || n % 2) throw Error(ErrorCode::InvalidConfig, "Nq must be an even positive integer");
}

cplx CircleGrid::node(int k) const { return node(k, 0.0); }

cplx CircleGrid::node(int k, double shift) const {
  if (shift == 0.0) {
    // exact values at the quarter points
    if (nq % 4 == 0) {
      int q = nq / 4;
      if (k % q == 0) {
        static const cplx quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return rho * quarter[(k / q) % 4];
      }
    }
  }
  double ang = 2.0 * M_PI * (double(k) + shift) / double(nq);
  return rho * cplx(std::cos(ang), std::sin(ang));
}

cplx LaurentSeries::coeff(int n) const {
  if (n < nmin() || n > nmax()) return 0.0;
  return a[std::size_t(n + nq / 2)];
}

cplx& LaurentSeries::at(int n) { return a.at(std::size_t(n + nq / 2)); }

double LaurentSeries::max_abs() const {
  double m = 0.0;
  for (auto& c : a) m = std::max(m, std::abs(c));
  return m;
}

CVec sample(const ScalarFn& f, const CircleGrid& grid, double shift) {
  CVec out(std::size_t(grid.nq));
  for (int k = 0; k < grid.nq; ++k) {
    try {
      out[std::size_t(k)] = f(grid.node(k, shift));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (node " + std::to_string(k) + ")");
    }
  }
  return out;
}

LaurentSeries coefficients(const CVec& samples, const CircleGrid& grid) {
  if (int(samples.size()) != grid.nq)
    throw Error(ErrorCode::LengthMismatch, "sample count " + std::to_string(samples.size()) +
                                               " != Nq " + std::to_string(grid.nq));
  CVec b = samples;
  fft(b, false);
  LaurentSeries s(grid.rho, grid.nq);
  for (int n = s.nmin(); n <= s.nmax(); ++n)
    s.at(n) = b[std::size_t(wrap_index(n, grid.nq))] / double(grid.nq) * std::pow(grid.rho, -n);
  return s;
}

cplx evaluate(const LaurentSeries& s, cplx z) {
  // Horner in z for n >= 0 and in 1/z for n < 0
  cplx pos = 0.0, neg = 0.0;
  for (int n = s.nmax(); n >= 0; --n) pos = pos * z + s.coeff(n);
  cplx iz = 1.0 / z;
  for (int n = s.nmin(); n <= -1; ++n) neg = neg * iz + s.coeff(n);
  return pos + neg * iz;
}

CVec evaluate_on_grid(const LaurentSeries& s, double shift) {
  CVec c(std::size_t(s.nq), 0.0);
  for (int n = s.nmin(); n <= s.nmax(); ++n) {
    cplx ph = shift == 0.0 ? cplx(1.0)
                           : std::exp(cplx(0.0, 2.0 * M_PI * double(n) * shift / double(s.nq)));
    c[std::size_t(wrap_index(n, s.nq))] = s.coeff(n) * std::pow(s.rho, n) * ph;
  }
  fft(c, true);
  return c;
}

SplitPair additive_split(const LaurentSeries& s) {
  SplitPair p{LaurentSeries(s.rho, s.nq), LaurentSeries(s.rho, s.nq)};
  for (int n = s.nmin(); n <= s.nmax(); ++n) (n <= 0 ? p.plus : p.minus).at(n) = s.coeff(n);
  return p;
}

int winding_number(const CVec& samples) {
  const std::size_t n = samples.size();
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(samples[k]) < 1e-14)
      throw Error(ErrorCode::ZeroOnContour, "sample " + std::to_string(k) + " vanishes");
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double step = std::arg(samples[(k + 1) % n] / samples[k]);
    if (std::abs(step) > M_PI / 2)
      throw Error(ErrorCode::PhaseStepTooLarge,
                  "phase jump " + std::to_string(step) + " at node " + std::to_string(k));
    total += step;
  }
  return int(std::lround(total / (2.0 * M_PI)));
}

Factorization mult_factorize(const CVec& samples, const CircleGrid& grid) {
  if (int(samples.size()) != grid.nq)
    throw Error(ErrorCode::LengthMismatch, "sample count does not match grid");
  Factorization f;
  f.winding = winding_number(samples);
  if (f.winding != 0)
    throw Error(ErrorCode::NonzeroWinding, "kernel index is " + std::to_string(f.winding));

  const std::size_t n = samples.size();
  CVec L(n);
  L[0] = std::log(samples[0]);
  for (std::size_t k = 1; k < n; ++k) L[k] = L[k - 1] + std::log(samples[k] / samples[k - 1]);

  SplitPair lp = additive_split(coefficients(L, grid));
  CVec lplus = evaluate_on_grid(lp.plus), lminus = evaluate_on_grid(lp.minus);
  f.kplus_samples.resize(n);
  f.kminus_samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    f.kplus_samples[k] = std::exp(lplus[k]);
    f.kminus_samples[k] = std::exp(lminus[k]);
  }
  f.kplus = coefficients(f.kplus_samples, grid);
  f.kminus = coefficients(f.kminus_samples, grid);

  for (std::size_t k = 0; k < n; ++k)
    f.residual = std::max(f.residual, std::abs(f.kplus_samples[k] * f.kminus_samples[k] - samples[k]) /
                                          std::abs(samples[k]));
  double mp = f.kplus.max_abs(), mm = f.kminus.max_abs();
  for (int m = f.kplus.nmin(); m <= f.kplus.nmax(); ++m) {
    if (m >= 1) f.leak_plus = std::max(f.leak_plus, std::abs(f.kplus.coeff(m)) / mp);
    if (m <= -1) f.leak_minus = std::max(f.leak_minus, std::abs(f.kminus.coeff(m)) / mm);
  }
  return f;
}

Factorization mult_factorize(const ScalarFn& fn, const CircleGrid& grid) {
  Factorization f = mult_factorize(sample(fn, grid), grid);
  CVec exact = sample(fn, grid, 0.5);
  CVec p = evaluate_on_grid(f.kplus, 0.5), m = evaluate_on_grid(f.kminus, 0.5);
  f.residual_offgrid = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k)
    f.residual_offgrid = std::max(f.residual_offgrid, std::abs(p[k] * m[k] - exact[k]) / std::abs(exact[k]));
  return f;
}

cplx HalfExp::operator()(cplx z) const {
  cplx w = side == Side::minus ? q * z : q / z;
  if (std::abs(w) >= 1.0)
    throw Error(ErrorCode::DivergentSeries, "half-range sum diverges at |z| = " + std::to_string(std::abs(z)));
  return side == Side::minus ? A * w / (1.0 - w) : A / (1.0 - w);
}

HalfExp half_transform_exp(cplx A, cplx q, Side side) { return HalfExp{A, q, side}; }

}  // namespace lwh
