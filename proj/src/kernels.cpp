#include "lwh/kernels.hpp"

#include <cmath>
#include <string>

#include "lwh/errors.hpp"

namespace lwh {

namespace {

const cplx I(0.0, 1.0);

struct Sq {
  cplx h, r, lam, mu;
  cplx crack() const { return h / r; }
  cplx constraint() const { return (h * h + 2.0) / (r * h); }
};

Sq sq_at(cplx z, cplx w) {
  SquareBranch b = square_branches(z, w);
  return {b.h, b.r, b.lam, b.h * b.h + 2.0};
}

std::string site_id(bool vsite, long x, long y) {
  return std::string(vsite ? "v[" : "u[") + std::to_string(x) + "," + std::to_string(y) + "]";
}

CVecE vec2(cplx a, cplx b) {
  CVecE v(2);
  v << a, b;
  return v;
}

}  // namespace

// ------------------------------------------------------------ incident fields

cplx PlaneWave::half_u(long y, long M, Side side, cplx z) const {
  cplx A = inc_.amplitude * std::exp(-I * (inc_.kappa_x * double(M) + inc_.kappa_y * double(y)));
  cplx q = side == Side::minus ? std::exp(I * inc_.kappa_x) : std::exp(-I * inc_.kappa_x);
  return half_transform_exp(A, q, side)(z);
}

cplx PlaneWave::half_v(long y, long M, Side side, cplx z) const {
  return inc_.hex_ratio * half_u(y, M, side, z);
}

cplx grid_half_sum(const FieldGrid& g, bool vrow, long y, long M, Side side, cplx z) {
  if (y < g.win.y0 || y > g.win.y1) return 0.0;
  auto val = [&](long x) { return vrow ? g.V(x, y) : g.U(x, y); };
  cplx s = 0.0;
  if (side == Side::minus) {
    cplx p = z;
    for (long x = M - 1; x >= g.win.x0; --x, p *= z) s += val(x) * p;
  } else {
    long xs = std::max(M, g.win.x0);
    cplx iz = 1.0 / z, p = std::pow(iz, double(xs - M));
    for (long x = xs; x <= g.win.x1; ++x, p *= iz) s += val(x) * p;
  }
  return s;
}

cplx SampledIncident::half_u(long y, long M, Side side, cplx z) const {
  return grid_half_sum(g_, false, y, M, side, z);
}

cplx SampledIncident::half_v(long y, long M, Side side, cplx z) const {
  return grid_half_sum(g_, true, y, M, side, z);
}

// ------------------------------------------------------------ scalar kernels

const char* family_name(ScalarFamily f) {
  switch (f) {
    case ScalarFamily::sq_crack: return "sq_crack";
    case ScalarFamily::sq_constraint: return "sq_constraint";
    case ScalarFamily::tri_dirichlet: return "tri_dirichlet";
    case ScalarFamily::hex_crack: return "hex_crack";
  }
  return "?";
}

Lattice family_lattice(ScalarFamily f) {
  switch (f) {
    case ScalarFamily::tri_dirichlet: return Lattice::triangular;
    case ScalarFamily::hex_crack: return Lattice::honeycomb;
    default: return Lattice::square;
  }
}

bool parse_scalar_family(const std::string& s, ScalarFamily& out) {
  for (auto f : {ScalarFamily::sq_crack, ScalarFamily::sq_constraint, ScalarFamily::tri_dirichlet,
                 ScalarFamily::hex_crack})
    if (s == family_name(f)) {
      out = f;
      return true;
    }
  return false;
}

cplx eval_scalar_kernel(const ScalarKernel& k, cplx z) {
  switch (k.family) {
    case ScalarFamily::sq_crack: return sq_at(z, k.omega).crack();
    case ScalarFamily::sq_constraint: return sq_at(z, k.omega).constraint();
    case ScalarFamily::tri_dirichlet: {
      // F/(F - 2t) multiplied through by 1 + 1/z
      cplx w2 = tri_w2(k.omega);
      TriRoots r = tri_roots(z, w2);
      cplx d = 6.0 - z - 1.0 / z - w2;
      return d / (d - 2.0 * (1.0 + 1.0 / z) * r.t);
    }
    case ScalarFamily::hex_crack: {
      cplx cw = hex_cw(k.omega);
      if (std::abs(cw) < 1e-14) throw Error(ErrorCode::DegeneratePoint, "omega = 2");
      TriRoots r = tri_roots(z, hex_w2(k.omega));
      cplx n = (r.q + 1.0) / cw;  // (1+z)/h = q
      return (n - 1.0) / (n + 1.0);
    }
  }
  return 0.0;
}

cplx eval_scalar_kernel_dual(const ScalarKernel& k, cplx z) {
  switch (k.family) {
    case ScalarFamily::sq_crack: {
      cplx l = square_branches(z, k.omega).lam;
      return (1.0 - l) / (1.0 + l);
    }
    case ScalarFamily::sq_constraint: {
      cplx l = square_branches(z, k.omega).lam;
      return (1.0 + l * l) / (1.0 - l * l);
    }
    case ScalarFamily::tri_dirichlet: {
      cplx t = tri_branch(z, k.omega).t;
      return (z / t + t) / (z / t - t);
    }
    case ScalarFamily::hex_crack: {
      cplx h = hex_branch(z, k.omega).t;
      cplx n = ((1.0 + z) / h + 1.0) / hex_cw(k.omega);
      return (n - 1.0) / (n + 1.0);
    }
  }
  return 0.0;
}

CVecE AffineForcing::eval(cplx z, const std::vector<cplx>& alpha) const {
  if (alpha.size() != terms.size())
    throw Error(ErrorCode::LengthMismatch, "constant count does not match forcing terms");
  CVecE c = base(z);
  for (std::size_t k = 0; k < terms.size(); ++k) c += alpha[k] * terms[k].fn(z);
  return c;
}

std::vector<ConstantSite> scalar_constants(ScalarFamily f) {
  switch (f) {
    case ScalarFamily::sq_constraint: return {{site_id(false, 0, 0), 0, 0}};
    case ScalarFamily::tri_dirichlet:
      return {{site_id(false, -1, 1), -1, 1}, {site_id(false, 0, 0), 0, 0}};
    default: return {};
  }
}

RowComb scalar_unknown_row(ScalarFamily f) {
  switch (f) {
    case ScalarFamily::sq_constraint:
    case ScalarFamily::tri_dirichlet: return {{{1, 1.0}}, 0, false};
    default: return {{{0, 1.0}}, 0, false};
  }
}

AffineForcing scalar_forcing(ScalarFamily f, const Incidence& inc) {
  if (inc.lattice != family_lattice(f))
    throw Error(ErrorCode::InvalidConfig, "incidence lattice does not match kernel family");
  return scalar_forcing(f, inc.omega, std::make_shared<PlaneWave>(inc));
}

AffineForcing scalar_forcing(ScalarFamily f, cplx omega, std::shared_ptr<const IncidentField> inc) {
  if (inc->lattice() != family_lattice(f))
    throw Error(ErrorCode::InvalidConfig, "incidence lattice does not match kernel family");
  ScalarKernel k{f, omega};
  auto one = [](cplx v) {
    CVecE r(1);
    r(0) = v;
    return r;
  };
  AffineForcing c;
  c.dim = 1;
  switch (f) {
    case ScalarFamily::sq_crack:
      c.base = [=](cplx z) {
        cplx K = eval_scalar_kernel(k, z);
        return one(0.5 * (1.0 - K) *
                   (inc->half_u(0, 0, Side::minus, z) - inc->half_u(-1, 0, Side::minus, z)));
      };
      break;
    case ScalarFamily::sq_constraint: {
      cplx um10 = inc->u(-1, 0);
      c.base = [=](cplx z) {
        cplx K = eval_scalar_kernel(k, z);
        cplx mu = 4.0 - z - 1.0 / z - omega * omega;
        return one(0.5 * (1.0 - K) * (mu * inc->half_u(0, 0, Side::minus, z) + um10));
      };
      c.terms.push_back({site_id(false, 0, 0), [=](cplx z) {
                           return one(0.5 * (1.0 - eval_scalar_kernel(k, z)) * z);
                         }});
      break;
    }
    case ScalarFamily::tri_dirichlet: {
      // c = -t (d u0in- + Y) / (d - 2 a t),  Y = u^in_{-1,0} - 2 u_{-1,1} + z u_{0,0}
      cplx w2 = tri_w2(omega);
      cplx um10 = inc->u(-1, 0);
      auto pre = [=](cplx z) {
        TriRoots r = tri_roots(z, w2);
        cplx d = 6.0 - z - 1.0 / z - w2;
        return std::pair<cplx, cplx>(-r.t / (d - 2.0 * (1.0 + 1.0 / z) * r.t), d);
      };
      c.base = [=](cplx z) {
        auto [p, d] = pre(z);
        return one(p * (d * inc->half_u(0, 0, Side::minus, z) + um10));
      };
      c.terms.push_back({site_id(false, -1, 1), [=](cplx z) { return one(-2.0 * pre(z).first); }});
      c.terms.push_back({site_id(false, 0, 0), [=](cplx z) { return one(z * pre(z).first); }});
      break;
    }
    case ScalarFamily::hex_crack:
      c.base = [=](cplx z) {
        cplx K = eval_scalar_kernel(k, z);
        return one(0.5 * (1.0 - K) *
                   (inc->half_u(0, 0, Side::minus, z) - inc->half_v(-1, 0, Side::minus, z)));
      };
      break;
  }
  return c;
}

// ------------------------------------------------------------ matrix kernels

const char* family_name(MatrixFamily f) {
  switch (f) {
    case MatrixFamily::tri_crack_2x2: return "tri_crack_2x2";
    case MatrixFamily::hex_constraint_2x2: return "hex_constraint_2x2";
    case MatrixFamily::array_cracks: return "array_cracks";
    case MatrixFamily::array_constraints: return "array_constraints";
    case MatrixFamily::mixed_array: return "mixed_array";
    case MatrixFamily::pair_crack_constraint: return "pair_crack_constraint";
    case MatrixFamily::opposing_cracks: return "opposing_cracks";
    case MatrixFamily::opposing_constraints: return "opposing_constraints";
    case MatrixFamily::opposing_mixed: return "opposing_mixed";
  }
  return "?";
}

std::vector<MatrixFamily> all_matrix_families() {
  return {MatrixFamily::tri_crack_2x2,       MatrixFamily::hex_constraint_2x2,
          MatrixFamily::array_cracks,        MatrixFamily::array_constraints,
          MatrixFamily::mixed_array,         MatrixFamily::pair_crack_constraint,
          MatrixFamily::opposing_cracks,     MatrixFamily::opposing_constraints,
          MatrixFamily::opposing_mixed};
}

bool parse_matrix_family(const std::string& s, MatrixFamily& out) {
  for (auto f : all_matrix_families())
    if (s == family_name(f)) {
      out = f;
      return true;
    }
  return false;
}

namespace {

bool is_array(MatrixFamily f) {
  return f == MatrixFamily::array_cracks || f == MatrixFamily::array_constraints;
}

bool is_opposing(MatrixFamily f) {
  return f == MatrixFamily::opposing_cracks || f == MatrixFamily::opposing_constraints ||
         f == MatrixFamily::opposing_mixed;
}

}  // namespace

int MatrixKernelSpec::dim() const { return is_array(family) ? nu : 2; }

void MatrixKernelSpec::validate() const {
  if (is_array(family)) {
    if (nu < 2) throw Error(ErrorCode::InvalidConfig, "nu must be at least 2, got " + std::to_string(nu));
    if (!offsets.empty() && int(offsets.size()) != nu)
      throw Error(ErrorCode::InvalidConfig, "array kernels need nu tip offsets");
  }
  if (is_opposing(family) && offsets.size() > 1)
    throw Error(ErrorCode::InvalidConfig, "opposing kernels take a single offset M");
  if (N < 1) throw Error(ErrorCode::InvalidConfig, "row separation N must be at least 1");
  if (family == MatrixFamily::mixed_array && std::abs(psi) == 0.0)
    throw Error(ErrorCode::InvalidConfig, "Floquet multiplier psi must be nonzero");
}

namespace {

Eigen::Matrix2cd mat2(cplx a, cplx b, cplx c, cplx d) {
  Eigen::Matrix2cd m;
  m << a, b, c, d;
  return m;
}

cplx tri_N(cplx z, cplx omega) {
  cplx n = tri_roots(z, tri_w2(omega)).q - 2.0;
  if (std::abs(n) < 1e-13) throw Error(ErrorCode::SingularN, "N(z) vanishes");
  return n;
}

struct HexParts {
  cplx C, M, D;
};

HexParts hex_parts(cplx z, cplx omega) {
  cplx C = hex_cw(omega);
  if (std::abs(C) < 1e-14) throw Error(ErrorCode::DegeneratePoint, "omega = 2");
  cplx h = tri_roots(z, hex_w2(omega)).t;
  cplx M = ((1.0 + 1.0 / z) * h + 1.0) / C;
  return {C, M, C * C - (1.0 + z) * (1.0 + 1.0 / z)};
}

}  // namespace

CMat eval_matrix_kernel(const MatrixKernelSpec& s, cplx z) {
  s.validate();
  const int N = s.N;
  CMat K;
  switch (s.family) {
    case MatrixFamily::tri_crack_2x2: {
      cplx n = tri_N(z, s.omega);
      Eigen::Matrix2cd kinv = mat2(n + 2.0, -1.0 - z, -1.0 - 1.0 / z, n + 2.0) / n;
      K = kinv.inverse();
      break;
    }
    case MatrixFamily::hex_constraint_2x2: {
      HexParts p = hex_parts(z, s.omega);
      Eigen::Matrix2cd A = mat2(-p.C, 1.0 + z, 1.0 + 1.0 / z, -p.C) / p.M;
      Eigen::Matrix2cd kinv = Eigen::Matrix2cd::Identity() + A.inverse();
      K = kinv.inverse();
      break;
    }
    case MatrixFamily::array_cracks:
    case MatrixFamily::array_constraints: {
      Sq b = sq_at(z, s.omega);
      cplx d = s.family == MatrixFamily::array_cracks ? b.crack() : b.constraint();
      const int nu = s.nu;
      K.resize(nu, nu);
      for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nu; ++j) {
          long e = s.offset(nu - 1 - i) - s.offset(nu - 1 - j);
          K(i, j) = d * std::pow(b.lam, N * std::abs(i - j)) * std::pow(z, double(e));
        }
      if (s.perturb) K(0, 1) *= b.lam;
      return K;
    }
    case MatrixFamily::mixed_array: {
      Sq b = sq_at(z, s.omega);
      cplx l = b.lam, psi = s.psi;
      auto P = [&](int n) { return std::pow(l, n) - psi; };
      auto Q = [&](int n) { return std::pow(l, n) - 1.0 / psi; };
      cplx pq = P(N) * Q(N);
      K = mat2(-(P(N) / psi + std::pow(l, N + 2) * Q(N)) / (1.0 - l * l),
               (-std::pow(l, N - 1) * P(N) + l * l * psi * Q(N)) / (1.0 + l),
               l * (-P(N - 1) / psi + std::pow(l, N) * Q(N - 1)) / (1.0 + l),
               (1.0 - l) / (1.0 + l) * (1.0 - std::pow(l, 2 * N))) /
          pq;
      break;
    }
    case MatrixFamily::pair_crack_constraint: {
      Sq b = sq_at(z, s.omega);
      cplx l = b.lam;
      K = mat2((1.0 + l * l) / (1.0 - l * l), -std::pow(l, N) * (1.0 + l * l) / (1.0 + l),
               std::pow(l, N + 1) / (1.0 + l), (1.0 - l) / (1.0 + l));
      break;
    }
    case MatrixFamily::opposing_cracks:
    case MatrixFamily::opposing_constraints:
    case MatrixFamily::opposing_mixed: {
      Sq b = sq_at(z, s.omega);
      cplx l = b.lam, lN = std::pow(l, N);
      cplx zM = std::pow(z, double(s.offset(0)));
      if (s.family == MatrixFamily::opposing_cracks)
        K = mat2((1.0 + l) / (1.0 - l), lN * zM, -lN / zM,
                 (1.0 - l) / (1.0 + l) * (1.0 - std::pow(l, 2 * N)));
      else if (s.family == MatrixFamily::opposing_constraints)
        K = mat2((1.0 - l * l) / (1.0 + l * l), lN * zM, -lN / zM,
                 (1.0 + l * l) / (1.0 - l * l) * (1.0 - std::pow(l, 2 * N)));
      else
        K = mat2((1.0 - l * l) / (1.0 + l * l), -(1.0 - l) * lN * zM,
                 -(1.0 - l) * l / (1.0 + l * l) * lN / zM,
                 (1.0 - l) / (1.0 + l) * (1.0 + std::pow(l, 2 * N + 1)));
      break;
    }
  }
  if (s.perturb) {
    if (s.family == MatrixFamily::tri_crack_2x2 || s.family == MatrixFamily::hex_constraint_2x2)
      K(0, 1) *= tri_roots(z, tri_w2(s.omega)).t;
    else
      K(0, 1) *= square_branches(z, s.omega).lam;
  }
  return K;
}

Eigen::Matrix2cd DKForm::R(cplx z) { return mat2(0.0, z, 1.0, 0.0); }

Eigen::Matrix2cd DKForm::K(cplx z) const {
  cplx p = a1(z), q = a2(z);
  return (p * Eigen::Matrix2cd::Identity() + q * R(z)) / (p * p - z * q * q);
}

DKForm dk_form(const MatrixKernelSpec& s) {
  cplx w = s.omega;
  if (s.family == MatrixFamily::tri_crack_2x2)
    return {[w](cplx z) { return 1.0 + 2.0 / tri_N(z, w); },
            [w](cplx z) { return (1.0 + 1.0 / z) / tri_N(z, w); }};
  if (s.family == MatrixFamily::hex_constraint_2x2)
    return {[w](cplx z) {
              HexParts p = hex_parts(z, w);
              return 1.0 - p.C * p.M / p.D;
            },
            [w](cplx z) {
              HexParts p = hex_parts(z, w);
              return (1.0 + 1.0 / z) * p.M / p.D;
            }};
  throw Error(ErrorCode::UnsupportedFamily,
              std::string(family_name(s.family)) + " has no Daniele-Khrapkov form");
}

cplx det_closed_form(const MatrixKernelSpec& s, cplx z) {
  s.validate();
  const int N = s.N;
  switch (s.family) {
    case MatrixFamily::array_cracks:
    case MatrixFamily::array_constraints: {
      Sq b = sq_at(z, s.omega);
      cplx d = s.family == MatrixFamily::array_cracks ? b.crack() : b.constraint();
      return std::pow(d, s.nu) * std::pow(1.0 - std::pow(b.lam, 2 * N), s.nu - 1);
    }
    case MatrixFamily::mixed_array: {
      cplx l = sq_at(z, s.omega).lam, psi = s.psi;
      return (1.0 + std::pow(l, 3)) * (std::pow(l, -N) + std::pow(l, N - 1)) /
             ((1.0 + l) * (1.0 + l) * (std::pow(l, -N) + std::pow(l, N) - (psi + 1.0 / psi)));
    }
    case MatrixFamily::pair_crack_constraint: {
      cplx l = sq_at(z, s.omega).lam;
      return (1.0 + l * l) * (1.0 + std::pow(l, 2 * N + 1)) / ((1.0 + l) * (1.0 + l));
    }
    case MatrixFamily::opposing_cracks:
    case MatrixFamily::opposing_constraints:
      return 1.0;
    case MatrixFamily::opposing_mixed: {
      cplx l = sq_at(z, s.omega).lam;
      return (1.0 - l) * (1.0 - l) / (1.0 + l * l);
    }
    default:
      throw Error(ErrorCode::UnsupportedFamily,
                  std::string(family_name(s.family)) + ": determinant comes from dk_form");
  }
}

std::function<CMat(cplx)> diag_limit_defect(const MatrixKernelSpec& s) {
  s.validate();
  MatrixKernelSpec spec = s;
  switch (s.family) {
    case MatrixFamily::array_cracks:
    case MatrixFamily::array_constraints:
      return [spec](cplx z) -> CMat {
        Sq b = sq_at(z, spec.omega);
        cplx d = spec.family == MatrixFamily::array_cracks ? b.crack() : b.constraint();
        return d * CMat::Identity(spec.nu, spec.nu);
      };
    case MatrixFamily::pair_crack_constraint:
      return [spec](cplx z) -> CMat {
        cplx l = sq_at(z, spec.omega).lam;
        return mat2((1.0 + l * l) / (1.0 - l * l), 0.0, 0.0, (1.0 - l) / (1.0 + l));
      };
    case MatrixFamily::opposing_cracks:
      return [spec](cplx z) -> CMat {
        cplx l = sq_at(z, spec.omega).lam;
        return mat2((1.0 + l) / (1.0 - l), 0.0, 0.0, (1.0 - l) / (1.0 + l));
      };
    case MatrixFamily::opposing_constraints:
      return [spec](cplx z) -> CMat {
        cplx l = sq_at(z, spec.omega).lam;
        return mat2((1.0 - l * l) / (1.0 + l * l), 0.0, 0.0, (1.0 + l * l) / (1.0 - l * l));
      };
    case MatrixFamily::opposing_mixed:
      return [spec](cplx z) -> CMat {
        cplx l = sq_at(z, spec.omega).lam;
        return mat2((1.0 - l * l) / (1.0 + l * l), 0.0, 0.0, (1.0 - l) / (1.0 + l));
      };
    case MatrixFamily::mixed_array:
      // P_N -> -psi, Q_N -> -1/psi: the coincident crack and constraint stay coupled
      return [spec](cplx z) -> CMat {
        cplx l = sq_at(z, spec.omega).lam;
        return mat2(1.0 / (1.0 - l * l), -l * l / (1.0 + l), l / (1.0 + l), (1.0 - l) / (1.0 + l));
      };
    default:
      throw Error(ErrorCode::UnsupportedFamily,
                  std::string(family_name(s.family)) + " has no row-separation limit");
  }
}

std::vector<RowComb> unknown_rows(const MatrixKernelSpec& s) {
  s.validate();
  const long N = s.N, M = s.offset(0);
  switch (s.family) {
    case MatrixFamily::tri_crack_2x2: return {{{{0, 1.0}}, 0}, {{{-1, 1.0}}, 0}};
    case MatrixFamily::hex_constraint_2x2: return {{{{1, 1.0}}, 0, false}, {{{-1, 1.0}}, 0, true}};
    case MatrixFamily::array_cracks:
    case MatrixFamily::array_constraints: {
      std::vector<RowComb> out;
      for (int i = 0; i < s.nu; ++i) {
        long j = s.nu - 1 - i;
        if (s.family == MatrixFamily::array_cracks)
          out.push_back({{{j * N, 1.0}, {j * N - 1, -1.0}}, s.offset(int(j))});
        else
          out.push_back({{{j * N + 1, 1.0}, {j * N - 1, 1.0}}, s.offset(int(j))});
      }
      return out;
    }
    case MatrixFamily::mixed_array: return {{{{1, 1.0}}, 0}, {{{0, 1.0}, {-1, -1.0}}, 0}};
    case MatrixFamily::pair_crack_constraint:
      return {{{{N + 1, 1.0}, {N - 1, 1.0}}, 0}, {{{0, 1.0}, {-1, -1.0}}, 0}};
    case MatrixFamily::opposing_cracks:
      return {{{{N, 1.0}, {N - 1, -1.0}}, M}, {{{0, 1.0}, {-1, -1.0}}, 0}};
    case MatrixFamily::opposing_constraints:
      return {{{{N + 1, 1.0}, {N - 1, 1.0}}, M}, {{{1, 1.0}, {-1, 1.0}}, 0}};
    case MatrixFamily::opposing_mixed:
      return {{{{N + 1, 1.0}, {N - 1, 1.0}}, M}, {{{0, 1.0}, {-1, -1.0}}, 0}};
  }
  return {};
}

std::vector<ConstantSite> forcing_constants(const MatrixKernelSpec& s) {
  s.validate();
  const long N = s.N, M = s.offset(0);
  auto u = [](long x, long y) { return ConstantSite{site_id(false, x, y), x, y, false}; };
  switch (s.family) {
    case MatrixFamily::tri_crack_2x2: return {u(0, -1)};
    case MatrixFamily::hex_constraint_2x2: return {u(0, 0), {site_id(true, -1, 0), -1, 0, true}};
    case MatrixFamily::array_constraints: {
      std::vector<ConstantSite> out;
      for (int j = 0; j < s.nu; ++j) {
        out.push_back(u(s.offset(j) - 1, j * N));
        out.push_back(u(s.offset(j), j * N));
      }
      return out;
    }
    case MatrixFamily::mixed_array: return {u(-1, 0), u(0, 0)};
    case MatrixFamily::pair_crack_constraint: return {u(-1, N), u(0, N)};
    case MatrixFamily::opposing_constraints: return {u(M - 1, N), u(M, N), u(-1, 0), u(0, 0)};
    case MatrixFamily::opposing_mixed: return {u(M - 1, N), u(M, N)};
    default: return {};
  }
}

namespace {

struct ForcingAt {
  CVecE base;
  std::vector<CVecE> terms;
};

ForcingAt forcing_at(const MatrixKernelSpec& s, const IncidentField& inc, cplx z) {
  const long N = s.N, M = s.offset(0);
  const int n = s.dim();
  CMat K = eval_matrix_kernel(s, z);
  CMat IK = CMat::Identity(n, n) - K;
  auto hm = [&](long y, long m) { return inc.half_u(y, m, Side::minus, z); };
  auto hp = [&](long y, long m) { return inc.half_u(y, m, Side::plus, z); };
  cplx mu = 4.0 - z - 1.0 / z - s.omega * s.omega;
  Eigen::Matrix2cd flip = mat2(-1.0, 0.0, 0.0, 1.0);  // I2 - I1
  ForcingAt f;
  switch (s.family) {
    case MatrixFamily::tri_crack_2x2: {
      cplx nz = tri_N(z, s.omega);
      CMat KN = K / nz;
      cplx a = inc.u(0, -1);
      f.base = IK * vec2(hm(0, 0), hm(-1, 0)) + KN * vec2(-z * a, a);
      f.terms.push_back(KN * vec2(-z, 1.0));
      break;
    }
    case MatrixFamily::hex_constraint_2x2: {
      f.base = IK * vec2(hm(1, 0) + z * inc.u(0, 0),
                         inc.half_v(-1, 0, Side::minus, z) - inc.v(-1, 0));
      f.terms.push_back(IK * vec2(z, 0.0));
      f.terms.push_back(IK * vec2(0.0, -1.0));
      break;
    }
    case MatrixFamily::array_cracks:
    case MatrixFamily::array_constraints: {
      CVecE chi(n);
      for (int i = 0; i < n; ++i) {
        long j = n - 1 - i, Mj = s.offset(int(j));
        chi(i) = s.family == MatrixFamily::array_cracks ? hm(j * N, Mj) - hm(j * N - 1, Mj)
                                                        : mu * hm(j * N, Mj);
      }
      f.base = IK * chi;
      if (s.family == MatrixFamily::array_constraints)
        for (int j = 0; j < n; ++j) {
          int i = n - 1 - j;
          f.terms.push_back(-IK.col(i));
          f.terms.push_back(z * IK.col(i));
        }
      break;
    }
    case MatrixFamily::mixed_array: {
      CMat P = IK * mat2(1.0, 1.0, 0.0, 1.0);
      f.base = P * vec2((mu - 1.0) * hm(0, 0), hm(0, 0) - hm(-1, 0));
      f.terms.push_back(P * vec2(-1.0, 0.0));
      f.terms.push_back(P * vec2(z, 0.0));
      break;
    }
    case MatrixFamily::pair_crack_constraint:
      f.base = IK * vec2(mu * hm(N, 0), hm(0, 0) - hm(-1, 0));
      f.terms.push_back(IK * vec2(-1.0, 0.0));
      f.terms.push_back(IK * vec2(z, 0.0));
      break;
    case MatrixFamily::opposing_cracks:
      f.base = IK * flip * vec2(hp(N, M) - hp(N - 1, M), hm(0, 0) - hm(-1, 0));
      break;
    case MatrixFamily::opposing_constraints: {
      CMat P = IK * flip;
      f.base = P * vec2(mu * hp(N, M), mu * hm(0, 0));
      f.terms.push_back(P * vec2(1.0, 0.0));
      f.terms.push_back(P * vec2(-z, 0.0));
      f.terms.push_back(P * vec2(0.0, -1.0));
      f.terms.push_back(P * vec2(0.0, z));
      break;
    }
    case MatrixFamily::opposing_mixed: {
      CMat P = IK * flip;
      f.base = P * vec2(mu * hp(N, M), hm(0, 0) - hm(-1, 0));
      f.terms.push_back(P * vec2(1.0, 0.0));
      f.terms.push_back(P * vec2(-z, 0.0));
      break;
    }
  }
  return f;
}

Lattice matrix_lattice(MatrixFamily f) {
  if (f == MatrixFamily::tri_crack_2x2) return Lattice::triangular;
  if (f == MatrixFamily::hex_constraint_2x2) return Lattice::honeycomb;
  return Lattice::square;
}

}  // namespace

AffineForcing vector_forcing(const MatrixKernelSpec& s, const Incidence& inc) {
  return vector_forcing(s, std::make_shared<PlaneWave>(inc));
}

AffineForcing vector_forcing(const MatrixKernelSpec& s, std::shared_ptr<const IncidentField> inc) {
  s.validate();
  if (inc->lattice() != matrix_lattice(s.family))
    throw Error(ErrorCode::InvalidConfig, "incidence lattice does not match kernel family");
  AffineForcing c;
  c.dim = s.dim();
  c.base = [s, inc](cplx z) { return forcing_at(s, *inc, z).base; };
  auto consts = forcing_constants(s);
  for (std::size_t k = 0; k < consts.size(); ++k)
    c.terms.push_back({consts[k].id, [s, inc, k](cplx z) { return forcing_at(s, *inc, z).terms[k]; }});
  return c;
}

}  // namespace lwh
