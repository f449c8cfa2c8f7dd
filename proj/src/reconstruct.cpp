#include "qnc/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qnc/errors.hpp"

namespace qnc {

namespace {

constexpr cplx kI{0.0, 1.0};
const cplx kOneMinusI{1.0, -1.0};

cplx signal_at(const Spectrum& s, double omega, const char* op) {
  if (const auto i = s.index_of(omega)) return s[*i];
  std::ostringstream os;
  os << op << ": comb point " << omega << " is outside the signal grid [" << s.omega0() << ", "
     << s.last_omega() << "]";
  throw GridError(os.str());
}

void require_same_grid(const Spectrum& a, const Spectrum& b, const char* op) {
  if (a.size() != b.size() || std::abs(a.omega0() - b.omega0()) > kLatticeTol * a.d_omega() ||
      std::abs(a.d_omega() - b.d_omega()) > 1e-12 * a.d_omega())
    throw GridError(std::string(op) + ": signals are on different grids");
}

struct BroadbandGrid {
  std::size_t zero;    // index of w = 0
  std::size_t per_nu;  // grid points per nu
};

BroadbandGrid broadband_grid(const Spectrum& z, const TransferContext& ctx, const char* op) {
  ctx.validate();
  if (ctx.scheme != TransferScheme::broadband)
    throw InvalidArgument(std::string(op) + ": context must be broadband");
  if (!z.symmetric_about_zero())
    throw GridError(std::string(op) + ": signal grid must be symmetric about w = 0");
  const auto zero = z.index_of(0.0);
  if (!zero) throw GridError(std::string(op) + ": signal grid must contain w = 0");
  const auto per = as_integer(ctx.nu / z.d_omega());
  if (!per || *per < 1) throw GridError(std::string(op) + ": grid spacing does not divide nu");
  return {*zero, static_cast<std::size_t>(*per)};
}

// Highest comb index kept at base frequency w, or -1 when w is beyond the
// support altogether.
int top_index(double w, const TransferContext& ctx, const BroadbandOptions& opts,
              const char* op) {
  if (!opts.n_max && !opts.support_max)
    throw InvalidArgument(std::string(op) +
                          ": an explicit n_max or support bound is required (the series does "
                          "not terminate on its own)");
  int top = std::numeric_limits<int>::max();
  if (opts.n_max) {
    if (*opts.n_max < 0) throw InvalidArgument(std::string(op) + ": n_max must be >= 0");
    top = *opts.n_max;
  }
  if (opts.support_max) {
    const double k = (*opts.support_max - w) / ctx.nu;
    const int s = k < 0.0 ? -1 : static_cast<int>(std::floor(k + 1e-9));
    top = std::min(top, s);
  }
  return top;
}

// Writes the w >= 0 comb values and mirrors them onto w < 0.
Spectrum assemble(const Spectrum& like, std::vector<cplx> out, std::size_t zero) {
  out[zero] = {out[zero].real(), 0.0};
  for (std::size_t m = 1; m <= zero; ++m) out[zero - m] = std::conj(out[zero + m]);
  return Spectrum(like.omega0(), like.d_omega(), std::move(out), Symmetry::hermitian);
}

// max |z_model - z| / max |z| over grid points whose +-nu neighbours are on
// the grid; F is taken from the reconstructed spectrum.
double broadband_residual(const Spectrum& F, const Spectrum& z, const Spectrum* z_prime,
                          const TransferContext& ctx, std::size_t per_nu) {
  double diff = 0.0;
  double scale = 0.0;
  const double nu = ctx.nu;
  for (std::size_t i = per_nu; i + per_nu < z.size(); ++i) {
    const double w = z.omega(i);
    const cplx below = F[i - per_nu] / A(w + nu, ctx.gamma);
    const cplx above = F[i + per_nu] / A(w - nu, ctx.gamma);
    const cplx centre = nu * F[i] / G(w, ctx);
    diff = std::max(diff, std::abs(-below + centre + above - z[i]));
    scale = std::max(scale, std::abs(z[i]));
    if (z_prime) {
      diff = std::max(diff, std::abs(kI * below + centre + kI * above - (*z_prime)[i]));
      scale = std::max(scale, std::abs((*z_prime)[i]));
    }
  }
  return scale > 0.0 ? diff / scale : diff;
}

void check_residual(double residual, double tolerance, const char* op) {
  if (residual > tolerance) {
    std::ostringstream os;
    os << op << ": forward-model residual " << residual << " exceeds tolerance " << tolerance
       << " (n_max too small for the force support?)";
    throw ResidualError(os.str());
  }
}

}  // namespace

std::string to_string(ReconstructionScheme s) {
  switch (s) {
    case ReconstructionScheme::broadband_series: return "broadband_series";
    case ReconstructionScheme::broadband_three_term: return "broadband_three_term";
    case ReconstructionScheme::narrowband_case1: return "narrowband_case1";
    case ReconstructionScheme::narrowband_case2: return "narrowband_case2";
  }
  return "broadband_series";
}

cplx alpha_n(int n, double omega, const Spectrum& z, const Spectrum& z_prime,
             const TransferContext& ctx) {
  const double wn = omega + n * ctx.nu;
  const cplx zs = signal_at(z, wn, "alpha_n");
  const cplx zp = signal_at(z_prime, wn, "alpha_n");
  return G(wn, ctx) * (zs - kI * zp) / (kOneMinusI * ctx.nu);
}

cplx beta_n(int n, double omega, const TransferContext& ctx) {
  const double wn1 = omega + (n + 1) * ctx.nu;
  return kGFactorSign * (2.0 / kOneMinusI) * A(wn1, ctx.gamma) / ctx.nu;
}

ThreeTermCoefficients three_term_coefficients(double omega_n, const TransferContext& ctx) {
  return {A(omega_n + ctx.nu, ctx.gamma), G(omega_n, ctx), -A(omega_n - ctx.nu, ctx.gamma)};
}

std::vector<cplx> broadband_series_terms(const Spectrum& z, const Spectrum& z_prime,
                                         const TransferContext& ctx, double omega, int n_max) {
  std::vector<cplx> terms;
  cplx prod{1.0, 0.0};
  for (int n = 0; n <= n_max; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    terms.push_back(sign * alpha_n(n, omega, z, z_prime, ctx) * prod);
    prod *= beta_n(n, omega, ctx);
  }
  return terms;
}

ReconstructionReport reconstruct_broadband(const Spectrum& z, const Spectrum& z_prime,
                                           const TransferContext& ctx,
                                           const BroadbandOptions& opts) {
  constexpr const char* op = "reconstruct_broadband";
  require_same_grid(z, z_prime, op);
  const auto grid = broadband_grid(z, ctx, op);
  std::vector<cplx> out(z.size());
  std::size_t terms = 1;
  double last = 0.0;

  for (std::size_t b = 0; b < grid.per_nu; ++b) {
    const double w = z.omega(grid.zero + b);
    const int top = top_index(w, ctx, opts, op);
    if (top < 0) continue;
    terms = std::max(terms, static_cast<std::size_t>(top) + 1);
    // F_n = alpha_n - beta_n F_{n+1}, from F_{top+1} = 0 downward
    cplx next{0.0, 0.0};
    for (int n = top; n >= 0; --n) {
      const cplx f = alpha_n(n, w, z, z_prime, ctx) - beta_n(n, w, ctx) * next;
      const std::size_t gi = grid.zero + b + static_cast<std::size_t>(n) * grid.per_nu;
      if (gi < out.size()) out[gi] = f;
      if (n == top) last = std::max(last, std::abs(f));
      next = f;
    }
  }

  ReconstructionReport rep{assemble(z, std::move(out), grid.zero)};
  rep.scheme = ReconstructionScheme::broadband_series;
  rep.n_terms_used = terms;
  rep.truncation_estimate = last;
  rep.residual = broadband_residual(rep.force, z, &z_prime, ctx, grid.per_nu);
  check_residual(rep.residual, opts.residual_tolerance, op);
  return rep;
}

ReconstructionReport reconstruct_broadband_three_term(const Spectrum& z,
                                                      const TransferContext& ctx,
                                                      const BroadbandOptions& opts) {
  constexpr const char* op = "reconstruct_broadband_three_term";
  const auto grid = broadband_grid(z, ctx, op);
  std::vector<cplx> out(z.size());
  std::size_t terms = 1;
  double last = 0.0;

  for (std::size_t b = 0; b < grid.per_nu; ++b) {
    const double w = z.omega(grid.zero + b);
    const int top = top_index(w, ctx, opts, op);
    if (top < 0) continue;
    terms = std::max(terms, static_cast<std::size_t>(top) + 1);
    cplx f1{0.0, 0.0};  // F_{n+1}
    cplx f2{0.0, 0.0};  // F_{n+2}
    for (int n = top; n >= 0; --n) {
      const double wn = (n + 1) * ctx.nu + w;
      const auto c = three_term_coefficients(wn, ctx);
      const cplx f = -c.a * signal_at(z, wn, op) + (c.a / c.b) * ctx.nu * f1 - (c.a / c.c) * f2;
      const std::size_t gi = grid.zero + b + static_cast<std::size_t>(n) * grid.per_nu;
      if (gi < out.size()) out[gi] = f;
      if (n == top) last = std::max(last, std::abs(f));
      f2 = f1;
      f1 = f;
    }
  }

  ReconstructionReport rep{assemble(z, std::move(out), grid.zero)};
  rep.scheme = ReconstructionScheme::broadband_three_term;
  rep.n_terms_used = terms;
  rep.truncation_estimate = last;
  rep.residual = broadband_residual(rep.force, z, nullptr, ctx, grid.per_nu);
  check_residual(rep.residual, opts.residual_tolerance, op);
  return rep;
}

namespace {

void narrowband_checks(const Spectrum& z, const Spectrum& zt, const TransferContext& ctx,
                       const DeltaGrid& deltas, const char* op) {
  ctx.validate();
  if (ctx.scheme != TransferScheme::narrowband)
    throw InvalidArgument(std::string(op) + ": context must be narrowband");
  require_same_grid(z, zt, op);
  if (deltas.count == 0) throw InvalidArgument(std::string(op) + ": empty Delta grid");
  const double hi = deltas.delta0 + static_cast<double>(deltas.count - 1) * z.d_omega();
  if (deltas.delta0 <= -ctx.Omega || hi > ctx.Omega)
    throw InvalidArgument(std::string(op) + ": Delta must lie in (-Omega, Omega]");
}

// [z(w) - i z~(w)] / (2 B(w))
cplx comb_sum(const Spectrum& z, const Spectrum& zt, const TransferContext& ctx, double w,
              const char* op) {
  const cplx b = B(w, ctx);
  if (std::abs(b) < 1e-280) {
    std::ostringstream os;
    os << op << ": B(" << w << ") underflows; the point is ill-conditioned";
    throw PoleError(os.str());
  }
  return (signal_at(z, w, op) - kI * signal_at(zt, w, op)) / (2.0 * b);
}

}  // namespace

ReconstructionReport reconstruct_narrowband_case1(const Spectrum& z_pos,
                                                  const Spectrum& z_tilde_pos,
                                                  const TransferContext& ctx,
                                                  const DeltaGrid& deltas) {
  constexpr const char* op = "reconstruct_narrowband_case1";
  narrowband_checks(z_pos, z_tilde_pos, ctx, deltas, op);
  std::vector<cplx> out(deltas.count);
  for (std::size_t j = 0; j < deltas.count; ++j) {
    const double delta = deltas.delta0 + static_cast<double>(j) * z_pos.d_omega();
    out[j] = comb_sum(z_pos, z_tilde_pos, ctx, ctx.Omega + delta, op);
  }
  ReconstructionReport rep{Spectrum(ctx.nu + deltas.delta0, z_pos.d_omega(), std::move(out),
                                    Symmetry::positive_part_only)};
  rep.scheme = ReconstructionScheme::narrowband_case1;
  rep.n_terms_used = 1;
  if (ctx.gamma > ctx.Omega / 10.0) {
    std::ostringstream os;
    os << "gamma/Omega = " << ctx.gamma / ctx.Omega
       << " > 0.1: the closed form neglects overlapping sidebands";
    rep.warnings.push_back(os.str());
  }
  return rep;
}

std::size_t case2_term_count(double r, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidArgument("case2: epsilon must lie in (0, 1)");
  if (!(r >= 0.0)) throw InvalidArgument("case2: r must be >= 0");
  const double n = std::ceil(r / epsilon * (1.0 - 1e-12));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

ReconstructionReport reconstruct_narrowband_case2(const Spectrum& z_pos,
                                                  const Spectrum& z_tilde_pos,
                                                  const TransferContext& ctx,
                                                  const DeltaGrid& deltas,
                                                  const Case2Options& opts) {
  constexpr const char* op = "reconstruct_narrowband_case2";
  narrowband_checks(z_pos, z_tilde_pos, ctx, deltas, op);
  const std::size_t N = opts.n_terms ? *opts.n_terms
                                     : case2_term_count(ctx.gamma / ctx.Omega, opts.epsilon);
  if (opts.n_terms && N == 0) throw InvalidArgument(std::string(op) + ": n_terms must be >= 1");
  if (!opts.n_terms) (void)case2_term_count(1.0, opts.epsilon);

  std::vector<cplx> out(deltas.count);
  double last = 0.0;
  for (std::size_t j = 0; j < deltas.count; ++j) {
    const double delta = deltas.delta0 + static_cast<double>(j) * z_pos.d_omega();
    cplx acc{0.0, 0.0};
    for (std::size_t m = 0; m < N; ++m) {
      const double w = static_cast<double>(2 * m + 1) * ctx.Omega + delta;
      const cplx term = ((m % 2 == 0) ? 1.0 : -1.0) * comb_sum(z_pos, z_tilde_pos, ctx, w, op);
      acc += term;
      if (m + 1 == N) last = std::max(last, std::abs(term));
    }
    out[j] = acc;
  }
  ReconstructionReport rep{Spectrum(ctx.nu + deltas.delta0, z_pos.d_omega(), std::move(out),
                                    Symmetry::positive_part_only)};
  rep.scheme = ReconstructionScheme::narrowband_case2;
  rep.n_terms_used = N;
  rep.truncation_estimate = last;
  return rep;
}

}  // namespace qnc
