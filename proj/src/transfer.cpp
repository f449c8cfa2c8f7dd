#include "qnc/transfer.hpp"

#include <cmath>
#include <sstream>

#include "qnc/errors.hpp"

namespace qnc {

namespace {

constexpr cplx kI{0.0, 1.0};

// F at omega; zero beyond the declared support, GridError when unknown.
cplx sample(const Spectrum& F, double omega) {
  if (const auto i = F.index_of(omega)) return F[*i];
  if (const auto s = F.support_max(); s && std::abs(omega) > *s * (1.0 + 1e-12)) return {0.0, 0.0};
  std::ostringstream os;
  os << "shifted frequency " << omega << " lies outside the force grid ["
     << F.omega0() << ", " << F.last_omega() << "] and no support bound excludes it";
  throw GridError(os.str());
}

cplx positive_part(const Spectrum& F, double omega) {
  if (std::abs(omega) <= kLatticeTol * F.d_omega()) return 0.5 * sample(F, 0.0);
  return omega > 0.0 ? sample(F, omega) : cplx{0.0, 0.0};
}

cplx negative_part(const Spectrum& F, double omega) {
  if (std::abs(omega) <= kLatticeTol * F.d_omega()) return 0.5 * sample(F, 0.0);
  return omega < 0.0 ? sample(F, omega) : cplx{0.0, 0.0};
}

void require_divides(double d_omega, double step, const char* what) {
  if (!as_integer(step / d_omega)) {
    std::ostringstream os;
    os << "grid spacing " << d_omega << " does not divide " << what << " = " << step;
    throw GridError(os.str());
  }
}

void require_hermitian(const Spectrum& F, const char* op) {
  if (F.symmetry() != Symmetry::hermitian)
    throw InvalidArgument(std::string(op) + ": force spectrum must be Hermitian");
}

void require_damping(const TransferContext& ctx, const char* op) {
  if (!(ctx.gamma > 0.0))
    throw PoleError(std::string(op) + ": gamma = 0 has no steady state (poles on the real axis)");
}

OutputGrid grid_or(const Spectrum& F, std::optional<OutputGrid> grid) {
  if (grid) {
    if (std::abs(grid->d_omega - F.d_omega()) > 1e-12 * F.d_omega())
      throw GridError("output grid spacing differs from the force grid spacing");
    if (grid->count == 0) throw InvalidArgument("output grid must have at least one point");
    return *grid;
  }
  return {F.omega0(), F.d_omega(), F.size()};
}

}  // namespace

TransferContext TransferContext::broadband(double nu, double gamma) {
  TransferContext c{nu, gamma, 0.0, TransferScheme::broadband};
  c.validate();
  return c;
}

TransferContext TransferContext::narrowband(double nu, double gamma, double Omega) {
  TransferContext c{nu, gamma, Omega, TransferScheme::narrowband};
  c.validate();
  return c;
}

void TransferContext::validate() const {
  if (!(nu > 0.0)) throw InvalidArgument("transfer: nu must be > 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("transfer: gamma must be >= 0");
  if (scheme == TransferScheme::narrowband && !(Omega > 0.0 && Omega < nu))
    throw InvalidArgument("transfer: narrowband requires 0 < Omega < nu");
}

cplx A(cplx s, double gamma) { return s + kI * (0.5 * gamma); }

cplx G(cplx omega, const TransferContext& ctx) {
  const cplx a = 0.5 * ctx.gamma - kI * omega;
  const double c = ctx.resonance();
  return a * a + c * c;
}

Spectrum driven_response(const Spectrum& S_x, const Spectrum& S_p, const TransferContext& ctx) {
  ctx.validate();
  require_damping(ctx, "driven_response");
  if (S_x.size() != S_p.size() || std::abs(S_x.omega0() - S_p.omega0()) > 1e-12 ||
      std::abs(S_x.d_omega() - S_p.d_omega()) > 1e-15)
    throw GridError("driven_response: S_x and S_p are on different grids");
  const double c = ctx.resonance();
  std::vector<cplx> out(S_x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = S_x.omega(i);
    out[i] = (c * S_p[i] + (0.5 * ctx.gamma - kI * w) * S_x[i]) / G(w, ctx);
  }
  const Symmetry sym = (S_x.symmetry() == Symmetry::hermitian &&
                        S_p.symmetry() == Symmetry::hermitian)
                           ? Symmetry::hermitian
                           : Symmetry::general;
  return Spectrum(S_x.omega0(), S_x.d_omega(), std::move(out), sym);
}

BroadbandSignals forward_broadband(const Spectrum& F, const TransferContext& ctx,
                                   std::optional<OutputGrid> grid) {
  ctx.validate();
  if (ctx.scheme != TransferScheme::broadband)
    throw InvalidArgument("forward_broadband: context must be broadband");
  require_hermitian(F, "forward_broadband");
  require_damping(ctx, "forward_broadband");
  require_divides(F.d_omega(), ctx.nu, "nu");
  const auto g = grid_or(F, grid);
  const double nu = ctx.nu;
  std::vector<cplx> z(g.count), zp(g.count);
  for (std::size_t i = 0; i < g.count; ++i) {
    const double w = g.omega0 + static_cast<double>(i) * g.d_omega;
    const cplx below = sample(F, w - nu) / A(w + nu, ctx.gamma);
    const cplx above = sample(F, w + nu) / A(w - nu, ctx.gamma);
    const cplx centre = nu * sample(F, w) / G(w, ctx);
    z[i] = -below + centre + above;
    zp[i] = kI * below + centre + kI * above;
  }
  const bool symmetric = std::abs(2.0 * g.omega0 + static_cast<double>(g.count - 1) * g.d_omega) <=
                         kLatticeTol * g.d_omega;
  const Symmetry sym = symmetric ? Symmetry::hermitian : Symmetry::general;
  return {Spectrum(g.omega0, g.d_omega, std::move(z), sym),
          Spectrum(g.omega0, g.d_omega, std::move(zp), sym)};
}

cplx B(double omega, const TransferContext& ctx) {
  if (ctx.scheme != TransferScheme::narrowband)
    throw InvalidArgument("B: context must be narrowband");
  const cplx g = G(omega, ctx);
  if (std::abs(g) == 0.0) {
    std::ostringstream os;
    os << "B: pole of G at omega = " << omega;
    throw PoleError(os.str());
  }
  return (0.5 * ctx.gamma - kI * (omega - ctx.Omega)) / (2.0 * g);
}

NarrowbandSignals forward_narrowband(const Spectrum& F, const TransferContext& ctx,
                                     std::optional<OutputGrid> grid) {
  ctx.validate();
  if (ctx.scheme != TransferScheme::narrowband)
    throw InvalidArgument("forward_narrowband: context must be narrowband");
  require_hermitian(F, "forward_narrowband");
  require_damping(ctx, "forward_narrowband");
  require_divides(F.d_omega(), ctx.nu, "nu");
  require_divides(F.d_omega(), ctx.Omega, "Omega");

  OutputGrid g;
  if (grid) {
    g = grid_or(F, grid);
  } else {
    const auto zero = F.index_of(0.0);
    if (!zero) throw GridError("forward_narrowband: force grid does not contain w = 0");
    g = {0.0, F.d_omega(), F.size() - *zero};
  }

  const double nu = ctx.nu;
  const double Om = ctx.Omega;
  std::vector<cplx> z(g.count), zt(g.count);
  for (std::size_t i = 0; i < g.count; ++i) {
    const double w = g.omega0 + static_cast<double>(i) * g.d_omega;
    const cplx b = B(w, ctx);
    const cplx p1 = positive_part(F, w + nu - Om);
    const cplx n1 = negative_part(F, w - nu - Om);
    const cplx p2 = positive_part(F, w + nu + Om);
    const cplx n2 = negative_part(F, w - nu + Om);
    z[i] = b * (p1 + n1 + p2 + n2);
    zt[i] = kI * b * (p1 - n1 + p2 - n2);
  }
  return {Spectrum(g.omega0, g.d_omega, std::move(z), Symmetry::positive_part_only),
          Spectrum(g.omega0, g.d_omega, std::move(zt), Symmetry::positive_part_only)};
}

Spectrum narrowband_quadrature_response(const Spectrum& F, const TransferContext& ctx,
                                        double phase, std::optional<OutputGrid> grid) {
  ctx.validate();
  if (ctx.scheme != TransferScheme::narrowband)
    throw InvalidArgument("narrowband_quadrature_response: context must be narrowband");
  require_hermitian(F, "narrowband_quadrature_response");
  require_damping(ctx, "narrowband_quadrature_response");
  require_divides(F.d_omega(), ctx.nu, "nu");
  require_divides(F.d_omega(), ctx.Omega, "Omega");
  const auto g = grid_or(F, grid);
  const double nu = ctx.nu;
  const double Om = ctx.Omega;
  const double hg = 0.5 * ctx.gamma;
  const cplx up = std::polar(1.0, phase);
  const cplx down = std::conj(up);
  std::vector<cplx> z(g.count);
  for (std::size_t i = 0; i < g.count; ++i) {
    const double w = g.omega0 + static_cast<double>(i) * g.d_omega;
    const cplx dm = hg - kI * (w - Om);
    const cplx dp = hg - kI * (w + Om);
    z[i] = 0.5 * kI *
           (up * sample(F, w + nu - Om) / dm - down * sample(F, w - nu + Om) / dp +
            up * sample(F, w + nu + Om) / dp - down * sample(F, w - nu - Om) / dm);
  }
  const bool symmetric = std::abs(2.0 * g.omega0 + static_cast<double>(g.count - 1) * g.d_omega) <=
                         kLatticeTol * g.d_omega;
  return Spectrum(g.omega0, g.d_omega, std::move(z),
                  symmetric ? Symmetry::hermitian : Symmetry::general);
}

}  // namespace qnc
