#pragma once

// Frequency-domain forward models: how a force spectrum F(w) appears in the
// measured signals of the broadband (quadrature-measurement) and narrowband
// (modulated position-measurement) cancellation schemes.

#include <optional>

#include "qnc/model.hpp"

namespace qnc {

enum class TransferScheme { broadband, narrowband };

struct TransferContext {
  double nu = 1.0;      // physical frequency
  double gamma = 0.0;   // damping rate
  double Omega = 0.0;   // effective frequency (narrowband only)
  TransferScheme scheme = TransferScheme::broadband;

  static TransferContext broadband(double nu, double gamma);
  static TransferContext narrowband(double nu, double gamma, double Omega);

  void validate() const;
  // The frequency G resonates at: nu (broadband) or Omega (narrowband).
  double resonance() const { return scheme == TransferScheme::broadband ? nu : Omega; }
};

// Uniform output grid for the forward models.
struct OutputGrid {
  double omega0 = 0.0;
  double d_omega = 1.0;
  std::size_t count = 1;
};

cplx A(cplx s, double gamma);

// (gamma/2 - i w)^2 + c^2 with c = nu (broadband) or Omega (narrowband).
cplx G(cplx omega, const TransferContext& ctx);

// G(w) = kGFactorSign * A(w + nu) A(w - nu) identically in w.
inline constexpr double kGFactorSign = -1.0;

// x_f(w) = [nu S_p(w) + (gamma/2 - i w) S_x(w)] / G(w), elementwise.
Spectrum driven_response(const Spectrum& S_x, const Spectrum& S_p, const TransferContext& ctx);

struct BroadbandSignals {
  Spectrum z;        // measurement of x1 + y_{-2nu}
  Spectrum z_prime;  // measurement of x1 + y', the pi/2-shifted partner
};

// z_f(w)  = -F(w-nu)/A(w+nu) + nu F(w)/G(w) +  F(w+nu)/A(w-nu)
// z'_f(w) = i F(w-nu)/A(w+nu) + nu F(w)/G(w) + i F(w+nu)/A(w-nu)
// F must be Hermitian. Shifted samples outside F's grid count as zero only
// beyond F.support_max(); otherwise GridError. The output grid defaults to
// F's grid.
BroadbandSignals forward_broadband(const Spectrum& F, const TransferContext& ctx,
                                   std::optional<OutputGrid> grid = std::nullopt);

// [gamma/2 - i(w - Omega)] / (2 G(w)), narrowband G.
cplx B(double omega, const TransferContext& ctx);

struct NarrowbandSignals {
  Spectrum z_pos;        // positive-frequency part of z = y_+ + y_-
  Spectrum z_tilde_pos;  // positive-frequency part of the pi/2-shifted pair
};

// z_pos(w)       = B(w) [F+(w+nu-Om) + F-(w-nu-Om) + F+(w+nu+Om) + F-(w-nu+Om)]
// z_tilde_pos(w) = i B(w) [F+(w+nu-Om) - F-(w-nu-Om) + F+(w+nu+Om) - F-(w-nu+Om)]
// with F+ / F- the positive / negative-frequency parts of F (F(0) split
// evenly). The output grid defaults to the w >= 0 half of F's grid.
NarrowbandSignals forward_narrowband(const Spectrum& F, const TransferContext& ctx,
                                     std::optional<OutputGrid> grid = std::nullopt);

// Linear response of z (or of z_tilde with phase = pi/2) obtained by solving
// the damped effective-oscillator equations directly:
//   z(w) = (i/2)[ e^{i phase} F(w+nu-Om)/D-(w) - e^{-i phase} F(w-nu+Om)/D+(w)
//               + e^{i phase} F(w+nu+Om)/D+(w) - e^{-i phase} F(w-nu-Om)/D-(w) ]
// with D-+(w) = gamma/2 - i(w -+ Omega). This is what the time-domain
// narrowband simulation produces; it differs from forward_narrowband in the
// resonant denominator.
Spectrum narrowband_quadrature_response(const Spectrum& F, const TransferContext& ctx,
                                        double phase,
                                        std::optional<OutputGrid> grid = std::nullopt);

}  // namespace qnc
