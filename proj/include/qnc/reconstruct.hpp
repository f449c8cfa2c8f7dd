#pragma once

// Exact algebraic inversion of the forward models in transfer.hpp.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnc/model.hpp"
#include "qnc/transfer.hpp"

namespace qnc {

enum class ReconstructionScheme {
  broadband_series,
  broadband_three_term,
  narrowband_case1,
  narrowband_case2
};

std::string to_string(ReconstructionScheme s);

struct ReconstructionReport {
  explicit ReconstructionReport(Spectrum f) : force(std::move(f)) {}

  Spectrum force;
  std::size_t n_terms_used = 1;
  double truncation_estimate = 0.0;  // magnitude of the last included term
  double residual = 0.0;             // forward-model mismatch, relative to max |signal|
  ReconstructionScheme scheme = ReconstructionScheme::broadband_series;
  std::vector<std::string> warnings;
};

// alpha_n = G(w_n) [z(w_n) - i z'(w_n)] / ((1 - i) nu),   w_n = w + n nu
cplx alpha_n(int n, double omega, const Spectrum& z, const Spectrum& z_prime,
             const TransferContext& ctx);

// Coefficient of F_{n+1} in F_n = alpha_n - beta_n F_{n+1}:
//   beta_n = 2 G(w_n) / ((1 - i) nu A(w_n - nu)) = -(2/(1 - i)) A(w_{n+1}) / nu
// (the sign follows from G = -A(w+nu)A(w-nu)).
cplx beta_n(int n, double omega, const TransferContext& ctx);

// Coefficients of F_n = -a z(w_n) + (a/b) nu F_{n+1} - (a/c) F_{n+2} with
// w_n = (n+1) nu + w and F_n = F(n nu + w).
struct ThreeTermCoefficients {
  cplx a;
  cplx b;
  cplx c;
};
ThreeTermCoefficients three_term_coefficients(double omega_n, const TransferContext& ctx);

struct BroadbandOptions {
  std::optional<int> n_max;           // highest comb index kept
  std::optional<double> support_max;  // F = 0 above this frequency
  // Maximum accepted relative forward-model residual; infinity disables the
  // check (e.g. for noisy or deliberately truncated input).
  double residual_tolerance = 1e-6;
};

// The signed series terms (-1)^n alpha_n prod_{k<n} beta_k for n = 0..n_max at
// base frequency omega.
std::vector<cplx> broadband_series_terms(const Spectrum& z, const Spectrum& z_prime,
                                         const TransferContext& ctx, double omega, int n_max);

// Two-configuration inversion, evaluated backward from the top of the comb.
// Output lives on the signal grid (symmetric about zero, Hermitian).
ReconstructionReport reconstruct_broadband(const Spectrum& z, const Spectrum& z_prime,
                                           const TransferContext& ctx,
                                           const BroadbandOptions& opts);

// Single-configuration three-term recursion.
ReconstructionReport reconstruct_broadband_three_term(const Spectrum& z,
                                                      const TransferContext& ctx,
                                                      const BroadbandOptions& opts);

// Offsets Delta = delta0 + j * d_omega (d_omega of the signal grid), j < count.
struct DeltaGrid {
  double delta0 = 0.0;
  std::size_t count = 1;
};

// F+(nu + Delta) = [z(Omega + Delta) - i z~(Omega + Delta)] / (2 B(Omega + Delta)).
ReconstructionReport reconstruct_narrowband_case1(const Spectrum& z_pos,
                                                  const Spectrum& z_tilde_pos,
                                                  const TransferContext& ctx,
                                                  const DeltaGrid& deltas);

// N = ceil(r / epsilon) with r = gamma / Omega (at least 1).
std::size_t case2_term_count(double r, double epsilon);

struct Case2Options {
  double epsilon = 0.01;
  std::optional<std::size_t> n_terms;  // overrides the r/epsilon rule
};

// F(nu + Delta) = sum_{m<N} (-1)^m S_{2m},
//   S_n = [z((n+1)Omega + Delta) - i z~((n+1)Omega + Delta)] / (2 B((n+1)Omega + Delta))
//       = F+(nu + n Omega + Delta) + F+(nu + (n+2) Omega + Delta).
ReconstructionReport reconstruct_narrowband_case2(const Spectrum& z_pos,
                                                  const Spectrum& z_tilde_pos,
                                                  const TransferContext& ctx,
                                                  const DeltaGrid& deltas,
                                                  const Case2Options& opts);

}  // namespace qnc
