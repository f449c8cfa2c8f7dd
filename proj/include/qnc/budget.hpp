#pragma once

// Output-noise budget of the cancellation scheme, in the dimensionless
// momentum units of the oscillators.

namespace qnc {

struct NoiseBudget {
  double measurement = 0.0;  // 1 / (8 eta k)
  double thermal = 0.0;      // 4 (2 n_T + 1) / gamma
  double signal = 0.0;       // 4 <Re[F(nu)]^2> / gamma^2
  double backaction = 0.0;   // 8 k / gamma^2, reported even when cancelled
  bool backaction_cancelled = true;
  double total = 0.0;        // sum of the active terms
};

struct OptomechParams {
  double g0 = 1.0;          // single-photon coupling rate
  double alpha_sq = 1.0;    // steady-state cavity photon number |alpha|^2
  double kappa = 1.0;       // cavity damping rate
  double m = 1.0;           // oscillator mass
  double nu_physical = 1.0; // oscillator frequency

  void validate() const;
  double coupling() const;  // g = alpha g0
};

// [exp(hbar nu / kT) - 1]^-1; an infinite ratio (T = 0) gives 0.
double thermal_occupation(double hbar_nu_over_kT);

NoiseBudget s_out(double k, double eta, double gamma, double n_T, double signal_power,
                  bool cancelled);

// k at which back-action noise equals thermal noise: gamma (n_T + 1/2).
double backaction_dominance_threshold(double gamma, double n_T);

// alpha g0 needed to reach that k: gamma kappa (2 n_T + 1) / 4.
double coupling_criterion(double gamma, double kappa, double n_T);

// k = 2 g / kappa.
double measurement_rate(double g, double kappa);

// Multiplies by hbar nu m / 2.
double to_physical_force_power(double value, double m, double nu_physical, double hbar);
double from_physical_force_power(double value, double m, double nu_physical, double hbar);

}  // namespace qnc
