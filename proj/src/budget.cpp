#include "qnc/budget.hpp"

#include <cmath>

#include "qnc/errors.hpp"

namespace qnc {

void OptomechParams::validate() const {
  if (!(g0 > 0.0 && alpha_sq > 0.0 && kappa > 0.0 && m > 0.0 && nu_physical > 0.0))
    throw InvalidArgument("optomech: all parameters must be > 0");
}

double OptomechParams::coupling() const { return std::sqrt(alpha_sq) * g0; }

double thermal_occupation(double ratio) {
  if (std::isnan(ratio) || !(ratio > 0.0))
    throw InvalidArgument("thermal_occupation: hbar nu / kT must be > 0");
  if (std::isinf(ratio)) return 0.0;
  return 1.0 / std::expm1(ratio);
}

NoiseBudget s_out(double k, double eta, double gamma, double n_T, double signal_power,
                  bool cancelled) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("s_out: eta must lie in (0, 1]");
  if (!(gamma > 0.0)) throw InvalidArgument("s_out: gamma must be > 0");
  if (!(n_T >= 0.0)) throw InvalidArgument("s_out: n_T must be >= 0");
  if (!(signal_power >= 0.0)) throw InvalidArgument("s_out: signal power must be >= 0");
  if (k < 0.0) throw InvalidArgument("s_out: k must be >= 0");
  if (k == 0.0) throw DivergentBudget("s_out: k = 0 makes the measurement noise infinite");

  NoiseBudget b;
  b.measurement = 1.0 / (8.0 * eta * k);
  b.thermal = 4.0 * (2.0 * n_T + 1.0) / gamma;
  b.signal = 4.0 * signal_power / (gamma * gamma);
  b.backaction = 8.0 * k / (gamma * gamma);
  b.backaction_cancelled = cancelled;
  b.total = b.measurement + b.thermal + b.signal + (cancelled ? 0.0 : b.backaction);
  return b;
}

double backaction_dominance_threshold(double gamma, double n_T) {
  if (!(gamma > 0.0) || !(n_T >= 0.0))
    throw InvalidArgument("backaction_dominance_threshold: need gamma > 0, n_T >= 0");
  return gamma * (n_T + 0.5);
}

double coupling_criterion(double gamma, double kappa, double n_T) {
  if (!(gamma > 0.0) || !(kappa > 0.0) || !(n_T >= 0.0))
    throw InvalidArgument("coupling_criterion: need gamma, kappa > 0 and n_T >= 0");
  return gamma * kappa * (2.0 * n_T + 1.0) / 4.0;
}

double measurement_rate(double g, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("measurement_rate: kappa must be > 0");
  return 2.0 * g / kappa;
}

double to_physical_force_power(double value, double m, double nu_physical, double hbar) {
  if (!(m > 0.0) || !(nu_physical > 0.0))
    throw InvalidArgument("to_physical_force_power: m and nu must be > 0");
  return value * hbar * nu_physical * m / 2.0;
}

double from_physical_force_power(double value, double m, double nu_physical, double hbar) {
  if (!(m > 0.0) || !(nu_physical > 0.0) || !(hbar > 0.0))
    throw InvalidArgument("from_physical_force_power: m, nu and hbar must be > 0");
  return value / (hbar * nu_physical * m / 2.0);
}

}  // namespace qnc
