#pragma once

// Monte-Carlo integration of the linear Heisenberg-Langevin equations of
// continuously measured oscillators. Operators are represented by classical
// c-number processes; for linear dynamics with additive Gaussian noise this is
// exact in distribution once the noise normalisations are the quantum ones:
//   back-action  sqrt(8k) xi(t),            <xi xi>   = delta
//   thermal      sqrt(gamma) v_{x,p}(t),    <v v>     = (2 n_T + 1) delta
//   record       r = O + z / sqrt(8k),      <z z>     = delta

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnc/model.hpp"

namespace qnc {

enum class Observable { x1, X_plus, X_minus, y_sum, y_sum_lagged };

std::string to_string(Observable o);
Observable observable_from_string(const std::string& s);

// Gaussian initial state of one oscillator.
struct InitialState {
  double x_mean = 0.0;
  double p_mean = 0.0;
  double variance = 1.0;  // per quadrature; 1 is the (symmetrised) vacuum
};

struct SimulationPlan {
  OscillatorParams params1;
  std::optional<OscillatorParams> params2;
  MeasurementConfig meas;
  Observable measured_observable = Observable::x1;
  ForceDescriptor force1;
  ForceDescriptor force2;

  double dt = 1e-3;
  std::size_t n_steps = 1000;
  std::size_t n_trajectories = 1;
  std::uint64_t base_seed = 0;

  // Effective frequency Omega for the narrowband quadrature scheme.
  std::optional<double> effective_freq;

  // Store every `stride`-th step. Stored records carry noise scaled to the
  // stride window, so their white-noise floor stays 1/(8 eta k).
  std::size_t stride = 1;

  // One entry per oscillator, or a single entry applied to all. Empty means
  // vacuum for every oscillator.
  std::vector<InitialState> initial;

  // Drops every stochastic term (initial spread, thermal, back-action, record
  // noise); the result is the ensemble-mean dynamics.
  bool noise_free = false;

  // Produce the measurement record. Defaults to k > 0; requesting a record at
  // k = 0 is an error.
  std::optional<bool> record;

  // Channels to keep; empty keeps all.
  std::vector<std::string> channels;

  // Worker threads; 0 picks the hardware concurrency. Results do not depend
  // on this value.
  std::size_t threads = 1;

  // Largest dt accepted for the plan's frequencies and rates.
  double max_dt() const;
  void validate() const;
  bool wants_record() const;
};

// Seed of trajectory i: a bijective mix of base_seed + i, so seeds are
// pairwise distinct.
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::size_t index);

// Single oscillator at params1, measuring the quadrature given by plan.meas.
// Channels: x, p, y (measured quadrature), r.
TrajectoryEnsemble simulate_measured_oscillator(const SimulationPlan& plan);

// Oscillators at +Omega (params1) and -Omega (params2, defaults to params1)
// with X_plus or X_minus measured. Channels: x1 p1 x2 p2 X_plus X_minus
// P_plus P_minus r.
TrajectoryEnsemble simulate_tc_pair(const SimulationPlan& plan);

// One oscillator at nu measured through y_{-2nu}. Channels: x p y p_y r.
TrajectoryEnsemble simulate_effective_negative(const SimulationPlan& plan);

// Two pairs of oscillators at nu seen as effective oscillators at +-Omega.
// Pair A measures z = y_+ + y_-, pair B the pi/2-shifted z_tilde. Channels:
// y_plus p_plus y_minus p_minus z z_tilde r_z r_z_tilde r.
TrajectoryEnsemble simulate_narrowband_quads(const SimulationPlan& plan);

enum class Scheme { measured_oscillator, tc_pair, effective_negative, narrowband_quads };

// Ensemble mean and unbiased variance per channel per stored sample,
// accumulated without keeping trajectories.
struct EnsembleMoments {
  double dt = 0.0;
  std::size_t stride = 1;
  std::size_t count = 0;
  std::map<std::string, std::vector<double>> mean;
  std::map<std::string, std::vector<double>> variance;

  std::vector<double> times() const;
};

EnsembleMoments simulate_moments(const SimulationPlan& plan, Scheme scheme);
TrajectoryEnsemble simulate(const SimulationPlan& plan, Scheme scheme);

}  // namespace qnc
