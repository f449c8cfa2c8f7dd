#pragma once

// Power spectral density and line estimation for simulated records.
//
// PSD convention: the reported value is the two-sided density S(w) with
//   <x^2> = \int_{-inf}^{inf} S(w) dw / (2 pi),
// tabulated on w >= 0 only. A white record with per-sample variance 1/dt (a
// unit delta-correlated process) has S = 1; the record r = x + z/sqrt(8k)
// has floor 1/(8k).

#include <cstddef>
#include <span>
#include <vector>

namespace qnc {

enum class Window { rectangular, hann };

struct PsdEstimate {
  std::vector<double> frequencies;  // angular, 0 .. pi/dt
  std::vector<double> power;
  std::size_t n_segments = 0;
  Window window = Window::hann;
  std::vector<double> variance_of_estimate;  // per bin, S^2 / n_segments
  double d_omega = 0.0;
  std::size_t segment_length = 0;

  // \int S dw / (2 pi) over both signs of w, from the w >= 0 table.
  double integrated_power() const;
  // Mean of the PSD over lo <= w <= hi.
  double band_mean(double lo, double hi) const;
};

PsdEstimate welch_psd(std::span<const double> record, double dt, std::size_t segment_length,
                      double overlap_fraction = 0.5, Window window = Window::hann);

// Average of per-record Welch estimates (identical settings).
PsdEstimate average_psd(std::span<const PsdEstimate> estimates);

// Least-squares fit of a cos(w t) + b sin(w t), t_j = t0 + j dt. The line is
// amplitude * cos(w t + phase).
struct LineFit {
  double amplitude = 0.0;
  double phase = 0.0;
};

LineFit extract_line(std::span<const double> record, double dt, double freq, double t0 = 0.0);

}  // namespace qnc
