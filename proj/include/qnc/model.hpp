#pragma once

// Shared domain types and frequency-grid conventions.
//
// Fourier convention used throughout the library:
//   F(w) = \int f(t) e^{+i w t} dt,   f(t) = (1/2pi) \int F(w) e^{-i w t} dw.
// All quantities are dimensionless (oscillator-natural units).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qnc {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct OscillatorParams {
  double nu = 1.0;     // angular frequency
  double gamma = 0.0;  // energy damping rate
  double n_T = 0.0;    // mean thermal occupation

  OscillatorParams() = default;
  OscillatorParams(double nu, double gamma, double n_T);

  // Symmetric damping is a good model only when gamma < nu. Consumers may warn
  // on false but do not reject.
  bool weak_damping() const { return gamma < nu; }
};

// Continuous measurement of a (possibly rotating) quadrature.
//
// rot_freq labels the measured observable y_{rot_freq}: the quadrature angle
// advances at -rot_freq, so y_{-nu} = x cos(nu t) - p sin(nu t) has
// rot_freq = -nu. rot_freq = phase = 0 is a plain position measurement.
struct MeasurementConfig {
  double k = 0.0;    // measurement rate
  double eta = 1.0;  // detection efficiency in (0, 1]
  double rot_freq = 0.0;
  double phase = 0.0;

  MeasurementConfig() = default;
  MeasurementConfig(double k, double eta, double rot_freq = 0.0, double phase = 0.0);

  double angle_rate() const { return -rot_freq; }
};

enum class Symmetry { hermitian, positive_part_only, general };

std::string to_string(Symmetry s);

// Complex samples on a uniform frequency grid omega0 + i * d_omega.
class Spectrum {
 public:
  Spectrum(double omega0, double d_omega, std::vector<cplx> values,
           Symmetry symmetry = Symmetry::general,
           std::optional<double> support_max = std::nullopt);

  // Grid -half*d .. +half*d (2*half + 1 samples), all zero.
  static Spectrum symmetric_zeros(double d_omega, std::size_t half,
                                  Symmetry symmetry = Symmetry::hermitian);

  double omega0() const { return omega0_; }
  double d_omega() const { return d_omega_; }
  std::size_t size() const { return values_.size(); }
  double omega(std::size_t i) const { return omega0_ + static_cast<double>(i) * d_omega_; }
  double last_omega() const { return omega(size() - 1); }
  Symmetry symmetry() const { return symmetry_; }
  std::optional<double> support_max() const { return support_max_; }

  std::span<const cplx> values() const { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  // Index of the grid point at omega; nullopt when omega lies outside the
  // grid range. Throws GridError when omega is inside the range but not on
  // the lattice.
  std::optional<std::size_t> index_of(double omega) const;

  // True when the grid is symmetric about zero (omega0 = -last_omega).
  bool symmetric_about_zero() const;

  // Same grid and metadata, new values.
  Spectrum with_values(std::vector<cplx> values) const;
  Spectrum with_support(std::optional<double> support_max) const;

 private:
  double omega0_;
  double d_omega_;
  std::vector<cplx> values_;
  Symmetry symmetry_;
  std::optional<double> support_max_;
};

// Relative lattice tolerance for deciding whether a frequency is a grid point.
inline constexpr double kLatticeTol = 1e-6;

// Returns n when ratio is within kLatticeTol of the integer n.
std::optional<long long> as_integer(double ratio);

// Relative L2 distance |a - b| / |b| between equal-length sample sets.
double relative_l2(std::span<const cplx> a, std::span<const cplx> b);

// Sum_j f(t0 + j dt) e^{i w (t0 + j dt)} dt, the discrete forward transform.
cplx direct_transform(std::span<const double> f, double dt, double t0, double omega);

// (1/2pi) Sum_i F(w_i) e^{-i w_i t} dw over the spectrum's grid.
cplx inverse_transform_at(const Spectrum& spectrum, double t);

// Extends a spectrum known for w >= 0 to the full Hermitian spectrum.
Spectrum hermitian_extend(const Spectrum& positive_part);

// The w >= 0 half of a spectrum on a grid symmetric about zero.
Spectrum restrict_to_positive(const Spectrum& spectrum);

// y(t_j) = x_j cos(rot_freq t_j + phase) - p_j sin(rot_freq t_j + phase),
// t_j = t0 + j dt. rot_freq = nu yields y_{-nu}.
std::vector<double> rotating_quadrature(std::span<const double> x, std::span<const double> p,
                                        double rot_freq, double phase, double dt,
                                        double t0 = 0.0);

// The conjugate partner x sin(rot_freq t + phase) + p cos(rot_freq t + phase).
std::vector<double> rotating_conjugate(std::span<const double> x, std::span<const double> p,
                                       double rot_freq, double phase, double dt,
                                       double t0 = 0.0);

struct ZeroForce {};

// amplitude * cos(frequency t + phase)
struct SinusoidForce {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

struct BandLimitedForce {
  Spectrum spectrum;
};

// Samples at t0 + j dt; linearly interpolated in between, zero outside.
struct TabulatedForce {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;
};

class ForceDescriptor {
 public:
  using Kind = std::variant<ZeroForce, SinusoidForce, BandLimitedForce, TabulatedForce>;

  ForceDescriptor() : kind_(ZeroForce{}) {}
  explicit ForceDescriptor(Kind kind, std::optional<double> support_max = std::nullopt);

  static ForceDescriptor zero() { return ForceDescriptor{}; }
  static ForceDescriptor sinusoid(double amplitude, double frequency, double phase = 0.0);

  const Kind& kind() const { return kind_; }
  std::optional<double> support_max() const { return support_max_; }
  bool is_zero() const { return std::holds_alternative<ZeroForce>(kind_); }

  double value(double t) const;

  // Values at t0 + j dt for j in [0, n).
  std::vector<double> sample(double t0, double dt, std::size_t n) const;

 private:
  Kind kind_;
  std::optional<double> support_max_;
};

struct Trajectory {
  std::map<std::string, std::vector<double>> channels;

  const std::vector<double>& channel(const std::string& name) const;
};

// Monte-Carlo set of stored trajectories. Samples are stored every `stride`
// integration steps, so sample j sits at t = j * stride * dt.
struct TrajectoryEnsemble {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t stride = 1;
  std::vector<Trajectory> trajectories;
  std::vector<std::uint64_t> seeds;

  std::size_t n_samples() const { return n_steps / stride + 1; }
  double time(std::size_t sample) const { return static_cast<double>(sample * stride) * dt; }
  std::vector<double> times() const;

  // Values of one channel at one stored sample, across trajectories.
  std::vector<double> column(const std::string& channel, std::size_t sample) const;
};

}  // namespace qnc
