#include "qnc/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qnc/errors.hpp"

namespace qnc {

OscillatorParams::OscillatorParams(double nu_, double gamma_, double n_T_)
    : nu(nu_), gamma(gamma_), n_T(n_T_) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("oscillator: nu must be > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("oscillator: gamma must be >= 0");
  if (!(n_T >= 0.0) || !std::isfinite(n_T)) throw InvalidArgument("oscillator: n_T must be >= 0");
}

MeasurementConfig::MeasurementConfig(double k_, double eta_, double rot_freq_, double phase_)
    : k(k_), eta(eta_), rot_freq(rot_freq_), phase(phase_) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidArgument("measurement: k must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("measurement: eta must lie in (0, 1]");
  if (!std::isfinite(rot_freq) || !std::isfinite(phase))
    throw InvalidArgument("measurement: rot_freq and phase must be finite");
}

std::string to_string(Symmetry s) {
  switch (s) {
    case Symmetry::hermitian: return "hermitian";
    case Symmetry::positive_part_only: return "positive_part_only";
    case Symmetry::general: return "general";
  }
  return "general";
}

std::optional<long long> as_integer(double ratio) {
  const double r = std::round(ratio);
  if (std::abs(ratio - r) <= kLatticeTol * std::max(1.0, std::abs(ratio)))
    return static_cast<long long>(r);
  return std::nullopt;
}

Spectrum::Spectrum(double omega0, double d_omega, std::vector<cplx> values, Symmetry symmetry,
                   std::optional<double> support_max)
    : omega0_(omega0),
      d_omega_(d_omega),
      values_(std::move(values)),
      symmetry_(symmetry),
      support_max_(support_max) {
  if (!(d_omega_ > 0.0) || !std::isfinite(d_omega_))
    throw InvalidArgument("spectrum: d_omega must be > 0");
  if (values_.empty()) throw InvalidArgument("spectrum: at least one sample required");
  if (symmetry_ == Symmetry::hermitian && symmetric_about_zero()) {
    double scale = 0.0;
    for (const auto& v : values_) scale = std::max(scale, std::abs(v));
    const std::size_t n = values_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(values_[i] - std::conj(values_[n - 1 - i])) > 1e-12 * scale) {
        std::ostringstream os;
        os << "spectrum: not Hermitian at omega = " << omega(i);
        throw InvalidArgument(os.str());
      }
    }
  }
}

Spectrum Spectrum::symmetric_zeros(double d_omega, std::size_t half, Symmetry symmetry) {
  return Spectrum(-static_cast<double>(half) * d_omega, d_omega,
                  std::vector<cplx>(2 * half + 1), symmetry);
}

std::optional<std::size_t> Spectrum::index_of(double w) const {
  const double pos = (w - omega0_) / d_omega_;
  const double last = static_cast<double>(values_.size() - 1);
  if (pos < -kLatticeTol || pos > last + kLatticeTol) return std::nullopt;
  const auto idx = as_integer(pos);
  if (!idx) {
    std::ostringstream os;
    os << "frequency " << w << " is not on the grid (omega0 = " << omega0_
       << ", d_omega = " << d_omega_ << ")";
    throw GridError(os.str());
  }
  return static_cast<std::size_t>(std::clamp<long long>(*idx, 0, static_cast<long long>(last)));
}

bool Spectrum::symmetric_about_zero() const {
  return std::abs(omega0_ + last_omega()) <= kLatticeTol * d_omega_;
}

Spectrum Spectrum::with_values(std::vector<cplx> values) const {
  if (values.size() != values_.size()) throw InvalidArgument("spectrum: size mismatch");
  return Spectrum(omega0_, d_omega_, std::move(values), symmetry_, support_max_);
}

Spectrum Spectrum::with_support(std::optional<double> support_max) const {
  Spectrum s = *this;
  s.support_max_ = support_max;
  return s;
}

double relative_l2(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw InvalidArgument("relative_l2: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
  return std::sqrt(num / den);
}

cplx direct_transform(std::span<const double> f, double dt, double t0, double omega) {
  cplx acc{0.0, 0.0};
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double t = t0 + static_cast<double>(j) * dt;
    acc += f[j] * std::polar(1.0, omega * t);
  }
  return acc * dt;
}

cplx inverse_transform_at(const Spectrum& spectrum, double t) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    acc += spectrum[i] * std::polar(1.0, -spectrum.omega(i) * t);
  return acc * spectrum.d_omega() / (2.0 * kPi);
}

Spectrum hermitian_extend(const Spectrum& pos) {
  const double w0 = pos.omega0();
  const double dw = pos.d_omega();
  if (w0 < -kLatticeTol * dw) throw GridError("hermitian_extend: input must cover w >= 0 only");

  double scale = 0.0;
  for (const auto& v : pos.values()) scale = std::max(scale, std::abs(v));

  const std::size_t n = pos.size();
  std::vector<cplx> out;

  // Single sample: its mirror image defines the grid spacing.
  if (n == 1 && w0 > 0.0) {
    out = {std::conj(pos[0]), pos[0]};
    return Spectrum(-w0, 2.0 * w0, std::move(out), Symmetry::hermitian, pos.support_max());
  }

  const auto whole = as_integer(w0 / dw);
  const auto twice = as_integer(2.0 * w0 / dw);
  if (whole && *whole == 0) {
    if (std::abs(pos[0].imag()) > 1e-9 * scale)
      throw InvalidArgument("hermitian_extend: imaginary part at w = 0 is not negligible");
    out.reserve(2 * n - 1);
    for (std::size_t i = n; i-- > 1;) out.push_back(std::conj(pos[i]));
    out.emplace_back(pos[0].real(), 0.0);
    for (std::size_t i = 1; i < n; ++i) out.push_back(pos[i]);
    return Spectrum(-pos.last_omega(), dw, std::move(out), Symmetry::hermitian, pos.support_max());
  }
  if (whole) {
    // Grid starts at m*dw > 0: the gap (-m*dw, m*dw) is zero-filled.
    const auto m = static_cast<std::size_t>(*whole);
    out.reserve(2 * (n + m) - 1);
    for (std::size_t i = n; i-- > 0;) out.push_back(std::conj(pos[i]));
    for (std::size_t i = 0; i + 1 < 2 * m; ++i) out.emplace_back(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) out.push_back(pos[i]);
    return Spectrum(-pos.last_omega(), dw, std::move(out), Symmetry::hermitian, pos.support_max());
  }
  if (twice && (*twice % 2) == 1) {
    // Half-bin offset grid: mirror images interleave uniformly.
    const auto m = static_cast<std::size_t>(*twice / 2);
    out.reserve(2 * (n + m));
    for (std::size_t i = n; i-- > 0;) out.push_back(std::conj(pos[i]));
    for (std::size_t i = 0; i < 2 * m; ++i) out.emplace_back(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) out.push_back(pos[i]);
    return Spectrum(-pos.last_omega(), dw, std::move(out), Symmetry::hermitian, pos.support_max());
  }
  throw GridError("hermitian_extend: first frequency is not on a grid compatible with its mirror");
}

Spectrum restrict_to_positive(const Spectrum& s) {
  if (!s.symmetric_about_zero()) throw GridError("restrict_to_positive: grid not symmetric about 0");
  const auto start = s.index_of(0.0);
  std::size_t first = 0;
  if (start) {
    first = *start;
  } else {
    first = s.size() / 2;
  }
  std::vector<cplx> v(s.values().begin() + static_cast<std::ptrdiff_t>(first), s.values().end());
  return Spectrum(s.omega(first), s.d_omega(), std::move(v), Symmetry::positive_part_only,
                  s.support_max());
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> p) {
  if (x.size() != p.size()) throw InvalidArgument("rotating_quadrature: x and p lengths differ");
}

}  // namespace

std::vector<double> rotating_quadrature(std::span<const double> x, std::span<const double> p,
                                        double rot_freq, double phase, double dt, double t0) {
  check_pair(x, p);
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double a = rot_freq * (t0 + static_cast<double>(j) * dt) + phase;
    y[j] = x[j] * std::cos(a) - p[j] * std::sin(a);
  }
  return y;
}

std::vector<double> rotating_conjugate(std::span<const double> x, std::span<const double> p,
                                       double rot_freq, double phase, double dt, double t0) {
  check_pair(x, p);
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double a = rot_freq * (t0 + static_cast<double>(j) * dt) + phase;
    y[j] = x[j] * std::sin(a) + p[j] * std::cos(a);
  }
  return y;
}

ForceDescriptor::ForceDescriptor(Kind kind, std::optional<double> support_max)
    : kind_(std::move(kind)), support_max_(support_max) {
  if (const auto* s = std::get_if<SinusoidForce>(&kind_)) {
    if (!std::isfinite(s->amplitude) || !std::isfinite(s->frequency) || !std::isfinite(s->phase))
      throw InvalidArgument("force: sinusoid parameters must be finite");
    if (!support_max_) support_max_ = std::abs(s->frequency);
  } else if (const auto* b = std::get_if<BandLimitedForce>(&kind_)) {
    if (b->spectrum.symmetry() != Symmetry::hermitian)
      throw InvalidArgument("force: band-limited spectrum must be Hermitian (real force)");
    if (!support_max_) support_max_ = b->spectrum.support_max();
  } else if (const auto* t = std::get_if<TabulatedForce>(&kind_)) {
    if (!(t->dt > 0.0)) throw InvalidArgument("force: tabulated dt must be > 0");
  }
}

ForceDescriptor ForceDescriptor::sinusoid(double amplitude, double frequency, double phase) {
  return ForceDescriptor(SinusoidForce{amplitude, frequency, phase});
}

double ForceDescriptor::value(double t) const {
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ZeroForce>) {
          return 0.0;
        } else if constexpr (std::is_same_v<K, SinusoidForce>) {
          return k.amplitude * std::cos(k.frequency * t + k.phase);
        } else if constexpr (std::is_same_v<K, BandLimitedForce>) {
          return inverse_transform_at(k.spectrum, t).real();
        } else {
          const double pos = (t - k.t0) / k.dt;
          if (pos < 0.0 || k.values.empty()) return 0.0;
          const auto j = static_cast<std::size_t>(pos);
          if (j + 1 >= k.values.size()) return j + 1 == k.values.size() ? k.values.back() : 0.0;
          const double frac = pos - static_cast<double>(j);
          return (1.0 - frac) * k.values[j] + frac * k.values[j + 1];
        }
      },
      kind_);
}

std::vector<double> ForceDescriptor::sample(double t0, double dt, std::size_t n) const {
  std::vector<double> out(n, 0.0);
  if (is_zero()) return out;
  for (std::size_t j = 0; j < n; ++j) out[j] = value(t0 + static_cast<double>(j) * dt);
  return out;
}

const std::vector<double>& Trajectory::channel(const std::string& name) const {
  const auto it = channels.find(name);
  if (it == channels.end()) throw InvalidArgument("trajectory: no channel named '" + name + "'");
  return it->second;
}

std::vector<double> TrajectoryEnsemble::times() const {
  std::vector<double> t(n_samples());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = time(j);
  return t;
}

std::vector<double> TrajectoryEnsemble::column(const std::string& name, std::size_t sample) const {
  std::vector<double> out;
  out.reserve(trajectories.size());
  for (const auto& tr : trajectories) out.push_back(tr.channel(name).at(sample));
  return out;
}

}  // namespace qnc
