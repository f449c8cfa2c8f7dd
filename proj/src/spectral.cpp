#include "qnc/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <sstream>

#include "qnc/errors.hpp"
#include "qnc/model.hpp"

namespace qnc {

namespace {

std::vector<double> make_window(std::size_t n, Window w) {
  std::vector<double> out(n, 1.0);
  if (w == Window::hann && n > 1) {
    for (std::size_t j = 0; j < n; ++j)
      out[j] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
  }
  return out;
}

// Owns an r2c plan and its buffers for one segment length.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void execute() { fftw_execute(plan_); }
  double norm(std::size_t k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }
  std::size_t bins() const { return n_ / 2 + 1; }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace

double PsdEstimate::integrated_power() const {
  const std::size_t n = power.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double weight = 2.0;
    if (k == 0) weight = 1.0;
    if (k + 1 == n && segment_length % 2 == 0) weight = 1.0;  // Nyquist bin
    acc += weight * power[k];
  }
  return acc * d_omega / (2.0 * kPi);
}

double PsdEstimate::band_mean(double lo, double hi) const {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    if (frequencies[k] >= lo && frequencies[k] <= hi) {
      acc += power[k];
      ++n;
    }
  }
  if (n == 0) throw InvalidArgument("band_mean: no bins in the requested band");
  return acc / static_cast<double>(n);
}

PsdEstimate welch_psd(std::span<const double> record, double dt, std::size_t segment_length,
                      double overlap_fraction, Window window) {
  if (!(dt > 0.0)) throw InvalidArgument("welch_psd: dt must be > 0");
  if (segment_length < 2) throw InvalidArgument("welch_psd: segment_length must be >= 2");
  if (segment_length > record.size()) {
    std::ostringstream os;
    os << "welch_psd: segment length " << segment_length << " exceeds series length "
       << record.size();
    throw InvalidArgument(os.str());
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.9))
    throw InvalidArgument("welch_psd: overlap must lie in [0, 0.9]");

  const std::size_t L = segment_length;
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(L) * (1.0 - overlap_fraction))));
  const std::size_t segments = 1 + (record.size() - L) / hop;
  const auto w = make_window(L, window);
  double wsum2 = 0.0;
  for (double v : w) wsum2 += v * v;

  RealFft fft(L);
  PsdEstimate est;
  est.window = window;
  est.n_segments = segments;
  est.segment_length = L;
  est.d_omega = 2.0 * kPi / (static_cast<double>(L) * dt);
  est.power.assign(fft.bins(), 0.0);
  est.frequencies.resize(fft.bins());
  for (std::size_t k = 0; k < fft.bins(); ++k)
    est.frequencies[k] = static_cast<double>(k) * est.d_omega;

  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t start = s * hop;
    double* in = fft.input();
    for (std::size_t j = 0; j < L; ++j) in[j] = w[j] * record[start + j];
    fft.execute();
    for (std::size_t k = 0; k < fft.bins(); ++k) est.power[k] += fft.norm(k);
  }
  const double scale = dt / (wsum2 * static_cast<double>(segments));
  est.variance_of_estimate.resize(est.power.size());
  for (std::size_t k = 0; k < est.power.size(); ++k) {
    est.power[k] *= scale;
    est.variance_of_estimate[k] = est.power[k] * est.power[k] / static_cast<double>(segments);
  }
  return est;
}

PsdEstimate average_psd(std::span<const PsdEstimate> estimates) {
  if (estimates.empty()) throw InvalidArgument("average_psd: no estimates");
  PsdEstimate out = estimates[0];
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    if (e.power.size() != out.power.size() || e.d_omega != out.d_omega)
      throw InvalidArgument("average_psd: estimates use different grids");
    for (std::size_t k = 0; k < out.power.size(); ++k) out.power[k] += e.power[k];
    out.n_segments += e.n_segments;
  }
  const double n = static_cast<double>(estimates.size());
  for (std::size_t k = 0; k < out.power.size(); ++k) {
    out.power[k] /= n;
    out.variance_of_estimate[k] = out.power[k] * out.power[k] / static_cast<double>(out.n_segments);
  }
  return out;
}

LineFit extract_line(std::span<const double> record, double dt, double freq, double t0) {
  if (!(freq > 0.0)) throw InvalidArgument("extract_line: freq must be > 0");
  if (!(dt > 0.0)) throw InvalidArgument("extract_line: dt must be > 0");
  const double span = static_cast<double>(record.size()) * dt;
  if (span < 20.0 * 2.0 * kPi / freq)
    throw InvalidArgument("extract_line: record shorter than 20 periods of the line");

  // normal equations of [cos sin] [a b]^T = record
  double cc = 0.0, ss = 0.0, cs = 0.0, yc = 0.0, ys = 0.0;
  for (std::size_t j = 0; j < record.size(); ++j) {
    const double t = t0 + static_cast<double>(j) * dt;
    const double c = std::cos(freq * t);
    const double s = std::sin(freq * t);
    cc += c * c;
    ss += s * s;
    cs += c * s;
    yc += record[j] * c;
    ys += record[j] * s;
  }
  const double det = cc * ss - cs * cs;
  if (!(std::abs(det) > 1e-12 * cc * ss))
    throw InvalidArgument("extract_line: frequency is not resolvable on this sampling");
  const double a = (yc * ss - ys * cs) / det;
  const double b = (ys * cc - yc * cs) / det;
  return {std::hypot(a, b), std::atan2(-b, a)};
}

}  // namespace qnc
