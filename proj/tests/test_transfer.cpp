#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qnc/errors.hpp"
#include "qnc/langevin.hpp"
#include "qnc/spectral.hpp"
#include "qnc/transfer.hpp"

using namespace qnc;

namespace {

constexpr cplx kI{0.0, 1.0};

Spectrum random_force(double dw, std::size_t half, double support, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(2 * half + 1);
  for (std::size_t m = 0; m <= half; ++m) {
    if (static_cast<double>(m) * dw > support) break;
    v[half + m] = m == 0 ? cplx{g(rng), 0.0} : cplx{g(rng), g(rng)};
  }
  for (std::size_t m = 1; m <= half; ++m) v[half - m] = std::conj(v[half + m]);
  return Spectrum(-static_cast<double>(half) * dw, dw, v, Symmetry::hermitian, support);
}

}  // namespace

TEST_CASE("G factorizes with an overall minus sign") {
  const auto ctx = TransferContext::broadband(1.0, 0.2);
  const double w = 0.5;
  const cplx g = G(w, ctx);
  const cplx aa = A(w + 1.0, 0.2) * A(w - 1.0, 0.2);
  CHECK(std::abs(g + aa) < 1e-12 * std::abs(g));
  CHECK(std::abs(g - aa) > 0.1 * std::abs(g));
  CHECK(kGFactorSign == -1);
  // direct arithmetic: (0.1 - 0.5i)^2 + 1
  CHECK(std::abs(g - cplx{0.76, -0.1}) < 1e-14);
}

TEST_CASE("driven response matches the damped-oscillator transfer function") {
  const double nu = 1.0, gamma = 0.3;
  const auto ctx = TransferContext::broadband(nu, gamma);
  const auto F = random_force(0.05, 40, 2.0, 1);
  const auto zero = Spectrum::symmetric_zeros(0.05, 40);
  const auto x = driven_response(zero, F, ctx);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = x.omega(i);
    // x'' + gamma x' + (nu^2 + gamma^2/4) x = nu f  ->  X = nu F / (w0^2 - w^2 - i gamma w)
    const cplx ref = nu * F[i] / cplx{nu * nu + 0.25 * gamma * gamma - w * w, -gamma * w};
    CHECK(std::abs(x[i] - ref) < 1e-13 * (1.0 + std::abs(ref)));
  }
  CHECK(x.symmetry() == Symmetry::hermitian);
  CHECK_THROWS_AS(driven_response(zero, F, TransferContext::broadband(nu, 0.0)), PoleError);
}

TEST_CASE("broadband forward model evaluates the three shifted terms") {
  const double nu = 1.0, gamma = 0.1;
  const auto ctx = TransferContext::broadband(nu, gamma);
  const auto F = random_force(0.25, 16, 3.0, 2);
  const auto sig = forward_broadband(F, ctx);
  const double w = 0.75;
  const auto i = *sig.z.index_of(w);
  const cplx Fm = F[*F.index_of(w - nu)], F0 = F[*F.index_of(w)], Fp = F[*F.index_of(w + nu)];
  const cplx Awp{w + nu, 0.5 * gamma}, Awm{w - nu, 0.5 * gamma};
  const cplx Gw = cplx{0.5 * gamma, -w} * cplx{0.5 * gamma, -w} + nu * nu;
  CHECK(std::abs(sig.z[i] - (-Fm / Awp + nu * F0 / Gw + Fp / Awm)) < 1e-13);
  CHECK(std::abs(sig.z_prime[i] - (kI * Fm / Awp + nu * F0 / Gw + kI * Fp / Awm)) < 1e-13);
  CHECK(sig.z.symmetry() == Symmetry::hermitian);
}

TEST_CASE("broadband forward model of zero force is zero") {
  const auto F = Spectrum::symmetric_zeros(0.25, 16).with_support(1.0);
  const auto sig = forward_broadband(F, TransferContext::broadband(1.0, 0.1));
  for (const auto& v : sig.z.values()) CHECK(v == cplx{0.0, 0.0});
  for (const auto& v : sig.z_prime.values()) CHECK(v == cplx{0.0, 0.0});
}

TEST_CASE("broadband forward model rejects bad inputs") {
  const auto ctx = TransferContext::broadband(1.0, 0.1);
  const auto F = random_force(0.25, 16, 3.0, 3);
  CHECK_THROWS_AS(forward_broadband(random_force(0.3, 16, 3.0, 3), ctx), GridError);
  CHECK_THROWS_AS(forward_broadband(F.with_support(std::nullopt), ctx), GridError);
  CHECK_THROWS_AS(forward_broadband(F, TransferContext::broadband(1.0, 0.0)), PoleError);
  const Spectrum general(F.omega0(), F.d_omega(), std::vector<cplx>(F.values().begin(), F.values().end()),
                         Symmetry::general, 3.0);
  CHECK_THROWS_AS(forward_broadband(general, ctx), InvalidArgument);
  CHECK_THROWS_AS(forward_broadband(F, TransferContext::narrowband(1.0, 0.1, 0.1)), InvalidArgument);
}

TEST_CASE("narrowband B simplifies to a single pole at -Omega") {
  const double nu = 1.0, gamma = 0.02, Om = 0.1;
  const auto ctx = TransferContext::narrowband(nu, gamma, Om);
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= 200; ++j) {
    const double w = 0.01 * j;
    const cplx ref = 1.0 / (2.0 * cplx{0.5 * gamma, -(w + Om)});
    CHECK(std::abs(B(w, ctx) - ref) < 1e-12 * std::abs(ref));
    CHECK(std::abs(B(w, ctx)) < prev);
    prev = std::abs(B(w, ctx));
  }
  CHECK_THROWS_AS(B(Om, TransferContext::narrowband(nu, 0.0, Om)), PoleError);
  CHECK_THROWS_AS(B(0.1, TransferContext::broadband(nu, gamma)), InvalidArgument);
}

TEST_CASE("narrowband forward model on zero force and its output grid") {
  const auto ctx = TransferContext::narrowband(1.0, 0.01, 0.1);
  const auto F = Spectrum::symmetric_zeros(0.01, 150).with_support(1.5);
  const auto sig = forward_narrowband(F, ctx);
  CHECK(sig.z_pos.omega0() == 0.0);
  CHECK(sig.z_pos.size() == 151);
  CHECK(sig.z_pos.symmetry() == Symmetry::positive_part_only);
  for (const auto& v : sig.z_pos.values()) CHECK(v == cplx{0.0, 0.0});
  for (const auto& v : sig.z_tilde_pos.values()) CHECK(v == cplx{0.0, 0.0});
  CHECK_THROWS_AS(forward_narrowband(Spectrum::symmetric_zeros(0.03, 60).with_support(1.0), ctx), GridError);
}

TEST_CASE("narrowband lagged signal is i B times the difference of the sideband sums") {
  const double nu = 1.0, gamma = 0.01, Om = 0.1;
  const auto ctx = TransferContext::narrowband(nu, gamma, Om);
  const auto F = random_force(0.01, 150, 1.5, 4);
  const auto sig = forward_narrowband(F, ctx);
  const double w = 0.13;
  const auto i = *sig.z_pos.index_of(w);
  auto at = [&](double v) { return F[*F.index_of(v)]; };
  const cplx b = B(w, ctx);
  const cplx pos = at(w + nu - Om) + at(w + nu + Om);
  const cplx neg = at(w - nu - Om) + at(w - nu + Om);
  CHECK(std::abs(sig.z_pos[i] - b * (pos + neg)) < 1e-12 * std::abs(b * (pos + neg)));
  CHECK(std::abs(sig.z_tilde_pos[i] - kI * b * (pos - neg)) < 1e-12 * std::abs(b * (pos - neg)));
}

TEST_CASE("simulated narrowband quadrature sum matches the per-term resonant response") {
  const double nu = 1.0, gamma = 0.02, Om = 0.1, A = 1.0, w0 = 1.02, dt = 0.01;
  SimulationPlan plan;
  plan.params1 = OscillatorParams(nu, gamma, 0.0);
  plan.effective_freq = Om;
  plan.measured_observable = Observable::y_sum;
  plan.force1 = ForceDescriptor::sinusoid(A, w0);
  plan.dt = dt;
  plan.n_steps = 300000;
  plan.noise_free = true;
  plan.channels = {"z"};
  const auto ens = simulate_narrowband_quads(plan);
  const auto& z = ens.trajectories[0].channel("z");

  // whole periods of every line in the window
  const auto n = static_cast<std::size_t>(std::llround(400.0 * kPi / dt));
  const std::size_t start = z.size() - n;
  const double line = w0 - nu + Om;
  const auto fit = extract_line(std::span<const double>(z).subspan(start), dt, line,
                                static_cast<double>(start) * dt);

  const double dw = 0.01;
  std::vector<cplx> v(301);
  v[150 + 102] = A * kPi / dw;
  v[150 - 102] = A * kPi / dw;
  const Spectrum F(-1.5, dw, v, Symmetry::hermitian, 1.5);
  const auto resp = narrowband_quadrature_response(F, TransferContext::narrowband(nu, gamma, Om), 0.0,
                                                   OutputGrid{line, dw, 1});
  const double amp = std::abs(resp[0]) * dw / kPi;
  CHECK(fit.amplitude == doctest::Approx(amp).epsilon(0.02));
  CHECK(std::abs(std::remainder(fit.phase + std::arg(resp[0]), 2.0 * kPi)) < 0.02);
}
