#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qnc/errors.hpp"
#include "qnc/reconstruct.hpp"
#include "qnc/transfer.hpp"

using namespace qnc;

namespace {

Spectrum random_force(double dw, std::size_t half, double support, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(2 * half + 1);
  for (std::size_t m = 0; m <= half; ++m) {
    if (static_cast<double>(m) * dw > support * (1.0 + 1e-12)) break;
    v[half + m] = m == 0 ? cplx{g(rng), 0.0} : cplx{g(rng), g(rng)};
  }
  for (std::size_t m = 1; m <= half; ++m) v[half - m] = std::conj(v[half + m]);
  return Spectrum(-static_cast<double>(half) * dw, dw, v, Symmetry::hermitian, support);
}

// Hermitian force whose positive part is `pos(w)` on a grid +-half*dw.
template <class Fn>
Spectrum hermitian_from(double dw, std::size_t half, Fn pos) {
  std::vector<cplx> v(2 * half + 1);
  for (std::size_t m = 1; m <= half; ++m) {
    v[half + m] = pos(static_cast<double>(m) * dw);
    v[half - m] = std::conj(v[half + m]);
  }
  return Spectrum(-static_cast<double>(half) * dw, dw, v, Symmetry::hermitian,
                  static_cast<double>(half) * dw);
}

std::vector<cplx> band_of(const Spectrum& F, const Spectrum& rec) {
  std::vector<cplx> out(rec.size());
  for (std::size_t j = 0; j < rec.size(); ++j) out[j] = F[*F.index_of(rec.omega(j))];
  return out;
}

}  // namespace

TEST_CASE("three-term coefficients make the recursion an identity on forward data") {
  const double nu = 1.0, gamma = 0.1, dw = 0.125;
  const auto ctx = TransferContext::broadband(nu, gamma);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto F = random_force(dw, 128, 3.0, seed);
    const auto z = forward_broadband(F, ctx).z;
    auto at = [&](const Spectrum& s, double w) { return s[*s.index_of(w)]; };
    for (double w : {-2.5, -0.375, 0.0, 0.625}) {
      for (int n = 0; n <= 10; ++n) {
        const double wn = (n + 1) * nu + w;
        const auto c = three_term_coefficients(wn, ctx);
        const cplx rhs = -c.a * at(z, wn) + (c.a / c.b) * nu * at(F, (n + 1) * nu + w) -
                         (c.a / c.c) * at(F, (n + 2) * nu + w);
        const cplx lhs = at(F, n * nu + w);
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("two-configuration recursion step holds on forward data") {
  const double nu = 1.0, gamma = 0.2, dw = 0.25;
  const auto ctx = TransferContext::broadband(nu, gamma);
  const auto F = random_force(dw, 64, 3.0, 9);
  const auto sig = forward_broadband(F, ctx);
  for (double w : {-1.5, 0.25, 1.0}) {
    for (int n = 0; n <= 6; ++n) {
      const cplx Fn = F[*F.index_of(w + n * nu)];
      const cplx Fn1 = F[*F.index_of(w + (n + 1) * nu)];
      const cplx rhs = alpha_n(n, w, sig.z, sig.z_prime, ctx) - beta_n(n, w, ctx) * Fn1;
      CHECK(std::abs(Fn - rhs) < 1e-12 * (1.0 + std::abs(Fn)));
    }
  }
}

TEST_CASE("broadband reconstructions invert the forward model") {
  const double nu = 1.0, gamma = 0.1;
  const auto ctx = TransferContext::broadband(nu, gamma);
  const auto F = random_force(nu / 32.0, 256, 3.0 * nu, 21);
  const auto sig = forward_broadband(F, ctx);
  BroadbandOptions opts;
  opts.support_max = 3.0 * nu;
  const auto series = reconstruct_broadband(sig.z, sig.z_prime, ctx, opts);
  const auto three = reconstruct_broadband_three_term(sig.z, ctx, opts);
  CHECK(relative_l2(series.force.values(), F.values()) < 1e-9);
  CHECK(relative_l2(three.force.values(), F.values()) < 1e-9);
  CHECK(series.force.symmetry() == Symmetry::hermitian);
  CHECK(series.residual < 1e-9);
}

TEST_CASE("broadband series terms alternate with the comb index") {
  const auto ctx = TransferContext::broadband(1.0, 0.1);
  const auto F = random_force(0.25, 32, 3.0, 5);
  const auto sig = forward_broadband(F, ctx);
  const auto terms = broadband_series_terms(sig.z, sig.z_prime, ctx, 0.5, 3);
  REQUIRE(terms.size() == 4);
  cplx sum{0.0, 0.0};
  for (const auto& t : terms) sum += t;
  CHECK(std::abs(sum - F[*F.index_of(0.5)]) < 1e-12 * std::abs(F[*F.index_of(0.5)]));
}

TEST_CASE("broadband reconstruction errors") {
  const auto ctx = TransferContext::broadband(1.0, 0.1);
  const auto F = random_force(0.125, 64, 3.0, 6);
  const auto sig = forward_broadband(F, ctx);
  CHECK_THROWS_AS(reconstruct_broadband(sig.z, sig.z_prime, ctx, {}), InvalidArgument);
  BroadbandOptions short_comb;
  short_comb.n_max = 0;
  CHECK_THROWS_AS(reconstruct_broadband(sig.z, sig.z_prime, ctx, short_comb), ResidualError);
  CHECK_THROWS_AS(reconstruct_broadband_three_term(sig.z, ctx, short_comb), ResidualError);
  const Spectrum shifted(0.0, sig.z.d_omega(),
                         std::vector<cplx>(sig.z.values().begin(), sig.z.values().end()));
  BroadbandOptions ok;
  ok.support_max = 3.0;
  CHECK_THROWS_AS(reconstruct_broadband(shifted, shifted, ctx, ok), GridError);
}

TEST_CASE("case II term count") {
  CHECK(case2_term_count(0.1, 0.01) == 10);
  CHECK(case2_term_count(1.0, 0.03) == 34);
  CHECK(case2_term_count(1.0, 0.1) == 10);
  CHECK(case2_term_count(0.0, 0.1) == 1);
  CHECK_THROWS_AS(case2_term_count(1.0, 0.0), InvalidArgument);
}

TEST_CASE("narrowband case I inverts band-limited forces") {
  const double nu = 1.0, Om = 0.1, gamma = Om / 100.0, dw = Om / 16.0;
  const auto ctx = TransferContext::narrowband(nu, gamma, Om);
  const std::size_t half = 256;
  const DeltaGrid deltas{-Om + dw, 31};

  SUBCASE("single line") {
    const auto F = hermitian_from(dw, half, [&](double w) {
      return std::abs(w - (nu + 3.0 * dw)) < 1e-9 ? cplx{0.7, -0.2} : cplx{0.0, 0.0};
    });
    const auto sig = forward_narrowband(F, ctx);
    const auto rep = reconstruct_narrowband_case1(sig.z_pos, sig.z_tilde_pos, ctx, deltas);
    CHECK(relative_l2(rep.force.values(), band_of(F, rep.force)) < 1e-9);
    CHECK(rep.warnings.empty());
  }
  SUBCASE("32 random lines") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    std::vector<cplx> lines(32);
    for (auto& l : lines) l = {g(rng), g(rng)};
    const auto F = hermitian_from(dw, half, [&](double w) {
      const long j = std::lround((w - nu) / dw) + 15;
      return (j >= 0 && j < 31) ? lines[static_cast<std::size_t>(j)] : cplx{0.0, 0.0};
    });
    const auto sig = forward_narrowband(F, ctx);
    const auto rep = reconstruct_narrowband_case1(sig.z_pos, sig.z_tilde_pos, ctx, deltas);
    CHECK(relative_l2(rep.force.values(), band_of(F, rep.force)) < 1e-9);
  }
}

TEST_CASE("narrowband case I preconditions") {
  const double nu = 1.0, Om = 0.1, dw = 0.01;
  const auto F = Spectrum::symmetric_zeros(dw, 150).with_support(1.5);
  const auto ctx = TransferContext::narrowband(nu, 0.05, Om);
  const auto sig = forward_narrowband(F, ctx);
  CHECK_THROWS_AS(reconstruct_narrowband_case1(sig.z_pos, sig.z_tilde_pos, ctx, {-0.1, 3}),
                  InvalidArgument);
  const auto rep = reconstruct_narrowband_case1(sig.z_pos, sig.z_tilde_pos, ctx, {0.0, 3});
  CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("narrowband case II truncation error is the next sideband") {
  const double nu = 1.0, Om = 0.1, gamma = Om, dw = Om / 8.0;
  const auto ctx = TransferContext::narrowband(nu, gamma, Om);
  const std::size_t half = 400;
  auto L = [&](double w) { return 1.0 / cplx{0.5 * Om, -(w - nu)}; };
  const auto F = hermitian_from(dw, half, L);
  const auto sig = forward_narrowband(F, ctx);
  const DeltaGrid deltas{-Om + dw, 15};

  const auto one = reconstruct_narrowband_case2(sig.z_pos, sig.z_tilde_pos, ctx, deltas, {0.5, 1});
  const auto c1 = reconstruct_narrowband_case1(sig.z_pos, sig.z_tilde_pos, ctx, deltas);
  for (std::size_t j = 0; j < deltas.count; ++j) CHECK(one.force[j] == c1.force[j]);

  for (std::size_t N : {1u, 2u, 5u, 12u}) {
    const auto rep = reconstruct_narrowband_case2(sig.z_pos, sig.z_tilde_pos, ctx, deltas, {0.5, N});
    CHECK(rep.n_terms_used == N);
    for (std::size_t j = 0; j < deltas.count; ++j) {
      const double delta = deltas.delta0 + static_cast<double>(j) * dw;
      const double sign = (N % 2 == 1) ? 1.0 : -1.0;
      const cplx expect = L(nu + delta) + sign * L(nu + 2.0 * N * Om + delta);
      CHECK(std::abs(rep.force[j] - expect) < 1e-10 * std::abs(expect));
    }
  }
}

TEST_CASE("narrowband case II error shrinks with the term count") {
  const double nu = 1.0, Om = 0.1, gamma = Om, dw = Om / 8.0;
  const auto ctx = TransferContext::narrowband(nu, gamma, Om);
  const auto F = hermitian_from(dw, 1200, [&](double w) { return 1.0 / cplx{0.5 * Om, -(w - nu)}; });
  const auto sig = forward_narrowband(F, ctx);
  const DeltaGrid deltas{-Om + dw, 15};
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t N : {1u, 3u, 10u, 30u}) {
    const auto rep = reconstruct_narrowband_case2(sig.z_pos, sig.z_tilde_pos, ctx, deltas, {0.5, N});
    const double err = relative_l2(rep.force.values(), band_of(F, rep.force));
    CHECK(err < prev);
    prev = err;
  }
  CHECK_THROWS_AS(reconstruct_narrowband_case2(sig.z_pos, sig.z_tilde_pos, ctx, deltas, {1.5, {}}),
                  InvalidArgument);
}
