#include <cmath>
#include <vector>

#include <doctest.h>

#include "crcap/errors.hpp"
#include "crcap/montecarlo.hpp"
#include "crcap/powerloss.hpp"
#include "crcap/quadrature.hpp"
#include "crcap/specfun.hpp"

using namespace crcap;
using namespace crcap::powerloss;

namespace {

const LinkBudget kBudget{10.0, 0.1, 0.01, 1.0, 1.0, 1.0};
const AlphaFading kRayleigh{};

LinkBudget random_budget(RandomStream& rng) {
  LinkBudget b;
  b.mu_s = std::pow(10.0, 4.0 * rng.uniform());
  b.mu_t = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
  b.d = std::pow(10.0, -5.0 + 5.0 * rng.uniform());
  b.gamma_cc = std::pow(10.0, 1.0 + 3.0 * rng.uniform());
  return b;
}

montecarlo::ScenarioConfig calibrated_defaults() {
  montecarlo::ScenarioConfig cfg;
  const auto cal = montecarlo::calibrate_constants(cfg);
  cfg.a_p = cal.a_p;
  cfg.a_c = cal.a_c;
  return cfg;
}

}  // namespace

TEST_CASE("exact_alpha closed values") {
  CHECK(exact_alpha(0.0, 5.0) == 0.0);
  CHECK(exact_alpha(0.0, 0.0) == 0.0);
  const double r = (std::sqrt(3.0) - 1.0) / 2.0;
  CHECK(exact_alpha(1.0, 1.0) == doctest::Approx(r * r).epsilon(1e-15));
  CHECK(exact_alpha(1.0, 1.0) == doctest::Approx(0.133974596).epsilon(1e-9));
  CHECK(exact_alpha(1.0, 1e-10) == doctest::Approx(0.25e-10).epsilon(1e-5));
  CHECK(exact_alpha(1e6, 1e-30) > 0.0);
  CHECK_THROWS_AS(exact_alpha(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(exact_alpha(1.0, -1.0), DomainError);
}

TEST_CASE("alpha_approx closed values") {
  CHECK(alpha_approx(1.0, 1.0) == 0.25);
  CHECK(alpha_approx(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(alpha_approx(-1.0, 1.0), DomainError);
}

TEST_CASE("alpha bounds over random sweeps") {
  RandomStream rng(5);
  for (int i = 0; i < 1'000'000; ++i) {
    const double s = std::pow(10.0, -6.0 + 12.0 * rng.uniform());
    const double t = std::pow(10.0, -6.0 + 12.0 * rng.uniform());
    const double a = exact_alpha(s, t);
    REQUIRE(a >= 0.0);
    REQUIRE(a < 1.0);
    REQUIRE(a <= alpha_approx(s, t));
  }
}

TEST_CASE("approximation error vanishes with t^2 (1 + s^2)") {
  RandomStream rng(6);
  for (int i = 0; i < 100'000; ++i) {
    const double s = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    const double x = 0.02 * rng.uniform();
    const double t = x / (1.0 + s);
    if (!(t > 0.0)) continue;
    const double approx = alpha_approx(s, t);
    REQUIRE(std::abs(exact_alpha(s, t) - approx) / approx < 0.01);
  }
}

TEST_CASE("Bessel-form conditional CDF boundaries and domain") {
  CHECK(alpha_hat_cdf_rayleigh(0.0, kBudget) == 0.0);
  CHECK(alpha_hat_cdf_rayleigh(1.0, kBudget) == 1.0);
  CHECK(alpha_approx_cdf_rayleigh(0.0, kBudget) == 0.0);
  CHECK_THROWS_AS(alpha_hat_cdf_rayleigh(1.5, kBudget), DomainError);
  CHECK_THROWS_AS(alpha_hat_cdf_rayleigh(-0.1, kBudget), DomainError);
  CHECK_THROWS_AS(alpha_hat_cdf_general(1.5, kBudget, kRayleigh), DomainError);
  LinkBudget bad = kBudget;
  bad.mu_t = 0.0;
  CHECK_THROWS_AS(alpha_hat_cdf_rayleigh(0.5, bad), ConfigError);
}

TEST_CASE("Bessel form equals the generic quadrature") {
  CHECK(std::abs(alpha_hat_cdf_rayleigh(0.1, kBudget) - alpha_hat_cdf_general(0.1, kBudget, kRayleigh)) < 1e-6);
  for (double x : {0.01, 0.1, 0.5, 0.9})
    CHECK(std::abs(alpha_hat_cdf_rayleigh(x, kBudget) - alpha_hat_cdf_general(x, kBudget, kRayleigh)) < 1e-6);
  CHECK(alpha_hat_cdf_general(0.0, kBudget, kRayleigh) == 0.0);
  CHECK(alpha_hat_cdf_general(1.0, kBudget, kRayleigh) == 1.0);
}

TEST_CASE("Bessel form equals one minus the exponential-integral chain") {
  RandomStream rng(8);
  for (int i = 0; i < 5; ++i) {
    const LinkBudget b = random_budget(rng);
    for (double x : {1e-4, 0.01, 0.3, 1.0, 5.0}) {
      const double raw = alpha_approx_cdf_general(x, b, kRayleigh);
      const double bb = b.zeta() * x * (1.0 + b.d);
      const double integral = specfun::integrate([&](double t) { return t > 0.0 ? std::exp(-bb / t - t) : 0.0; },
                                                 0.0, std::numeric_limits<double>::infinity(), {1e-15, 1e-13, 1000},
                                                 std::vector<double>{std::sqrt(bb), 1.0});
      CAPTURE(x);
      CHECK(std::abs(raw - (1.0 - integral)) < 1e-8);
      CHECK(std::abs(raw - alpha_approx_cdf_rayleigh(x, b)) < 1e-8);
    }
  }
}

TEST_CASE("conditional CDFs are monotone and within [0, 1]") {
  const AlphaFading ric_u{fading::FadingKind::rician_db(5.0), {}, {}};
  double prev_r = 0.0, prev_g = 0.0, prev_c = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = k / 200.0;
    const double r = alpha_hat_cdf_rayleigh(x, kBudget);
    const double g = alpha_hat_cdf_general(x, kBudget, ric_u);
    CHECK(r >= prev_r - 1e-12);
    CHECK(g >= prev_g - 1e-12);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0 + 1e-9);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0 + 1e-9);
    const double c = cr_rate_cdf(x * 10.0, kBudget, [](double a) { return alpha_hat_cdf_rayleigh(a, kBudget); });
    CHECK(c >= prev_c - 1e-12);
    CHECK(c <= 1.0 + 1e-9);
    prev_r = r;
    prev_g = g;
    prev_c = c;
  }
}

TEST_CASE("Bessel form matches fixed-gain Monte Carlo") {
  const std::vector<double> xs = {0.1};
  const auto mc = montecarlo::estimate_alpha_cdf_fixed(kBudget, kRayleigh, xs, 10'000'000, 99);
  const auto& e = mc.alpha_hat[0];
  CHECK(std::abs(alpha_hat_cdf_rayleigh(0.1, kBudget) - e.value) < 3 * e.std_error);
}

TEST_CASE("generic form with Rician CP fading matches Monte Carlo") {
  const AlphaFading ric_u{fading::FadingKind::rician_db(5.0), {}, {}};
  const std::vector<double> xs = {0.2};
  const auto mc = montecarlo::estimate_alpha_cdf_fixed(kBudget, ric_u, xs, 10'000'000, 100);
  const auto& e = mc.alpha_hat[0];
  CHECK(std::abs(alpha_hat_cdf_general(0.2, kBudget, ric_u) - e.value) < 3 * e.std_error);
  // The Rician law genuinely moves the answer.
  CHECK(std::abs(alpha_hat_cdf_general(0.2, kBudget, ric_u) - alpha_hat_cdf_rayleigh(0.2, kBudget)) > 10 * e.std_error);
}

TEST_CASE("cr_rate values and monotonicity") {
  CHECK(cr_rate(5.0, 1.0, 1.0, 1.0) == 0.0);
  CHECK(cr_rate(1.0, 0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cr_rate(2.0, 0.5, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cr_rate(3.0, 0.0, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  for (double a = 0.0; a < 0.99; a += 0.01) CHECK(cr_rate(3.0, a + 0.01, 1.0, 1.0) < cr_rate(3.0, a, 1.0, 1.0));
  for (double c = 0.1; c < 100.0; c *= 1.5) CHECK(cr_rate(c * 1.5, 0.3, 1.0, 1.0) > cr_rate(c, 0.3, 1.0, 1.0));
  for (double p = 0.1; p < 100.0; p *= 1.5) CHECK(cr_rate(2.0, 0.3, p * 1.5, 1.0) > cr_rate(2.0, 0.3, p, 1.0));
  CHECK_THROWS_AS(cr_rate(-1.0, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cr_rate(1.0, 1.5, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cr_rate(1.0, 0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("rate CDF limits") {
  const auto f = [](double a) { return alpha_hat_cdf_rayleigh(a, kBudget); };
  CHECK(cr_rate_cdf(0.0, kBudget, f) == 0.0);
  CHECK(cr_rate_cdf(std::numeric_limits<double>::infinity(), kBudget, f) == 1.0);
  CHECK(cr_rate_cdf(60.0, kBudget, f) == doctest::Approx(1.0).epsilon(1e-9));
  // With alpha = 0 surely the rate CDF is that of log2(1 + Gamma_cc |c|^2 P_c / N_c).
  const auto zero = [](double a) { return a > 0.0 ? 1.0 : 0.0; };
  for (double x : {0.5, 1.0, 3.0}) {
    const double u = std::exp2(x) - 1.0;
    CHECK(cr_rate_cdf(x, kBudget, zero) == doctest::Approx(-std::expm1(-u)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(cr_rate_cdf(-1.0, kBudget, f), DomainError);
}

TEST_CASE("rate CDF at defaults matches Monte Carlo under alpha-hat") {
  const auto cfg = calibrated_defaults();
  const auto budget = montecarlo::link_budget(cfg, montecarlo::frozen_link_gains(cfg, 0));
  const std::vector<double> xs = {1.0};
  const auto mc = montecarlo::estimate_rate_cdf_fixed(budget, kRayleigh, xs, 10'000'000, 101);
  const double analytic = cr_rate_cdf(1.0, budget, [&](double a) { return alpha_hat_cdf_rayleigh(a, budget); });
  const auto& e = mc.under_alpha_hat_independent_c[0];
  CHECK(analytic > 0.0);
  CHECK(std::abs(analytic - e.value) < 3 * e.std_error);
}
