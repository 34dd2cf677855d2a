#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kshyp/bounds.hpp"

using namespace kshyp;

namespace {
SolverConfig h3p4() {
  SolverConfig c;
  c.n = 3;
  c.p = 4.0;
  c.grid = RadialGrid(3, 20.0, 256);
  c.t_end = 1.0;
  return c;
}

DispersiveConstants unit_constants(int n, double delta) {
  DispersiveConstants d;
  d.n = n;
  d.c_tilde = 1.0;
  d.delta_n = delta;
  return d;
}

// Written out separately from the library: brackets of K~ with explicit exponents.
double k_tilde_reference(double n, double p, double delta, double ct, double C) {
  auto g = [&](double a, double b) {  // gamma_{a,b}
    return 0.5 * delta * ((1 / a - 1 / b) + (8 / b) * (1 - 1 / a));
  };
  const double beta = (g(p / 2, p / 2) + g(p * n / (4 * n - p), p / 2)) / 2;
  const double beta_hat = (g(p / 2, p / 2) + g(p / 3, p / 2)) / 2;
  const double A = std::tgamma(1 - n / p) * std::pow(beta, -(1 - n / p)) + 1 / beta;
  const double B = std::tgamma(0.5 - n / (2 * p)) * std::pow(beta_hat, -(0.5 - n / (2 * p))) + 1 / beta_hat;
  return std::max(A * std::pow(ct, 2 / p) * C, B * std::pow(ct, 1 / p + 1 / n));
}
}  // namespace

TEST_CASE("gamma function") {
  CHECK(gamma_function(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_function(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  boost::math::quadrature::exp_sinh<double> es;
  const double q = es.integrate([](double t) { return std::pow(t, -0.75) * std::exp(-t); }, 0.0,
                                std::numeric_limits<double>::infinity());
  CHECK(std::abs(gamma_function(0.25) - q) / q < 1e-9);
  CHECK(gamma_function(0.25) == doctest::Approx(3.6256099).epsilon(1e-7));
  for (double x = 0.05; x < 30.0; x *= 1.37) CHECK(std::abs(gamma_function(x) / std::tgamma(x) - 1.0) < 1e-10);
  CHECK_THROWS_AS(gamma_function(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_function(-1.5), std::invalid_argument);
}

TEST_CASE("rates for n = 3, p = 4") {
  const auto cfg = h3p4();
  const auto d = unit_constants(3, 1.0);
  CHECK(gamma_pq(2.0, 2.0, d) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(gamma_pq(1.5, 2.0, d) - 0.75) < 1e-12);
  CHECK(std::abs(gamma_pq(4.0 / 3.0, 2.0, d) - 0.625) < 1e-12);
  const Rates r = rates(cfg, d);
  CHECK(std::abs(r.beta - 7.0 / 8.0) < 1e-12);
  CHECK(std::abs(r.beta_hat - 13.0 / 16.0) < 1e-12);
  CHECK(std::abs(r.sigma - 13.0 / 16.0) < 1e-12);
  CHECK((r.sigma == r.beta || r.sigma == r.beta_hat || r.sigma == r.gamma_half));
  CHECK(r.sigma <= std::min({r.beta, r.beta_hat, r.gamma_half}));
  const Rates r2 = rates(cfg, unit_constants(3, 2.0));
  CHECK(r2.beta == doctest::Approx(2.0 * r.beta));
  CHECK(r2.beta_hat == doctest::Approx(2.0 * r.beta_hat));
  CHECK(r2.sigma == doctest::Approx(2.0 * r.sigma));
}

TEST_CASE("rates for n = 2, p = 3.5 are positive") {
  SolverConfig cfg = h3p4();
  cfg.n = 2;
  cfg.p = 3.5;
  cfg.grid = RadialGrid(2, 20.0, 256);
  const Rates r = rates(cfg, unit_constants(2, 0.25));
  CHECK(r.beta > 0.0);
  CHECK(r.beta_hat > 0.0);
  CHECK(r.sigma > 0.0);
}

TEST_CASE("K tilde") {
  const auto cfg = h3p4();
  const double K = k_tilde(cfg, unit_constants(3, 1.0), 1.0);
  const double first = 3.6256099082219083 / std::pow(7.0 / 8.0, 0.25) + 8.0 / 7.0;
  const double second = 7.5339415987976119 / std::pow(13.0 / 16.0, 0.125) + 16.0 / 13.0;
  CHECK(K == doctest::Approx(std::max(first, second)).epsilon(1e-10));
  for (double delta : {0.3, 1.0, 2.5})
    for (double ct : {1.0, 2.0, 7.0})
      for (double C : {0.5, 1.0, 3.0}) {
        auto d = unit_constants(3, delta);
        d.c_tilde = ct;
        CHECK(std::abs(k_tilde(cfg, d, C) - k_tilde_reference(3, 4, delta, ct, C)) <=
              1e-12 * k_tilde_reference(3, 4, delta, ct, C));
      }
  double prev = INFINITY;
  for (double delta = 0.05; delta < 4.0; delta *= 1.3) {
    const double k = k_tilde(cfg, unit_constants(3, delta), 1.0);
    CHECK(k <= prev);
    prev = k;
  }
  auto bad = unit_constants(3, 1.0);
  bad.c_tilde = 0.0;
  CHECK_THROWS_AS(k_tilde(cfg, bad, 1.0), std::invalid_argument);
}

TEST_CASE("Gronwall constants") {
  const auto cfg = h3p4();
  const auto d = unit_constants(3, 1.0);
  const double sigma = 13.0 / 16.0;
  CHECK_THROWS_AS(gronwall_constants(cfg, d, sigma), std::invalid_argument);
  const double se = 0.95 * sigma;
  const auto g = gronwall_constants(cfg, d, se);
  const double dh = std::tgamma(0.125) / std::pow(13.0 / 16.0 - se, 0.125) + 1.0 / (13.0 / 16.0 - se);
  const double dt = std::tgamma(0.25) / std::pow(7.0 / 8.0 - se, 0.25) + 1.0 / (7.0 / 8.0 - se);
  CHECK(g.d_hat == doctest::Approx(dh).epsilon(1e-12));
  CHECK(g.d_tilde == doctest::Approx(dt).epsilon(1e-12));
  CHECK(g.exponential_factor == doctest::Approx(std::exp(1.0 * 1.0 * 1.0 * 0.1 * dt)).epsilon(1e-12));
  CHECK(gronwall_premultiplier(g, cfg, 2.0, 3.0) == doctest::Approx((2.0 + dh * 3.0) * g.exponential_factor));
}

TEST_CASE("config validation") {
  auto cfg = h3p4();
  CHECK_NOTHROW(cfg.validate());
  cfg.p = 3.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p = 6.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = h3p4();
  cfg.chi = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = h3p4();
  cfg.dt = 0.2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = h3p4();
  cfg.t_end = 1.005;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = h3p4();
  cfg.n = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // grid is H^3, and p=4 is outside (3,4)
}

TEST_CASE("report serialization") {
  const auto rep = make_bounds_report(h3p4(), unit_constants(3, 1.0));
  nlohmann::json j = rep;
  CHECK(j["sigma"].get<double>() == doctest::Approx(13.0 / 16.0));
  CHECK(j.contains("note"));
  const auto header = rep.csv_header();
  const auto row = rep.csv_row();
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}
