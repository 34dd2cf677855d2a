#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kshyp/semigroup.hpp"

using namespace kshyp;

namespace {
constexpr double kPi = std::numbers::pi;

// Singular form of the n = 2 kernel, integrated directly by tanh-sinh.
double h2_kernel_oracle(double t, double r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double s) {
    const double gap = std::cosh(s) - std::cosh(r);
    return gap > 0.0 ? s * std::exp(-s * s / (4.0 * t)) / std::sqrt(gap) : 0.0;
  };
  const double upper = r + 60.0 * std::sqrt(t) + 10.0;
  const double I = ts.integrate(f, r, upper);
  return std::sqrt(2.0) * std::pow(4.0 * kPi * t, -1.5) * std::exp(-t / 4.0) * I;
}

double sup_diff(const RadialField &a, const RadialField &b) { return (a - b).max_abs(); }
}  // namespace

TEST_CASE("heat kernel values") {
  CHECK(heat_kernel(1.0, 0.0, 3) == doctest::Approx(0.00825830).epsilon(1e-6));
  CHECK(heat_kernel(1.0, 1e-6, 3) == doctest::Approx(heat_kernel(1.0, 0.0, 3)).epsilon(1e-10));
  CHECK_THROWS_AS(heat_kernel(0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel(1.0, -1.0, 2), std::invalid_argument);
  for (double t : {0.05, 0.5, 3.0})
    for (double r : {0.0, 0.3, 2.0, 5.0}) {
      const double ref = h2_kernel_oracle(t, r);
      CHECK(std::abs(heat_kernel(t, r, 2) - ref) <= 1e-6 * ref);
    }
}

TEST_CASE("heat kernel normalization") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int n : {2, 3})
    for (double t : {0.1, 1.0, 4.0}) {
      const double total = sphere_area(n) * ts.integrate([&](double r) {
        return heat_kernel(t, r, n) * volume_weight(r, n);
      }, 0.0, 4.0 * t + 40.0 * std::sqrt(t) + 5.0);
      CHECK(std::abs(total - 1.0) < 1e-6);
    }
}

TEST_CASE("apply_heat n = 3") {
  RadialGrid g(3, 40.0, 4095);
  const auto u = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  CHECK(sup_diff(apply_heat(u, 0.0), u) == 0.0);
  CHECK_THROWS_AS(apply_heat(u, -1.0), std::invalid_argument);

  SUBCASE("kernel semigroup law") {
    const auto k = RadialField::sample(g, [](double r) { return heat_kernel(0.5, r, 3); });
    for (double t : {0.1, 1.0, 5.0}) {
      const auto exact = RadialField::sample(g, [&](double r) { return heat_kernel(0.5 + t, r, 3); });
      CHECK(sup_diff(apply_heat(k, t), exact) < 1e-6);
    }
  }
  SUBCASE("composition, positivity, mass, L2 decay") {
    const auto a = apply_heat(apply_heat(u, 0.3), 0.7);
    CHECK(sup_diff(a, apply_heat(u, 1.0)) < 1e-6);
    const double m0 = mass(u);
    for (double t : {0.1, 1.0, 5.0}) {
      const auto v = apply_heat(u, t);
      CHECK(v.min() >= -1e-12);
      CHECK(std::abs(mass(v) - m0) / m0 < 1e-6);
      CHECK(lp_norm(v, 2.0) <= std::exp(-t) * lp_norm(u, 2.0) * (1.0 + 1e-3));
    }
  }
}

TEST_CASE("apply_heat n = 2") {
  RadialGrid g(2, 14.0, 701);
  clear_heat_cache();
  const auto k = RadialField::sample(g, [](double r) { return heat_kernel(0.5, r, 2); });
  const auto start = std::chrono::steady_clock::now();
  const auto v = apply_heat(k, 0.5);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("n=2 kernel matrix build on 701 nodes: " << secs << " s");
  const auto exact = RadialField::sample(g, [](double r) { return heat_kernel(1.0, r, 2); });
  CHECK(sup_diff(v, exact) < 1e-6);
  CHECK(v.min() >= -1e-12);
  CHECK(std::abs(mass(v) - mass(k)) < 1e-6);
  const auto again = apply_heat(k, 0.5);  // cached
  CHECK(sup_diff(again, v) == 0.0);
}

TEST_CASE("apply_div_heat") {
  RadialGrid g(3, 20.0, 2048);
  CHECK(apply_div_heat(RadialField(g), 0.1).max_abs() == 0.0);
  const auto F = RadialField::sample(g, [](double r) { return r * std::exp(-r * r); });
  for (double t : {0.0, 0.1, 1.0}) CHECK(std::abs(mass(apply_div_heat(F, t))) <= 1e-10);

  RadialGrid fine(3, 20.0, 4095);
  const auto Ff = RadialField::sample(fine, [](double r) { return r * std::exp(-r * r); });
  const auto coarse_out = apply_div_heat(F, 0.1);
  const auto fine_out = apply_div_heat(Ff, 0.1);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(coarse_out[i] - fine_out[2 * i]));
  CHECK(err < 1e-4);
}

TEST_CASE("h_n and gamma_pq") {
  DispersiveConstants c = DispersiveConstants::defaults(2);
  CHECK(c.delta_n == doctest::Approx(0.25));
  c.c_tilde = 1.0;
  CHECK(h_n(4.0, c) == doctest::Approx(1.0));
  CHECK(h_n(0.25, c) == doctest::Approx(4.0));
  c.c_tilde = 3.0;
  CHECK(h_n(1.0, c) == doctest::Approx(3.0));
  CHECK_THROWS_AS(h_n(0.0, c), std::invalid_argument);

  c.delta_n = 1.0;
  CHECK(gamma_pq(2.0, 2.0, c) == doctest::Approx(1.0));
  CHECK(gamma_pq(1.0, kInfExponent, c) == doctest::Approx(0.5));
  CHECK(gamma_pq(1.0, 1.0, c) == doctest::Approx(0.0));
  CHECK_THROWS_AS(gamma_pq(3.0, 2.0, c), std::invalid_argument);
  // d gamma / d(1/q) = (delta/2)(8(1 - 1/p) - 1) > 0 for p >= 2: nonincreasing in q
  for (double p : {2.0, 3.0, 4.0, 5.0})
    for (double q = p; q < 8.0 * p; q *= 1.5)
      CHECK(gamma_pq(p, 1.5 * q, c) <= gamma_pq(p, q, c));
}

TEST_CASE("dispersive check and calibration") {
  RadialGrid g(3, 20.0, 1024);
  std::vector<RadialField> profiles;
  for (double s : {0.5, 1.0})
    profiles.push_back(RadialField::sample(g, [&](double r) { return std::exp(-r * r / (2 * s * s)); }));
  const std::vector<double> times{0.05, 0.5, 5.0};
  const std::vector<ExponentPair> pairs{{2.0, 2.0}, {1.0, kInfExponent}};
  const auto res = calibrate_with_report(profiles, times, pairs);
  CHECK(res.constants.provenance == Provenance::kCalibrated);
  CHECK(res.constants.c_tilde >= 1.0);
  CHECK(res.worst_ratio <= 1.0);
  for (const auto &pr : pairs)
    CHECK(check_dispersive(profiles, times, pr.p, pr.q, res.constants).certified);
  // a slightly larger delta must break at least one pair
  DispersiveConstants bigger = res.constants;
  bigger.delta_n *= 1.05;
  bool all = true;
  for (const auto &pr : pairs) all = all && check_dispersive(profiles, times, pr.p, pr.q, bigger).certified;
  if (res.constants.delta_n < 4.0) CHECK_FALSE(all);
  CHECK_THROWS(calibrate({}, times, pairs));
}
