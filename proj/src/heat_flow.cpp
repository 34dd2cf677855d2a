#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "kshyp/semigroup.hpp"

namespace kshyp {

namespace {

constexpr double kPi = std::numbers::pi;

void require_heat_dimension(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("heat propagation is implemented for n in {2,3}");
}

// ---------------------------------------------------------------------------
// n = 2 kernel.
//
// p_t(r) = sqrt2 (4 pi t)^{-3/2} e^{-t/4} int_r^inf s e^{-s^2/4t} (cosh s - cosh r)^{-1/2} ds
// evaluated in log form with s = r + xi^2 and the factor e^{-r^2/4t} pulled out.

double log_heat_kernel_h2(double t, double r) {
  const double xi_max = std::sqrt(-r + std::sqrt(r * r + 4.0 * t * 60.0));
  auto integrand = [&](double xi) {
    const double x2 = xi * xi;
    const double s = r + x2;
    const double gap = 2.0 * std::sinh(r + 0.5 * x2) * std::sinh(0.5 * x2);
    if (gap <= 0.0) return 0.0;
    return 2.0 * xi * s * std::exp(-x2 * (2.0 * r + x2) / (4.0 * t)) / std::sqrt(gap);
  };
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, xi_max, 20, 1e-11, &err);
  return 0.5 * std::log(2.0) - 1.5 * std::log(4.0 * kPi * t) - 0.25 * t - r * r / (4.0 * t) +
         std::log(val);
}

// log p_t on a uniform table in geodesic distance, 4-point Lagrange lookup.
class LogKernelTable {
public:
  LogKernelTable(double t, double d_max) : step_(kStep) {
    const std::size_t m = static_cast<std::size_t>(std::ceil(d_max / step_)) + 4;
    values_.resize(m);
    for (std::size_t k = 0; k < m; ++k) values_[k] = log_heat_kernel_h2(t, k * step_);
  }

  double log_value(double d) const {
    const double x = d / step_;
    std::size_t k = static_cast<std::size_t>(x);
    if (k < 1) k = 1;
    if (k + 2 >= values_.size()) k = values_.size() - 3;
    const double u = x - static_cast<double>(k);
    const double f0 = values_[k - 1], f1 = values_[k], f2 = values_[k + 1], f3 = values_[k + 2];
    // Lagrange basis on nodes -1, 0, 1, 2
    return f0 * (-u * (u - 1.0) * (u - 2.0) / 6.0) + f1 * ((u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0) +
           f2 * (-(u + 1.0) * u * (u - 2.0) / 2.0) + f3 * ((u + 1.0) * u * (u - 1.0) / 6.0);
  }

  // Smallest tabulated d >= a with log p_t(d) below log p_t(a) - drop.
  double cutoff(double a, double drop) const {
    const double target = log_value(a) - drop;
    std::size_t lo = static_cast<std::size_t>(a / step_);
    std::size_t hi = values_.size() - 1;
    if (values_[hi] > target) return hi * step_;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (values_[mid] > target ? lo : hi) = mid;
    }
    return hi * step_;
  }

private:
  static constexpr double kStep = 2e-3;
  double step_;
  std::vector<double> values_;
};

// Symmetric matrix A(i,j) = int_0^{2 pi} p_t(d(r_i, r_j, theta)) dtheta.
struct AngularKernel {
  std::size_t size;
  std::vector<double> a;
};

std::shared_ptr<const AngularKernel> build_angular_kernel(const RadialGrid &g, double t) {
  const std::size_t N = g.size();
  auto out = std::make_shared<AngularKernel>();
  out->size = N;
  out->a.assign(N * N, 0.0);
  const LogKernelTable table(t, 2.0 * g.r_max() + 1.0);
  constexpr double kDrop = 40.0;
  constexpr double kNegligible = -700.0;

  using Rule = boost::math::quadrature::gauss<double, 48>;
  const auto &abscissa = Rule::abscissa();
  const auto &weights = Rule::weights();
  // Full symmetric node set on [-1, 1].
  std::vector<double> gx, gw;
  for (std::size_t k = 0; k < abscissa.size(); ++k) {
    if (abscissa[k] == 0.0) {
      gx.push_back(0.0);
      gw.push_back(weights[k]);
    } else {
      gx.push_back(abscissa[k]);
      gw.push_back(weights[k]);
      gx.push_back(-abscissa[k]);
      gw.push_back(weights[k]);
    }
  }

  std::vector<double> sh(N);
  for (std::size_t i = 0; i < N; ++i) sh[i] = std::sinh(g.node(i));

  std::vector<double> cut(N);
  for (std::size_t k = 0; k < N; ++k) cut[k] = table.cutoff(g.node(k), kDrop);

  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i; j < N; ++j) {
      const double a = g.node(j - i);
      const double la = table.log_value(a);
      if (la < kNegligible) break;  // farther j only larger distance
      double val;
      const double S = sh[i] * sh[j];
      if (S == 0.0) {
        val = 2.0 * kPi * std::exp(table.log_value(std::max(g.node(i), g.node(j))));
      } else {
        const double sa = std::sinh(0.5 * a);
        const double sa2 = sa * sa;
        const double shc = std::sinh(0.5 * cut[j - i]);
        // sinh^2(d/2) = sinh^2(a/2) + S sin^2(theta/2)
        const double y = (shc * shc - sa2) / S;
        const double theta_max = (y >= 1.0) ? kPi : 2.0 * std::asin(std::sqrt(std::max(0.0, y)));
        const double half = 0.5 * theta_max;
        double sum = 0.0;
        for (std::size_t k = 0; k < gx.size(); ++k) {
          const double th = half * (gx[k] + 1.0);
          const double s2 = std::sin(0.5 * th);
          const double d = 2.0 * std::asinh(std::sqrt(sa2 + S * s2 * s2));
          sum += gw[k] * std::exp(table.log_value(d));
        }
        val = 2.0 * half * sum;
      }
      out->a[i * N + j] = val;
      out->a[j * N + i] = val;
    }
  }
  return out;
}

struct KernelKey {
  RadialGrid grid;
  double t;
  bool operator<(const KernelKey &o) const {
    if (t != o.t) return t < o.t;
    if (grid.size() != o.grid.size()) return grid.size() < o.grid.size();
    if (grid.r_max() != o.grid.r_max()) return grid.r_max() < o.grid.r_max();
    return grid.dim() < o.grid.dim();
  }
};

class KernelCache {
public:
  std::shared_ptr<const AngularKernel> get(const RadialGrid &g, double t) {
    const KernelKey key{g, t};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    auto built = build_angular_kernel(g, t);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = map_.emplace(key, built);
    if (inserted) {
      order_.push_back(key);
      while (order_.size() > kCapacity) {
        map_.erase(order_.front());
        order_.pop_front();
      }
    }
    return it->second;
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    map_.clear();
    order_.clear();
  }

private:
  static constexpr std::size_t kCapacity = 6;
  std::mutex mu_;
  std::map<KernelKey, std::shared_ptr<const AngularKernel>> map_;
  std::deque<KernelKey> order_;
};

KernelCache &kernel_cache() {
  static KernelCache cache;
  return cache;
}

RadialField heat_h2(const RadialField &field, double t) {
  const RadialGrid &g = field.grid();
  const std::size_t N = g.size();
  const double h = g.spacing();
  auto kernel = kernel_cache().get(g, t);
  // Trapezoid in s on the odd integrand A(r,s) u(s) sinh(s), with the
  // Euler-Maclaurin axis term h^2/12 * g'(0).
  std::vector<double> q(N);
  q[0] = h * h / 12.0 * field[0];
  for (std::size_t j = 1; j < N; ++j) {
    const double c = (j + 1 == N) ? 0.5 : 1.0;
    q[j] = c * h * std::sinh(g.node(j)) * field[j];
  }
  RadialField out(g);
  for (std::size_t i = 0; i < N; ++i) {
    const double *row = kernel->a.data() + i * N;
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) s += row[j] * q[j];
    out[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// n = 3: w = sinh(r) u solves w_t = w_rr - w on the half line with w(0) = 0,
// so w(t) = e^{-t} int_0^inf [g(r-s) - g(r+s)] w0(s) ds, g the 1-D Gauss kernel.
// The sum is evaluated directly (Toeplitz minus Hankel part); every term has
// relative accuracy, which matters because the mass weight grows like e^{2r}.

RadialField heat_h3(const RadialField &field, double t) {
  const RadialGrid &g = field.grid();
  const std::size_t N = g.size();
  const double h = g.spacing();

  // g_k = h * (4 pi t)^{-1/2} exp(-(k h)^2 / 4t), cut where it underflows
  const double reach = std::sqrt(4.0 * t * 745.0);
  const std::size_t K = std::min<std::size_t>(2 * N, static_cast<std::size_t>(reach / h) + 2);
  std::vector<double> gk(K, 0.0);
  const double norm = h / std::sqrt(4.0 * kPi * t);
  for (std::size_t k = 0; k < K; ++k) {
    const double x = static_cast<double>(k) * h;
    gk[k] = norm * std::exp(-x * x / (4.0 * t));
  }

  std::vector<double> w0(N);
  w0[0] = 0.0;
  for (std::size_t j = 1; j < N; ++j) w0[j] = std::sinh(g.node(j)) * field[j] * ((j + 1 == N) ? 0.5 : 1.0);

  const double decay = std::exp(-t);
  RadialField out(g);
  double slope = 0.0;  // w'(0): kernel derivative (s/t) g(s)
  for (std::size_t j = 1; j < std::min(N, K); ++j) slope += (g.node(j) / t) * gk[j] * w0[j];
  out[0] = decay * slope;

  for (std::size_t i = 1; i < N; ++i) {
    const std::size_t lo = (i >= K) ? i - K + 1 : 1;
    const std::size_t hi = std::min(N - 1, i + K - 1);
    double s = 0.0;
    for (std::size_t j = lo; j <= i; ++j) s += gk[i - j] * w0[j];
    for (std::size_t j = i + 1; j <= hi; ++j) s += gk[j - i] * w0[j];
    // reflected part g(r + s), nonzero only for i + j < K
    for (std::size_t j = 1; i + j < K && j < N; ++j) s -= gk[i + j] * w0[j];
    out[i] = decay * s / std::sinh(g.node(i));
  }
  return out;
}

}  // namespace

double heat_kernel(double t, double r, int n) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t must be positive");
  if (r < 0.0) throw std::invalid_argument("heat_kernel: r must be nonnegative");
  require_heat_dimension(n);
  if (n == 3) {
    const double ratio = (r < 1e-4) ? 1.0 - r * r / 6.0 : r / std::sinh(r);
    return std::pow(4.0 * kPi * t, -1.5) * std::exp(-t - r * r / (4.0 * t)) * ratio;
  }
  return std::exp(log_heat_kernel_h2(t, r));
}

RadialField apply_heat(const RadialField &field, double t) {
  if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("apply_heat: t must be >= 0");
  require_heat_dimension(field.grid().dim());
  if (t == 0.0) return field;
  return field.grid().dim() == 3 ? heat_h3(field, t) : heat_h2(field, t);
}

RadialField apply_div_heat(const RadialField &vfield, double t) {
  return apply_heat(radial_divergence(vfield), t);
}

void clear_heat_cache() { kernel_cache().clear(); }

}  // namespace kshyp
