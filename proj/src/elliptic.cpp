#include "kshyp/elliptic.hpp"

#include <algorithm>
#include <cmath>

namespace kshyp {

namespace {

struct Tridiagonal {
  std::vector<double> lower, diag, upper;
};

Tridiagonal assemble(const RadialGrid &g, double gamma) {
  const std::size_t N = g.size();
  const double h = g.spacing(), h2 = h * h;
  const int n = g.dim();
  Tridiagonal A{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
  // axis: -n v''(0) with v''(0) ~ 2(v1 - v0)/h^2 by symmetry
  A.diag[0] = 2.0 * n / h2 + gamma;
  A.upper[0] = -2.0 * n / h2;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double drift = (n - 1) * coth_regularized(g.node(i)) / (2.0 * h);
    A.lower[i] = -1.0 / h2 + drift;
    A.diag[i] = 2.0 / h2 + gamma;
    A.upper[i] = -1.0 / h2 - drift;
  }
  A.diag[N - 1] = 1.0;
  return A;
}

std::vector<double> thomas(const Tridiagonal &A, std::vector<double> b) {
  const std::size_t N = b.size();
  std::vector<double> c(N);
  double den = A.diag[0];
  c[0] = A.upper[0] / den;
  b[0] /= den;
  for (std::size_t i = 1; i < N; ++i) {
    den = A.diag[i] - A.lower[i] * c[i - 1];
    c[i] = A.upper[i] / den;
    b[i] = (b[i] - A.lower[i] * b[i - 1]) / den;
  }
  for (std::size_t i = N - 1; i-- > 0;) b[i] -= c[i] * b[i + 1];
  return b;
}

}  // namespace

RadialField solve_resolvent(const RadialField &source, double gamma, double alpha,
                            ResolventDiagnostics *diag) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("solve_resolvent: gamma must be >= 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("solve_resolvent: alpha must be > 0");
  const RadialGrid &g = source.grid();
  const std::size_t N = g.size();
  const Tridiagonal A = assemble(g, gamma);

  std::vector<double> rhs(N);
  for (std::size_t i = 0; i + 1 < N; ++i) rhs[i] = alpha * source[i];
  rhs[N - 1] = 0.0;
  RadialField v(g, thomas(A, rhs));

  if (diag) {
    double res = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double Av = A.diag[i] * v[i];
      if (i > 0) Av += A.lower[i] * v[i - 1];
      if (i + 1 < N) Av += A.upper[i] * v[i + 1];
      res = std::max(res, std::abs(Av - rhs[i]));
    }
    diag->residual = res;
    diag->gamma_zero = (gamma == 0.0);
  }
  return v;
}

RadialField gradient_of_resolvent(const RadialField &source, double gamma, double alpha,
                                  ResolventDiagnostics *diag) {
  return radial_gradient(solve_resolvent(source, gamma, alpha, diag));
}

double k_gamma(double gamma, int n) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("k_gamma: gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  return std::pow(gamma, -(n - 1.0));
}

ResolventBoundReport check_resolvent_bound(const std::vector<RadialField> &sources, double gamma,
                                           double p, double q) {
  if (sources.empty()) throw std::invalid_argument("check_resolvent_bound: no sources");
  const int n = sources.front().grid().dim();
  if (!(p > 1.0 && p < n)) throw std::invalid_argument("check_resolvent_bound: need 1 < p < n");
  if (std::abs(1.0 / q - (1.0 / p - 1.0 / n)) > 1e-12)
    throw std::invalid_argument("check_resolvent_bound: need 1/q = 1/p - 1/n");
  ResolventBoundReport rep;
  const double k = k_gamma(gamma, n);
  for (const auto &f : sources) {
    const double fp = lp_norm(f, p);
    const double lhs = lp_norm(gradient_of_resolvent(f, gamma, 1.0), q);
    const double ratio = fp > 0.0 ? lhs / (k * fp) : 0.0;
    rep.ratios.push_back(ratio);
    rep.empirical_constant = std::max(rep.empirical_constant, ratio);
  }
  return rep;
}

}  // namespace kshyp
