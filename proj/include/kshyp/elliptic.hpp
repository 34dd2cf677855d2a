#pragma once

#include <vector>

#include "kshyp/geometry.hpp"

namespace kshyp {

struct ResolventDiagnostics {
  double residual = 0.0;      ///< max-norm residual of the discrete system
  bool gamma_zero = false;    ///< gamma = 0: truncated Dirichlet problem is a regularized choice
};

/// v with -(v'' + (n-1) coth(r) v') + gamma v = alpha * source, v'(0) = 0,
/// v(r_max) = 0, by a tridiagonal direct solve.
RadialField solve_resolvent(const RadialField &source, double gamma, double alpha,
                            ResolventDiagnostics *diag = nullptr);

/// d/dr of solve_resolvent, zero on the axis.
RadialField gradient_of_resolvent(const RadialField &source, double gamma, double alpha,
                                  ResolventDiagnostics *diag = nullptr);

/// 1 for gamma = 0, gamma^{-(n-1)} otherwise.
double k_gamma(double gamma, int n);

struct ResolventBoundReport {
  std::vector<double> ratios;     ///< ||grad v||_q / (k(gamma) ||f||_p) per source (alpha = 1)
  double empirical_constant = 0.0;
};

/// Requires 1 < p < n and 1/q = 1/p - 1/n.
ResolventBoundReport check_resolvent_bound(const std::vector<RadialField> &sources, double gamma,
                                           double p, double q);

}  // namespace kshyp
