#include "kshyp/solver_types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kshyp/elliptic.hpp"

namespace kshyp {

void SolverConfig::validate() const {
  if (n != 2 && n != 3) throw std::invalid_argument("config: n must be 2 or 3");
  const double lo = std::max(3.0, static_cast<double>(n));
  if (!(p > lo && p < 2.0 * n)) throw std::invalid_argument("config: need max{3,n} < p < 2n");
  if (chi != 1.0) throw std::invalid_argument("config: chi is fixed to 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("config: alpha must be >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("config: gamma must be >= 0");
  if (grid.dim() != n) throw std::invalid_argument("config: grid dimension differs from n");
  if (!(dt > 0.0 && dt <= 0.1)) throw std::invalid_argument("config: need 0 < dt <= 0.1");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("config: t_end must be > 0");
  const double steps = t_end / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw std::invalid_argument("config: t_end must be a multiple of dt");
  if (!(rho > 0.0)) throw std::invalid_argument("config: rho must be > 0");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("config: picard_tol must be > 0");
  if (picard_max_iters < 1) throw std::invalid_argument("config: picard_max_iters must be >= 1");
  if (!(resolvent_constant > 0.0) || !(c_hat > 0.0)) throw std::invalid_argument("config: C and C^ must be > 0");
  if (!(sigma_margin > 0.0 && sigma_margin < 0.5)) throw std::invalid_argument("config: margin must lie in (0, 0.5)");
}

std::size_t SolverConfig::num_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

double SolverConfig::contraction_factor() const { return 2.0 * alpha * k_gamma(gamma, n) * rho; }

RadialField Forcing::at(double t) const {
  RadialField f = spatial;
  f *= temporal(t);
  return f;
}

bool Forcing::is_zero() const { return temporal.is_zero() || spatial.max_abs() == 0.0; }

void Trajectory::push(RadialField state) {
  norms_.push_back(lp_norm(state, 0.5 * p_));
  states_.push_back(std::move(state));
}

double Trajectory::sup_norm() const {
  double m = 0.0;
  for (double v : norms_) m = std::max(m, v);
  return m;
}

double sup_distance(const Trajectory &a, const Trajectory &b, double q) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: trajectories differ in length");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, lp_norm(a.state(k) - b.state(k), q));
  return m;
}

}  // namespace kshyp
