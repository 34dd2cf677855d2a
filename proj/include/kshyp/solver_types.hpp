#pragma once

#include <cstddef>
#include <vector>

#include "kshyp/geometry.hpp"
#include "kshyp/signals.hpp"

namespace kshyp {

struct SolverConfig {
  int n = 3;
  double p = 4.0;
  double alpha = 1.0;
  double gamma = 1.0;
  double chi = 1.0;
  RadialGrid grid{3, 20.0, 2048};
  double dt = 0.01;
  double t_end = 20.0;
  double rho = 0.1;
  double picard_tol = 1e-8;
  int picard_max_iters = 50;
  bool heun = false;
  double resolvent_constant = 1.0;  ///< C of the resolvent bound
  double c_hat = 1.0;               ///< C^ of the decay estimate
  double sigma_margin = 0.05;       ///< sigma_eff = (1 - margin) sigma

  /// max{3,n} < p < 2n, chi = 1, grid dimension n, 0 < dt <= 0.1, t_end a multiple of dt, ...
  void validate() const;
  std::size_t num_steps() const;
  /// 2 alpha k(gamma) rho
  double contraction_factor() const;
};

/// f(t, r) = temporal(t) * spatial(r), spatial is the d/dr component.
struct Forcing {
  AAPSignal temporal;
  RadialField spatial;

  RadialField at(double t) const;
  bool is_zero() const;
};

/// States on the uniform grid t_m = m dt, m = 0..M, with ||u||_{p/2} cached.
class Trajectory {
public:
  Trajectory(double dt, double p) : dt_(dt), p_(p) {}

  void push(RadialField state);
  std::size_t size() const { return states_.size(); }
  double dt() const { return dt_; }
  double exponent() const { return p_; }
  double time(std::size_t m) const { return static_cast<double>(m) * dt_; }
  const RadialField &state(std::size_t m) const { return states_.at(m); }
  const std::vector<RadialField> &states() const { return states_; }
  double norm(std::size_t m) const { return norms_.at(m); }
  const std::vector<double> &norms() const { return norms_; }
  double sup_norm() const;

private:
  double dt_;
  double p_;
  std::vector<RadialField> states_;
  std::vector<double> norms_;
};

/// sup_m ||a(t_m) - b(t_m)||_{q}
double sup_distance(const Trajectory &a, const Trajectory &b, double q);

}  // namespace kshyp
