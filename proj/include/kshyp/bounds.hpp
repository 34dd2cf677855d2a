#pragma once

#include <map>
#include <string>

#include "json.hpp"

#include "kshyp/semigroup.hpp"
#include "kshyp/solver_types.hpp"

namespace kshyp {

/// Gamma(x), x > 0, Lanczos (g = 7, 9 terms).
double gamma_function(double x);

struct Rates {
  double beta;       ///< (gamma_{p/2,p/2} + gamma_{pn/(4n-p),p/2}) / 2
  double beta_hat;   ///< (gamma_{p/2,p/2} + gamma_{p/3,p/2}) / 2
  double sigma;      ///< min{gamma_{p/2,p/2}, beta, beta_hat}
  double gamma_half; ///< gamma_{p/2,p/2}
};

Rates rates(const SolverConfig &cfg, const DispersiveConstants &constants);

/// max of the two brackets of the linear estimate; C is the resolvent constant.
double k_tilde(const SolverConfig &cfg, const DispersiveConstants &constants, double C);

struct GronwallConstants {
  double d_hat;
  double d_tilde;
  /// exp(alpha C~^{2/p} C k(gamma) rho D~); multiply by (C^ ||u0|| + D^ sup e^{sigma t}||f||)
  double exponential_factor;
};

/// Requires sigma_eff < min(beta, beta_hat).
GronwallConstants gronwall_constants(const SolverConfig &cfg, const DispersiveConstants &constants,
                                     double sigma_eff);

/// (C^ ||u0|| + D^ W) * exponential_factor, W = sup_t e^{sigma_eff t} ||f(t)||_{p/3}.
double gronwall_premultiplier(const GronwallConstants &g, const SolverConfig &cfg, double u0_norm,
                              double weighted_forcing_sup);

/// sup over the trajectory times of |temporal(t)| * ||spatial||_{p/3}.
double forcing_sup(const Forcing &f, const Trajectory &times_of, double p);

struct LinearBoundReport {
  double measured_sup = 0.0;  ///< sup_t ||u(t)||_{p/2}
  double bound = 0.0;         ///< ||u0|| + K~ (alpha k(gamma) sup||omega||^2 + sup||f||)
  double slack = 0.0;         ///< bound - measured_sup
  bool pass = false;
};

LinearBoundReport linear_bound_check(const Trajectory &trajectory, const RadialField &u0,
                                     const Forcing &forcing, const Trajectory &omega,
                                     const SolverConfig &cfg, const DispersiveConstants &constants);

struct DecayReport {
  double sigma_eff = 0.0;
  double fitted_rate = 0.0;       ///< least squares on log norm over [t_end/2, t_end]
  double premultiplier = 0.0;
  double max_envelope_ratio = 0.0;  ///< max_t ||u(t)|| / (pre e^{-sigma_eff t})
  bool rate_pass = false;
  bool envelope_pass = false;
  bool pass = false;
  bool trivial = false;           ///< identically zero trajectory
};

/// Forcing must have no AP part and exponential C0 terms with rate >= sigma_eff.
DecayReport decay_check(const Trajectory &trajectory, const Forcing &forcing, const SolverConfig &cfg,
                        const DispersiveConstants &constants);

struct BoundsReport {
  double beta = 0.0, beta_hat = 0.0, sigma = 0.0, sigma_eff = 0.0;
  double k_tilde = 0.0;
  double gronwall_d_hat = 0.0, gronwall_d_tilde = 0.0;
  double c_hat = 1.0;
  double resolvent_constant = 1.0;
  double theoretical_sup_bound = 0.0;
  double measured_sup = 0.0;
  double fitted_decay_rate = 0.0;
  std::map<std::string, bool> passes;
  std::string note;

  bool all_pass() const;
  std::string csv_header() const;
  std::string csv_row() const;
};

/// Rates and constants for cfg; trajectory-dependent fields stay zero.
BoundsReport make_bounds_report(const SolverConfig &cfg, const DispersiveConstants &constants);

void to_json(nlohmann::json &j, const BoundsReport &r);

}  // namespace kshyp
