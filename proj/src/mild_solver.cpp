#include "kshyp/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kshyp/bounds.hpp"
#include "kshyp/elliptic.hpp"

namespace kshyp {

namespace {

void require_grid(const RadialField &f, const SolverConfig &cfg, const char *what) {
  if (!(f.grid() == cfg.grid)) throw GridMismatch(std::string(what) + " is not on the configured grid");
}

double time_at(long long k, double dt) { return static_cast<double>(k) * dt; }

double forcing_norm_bound(const Forcing &f, double p) {
  return aap_norm(f.temporal) * lp_norm(f.spatial, p / 3.0);
}

// div[F] for F = N(a, b) + f(t)
RadialField source_divergence(const RadialField &a, const RadialField &b, const Forcing &forcing, double t,
                              const SolverConfig &cfg) {
  RadialField F = nonlinear_term(a, b, cfg);
  F.axpy(forcing.temporal(t), forcing.spatial);
  return radial_divergence(F);
}

}  // namespace

RadialField nonlinear_term(const RadialField &a, const RadialField &b, const SolverConfig &cfg) {
  if (cfg.alpha == 0.0) return RadialField(a.grid());
  const RadialField dv = gradient_of_resolvent(b, cfg.gamma, cfg.alpha);
  RadialField out(a.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -a[i] * dv[i];
  return out;
}

RadialField nonlinear_term(const RadialField &u, const SolverConfig &cfg) { return nonlinear_term(u, u, cfg); }

Trajectory evolve(const RadialField &u0, const Forcing &forcing, const SolverConfig &cfg,
                  const DispersiveConstants &constants) {
  cfg.validate();
  require_grid(u0, cfg, "initial datum");
  require_grid(forcing.spatial, cfg, "forcing profile");
  const double K = k_tilde(cfg, constants, cfg.resolvent_constant);
  const double kg = k_gamma(cfg.gamma, cfg.n);
  Trajectory traj(cfg.dt, cfg.p);
  traj.push(u0);
  const double limit =
      10.0 * (traj.norm(0) + K * (cfg.alpha * kg * cfg.rho * cfg.rho + forcing_norm_bound(forcing, cfg.p)));

  const double dt = cfg.dt;
  RadialField u = u0;
  for (std::size_t m = 0; m < cfg.num_steps(); ++m) {
    const double t = time_at(static_cast<long long>(m), dt);
    const RadialField g = source_divergence(u, u, forcing, t, cfg);
    RadialField next = apply_heat(RadialField(u).axpy(dt, g), dt);
    if (cfg.heun) {
      const RadialField gs = source_divergence(next, next, forcing, time_at(static_cast<long long>(m) + 1, dt), cfg);
      next = apply_heat(RadialField(u).axpy(0.5 * dt, g), dt);
      next.axpy(0.5 * dt, gs);
    }
    u = std::move(next);
    traj.push(u);
    const double nrm = traj.norms().back();
    if (!(nrm <= limit)) {
      std::ostringstream os;
      os << "blow-up guard: ||u(" << t + dt << ")||_{p/2} = " << nrm << " exceeds " << limit;
      throw BlowUp(os.str(), t + dt, nrm, limit);
    }
  }
  return traj;
}

namespace {

// Trapezoid Duhamel stepping S_{k+1} = e^{dt Delta}(S_k + dt/2 G_k) + dt/2 G_{k+1}.
class DuhamelStepper {
public:
  DuhamelStepper(const SolverConfig &cfg, RadialField start, RadialField g_start)
      : cfg_(cfg), state_(std::move(start)), g_(std::move(g_start)) {}

  void step(const RadialField &g_next) {
    const double h = 0.5 * cfg_.dt;
    RadialField s = apply_heat(state_.axpy(h, g_), cfg_.dt);
    s.axpy(h, g_next);
    state_ = std::move(s);
    g_ = g_next;
  }
  const RadialField &state() const { return state_; }

private:
  const SolverConfig &cfg_;
  RadialField state_;
  RadialField g_;
};

}  // namespace

Trajectory linear_solution_operator(const Forcing &forcing, const Trajectory &omega, const RadialField &u0,
                                    const SolverConfig &cfg) {
  cfg.validate();
  require_grid(u0, cfg, "initial datum");
  require_grid(forcing.spatial, cfg, "forcing profile");
  const std::size_t M = cfg.num_steps();
  if (omega.size() != M + 1 || omega.dt() != cfg.dt)
    throw std::invalid_argument("linear_solution_operator: omega is not on the time grid");

  Trajectory traj(cfg.dt, cfg.p);
  traj.push(u0);
  DuhamelStepper stepper(cfg, u0, source_divergence(omega.state(0), omega.state(0), forcing, 0.0, cfg));
  for (std::size_t m = 0; m < M; ++m) {
    const auto &w = omega.state(m + 1);
    stepper.step(source_divergence(w, w, forcing, time_at(static_cast<long long>(m) + 1, cfg.dt), cfg));
    traj.push(stepper.state());
  }
  return traj;
}

PicardResult picard_solve(const RadialField &u0, const Forcing &forcing, const SolverConfig &cfg,
                          const DispersiveConstants &constants) {
  cfg.validate();
  require_grid(u0, cfg, "initial datum");
  PicardDiagnostics diag;
  diag.contraction_factor = cfg.contraction_factor();
  if (!(diag.contraction_factor < 1.0))
    throw std::invalid_argument("picard_solve: need 2 alpha k(gamma) rho < 1");
  diag.k_tilde = k_tilde(cfg, constants, cfg.resolvent_constant);
  const double kg = k_gamma(cfg.gamma, cfg.n);
  diag.core_lhs = lp_norm(u0, cfg.p / 2.0) +
                  diag.k_tilde * (cfg.alpha * kg * cfg.rho * cfg.rho + forcing_norm_bound(forcing, cfg.p));
  if (!(diag.core_lhs <= cfg.rho)) {
    std::ostringstream os;
    os << "picard_solve: ball invariance fails, ||u0|| + K~(alpha k rho^2 + ||f||) = " << diag.core_lhs
       << " > rho = " << cfg.rho;
    throw std::invalid_argument(os.str());
  }

  Trajectory omega(cfg.dt, cfg.p);
  for (std::size_t m = 0; m <= cfg.num_steps(); ++m) omega.push(RadialField(cfg.grid));

  int bad_ratios = 0;
  for (int k = 0; k < cfg.picard_max_iters; ++k) {
    Trajectory next = linear_solution_operator(forcing, omega, u0, cfg);
    const double d = sup_distance(next, omega, cfg.p / 2.0);
    if (!diag.differences.empty() && diag.differences.back() > 0.0) {
      const double ratio = d / diag.differences.back();
      diag.ratios.push_back(ratio);
      bad_ratios = ratio >= 1.0 ? bad_ratios + 1 : 0;
    }
    diag.differences.push_back(d);
    diag.iterations = k + 1;
    if (next.sup_norm() > cfg.rho) {
      diag.abort_reason = "iterate left the ball of radius rho";
      return {std::move(next), diag};
    }
    omega = std::move(next);
    if (d < cfg.picard_tol) {
      diag.converged = true;
      break;
    }
    if (bad_ratios >= 2) {
      diag.abort_reason = "non-contraction: ratio >= 1 twice in a row";
      break;
    }
  }
  if (!diag.converged && diag.abort_reason.empty()) diag.abort_reason = "iteration cap reached";
  return {std::move(omega), diag};
}

double minimal_burn_in(const SolverConfig &cfg, const DispersiveConstants &constants) {
  const Rates r = rates(cfg, constants);
  return 5.0 / ((1.0 - cfg.sigma_margin) * r.sigma);
}

Trajectory whole_line_ap_solution(const Forcing &ap_forcing, const std::optional<Forcing> &omega,
                                  const SolverConfig &cfg, double burn_in) {
  cfg.validate();
  require_grid(ap_forcing.spatial, cfg, "forcing profile");
  if (!ap_forcing.temporal.c0_part.empty() || (omega && !omega->temporal.c0_part.empty()))
    throw std::invalid_argument("whole_line_ap_solution: only AP parts are allowed");
  if (!(burn_in >= 0.0)) throw std::invalid_argument("whole_line_ap_solution: burn_in must be >= 0");
  const double dt = cfg.dt;
  const long long M0 = static_cast<long long>(std::ceil(burn_in / dt - 1e-9));
  const long long M = static_cast<long long>(cfg.num_steps());

  auto g_at = [&](long long k) {
    const double t = time_at(k, dt);
    if (!omega) {
      RadialField F(cfg.grid);
      F.axpy(ap_forcing.temporal(t), ap_forcing.spatial);
      return radial_divergence(F);
    }
    const RadialField w = omega->at(t);
    return source_divergence(w, w, ap_forcing, t, cfg);
  };

  DuhamelStepper stepper(cfg, RadialField(cfg.grid), g_at(-M0));
  Trajectory traj(dt, cfg.p);
  if (M0 == 0) traj.push(stepper.state());
  for (long long k = -M0; k < M; ++k) {
    stepper.step(g_at(k + 1));
    if (k + 1 >= 0) traj.push(stepper.state());
  }
  return traj;
}

double fitted_decay_rate(const std::vector<double> &values, double dt, double t_from, double t_to) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t m = 0; m < values.size(); ++m) {
    const double t = static_cast<double>(m) * dt;
    if (t < t_from - 1e-12 || t > t_to + 1e-12 || !(values[m] > 0.0)) continue;
    const double y = std::log(values[m]);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    cnt += 1;
  }
  const double den = cnt * sxx - sx * sx;
  if (cnt < 2 || !(den > 0.0)) return 0.0;
  return -(cnt * sxy - sx * sy) / den;
}

MasseraReport verify_massera_splitting(const Forcing &forcing, const std::optional<Forcing> &omega,
                                       const std::optional<RadialField> &u0, const SolverConfig &cfg,
                                       const DispersiveConstants &constants, double burn_in) {
  cfg.validate();
  MasseraReport rep;
  rep.burn_in = std::max(burn_in, minimal_burn_in(cfg, constants));

  const Forcing ap_forcing{AAPSignal{forcing.temporal.ap_part, {}}, forcing.spatial};
  std::optional<Forcing> omega_ap;
  if (omega) omega_ap = Forcing{AAPSignal{omega->temporal.ap_part, {}}, omega->spatial};
  rep.u_ap = whole_line_ap_solution(ap_forcing, omega_ap, cfg, rep.burn_in);

  const RadialField start = u0 ? *u0 : rep.u_ap.state(0);
  Trajectory omega_traj(cfg.dt, cfg.p);
  for (std::size_t m = 0; m <= cfg.num_steps(); ++m)
    omega_traj.push(omega ? omega->at(time_at(static_cast<long long>(m), cfg.dt)) : RadialField(cfg.grid));
  rep.u_full = linear_solution_operator(forcing, omega_traj, start, cfg);

  const double q = cfg.p / 2.0;
  for (std::size_t m = 0; m < rep.u_full.size(); ++m)
    rep.difference.push_back(lp_norm(rep.u_full.state(m) - rep.u_ap.state(m), q));
  rep.fitted_rate = fitted_decay_rate(rep.difference, cfg.dt, 0.5 * cfg.t_end, cfg.t_end);
  const double tail_max = *std::max_element(rep.difference.begin() + rep.difference.size() / 2, rep.difference.end());
  rep.difference_decays = rep.fitted_rate > 0.0 || tail_max == 0.0;

  // initial layer e^{t Delta}(u0 - u_ap(0)), stepped with the semigroup law
  RadialField layer = start - rep.u_ap.state(0);
  std::vector<double> layer_norms{lp_norm(layer, q)};
  for (std::size_t m = 0; m < cfg.num_steps(); ++m) {
    layer = apply_heat(layer, cfg.dt);
    layer_norms.push_back(lp_norm(layer, q));
  }
  rep.layer_rate_required = 0.9 * gamma_pq(q, q, constants);
  if (layer_norms.front() == 0.0) {
    rep.layer_rate = std::numeric_limits<double>::infinity();
    rep.layer_pass = true;
  } else {
    rep.layer_rate = fitted_decay_rate(layer_norms, cfg.dt, 0.5 * cfg.t_end, cfg.t_end);
    rep.layer_pass = rep.layer_rate >= rep.layer_rate_required;
  }
  return rep;
}

TranslationReport translation_property(const Trajectory &u, const RadialField &u0, const Forcing &forcing,
                                       double epsilon, const SolverConfig &cfg,
                                       const DispersiveConstants &constants, double tau_min) {
  cfg.validate();
  TranslationReport rep;
  rep.epsilon = epsilon;
  const TrigPolynomial &h = forcing.temporal.ap_part;
  const double half = 0.5 * cfg.t_end;
  if (half > tau_min) {
    for (double tau : find_translation_numbers(h, epsilon, tau_min, half - tau_min)) {
      const double snapped = std::round(tau / cfg.dt) * cfg.dt;
      const double b = h.displacement_bound(snapped);
      if (snapped >= tau_min && snapped <= half && b < epsilon) {
        rep.tau = snapped;
        rep.tau_bound = b;
        rep.found = true;
        break;
      }
    }
  }
  if (!rep.found) return rep;

  const std::size_t M = u.size() - 1;
  const auto s = static_cast<std::size_t>(std::llround(rep.tau / cfg.dt));
  const double q = cfg.p / 2.0;
  for (std::size_t m = M / 2; m + s <= M; ++m)
    rep.measured = std::max(rep.measured, lp_norm(u.state(m + s) - u.state(m), q));

  const double K = k_tilde(cfg, constants, cfg.resolvent_constant);
  const double contraction = cfg.contraction_factor();
  rep.c_trans = K * lp_norm(forcing.spatial, cfg.p / 3.0) / (1.0 - contraction);
  const Rates r = rates(cfg, constants);
  const double sigma_eff = (1.0 - cfg.sigma_margin) * r.sigma;
  const GronwallConstants g = gronwall_constants(cfg, constants, sigma_eff);
  rep.c_dec = 2.0 * cfg.c_hat * (lp_norm(u0, q) + u.sup_norm()) * g.exponential_factor;
  rep.bound = rep.c_trans * epsilon + rep.c_dec * std::exp(-sigma_eff * half);
  rep.pass = rep.measured <= rep.bound;
  return rep;
}

}  // namespace kshyp
