#include "kshyp/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kshyp/elliptic.hpp"

namespace kshyp {

double gamma_function(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("gamma_function: x must be > 0");
  constexpr double kG = 7.0;
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,  12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double kPi = std::numbers::pi;
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_function(1.0 - x));
  const double z = x - 1.0;
  double a = kCoef[0];
  for (std::size_t i = 1; i < kCoef.size(); ++i) a += kCoef[i] / (z + static_cast<double>(i));
  const double t = z + kG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

Rates rates(const SolverConfig &cfg, const DispersiveConstants &constants) {
  cfg.validate();
  constants.validate();
  const double p = cfg.p, n = cfg.n;
  const double half = p / 2.0;
  const double sob = p * n / (4.0 * n - p);
  if (!(sob <= half) || !(p / 3.0 <= half)) throw std::invalid_argument("rates: exponent ordering violated");
  Rates r;
  r.gamma_half = gamma_pq(half, half, constants);
  r.beta = 0.5 * (r.gamma_half + gamma_pq(sob, half, constants));
  r.beta_hat = 0.5 * (r.gamma_half + gamma_pq(p / 3.0, half, constants));
  r.sigma = std::min({r.gamma_half, r.beta, r.beta_hat});
  if (!(r.beta > 0.0 && r.beta_hat > 0.0 && r.sigma > 0.0))
    throw std::invalid_argument("rates: nonpositive rate");
  return r;
}

double k_tilde(const SolverConfig &cfg, const DispersiveConstants &constants, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("k_tilde: C must be > 0");
  const Rates r = rates(cfg, constants);
  const double p = cfg.p, n = cfg.n;
  const double e1 = 1.0 - n / p;
  const double e2 = 0.5 - n / (2.0 * p);
  if (!(e1 > 0.0 && e1 < 1.0 && e2 > 0.0 && e2 < 0.5)) throw std::invalid_argument("k_tilde: exponent window");
  const double ct = constants.c_tilde;
  const double first = (gamma_function(e1) / std::pow(r.beta, e1) + 1.0 / r.beta) * std::pow(ct, 2.0 / p) * C;
  const double second = (gamma_function(e2) / std::pow(r.beta_hat, e2) + 1.0 / r.beta_hat) * std::pow(ct, 1.0 / p + 1.0 / n);
  return std::max(first, second);
}

GronwallConstants gronwall_constants(const SolverConfig &cfg, const DispersiveConstants &constants,
                                     double sigma_eff) {
  const Rates r = rates(cfg, constants);
  if (!(sigma_eff >= 0.0)) throw std::invalid_argument("gronwall_constants: sigma_eff must be >= 0");
  if (!(sigma_eff < std::min(r.beta, r.beta_hat)))
    throw std::invalid_argument("gronwall_constants: sigma_eff must be below min(beta, beta_hat)");
  const double p = cfg.p, n = cfg.n;
  const double e1 = 1.0 - n / p, e2 = 0.5 - n / (2.0 * p);
  const double bh = r.beta_hat - sigma_eff, b = r.beta - sigma_eff;
  GronwallConstants g;
  g.d_hat = std::pow(constants.c_tilde, 1.0 / p + 1.0 / n) * (gamma_function(e2) / std::pow(bh, e2) + 1.0 / bh);
  g.d_tilde = gamma_function(e1) / std::pow(b, e1) + 1.0 / b;
  g.exponential_factor = std::exp(cfg.alpha * std::pow(constants.c_tilde, 2.0 / p) * cfg.resolvent_constant *
                                  k_gamma(cfg.gamma, cfg.n) * cfg.rho * g.d_tilde);
  return g;
}

double gronwall_premultiplier(const GronwallConstants &g, const SolverConfig &cfg, double u0_norm,
                              double weighted_forcing_sup) {
  return (cfg.c_hat * u0_norm + g.d_hat * weighted_forcing_sup) * g.exponential_factor;
}

double forcing_sup(const Forcing &f, const Trajectory &times_of, double p) {
  const double s = lp_norm(f.spatial, p / 3.0);
  double m = 0.0;
  for (std::size_t k = 0; k < times_of.size(); ++k) m = std::max(m, std::abs(f.temporal(times_of.time(k))));
  return m * s;
}

LinearBoundReport linear_bound_check(const Trajectory &trajectory, const RadialField &u0,
                                     const Forcing &forcing, const Trajectory &omega,
                                     const SolverConfig &cfg, const DispersiveConstants &constants) {
  LinearBoundReport rep;
  const double K = k_tilde(cfg, constants, cfg.resolvent_constant);
  const double w = omega.sup_norm();
  rep.measured_sup = trajectory.sup_norm();
  rep.bound = lp_norm(u0, cfg.p / 2.0) +
              K * (cfg.alpha * k_gamma(cfg.gamma, cfg.n) * w * w + forcing_sup(forcing, trajectory, cfg.p));
  rep.slack = rep.bound - rep.measured_sup;
  rep.pass = rep.slack > 0.0;
  return rep;
}

DecayReport decay_check(const Trajectory &trajectory, const Forcing &forcing, const SolverConfig &cfg,
                        const DispersiveConstants &constants) {
  const Rates r = rates(cfg, constants);
  DecayReport rep;
  rep.sigma_eff = (1.0 - cfg.sigma_margin) * r.sigma;
  for (const auto &t : forcing.temporal.ap_part.terms())
    if (t.a != 0.0 || t.b != 0.0) throw std::invalid_argument("decay_check: forcing has an AP part");
  double weighted = 0.0;
  for (const auto &d : forcing.temporal.c0_part) {
    if (d.c == 0.0) continue;
    if (d.shape != DecayShape::kExponential || d.kappa < rep.sigma_eff)
      throw std::invalid_argument("decay_check: C0 forcing must decay exponentially at rate >= sigma_eff");
    weighted += std::abs(d.c);  // sup_t e^{sigma t} |c e^{-kappa t}| = |c|
  }
  weighted *= lp_norm(forcing.spatial, cfg.p / 3.0);

  const GronwallConstants g = gronwall_constants(cfg, constants, rep.sigma_eff);
  rep.premultiplier = gronwall_premultiplier(g, cfg, trajectory.norm(0), weighted);

  if (trajectory.sup_norm() == 0.0) {
    rep.trivial = rep.rate_pass = rep.envelope_pass = rep.pass = true;
    rep.fitted_rate = std::numeric_limits<double>::infinity();
    return rep;
  }
  for (std::size_t m = 0; m < trajectory.size(); ++m) {
    const double env = rep.premultiplier * std::exp(-rep.sigma_eff * trajectory.time(m));
    rep.max_envelope_ratio = std::max(rep.max_envelope_ratio, trajectory.norm(m) / env);
  }
  // least squares slope of log norm on the second half
  const std::size_t M = trajectory.size() - 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t m = M / 2; m <= M; ++m) {
    const double y = trajectory.norm(m);
    if (!(y > 0.0)) continue;
    const double x = trajectory.time(m), ly = std::log(y);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    cnt += 1;
  }
  const double den = cnt * sxx - sx * sx;
  rep.fitted_rate = (cnt >= 2 && den > 0.0) ? -(cnt * sxy - sx * sy) / den : 0.0;
  rep.rate_pass = rep.fitted_rate >= 0.9 * rep.sigma_eff;
  rep.envelope_pass = rep.max_envelope_ratio <= 1.0;
  rep.pass = rep.rate_pass && rep.envelope_pass;
  return rep;
}

bool BoundsReport::all_pass() const {
  return std::all_of(passes.begin(), passes.end(), [](const auto &kv) { return kv.second; });
}

std::string BoundsReport::csv_header() const {
  std::string h =
      "beta,beta_hat,sigma,sigma_eff,k_tilde,gronwall_d_hat,gronwall_d_tilde,c_hat,resolvent_constant,"
      "theoretical_sup_bound,measured_sup,fitted_decay_rate";
  for (const auto &kv : passes) h += ",pass_" + kv.first;
  return h;
}

std::string BoundsReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << beta << ',' << beta_hat << ',' << sigma << ',' << sigma_eff << ',' << k_tilde << ',' << gronwall_d_hat
     << ',' << gronwall_d_tilde << ',' << c_hat << ',' << resolvent_constant << ',' << theoretical_sup_bound << ','
     << measured_sup << ',' << fitted_decay_rate;
  for (const auto &kv : passes) os << ',' << (kv.second ? 1 : 0);
  return os.str();
}

BoundsReport make_bounds_report(const SolverConfig &cfg, const DispersiveConstants &constants) {
  BoundsReport rep;
  const Rates r = rates(cfg, constants);
  rep.beta = r.beta;
  rep.beta_hat = r.beta_hat;
  rep.sigma = r.sigma;
  rep.sigma_eff = (1.0 - cfg.sigma_margin) * r.sigma;
  rep.k_tilde = k_tilde(cfg, constants, cfg.resolvent_constant);
  const GronwallConstants g = gronwall_constants(cfg, constants, rep.sigma_eff);
  rep.gronwall_d_hat = g.d_hat;
  rep.gronwall_d_tilde = g.d_tilde;
  rep.c_hat = cfg.c_hat;
  rep.resolvent_constant = cfg.resolvent_constant;
  std::ostringstream os;
  os << "sigma_eff = (1 - " << cfg.sigma_margin
     << ") * sigma is used wherever the Gronwall constants need beta - sigma > 0 and beta_hat - sigma > 0";
  rep.note = os.str();
  return rep;
}

void to_json(nlohmann::json &j, const BoundsReport &r) {
  j = nlohmann::json{{"beta", r.beta},
                     {"beta_hat", r.beta_hat},
                     {"sigma", r.sigma},
                     {"sigma_eff", r.sigma_eff},
                     {"k_tilde", r.k_tilde},
                     {"gronwall_d_hat", r.gronwall_d_hat},
                     {"gronwall_d_tilde", r.gronwall_d_tilde},
                     {"c_hat", r.c_hat},
                     {"resolvent_constant", r.resolvent_constant},
                     {"theoretical_sup_bound", r.theoretical_sup_bound},
                     {"measured_sup", r.measured_sup},
                     {"fitted_decay_rate", r.fitted_decay_rate},
                     {"passes", r.passes},
                     {"all_pass", r.all_pass()},
                     {"note", r.note}};
}

}  // namespace kshyp
