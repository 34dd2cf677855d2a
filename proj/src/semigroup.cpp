#include "kshyp/semigroup.hpp"

#include <algorithm>
#include <cmath>

namespace kshyp {

std::string to_string(Provenance p) { return p == Provenance::kCalibrated ? "calibrated" : "default"; }

Provenance provenance_from_string(const std::string &s) {
  if (s == "default") return Provenance::kDefault;
  if (s == "calibrated") return Provenance::kCalibrated;
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

DispersiveConstants DispersiveConstants::defaults(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  DispersiveConstants c;
  c.n = n;
  c.c_tilde = 2.0;
  c.delta_n = (n - 1.0) * (n - 1.0) / 4.0;
  return c;
}

void DispersiveConstants::validate() const {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (!(c_tilde > 0.0) || !std::isfinite(c_tilde)) throw std::invalid_argument("c_tilde must be > 0");
  if (!(delta_n > 0.0) || !std::isfinite(delta_n)) throw std::invalid_argument("delta_n must be > 0");
}

double h_n(double t, const DispersiveConstants &c) {
  if (!(t > 0.0)) throw std::invalid_argument("h_n: t must be positive");
  return c.c_tilde * std::max(std::pow(t, -0.5 * c.n), 1.0);
}

namespace {
double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

void require_exponents(double p, double q) {
  if (!(p >= 1.0)) throw std::invalid_argument("exponent p must be >= 1");
  if (p > q) throw std::invalid_argument("exponents must satisfy p <= q");
}
}  // namespace

double gamma_pq(double p, double q, const DispersiveConstants &c) {
  require_exponents(p, q);
  const double ip = 1.0 / p, iq = inv(q);
  return 0.5 * c.delta_n * ((ip - iq) + 8.0 * iq * (1.0 - ip));
}

namespace {

struct SweepEntry {
  std::size_t profile;
  double t;
  double lhs;
  double u0_norm;
};

// One propagation per (t, profile), shared by every pair; t runs outermost so
// the n = 2 kernel cache sees each time once.
std::vector<std::vector<SweepEntry>> sweep(const std::vector<RadialField> &profiles,
                                           const std::vector<double> &times,
                                           const std::vector<ExponentPair> &pairs) {
  for (double t : times)
    if (!(t > 0.0)) throw std::invalid_argument("check_dispersive: times must be positive");
  std::vector<std::vector<SweepEntry>> out(pairs.size());
  for (double t : times)
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      const RadialField v = apply_heat(profiles[k], t);
      for (std::size_t j = 0; j < pairs.size(); ++j)
        out[j].push_back({k, t, lp_norm(v, pairs[j].q), lp_norm(profiles[k], pairs[j].p)});
    }
  return out;
}

DispersiveReport report_from(const std::vector<SweepEntry> &entries, double p, double q,
                             const DispersiveConstants &c) {
  DispersiveReport rep;
  const double e = 1.0 / p - inv(q);
  const double g = gamma_pq(p, q, c);
  for (const auto &s : entries) {
    const double rhs = std::pow(h_n(s.t, c), e) * std::exp(-s.t * g) * s.u0_norm;
    double ratio;
    if (rhs > 0.0) ratio = s.lhs / rhs;
    else ratio = (s.lhs > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
    rep.samples.push_back({s.profile, s.t, p, q, s.lhs, s.u0_norm, ratio});
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
  }
  rep.certified = rep.worst_ratio <= 1.0;
  return rep;
}

}  // namespace

DispersiveReport check_dispersive(const std::vector<RadialField> &profiles,
                                  const std::vector<double> &times, double p, double q,
                                  const DispersiveConstants &constants) {
  require_exponents(p, q);
  constants.validate();
  return report_from(sweep(profiles, times, {{p, q}}).front(), p, q, constants);
}

CalibrationResult calibrate_with_report(const std::vector<RadialField> &profiles,
                                        const std::vector<double> &times,
                                        const std::vector<ExponentPair> &pairs) {
  if (profiles.empty() || times.empty() || pairs.empty())
    throw std::invalid_argument("calibrate: empty sweep");
  const int n = profiles.front().grid().dim();
  for (const auto &pr : pairs) require_exponents(pr.p, pr.q);

  // The propagated norms do not depend on the constants, so compute them once.
  const auto data = sweep(profiles, times, pairs);

  constexpr int kGrid = 400;
  constexpr double kDeltaMin = 1e-3, kCMax = 1e3;
  const double delta_max = (n - 1.0) * (n - 1.0);
  const double log_lo = std::log(kDeltaMin), log_hi = std::log(delta_max);

  for (int k = 0; k < kGrid; ++k) {
    const double delta = (k == 0) ? delta_max
                                  : std::exp(log_hi - (log_hi - log_lo) * k / (kGrid - 1.0));
    DispersiveConstants c;
    c.n = n;
    c.delta_n = delta;
    c.c_tilde = 1.0;
    bool ok = true;
    for (std::size_t j = 0; j < pairs.size() && ok; ++j) {
      const double p = pairs[j].p, q = pairs[j].q;
      const double e = 1.0 / p - inv(q);
      const double g = gamma_pq(p, q, c);
      for (const auto &s : data[j]) {
        // lhs <= Ct^e * max(t^{-n/2},1)^e * e^{-t g} * |u0|
        const double base = s.lhs / (std::pow(std::max(std::pow(s.t, -0.5 * n), 1.0), e) *
                                     std::exp(-s.t * g) * s.u0_norm);
        if (!(base <= 1.0)) {
          if (e <= 0.0 || !std::isfinite(base)) {
            ok = false;
            break;
          }
          c.c_tilde = std::max(c.c_tilde, std::pow(base, 1.0 / e));
        }
      }
    }
    if (!ok) continue;
    c.c_tilde *= 1.0 + 1e-12;
    if (c.c_tilde > kCMax) continue;
    c.provenance = Provenance::kCalibrated;

    CalibrationResult res;
    res.constants = c;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      res.reports.push_back(report_from(data[j], pairs[j].p, pairs[j].q, c));
      res.worst_ratio = std::max(res.worst_ratio, res.reports.back().worst_ratio);
    }
    bool all = true;
    for (const auto &r : res.reports) all = all && r.certified;
    if (all) return res;
  }
  throw std::runtime_error("calibrate: no constants in the search box certify");
}

DispersiveConstants calibrate(const std::vector<RadialField> &profiles,
                              const std::vector<double> &times,
                              const std::vector<ExponentPair> &pairs) {
  return calibrate_with_report(profiles, times, pairs).constants;
}

}  // namespace kshyp
