#include "kshyp/signals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace kshyp {

TrigPolynomial::TrigPolynomial(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto &t = terms_[i];
    if (!std::isfinite(t.lambda) || !std::isfinite(t.a) || !std::isfinite(t.b))
      throw std::invalid_argument("TrigPolynomial: non-finite term");
    for (std::size_t j = 0; j < i; ++j)
      if (terms_[j].lambda == t.lambda) throw std::invalid_argument("TrigPolynomial: repeated frequency");
  }
}

double TrigPolynomial::operator()(double t) const {
  double s = 0.0;
  for (const auto &term : terms_) s += term.a * std::cos(term.lambda * t) + term.b * std::sin(term.lambda * t);
  return s;
}

double TrigPolynomial::amplitude_sum() const {
  double s = 0.0;
  for (const auto &term : terms_) s += std::hypot(term.a, term.b);
  return s;
}

double TrigPolynomial::displacement_bound(double tau) const {
  double s = 0.0;
  for (const auto &term : terms_) s += std::hypot(term.a, term.b) * std::abs(std::sin(0.5 * term.lambda * tau));
  return 2.0 * s;
}

TrigPolynomial TrigPolynomial::two_frequency_example() {
  return TrigPolynomial({{1.0, 0.0, 1.0}, {std::sqrt(2.0), 0.0, 1.0}});
}

TrigPolynomial operator+(const TrigPolynomial &x, const TrigPolynomial &y) {
  std::vector<TrigTerm> out = x.terms();
  for (const auto &t : y.terms()) {
    auto it = std::find_if(out.begin(), out.end(), [&](const TrigTerm &o) { return o.lambda == t.lambda; });
    if (it == out.end()) out.push_back(t);
    else {
      it->a += t.a;
      it->b += t.b;
    }
  }
  return TrigPolynomial(std::move(out));
}

std::string to_string(DecayShape s) { return s == DecayShape::kExponential ? "exponential" : "stretched"; }

DecayShape decay_shape_from_string(const std::string &s) {
  if (s == "exponential") return DecayShape::kExponential;
  if (s == "stretched") return DecayShape::kStretched;
  throw std::invalid_argument("unknown decay shape '" + s + "'");
}

void DecayingTerm::validate() const {
  if (!std::isfinite(c)) throw std::invalid_argument("DecayingTerm: amplitude must be finite");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("DecayingTerm: rate must be > 0");
}

double DecayingTerm::operator()(double t) const {
  if (t < 0.0) throw std::invalid_argument("DecayingTerm: t must be >= 0");
  return shape == DecayShape::kExponential ? c * std::exp(-kappa * t) : c * std::pow(1.0 + t, -kappa);
}

double AAPSignal::c0_value(double t) const {
  double s = 0.0;
  for (const auto &d : c0_part) s += d(t);
  return s;
}

double AAPSignal::operator()(double t) const {
  if (t < 0.0 && !c0_part.empty()) throw std::invalid_argument("AAPSignal: C0 part is defined for t >= 0");
  return ap_part(t) + c0_value(t);
}

bool AAPSignal::is_zero() const {
  for (const auto &t : ap_part.terms())
    if (t.a != 0.0 || t.b != 0.0) return false;
  for (const auto &d : c0_part)
    if (d.c != 0.0) return false;
  return true;
}

AAPSignal operator+(const AAPSignal &x, const AAPSignal &y) {
  AAPSignal s{x.ap_part + y.ap_part, x.c0_part};
  s.c0_part.insert(s.c0_part.end(), y.c0_part.begin(), y.c0_part.end());
  return s;
}

AAPSignal operator*(double s, const AAPSignal &x) {
  std::vector<TrigTerm> terms = x.ap_part.terms();
  for (auto &t : terms) {
    t.a *= s;
    t.b *= s;
  }
  AAPSignal out{TrigPolynomial(std::move(terms)), x.c0_part};
  for (auto &d : out.c0_part) d.c *= s;
  return out;
}

SupBracket ap_sup_norm(const TrigPolynomial &p, double t_scan) {
  SupBracket b;
  b.upper = p.amplitude_sum();
  if (p.empty()) return b;
  double lam = 0.0;
  for (const auto &t : p.terms()) lam = std::max(lam, std::abs(t.lambda));
  // sample finely enough that the phase advances by at most 0.01 rad per step
  const double step = lam > 0.0 ? std::min(0.01, 0.01 / lam) : t_scan;
  const std::size_t n = static_cast<std::size_t>(t_scan / step) + 1;
  for (std::size_t k = 0; k <= n; ++k) b.lower = std::max(b.lower, std::abs(p(std::min(k * step, t_scan))));
  return b;
}

double aap_norm(const AAPSignal &s) {
  double c0 = 0.0;
  for (const auto &d : s.c0_part) c0 += std::abs(d.c);
  return s.ap_part.amplitude_sum() + c0;
}

double translation_scan_step(const TrigPolynomial &p, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("translation scan: epsilon must be > 0");
  double lam = 0.0;
  for (const auto &t : p.terms()) lam += std::abs(t.lambda);
  const double amp = p.amplitude_sum();
  if (lam == 0.0 || amp == 0.0) return 0.01;
  return std::min(0.01, epsilon / (4.0 * lam * amp));
}

std::vector<double> find_translation_numbers(const TrigPolynomial &p, double epsilon, double start,
                                             double length, std::optional<double> step) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("find_translation_numbers: epsilon must be > 0");
  if (!(length > 0.0)) throw std::invalid_argument("find_translation_numbers: length must be > 0");
  const double h = step ? *step : translation_scan_step(p, epsilon);
  if (!(h > 0.0)) throw std::invalid_argument("find_translation_numbers: step must be > 0");
  // scan the global lattice k*h so that overlapping windows agree
  const auto k0 = static_cast<long long>(std::ceil(start / h));
  const auto k1 = static_cast<long long>(std::floor((start + length) / h));
  std::vector<double> out;
  for (long long k = k0; k <= k1; ++k) {
    const double tau = static_cast<double>(k) * h;
    if (p.displacement_bound(tau) < epsilon) out.push_back(tau);
  }
  return out;
}

namespace {

DensityReport density_at(const TrigPolynomial &p, double epsilon, std::size_t num_windows, double L,
                         double start) {
  DensityReport rep;
  rep.window_length = L;
  rep.witnesses.assign(num_windows, std::nullopt);
  const double h = translation_scan_step(p, epsilon);
  for (std::size_t w = 0; w < num_windows; ++w) {
    const double a = start + static_cast<double>(w) * L;
    const auto k0 = static_cast<long long>(std::ceil(a / h));
    const auto k1 = static_cast<long long>(std::ceil((a + L) / h));  // half-open window
    for (long long k = k0; k < k1; ++k) {
      const double tau = static_cast<double>(k) * h;
      if (p.displacement_bound(tau) < epsilon) {
        rep.witnesses[w] = tau;
        break;
      }
    }
    if (!rep.witnesses[w]) ++rep.failed_windows;
  }
  rep.ok = rep.failed_windows == 0;
  return rep;
}

}  // namespace

DensityReport relative_density_check(const TrigPolynomial &p, double epsilon, std::size_t num_windows,
                                     double window_length, double start) {
  if (num_windows < 10) throw std::invalid_argument("relative_density_check: need at least 10 windows");
  if (!(window_length > 0.0)) throw std::invalid_argument("relative_density_check: window length must be > 0");
  DensityReport rep = density_at(p, epsilon, num_windows, window_length, start);
  if (!rep.ok) {
    double L = window_length;
    for (int k = 1; k <= 10; ++k) {
      L *= 2.0;
      if (density_at(p, epsilon, num_windows, L, start).ok) {
        rep.suggested_length = L;
        break;
      }
    }
  }
  return rep;
}

}  // namespace kshyp
