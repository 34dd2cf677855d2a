#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kshyp {

struct TrigTerm {
  double lambda;  ///< frequency
  double a;       ///< cosine coefficient
  double b;       ///< sine coefficient
};

/// h(t) = sum a_j cos(lambda_j t) + b_j sin(lambda_j t), distinct finite frequencies.
class TrigPolynomial {
public:
  TrigPolynomial() = default;
  explicit TrigPolynomial(std::vector<TrigTerm> terms);

  const std::vector<TrigTerm> &terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double operator()(double t) const;
  /// sum_j sqrt(a_j^2 + b_j^2)
  double amplitude_sum() const;
  /// 2 sum_j A_j |sin(lambda_j tau / 2)|, an upper bound for sup_t |h(t+tau) - h(t)|.
  double displacement_bound(double tau) const;

  /// sin t + sin(sqrt2 t)
  static TrigPolynomial two_frequency_example();

private:
  std::vector<TrigTerm> terms_;
};

TrigPolynomial operator+(const TrigPolynomial &x, const TrigPolynomial &y);

enum class DecayShape { kExponential, kStretched };

std::string to_string(DecayShape s);
DecayShape decay_shape_from_string(const std::string &s);

/// c e^{-kappa t} or c (1+t)^{-kappa}, kappa > 0.
struct DecayingTerm {
  double c = 0.0;
  double kappa = 1.0;
  DecayShape shape = DecayShape::kExponential;

  void validate() const;
  double operator()(double t) const;
};

/// Asymptotically almost periodic signal, stored as its AP and C0 parts.
struct AAPSignal {
  TrigPolynomial ap_part;
  std::vector<DecayingTerm> c0_part;

  /// Both parts; t < 0 is allowed only without a C0 part.
  double operator()(double t) const;
  double c0_value(double t) const;
  bool is_zero() const;
};

AAPSignal operator+(const AAPSignal &x, const AAPSignal &y);
AAPSignal operator*(double s, const AAPSignal &x);

inline double eval(const AAPSignal &s, double t) { return s(t); }

struct SupBracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// upper = sum of amplitudes, lower = max |h| sampled on [0, t_scan].
SupBracket ap_sup_norm(const TrigPolynomial &p, double t_scan = 1e4);

/// sup|ap part| (upper estimate) + sup|C0 part| (bounded by sum |c|).
double aap_norm(const AAPSignal &s);

/// Scan step min(0.01, eps / (4 sum|lambda| sum A)).
double translation_scan_step(const TrigPolynomial &p, double epsilon);

/// All grid tau in [start, start + length] with displacement_bound(tau) < epsilon.
std::vector<double> find_translation_numbers(const TrigPolynomial &p, double epsilon, double start,
                                             double length, std::optional<double> step = {});

struct DensityReport {
  bool ok = true;
  double window_length = 0.0;
  std::vector<std::optional<double>> witnesses;  ///< first certified tau per window
  std::size_t failed_windows = 0;
  /// smallest length among window_length * 2^k (k <= 10) that succeeds, if any
  std::optional<double> suggested_length;
};

/// Windows [start + k L, start + (k+1) L), k < num_windows (>= 10).
DensityReport relative_density_check(const TrigPolynomial &p, double epsilon, std::size_t num_windows,
                                     double window_length, double start = 0.0);

}  // namespace kshyp
