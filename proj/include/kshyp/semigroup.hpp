#pragma once

#include <string>
#include <vector>

#include "kshyp/geometry.hpp"

namespace kshyp {

enum class Provenance { kDefault, kCalibrated };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string &s);

/// Constants of the L^p -> L^q heat estimate
///   ||e^{t Delta} u||_q <= h_n(t)^{1/p-1/q} e^{-t gamma_{p,q}} ||u||_p.
struct DispersiveConstants {
  int n = 3;
  double c_tilde = 2.0;
  double delta_n = 1.0;
  Provenance provenance = Provenance::kDefault;

  /// delta_n = (n-1)^2/4, C~ = 2.
  static DispersiveConstants defaults(int n);
  void validate() const;
};

/// Heat kernel of H^n (n = 2, 3) as a density w.r.t. hyperbolic volume.
double heat_kernel(double t, double r, int n);

/// e^{t Delta} u of the grid data, evaluated on the grid (no wall at r_max:
/// mass carried past r_max is lost). Exact identity at t = 0. n = 3 maps to
/// the 1-D heat equation through w = sinh(r) u; n = 2 uses kernel quadrature
/// against heat_kernel. Accurate for 2t >= dr^2.
RadialField apply_heat(const RadialField &field, double t);

/// e^{t Delta} (div V), divergence first.
RadialField apply_div_heat(const RadialField &vfield, double t);

/// C~ max(t^{-n/2}, 1).
double h_n(double t, const DispersiveConstants &c);

/// (delta_n/2)[(1/p - 1/q) + (8/q)(1 - 1/p)]; q may be kInfExponent.
double gamma_pq(double p, double q, const DispersiveConstants &c);

struct ExponentPair {
  double p;
  double q;
};

struct DispersiveSample {
  std::size_t profile;
  double t;
  double p;
  double q;
  double lhs;       ///< ||e^{t Delta} u0||_q
  double u0_norm;   ///< ||u0||_p
  double ratio;     ///< lhs / rhs
};

struct DispersiveReport {
  std::vector<DispersiveSample> samples;
  double worst_ratio = 0.0;
  bool certified = true;
};

DispersiveReport check_dispersive(const std::vector<RadialField> &profiles,
                                  const std::vector<double> &times, double p, double q,
                                  const DispersiveConstants &constants);

/// Largest delta_n on a log grid over [1e-3, (n-1)^2] and smallest C~ >= 1
/// (up to 1e3) for which every pair certifies. Throws if none does.
DispersiveConstants calibrate(const std::vector<RadialField> &profiles,
                              const std::vector<double> &times,
                              const std::vector<ExponentPair> &pairs);

/// Same, also returning the per-pair reports at the chosen constants.
struct CalibrationResult {
  DispersiveConstants constants;
  std::vector<DispersiveReport> reports;
  double worst_ratio = 0.0;
};
CalibrationResult calibrate_with_report(const std::vector<RadialField> &profiles,
                                        const std::vector<double> &times,
                                        const std::vector<ExponentPair> &pairs);

/// Drops cached n = 2 kernel matrices.
void clear_heat_cache();

}  // namespace kshyp
