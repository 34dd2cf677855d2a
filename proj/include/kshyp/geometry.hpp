#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kshyp {

/// Uniform radial grid r_i = i*dr on [0, r_max] for radial data on H^n.
class RadialGrid {
public:
  RadialGrid(int n, double r_max, std::size_t num_nodes);

  int dim() const { return n_; }
  double r_max() const { return r_max_; }
  std::size_t size() const { return num_nodes_; }
  double spacing() const { return dr_; }
  double node(std::size_t i) const { return static_cast<double>(i) * dr_; }
  std::vector<double> nodes() const;

  bool operator==(const RadialGrid &other) const = default;

private:
  int n_;
  double r_max_;
  std::size_t num_nodes_;
  double dr_;
};

/// Samples of a radial profile on a grid. Radial vector fields are stored as
/// their d/dr component.
class RadialField {
public:
  explicit RadialField(RadialGrid grid);
  RadialField(RadialGrid grid, std::vector<double> values);

  template <class F> static RadialField sample(const RadialGrid &grid, F &&f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
    return RadialField(grid, std::move(v));
  }

  const RadialGrid &grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double &operator[](std::size_t i) { return values_[i]; }

  RadialField &operator+=(const RadialField &o);
  RadialField &operator-=(const RadialField &o);
  RadialField &operator*=(double s);
  /// this += s * o
  RadialField &axpy(double s, const RadialField &o);

  double min() const;
  double max() const;
  double max_abs() const;

private:
  void require_same_grid(const RadialField &o) const;

  RadialGrid grid_;
  std::vector<double> values_;
};

RadialField operator+(RadialField a, const RadialField &b);
RadialField operator-(RadialField a, const RadialField &b);
RadialField operator*(double s, RadialField a);

class GridMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent value standing in for q = infinity (grid max of |values|).
inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// Area of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// sinh^{n-1}(r).
double volume_weight(double r, int n);

/// (omega_{n-1} int |u|^p sinh^{n-1} r dr)^{1/p} by composite trapezoid;
/// p = kInfExponent gives max |u|.
double lp_norm(const RadialField &field, double p);

/// Per-node weights of the mass functional: trapezoid weights times
/// omega_{n-1} sinh^{n-1}(r_i). The axis weight is the Euler-Maclaurin
/// endpoint term omega dr^2/12 for n = 2 and zero otherwise.
/// radial_divergence telescopes exactly against these weights.
std::vector<double> mass_weights(const RadialGrid &grid);

/// Discrete hyperbolic mass omega_{n-1} int u sinh^{n-1} r dr.
double mass(const RadialField &field);

/// u'' + (n-1) coth(r) u', with n u''(0) on the axis.
RadialField radial_laplacian(const RadialField &field);

/// Status of the outer boundary flux for radial_divergence.
struct DivergenceDiagnostics {
  double boundary_flux = 0.0;  ///< omega_{n-1} sinh^{n-1}(r_max) F(r_max)
  bool flux_warning = false;
};

inline constexpr double kBoundaryFluxTolerance = 1e-10;

/// (1/sinh^{n-1} r) d/dr (sinh^{n-1}(r) F) in summation-by-parts flux form:
/// sum_i mass_weights[i] * out[i] equals the boundary flux to round-off.
RadialField radial_divergence(const RadialField &vfield,
                              DivergenceDiagnostics *diag = nullptr);

/// coth(r) with the series 1/r + r/3 below 1e-3.
double coth_regularized(double r);

/// Centered first derivative; zero at the axis, one-sided at r_max.
RadialField radial_gradient(const RadialField &field);

}  // namespace kshyp
