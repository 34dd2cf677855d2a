#include "kshyp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kshyp {

RadialGrid::RadialGrid(int n, double r_max, std::size_t num_nodes)
    : n_(n), r_max_(r_max), num_nodes_(num_nodes), dr_(0.0) {
  if (n < 2) throw std::invalid_argument("RadialGrid: dimension must be >= 2");
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw std::invalid_argument("RadialGrid: r_max must be positive");
  if (num_nodes < 16) throw std::invalid_argument("RadialGrid: need at least 16 nodes");
  dr_ = r_max / static_cast<double>(num_nodes - 1);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(num_nodes_);
  for (std::size_t i = 0; i < num_nodes_; ++i) r[i] = node(i);
  return r;
}

RadialField::RadialField(RadialGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

RadialField::RadialField(RadialGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("RadialField: value count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("RadialField: non-finite value");
}

void RadialField::require_same_grid(const RadialField &o) const {
  if (!(grid_ == o.grid_)) throw GridMismatch("RadialField: fields live on different grids");
}

RadialField &RadialField::operator+=(const RadialField &o) {
  require_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

RadialField &RadialField::operator-=(const RadialField &o) {
  require_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

RadialField &RadialField::operator*=(double s) {
  for (double &v : values_) v *= s;
  return *this;
}

RadialField &RadialField::axpy(double s, const RadialField &o) {
  require_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
  return *this;
}

double RadialField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RadialField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double RadialField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

RadialField operator+(RadialField a, const RadialField &b) { return a += b; }
RadialField operator-(RadialField a, const RadialField &b) { return a -= b; }
RadialField operator*(double s, RadialField a) { return a *= s; }

double sphere_area(int n) {
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double volume_weight(double r, int n) {
  if (n == 2) return std::sinh(r);
  return std::pow(std::sinh(r), n - 1);
}

double lp_norm(const RadialField &field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
  if (std::isinf(p)) return field.max_abs();
  const RadialGrid &g = field.grid();
  const int n = g.dim();
  const std::size_t N = g.size();
  double sum = 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    const double c = (i + 1 == N) ? 0.5 : 1.0;
    const double a = std::abs(field[i]);
    if (a == 0.0) continue;
    sum += c * std::pow(a, p) * volume_weight(g.node(i), n);
  }
  return std::pow(sphere_area(n) * g.spacing() * sum, 1.0 / p);
}

std::vector<double> mass_weights(const RadialGrid &grid) {
  const std::size_t N = grid.size();
  std::vector<double> w(N);
  const double scale = sphere_area(grid.dim()) * grid.spacing();
  // the odd integrand u sinh r (n = 2) needs the h^2 g'(0)/12 endpoint term
  w[0] = (grid.dim() == 2) ? scale * grid.spacing() / 12.0 : 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    const double c = (i + 1 == N) ? 0.5 : 1.0;
    w[i] = c * scale * volume_weight(grid.node(i), grid.dim());
  }
  return w;
}

double mass(const RadialField &field) {
  const std::vector<double> w = mass_weights(field.grid());
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) m += w[i] * field[i];
  return m;
}

double coth_regularized(double r) {
  if (r < 1e-3) return 1.0 / r + r / 3.0;
  return 1.0 / std::tanh(r);
}

RadialField radial_laplacian(const RadialField &field) {
  const RadialGrid &g = field.grid();
  const std::size_t N = g.size();
  const double h = g.spacing();
  const double h2 = h * h;
  const int n = g.dim();
  RadialField out(g);
  const auto u = field.values();
  out[0] = 2.0 * n * (u[1] - u[0]) / h2;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    const double d1 = (u[i + 1] - u[i - 1]) / (2.0 * h);
    out[i] = d2 + (n - 1) * coth_regularized(g.node(i)) * d1;
  }
  const std::size_t L = N - 1;
  const double d2 = (2.0 * u[L] - 5.0 * u[L - 1] + 4.0 * u[L - 2] - u[L - 3]) / h2;
  const double d1 = (3.0 * u[L] - 4.0 * u[L - 1] + u[L - 2]) / (2.0 * h);
  out[L] = d2 + (n - 1) * coth_regularized(g.node(L)) * d1;
  return out;
}

// Finite-volume form on the trapezoid cells. The interface flux
//   G_{i+1/2} = (-G_{i-1} + 7 G_i + 7 G_{i+1} - G_{i+2}) / 12,  G = sinh^{n-1} F,
// matches the trapezoid partial sums of G' to O(h^4), which keeps the
// scheme consistent next to the axis where sinh^{n-1} is O(h^{n-1}).
// The axis interface carries zero flux. For n = 2,
// G''(0) != 0 and the axis face carries the Euler-Maclaurin endpoint term
// h^2 G''(0)/12, balanced by the axis mass weight.
RadialField radial_divergence(const RadialField &vfield, DivergenceDiagnostics *diag) {
  const RadialGrid &g = vfield.grid();
  const std::size_t N = g.size();
  const double h = g.spacing();
  const int n = g.dim();

  std::vector<double> G(N), vol(N);
  G[0] = 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    vol[i] = volume_weight(g.node(i), n);
    G[i] = vol[i] * vfield[i];
  }

  // face[i] is the flux through r_{i+1/2}; the last face is the boundary node itself.
  std::vector<double> face(N);
  face[0] = (n == 2) ? G[1] / 6.0 : 0.0;
  for (std::size_t i = 1; i + 2 < N; ++i)
    face[i] = (-G[i - 1] + 7.0 * G[i] + 7.0 * G[i + 1] - G[i + 2]) / 12.0;
  face[N - 2] = 0.5 * (G[N - 2] + G[N - 1]);
  face[N - 1] = G[N - 1];

  RadialField out(g);
  // Axis: n F'(0). For n = 2 it must balance the axis face exactly; otherwise
  // the axis weight is zero and the odd-extension estimate is used.
  if (n == 2) out[0] = face[0] * 12.0 / (h * h);
  else out[0] = n * (8.0 * vfield[1] - vfield[2]) / (6.0 * h);
  for (std::size_t i = 1; i + 1 < N; ++i) out[i] = (face[i] - face[i - 1]) / (h * vol[i]);
  out[N - 1] = (face[N - 1] - face[N - 2]) / (0.5 * h * vol[N - 1]);

  const double boundary = sphere_area(n) * G[N - 1];
  if (diag) {
    diag->boundary_flux = boundary;
    diag->flux_warning = std::abs(boundary) > kBoundaryFluxTolerance;
  }
  return out;
}

RadialField radial_gradient(const RadialField &field) {
  const RadialGrid &g = field.grid();
  const std::size_t N = g.size();
  const double h = g.spacing();
  RadialField out(g);
  out[0] = 0.0;
  for (std::size_t i = 1; i + 1 < N; ++i) out[i] = (field[i + 1] - field[i - 1]) / (2.0 * h);
  out[N - 1] = (3.0 * field[N - 1] - 4.0 * field[N - 2] + field[N - 3]) / (2.0 * h);
  return out;
}

}  // namespace kshyp
