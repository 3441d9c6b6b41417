/// @file lattice.cpp
/// @brief Ring construction and Riemann-sum checks.

#include "vortexlab/lattice.hpp"

#include <cmath>
#include <numbers>

#include "vortexlab/detail/numerics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/mustar.hpp"

namespace vtx {

namespace {
constexpr double kPi = std::numbers::pi;
}

double TrialMeasure::density_at(double x, double y) const {
  for (const auto& p : lattice.points) {
    const double dx = x - p[0], dy = y - p[1];
    if (dx * dx + dy * dy < ball_radius * ball_radius) return amplitude;
  }
  return 0.0;
}

double TrialMeasure::total_mass() const { return 2.0 * kPi * lattice.n_total; }

VortexLattice build_lattice(const TfModel& model, double omega0, double eps, int k0,
                            int min_points) {
  if (!(eps > 0.0 && eps < std::exp(-1.0))) {
    throw ValidationError("build_lattice: require 0 < eps < 1/e");
  }
  if (min_points < 1) throw ValidationError("build_lattice: require min_points >= 1");

  VortexLattice lat;
  lat.eps = eps;
  lat.model = model;
  lat.omega0 = omega0;
  if (!(omega0 > omega_c1(model))) return lat;  // no support, empty lattice

  const SupportRadii radii = support_radii(model, omega0);
  const double L = -std::log(eps);
  const double sqrtL = std::sqrt(L);

  const int k_start = k0 > 0 ? k0 : 1;
  for (int k = k_start;; ++k) {
    const double rho_k = k / sqrtL;
    if (rho_k > radii.r_star) break;
    const double m = mu_star_density(model, omega0, radii, rho_k);
    const int n_k = static_cast<int>(std::floor(sqrtL * rho_k * m));
    if (n_k < min_points) continue;
    LatticeCircle c;
    c.k = k;
    c.rho_k = rho_k;
    c.n_k = n_k;
    c.theta_k = 2.0 * kPi / n_k;
    if (lat.circles.empty()) lat.k0 = k;
    lat.circles.push_back(c);
    for (int i = 0; i < n_k; ++i) {
      const double th = (i + 0.5) * c.theta_k;
      lat.points.push_back({rho_k * std::cos(th), rho_k * std::sin(th)});
    }
    lat.n_total += n_k;
  }
  return lat;
}

RiemannCheck riemann_check(const VortexLattice& lattice,
                           const std::function<double(double)>& test_fn) {
  RiemannCheck out;
  std::vector<double> vals(lattice.points.size());
  for (std::size_t i = 0; i < lattice.points.size(); ++i) {
    const auto& p = lattice.points[i];
    vals[i] = test_fn(std::hypot(p[0], p[1]));
  }
  out.discrete_sum = 2.0 * kPi * detail::pairwise_sum(vals);

  const double L = -std::log(lattice.eps);
  const TfModel& model = lattice.model;
  const double omega0 = lattice.omega0;
  double integral = 0.0;
  if (omega0 > omega_c1(model)) {
    const SupportRadii radii = support_radii(model, omega0);
    integral = 2.0 * kPi *
               detail::gauss_integrate(
                   [&](double r) {
                     return r * test_fn(r) * mu_star_density(model, omega0, radii, r);
                   },
                   0.0, radii.r_star, 64);
  }
  out.continuum_integral = L * integral;
  out.error = std::abs(out.discrete_sum - out.continuum_integral);
  return out;
}

TrialMeasure trial_measure(const VortexLattice& lattice) {
  if (lattice.empty()) throw ValidationError("trial_measure: empty lattice");
  const double eps = lattice.eps;
  for (std::size_t i = 0; i < lattice.points.size(); ++i) {
    for (std::size_t j = i + 1; j < lattice.points.size(); ++j) {
      const double dx = lattice.points[i][0] - lattice.points[j][0];
      const double dy = lattice.points[i][1] - lattice.points[j][1];
      if (std::hypot(dx, dy) <= 2.0 * eps) {
        throw ValidationError("trial_measure: overlapping vortex balls");
      }
    }
  }
  TrialMeasure t;
  t.lattice = lattice;
  t.ball_radius = eps;
  t.amplitude = 2.0 / (eps * eps);
  return t;
}

}  // namespace vtx
