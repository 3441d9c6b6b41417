/// @file mustar.cpp
/// @brief Vortex density prediction, support radii, and limit energy.

#include "vortexlab/mustar.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "vortexlab/detail/numerics.hpp"
#include "vortexlab/errors.hpp"

namespace vtx {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeSliver = 1e-10;  // relative width treated as -inf

/// Shared domain guard: throws at/after the support edge, flags the sliver.
bool in_sliver(const TfModel& model, double r) {
  if (r < 0.0) throw ValidationError("m_star: require r >= 0");
  if (r >= model.r_tf) throw ValidationError("m_star: require r < R_TF");
  return r > model.r_tf * (1.0 - kEdgeSliver);
}

double pow_rs(double r, double s) {
  if (s == 0.0) return 1.0;  // r^0 = 1 even at the origin (s = 2 exponents)
  if (r <= 0.0) return 0.0;
  return std::exp(s * std::log(r));
}

}  // namespace

double m_star_diff_form(const TfModel& model, double omega0, double r) {
  if (in_sliver(model, r)) return -std::numeric_limits<double>::infinity();
  const double s = model.params.s;
  const double rho = rho_tf(model, r);
  const double d2rho = -0.5 * s * (s - 1.0) * pow_rs(r, s - 2.0);
  if (r == 0.0) {
    // Both terms of the radial Laplacian tend to (log rho)''(0).
    return d2rho / rho + 2.0 * omega0;
  }
  const double drho = -0.5 * s * pow_rs(r, s - 1.0);
  const double log2 = (d2rho * rho - drho * drho) / (rho * rho);
  const double log1_over_r = drho / (r * rho);
  return 0.5 * (log2 + log1_over_r) + 2.0 * omega0;
}

double m_star_rational_form(const TfModel& model, double omega0, double r) {
  if (in_sliver(model, r)) return -std::numeric_limits<double>::infinity();
  const double s = model.params.s;
  const double rho = rho_tf(model, r);
  return 2.0 * omega0 -
         s * s * model.lambda_tf * pow_rs(r, s - 2.0) / (8.0 * rho * rho);
}

double m_star_of_r(const TfModel& model, double omega0, double r) {
  const double a = m_star_diff_form(model, omega0, r);
  const double b = m_star_rational_form(model, omega0, r);
  if (std::isfinite(a) && std::isfinite(b)) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    if (std::abs(a - b) > 1e-9 * scale) {
      throw ConvergenceError("m_star_of_r: evaluation forms disagree");
    }
  }
  return b;
}

SupportRadii support_radii(const TfModel& model, double omega0) {
  if (!(omega0 > omega_c1(model))) {
    throw ValidationError("support_radii: no nucleation (omega0 <= omega_c1)");
  }
  const double R = model.r_tf;
  const double lo = 1e-8 * R;
  const double hi = R * (1.0 - kEdgeSliver);
  SupportRadii out;
  out.r1 = detail::brent_root([&](double r) { return h_tf(model, omega0, r); }, lo, hi,
                              1e-12);
  out.r2 = detail::brent_root(
      [&](double r) { return m_star_rational_form(model, omega0, r); }, lo, hi, 1e-12);
  out.r_star = std::min(out.r1, out.r2);
  return out;
}

double mu_star_density(const TfModel& model, double omega0, const SupportRadii& radii,
                       double r) {
  if (r < 0.0 || r > radii.r_star) return 0.0;
  const double m = m_star_rational_form(model, omega0, r);
  return m > 0.0 ? m : 0.0;
}

VortexDensity mu_star(const TfModel& model, double omega0, int n_nodes) {
  if (n_nodes < 256) throw ValidationError("mu_star: require n_nodes >= 256");
  VortexDensity d;
  d.grid.resize(n_nodes);
  d.m_star.resize(n_nodes);
  d.mu_star.assign(n_nodes, 0.0);
  const double R = model.r_tf;
  const double dr = R / (n_nodes - 1);
  for (int i = 0; i < n_nodes; ++i) {
    const double r = std::min(i * dr, R * (1.0 - 0.5 * kEdgeSliver));
    d.grid[i] = i * dr;
    d.m_star[i] = m_star_rational_form(model, omega0, r);
  }

  const bool nucleated = omega0 > omega_c1(model);
  if (!nucleated) return d;

  const SupportRadii radii = support_radii(model, omega0);
  d.r1 = radii.r1;
  d.r2 = radii.r2;
  d.r_star = radii.r_star;
  for (int i = 0; i < n_nodes; ++i) {
    d.mu_star[i] = mu_star_density(model, omega0, radii, d.grid[i]);
  }

  // Mass and limit energy on a dedicated [0, r_star] trapezoid grid: the
  // integrands are smooth there, so the error is clean O(h^2).
  const auto w = detail::trapezoid_weights(n_nodes, radii.r_star);
  const double ds = radii.r_star / (n_nodes - 1);
  std::vector<double> mass_terms(n_nodes), energy_terms(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double r = i * ds;
    const double mu = mu_star_density(model, omega0, radii, r);
    mass_terms[i] = w[i] * r * mu;
    energy_terms[i] = w[i] * r * mu * h_tf(model, omega0, r);
  }
  d.total_mass = 2.0 * kPi * detail::neumaier_sum(mass_terms);
  d.i_tf = kPi * detail::neumaier_sum(energy_terms);
  return d;
}

}  // namespace vtx
