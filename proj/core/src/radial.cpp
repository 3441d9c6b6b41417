/// @file radial.cpp
/// @brief Renormalized-energy kernels over radial measures.

#include "vortexlab/radial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "vortexlab/detail/numerics.hpp"
#include "vortexlab/errors.hpp"

namespace vtx {

namespace {

constexpr double kPi = std::numbers::pi;

/// Weighted inner product matching the 2D area measure: sum 2 pi w r a b.
double area_dot(const RadialGrid& g, const std::vector<double>& a,
                const std::vector<double>& b) {
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    terms[i] = 2.0 * kPi * g.w[i] * g.r[i] * a[i] * b[i];
  }
  return detail::neumaier_sum(terms);
}

std::vector<double> potential_of(const RadialGrid& g, const std::vector<double>& density,
                                 const TfModel& model, std::vector<double>* flux_out) {
  const int n = g.n;
  std::vector<double> integrand(n);
  for (int i = 0; i < n; ++i) integrand[i] = g.r[i] * density[i];
  std::vector<double> M = detail::cumulative_trapezoid(integrand, g.dr);

  // q = rho M / r; q(0) = 0 since M = O(r^2).
  std::vector<double> q(n, 0.0);
  for (int i = 1; i < n; ++i) q[i] = rho_tf(model, g.r[i]) * M[i] / g.r[i];
  std::vector<double> Q = detail::cumulative_trapezoid(q, g.dr);

  std::vector<double> h(n);
  const double Qend = Q[n - 1];
  for (int i = 0; i < n; ++i) h[i] = Qend - Q[i];
  if (flux_out) *flux_out = std::move(M);
  return h;
}

double interaction_of(const RadialGrid& g, const std::vector<double>& flux,
                      const TfModel& model) {
  std::vector<double> terms(g.n, 0.0);
  for (int i = 1; i < g.n; ++i) {
    terms[i] = g.w[i] * rho_tf(model, g.r[i]) / g.r[i] * flux[i] * flux[i];
  }
  return kPi * detail::neumaier_sum(terms);
}

}  // namespace

RadialGrid make_radial_grid(double r_dom, int n) {
  if (!(r_dom > 0.0)) throw ValidationError("make_radial_grid: require r_dom > 0");
  if (n < 3) throw ValidationError("make_radial_grid: require n >= 3 nodes");
  RadialGrid g;
  g.r_dom = r_dom;
  g.n = n;
  g.dr = r_dom / (n - 1);
  g.r.resize(n);
  for (int i = 0; i < n; ++i) g.r[i] = i * g.dr;
  g.w = detail::trapezoid_weights(n, r_dom);
  return g;
}

RadialMeasure zero_measure(double r_dom, int n) {
  RadialMeasure m;
  m.grid = make_radial_grid(r_dom, n);
  m.density.assign(n, 0.0);
  return m;
}

RadialMeasure mu_star_measure(const TfModel& model, double omega0,
                              const RadialGrid& grid) {
  const SupportRadii radii = support_radii(model, omega0);
  RadialMeasure m;
  m.grid = grid;
  m.density.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    m.density[i] = mu_star_density(model, omega0, radii, grid.r[i]);
  }
  return m;
}

PotentialH solve_potential(const RadialMeasure& nu, const TfModel& model, double tol) {
  (void)tol;  // the radial reduction solves by direct quadrature
  if (nu.grid.n < 3) throw ValidationError("solve_potential: require >= 3 nodes");
  if (nu.grid.r_dom > model.r_tf * (1.0 + 1e-12)) {
    throw ValidationError("solve_potential: require r_dom <= R_TF");
  }
  PotentialH p;
  p.grid = nu.grid;
  p.h = potential_of(nu.grid, nu.density, model, &p.flux);
  return p;
}

RenormReport energy(const RadialMeasure& nu, const TfModel& model, double omega0) {
  const RadialGrid& g = nu.grid;
  std::vector<double> flux;
  potential_of(g, nu.density, model, &flux);

  RenormReport rep;
  rep.interaction = interaction_of(g, flux, model);

  std::vector<double> cost_terms(g.n), gain_terms(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double r = g.r[i];
    cost_terms[i] = kPi * g.w[i] * r * rho_tf(model, r) * std::abs(nu.density[i]);
    gain_terms[i] = 2.0 * kPi * g.w[i] * r * f_tf(model, omega0, r) * nu.density[i];
  }
  rep.cost = detail::neumaier_sum(cost_terms);
  rep.gain = detail::neumaier_sum(gain_terms);
  rep.total = rep.interaction + rep.cost + rep.gain;
  return rep;
}

double weighted_l1_gap(const RadialMeasure& a, const RadialMeasure& b) {
  if (a.grid.n != b.grid.n || a.grid.r_dom != b.grid.r_dom) {
    throw ValidationError("weighted_l1_gap: measures must share a grid");
  }
  std::vector<double> terms(a.grid.n);
  for (int i = 0; i < a.grid.n; ++i) {
    terms[i] = 2.0 * kPi * a.grid.w[i] * a.grid.r[i] *
               std::abs(a.density[i] - b.density[i]);
  }
  return detail::neumaier_sum(terms);
}

MinimizeResult minimize(const TfModel& model, double omega0, const RadialMeasure& init,
                        int max_iter, double tol) {
  const RadialGrid& g = init.grid;
  const int n = g.n;

  std::vector<double> rho(n), F(n);
  for (int i = 0; i < n; ++i) {
    rho[i] = rho_tf(model, g.r[i]);
    F[i] = f_tf(model, omega0, g.r[i]);
  }

  // Largest eigenvalue of nu -> h_nu in the area-weighted metric, where the
  // interaction quadratic form is self-adjoint and positive semidefinite.
  std::mt19937_64 rng(0x9E3779B97F4A7C15ull);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = detail::uniform(rng, -1.0, 1.0);
  double lambda_max = 0.0;
  for (int it = 0; it < 80; ++it) {
    std::vector<double> Kv = potential_of(g, v, model, nullptr);
    const double nrm = std::sqrt(area_dot(g, Kv, Kv));
    if (nrm == 0.0) break;
    lambda_max = area_dot(g, v, Kv) / area_dot(g, v, v);
    for (int i = 0; i < n; ++i) v[i] = Kv[i] / nrm;
  }
  const double step = 0.9 / lambda_max;

  MinimizeResult res;
  res.step = step;
  std::vector<double> nu = init.density;
  double prev_total = 0.0;
  bool have_prev = false;

  RadialMeasure cur;
  cur.grid = g;
  for (int iter = 1; iter <= max_iter; ++iter) {
    std::vector<double> h = potential_of(g, nu, model, nullptr);
    for (int i = 0; i < n; ++i) {
      const double z = nu[i] - step * (h[i] + F[i]);
      const double thr = step * 0.5 * rho[i];
      nu[i] = (z > thr) ? z - thr : (z < -thr ? z + thr : 0.0);
    }
    cur.density = nu;
    const RenormReport rep = energy(cur, model, omega0);
    res.trace.emplace_back(iter, rep.total);
    res.iterations = iter;
    if (have_prev &&
        std::abs(prev_total - rep.total) <= tol * std::max(std::abs(rep.total), 1e-30)) {
      res.converged = true;
      res.report = rep;
      break;
    }
    prev_total = rep.total;
    have_prev = true;
    res.report = rep;
  }
  res.minimizer = std::move(cur);
  return res;
}

double check_stability(const RadialMeasure& nu, const TfModel& model, double omega0) {
  const RadialMeasure mu = mu_star_measure(model, omega0, nu.grid);
  const double e_nu = energy(nu, model, omega0).total;
  const double e_mu = energy(mu, model, omega0).total;

  RadialMeasure diff;
  diff.grid = nu.grid;
  diff.density.resize(nu.grid.n);
  for (int i = 0; i < nu.grid.n; ++i) {
    diff.density[i] = nu.density[i] - mu.density[i];
  }
  std::vector<double> flux;
  potential_of(diff.grid, diff.density, model, &flux);
  const double quad = interaction_of(diff.grid, flux, model);
  return e_nu - e_mu - quad;
}

}  // namespace vtx
