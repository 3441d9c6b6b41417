/// @file lattice.hpp
/// @brief Concentric-ring vortex point construction, the smoothed trial
///        measure, and Riemann-sum validation against the predicted density.

#pragma once

#include <array>
#include <functional>
#include <vector>

#include "vortexlab/tf.hpp"

namespace vtx {

/// One ring: index k, radius rho_k = k / sqrt(|log eps|), point count n_k,
/// angular spacing theta_k = 2 pi / n_k.
struct LatticeCircle {
  int k = 0;
  double rho_k = 0.0;
  int n_k = 0;
  double theta_k = 0.0;
};

/// Discrete vortex configuration plus its construction context.
struct VortexLattice {
  double eps = 0.0;
  int k0 = 0;  ///< smallest included ring index; 0 when empty
  std::vector<LatticeCircle> circles;
  std::vector<std::array<double, 2>> points;  ///< Cartesian positions
  int n_total = 0;
  TfModel model;       ///< construction context for downstream checks
  double omega0 = 0.0;
  bool empty() const { return n_total == 0; }
};

/// Uniform ball smoothing of the point configuration: amplitude 2 / eps^2 on
/// radius-eps balls, so each ball carries mass exactly 2 pi.
struct TrialMeasure {
  VortexLattice lattice;
  double ball_radius = 0.0;
  double amplitude = 0.0;
  /// Piecewise-constant density at a point (balls are disjoint by guard).
  double density_at(double x, double y) const;
  /// Analytic total mass 2 pi n_total.
  double total_mass() const;
};

/// Builds rings rho_k = k / sqrt(L) for k in [k0, R_star sqrt(L)] carrying
/// n_k = floor(sqrt(L) rho_k m_star(rho_k)) points at angles (i + 1/2) theta_k,
/// keeping rings with n_k >= min_points. k0 <= 0 selects the smallest
/// qualifying ring. Returns an empty lattice when omega0 <= omega_c1 or no
/// ring qualifies. Requires 0 < eps < 1/e.
VortexLattice build_lattice(const TfModel& model, double omega0, double eps, int k0 = 0,
                            int min_points = 4);

/// Discrete sum versus continuum target of the ring construction.
struct RiemannCheck {
  double discrete_sum = 0.0;       ///< 2 pi sum_i test_fn(|a_i|)
  double continuum_integral = 0.0; ///< |log eps| int test_fn dmu_star
  double error = 0.0;              ///< absolute difference
};

/// Riemann-sum consistency for a radial C^1 test function.
RiemannCheck riemann_check(const VortexLattice& lattice,
                           const std::function<double(double)>& test_fn);

/// Smooths the configuration into the trial measure. Throws ValidationError
/// on an empty lattice or if any pairwise separation is <= 2 eps.
TrialMeasure trial_measure(const VortexLattice& lattice);

}  // namespace vtx
