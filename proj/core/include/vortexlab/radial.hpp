/// @file radial.hpp
/// @brief Renormalized energy over radial measures: weighted potential solves
///        by quadrature, energy reports, proximal-gradient minimization, and
///        the stability deficit.

#pragma once

#include <utility>
#include <vector>

#include "vortexlab/mustar.hpp"
#include "vortexlab/tf.hpp"

namespace vtx {

/// Uniform radial grid on [0, r_dom] with composite trapezoid weights.
struct RadialGrid {
  double r_dom = 0.0;
  int n = 0;
  double dr = 0.0;
  std::vector<double> r;  ///< nodes, r[0] = 0, r[n-1] = r_dom
  std::vector<double> w;  ///< trapezoid weights; integrals are sum w_i f_i
};

/// n >= 3 nodes on [0, r_dom], r_dom > 0.
RadialGrid make_radial_grid(double r_dom, int n);

/// Radially symmetric signed measure nu(r) dA sampled at grid nodes.
struct RadialMeasure {
  RadialGrid grid;
  std::vector<double> density;
  double r_dom() const { return grid.r_dom; }
};

/// Zero measure on a fresh grid.
RadialMeasure zero_measure(double r_dom, int n);

/// Minimizing density sampled onto an arbitrary grid (zero beyond r_star).
RadialMeasure mu_star_measure(const TfModel& model, double omega0, const RadialGrid& grid);

/// Weighted potential of a measure, with the cumulative flux that defines it.
struct PotentialH {
  RadialGrid grid;
  std::vector<double> h;     ///< h(r_dom) = 0 Dirichlet condition
  std::vector<double> flux;  ///< M(r) = int_0^r t nu(t) dt
};

/// Energy components of a measure. total = interaction + cost + gain.
struct RenormReport {
  double interaction = 0.0;  ///< int (1/2 rho)|grad h|^2 dA >= 0
  double cost = 0.0;         ///< int (rho/2)|nu| dA >= 0
  double gain = 0.0;         ///< int F nu dA
  double total = 0.0;
};

/// Solves -div(rho^-1 grad h) = nu with h(r_dom) = 0 by radial quadrature:
/// M(r) = int_0^r t nu dt, h'(r) = -rho M / r, h(r) = int_r^{r_dom} rho M/t dt.
/// tol is reserved (the quadrature path is direct). Throws for < 3 nodes.
PotentialH solve_potential(const RadialMeasure& nu, const TfModel& model, double tol = 0.0);

/// Energy of a measure; interaction via pi int (rho/r) M^2 dr.
RenormReport energy(const RadialMeasure& nu, const TfModel& model, double omega0);

/// Area-weighted L1 distance int |a - b| dA over a shared grid.
double weighted_l1_gap(const RadialMeasure& a, const RadialMeasure& b);

/// Proximal-gradient minimization outcome.
struct MinimizeResult {
  RadialMeasure minimizer;
  RenormReport report;
  bool converged = false;
  int iterations = 0;
  double step = 0.0;                            ///< accepted gradient step
  std::vector<std::pair<int, double>> trace;    ///< (iteration, energy)
};

/// Minimizes the renormalized energy over signed radial measures on init's
/// grid. Smooth part (interaction + gain) stepped with 0.9 / lambda_max from
/// a weighted power iteration; nonsmooth cost handled by soft-thresholding
/// with node threshold (step rho_i / 2). Stops when the relative energy
/// decrease drops below tol. Non-convergence is reported, not thrown.
MinimizeResult minimize(const TfModel& model, double omega0, const RadialMeasure& init,
                        int max_iter = 50000, double tol = 1e-10);

/// Stability deficit  E[nu] - E[mu_star] - int (1/2 rho)|grad h_{nu-mu_star}|^2
/// evaluated with shared-grid quadrature; analytically >= 0 for any measure.
double check_stability(const RadialMeasure& nu, const TfModel& model, double omega0);

}  // namespace vtx
