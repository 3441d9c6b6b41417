/// @file gpflow.hpp
/// @brief Gross-Pitaevskii ground states at desk scale: the radial vortex-free
///        profile, the rotating 2D minimization, vorticity extraction, and the
///        weighted-norm comparison against the predicted vortex density.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "vortexlab/field2d.hpp"
#include "vortexlab/lattice.hpp"
#include "vortexlab/mustar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/tf.hpp"

namespace vtx {

/// Vortex-free radial minimizer g of the unrotated energy per unit mass.
struct RadialProfileG {
  RadialGrid grid;        ///< uniform nodes on [0, r_max], r_max > R_TF
  std::vector<double> g;  ///< nonnegative, decreasing, unit L2 mass
  double eps = 0.0;
  double lambda_hat = 0.0;   ///< chemical potential from the multiplier identity
  double e_hat = 0.0;        ///< minimized energy value
  double el_residual = 0.0;  ///< sup-norm defect of the discrete profile equation
  bool converged = false;
  int iterations = 0;
};

/// Normalized-gradient-flow solve of the radial profile. Backward-Euler
/// tridiagonal steps with the interaction term lagged, renormalized each step,
/// until the energy stalls below tol. Requires 0 < eps <= 0.2, n_nodes >= 1024.
RadialProfileG solve_radial_profile(const TfModel& model, double eps, int n_nodes,
                                    double tol = 1e-13);

/// Linear interpolation of the profile at radius r (0 beyond the last node).
double sample_profile(const RadialProfileG& profile, double r);

/// Step-size and stopping policy for the 2D flow.
struct GpSchedule {
  double dt0 = 5e-4;      ///< initial step
  double dt_max = 2e-3;   ///< growth cap; further capped by an advective bound
  double tol = 5e-9;      ///< stall: best-energy gain per window below tol max(1,|E|)
  int stall_window = 300; ///< accepted steps per stall checkpoint
  int max_steps = 20000;  ///< per start
  int n_starts = 3;       ///< multi-start count (minimizers are non-unique)
  std::uint64_t seed = 0; ///< base seed; start index is mixed in
};

/// One rotating-frame condensate state on a square grid.
struct GpState {
  Grid2D grid;
  std::vector<std::complex<double>> psi;  ///< row-major, unit discrete L2 mass
  double eps = 0.0;
  double omega0 = 0.0;  ///< rotation coefficient, Omega = omega0 |log eps|
  double s = 2.0;
  std::vector<std::pair<int, double>> energy_trace;  ///< accepted (step, energy)
  double energy = 0.0;
  double lambda_hat = 0.0;
  bool converged = false;
  int steps = 0;
  int best_start = 0;  ///< index of the winning start
};

/// Discrete rotating-frame energy of the state (forward-difference kinetic
/// term, centered rotation term, pointwise potential and interaction).
double gp_energy(const GpState& state, const TfModel& model);

/// Gradient of gp_energy with respect to the node values, as the complex field
/// 2 dE/d(conj psi). Matches central finite differences of gp_energy.
std::vector<std::complex<double>> gp_energy_gradient(const GpState& state,
                                                     const TfModel& model);

/// Ground-state search: semi-implicit splitting flow (exact pointwise decay of
/// the potential/interaction factor, explicit centered rotation, spectral
/// backward-Euler diffusion), renormalized every step, energy guard with step
/// halving, multi-start seeded from the ring lattice; returns the best start.
/// Requires spacing <= eps/2 and extent >= R_TF + 6 eps^(2/3).
GpState minimize_gp(const TfModel& model, double omega0, double eps, const Grid2D& grid,
                    const GpSchedule& schedule = {});

/// Two-sided energy split E = E_hat + reduced, all terms on the same grid.
struct EnergyReport {
  double e_gp = 0.0;          ///< direct discrete energy of the state
  double e_hat = 0.0;         ///< discrete energy of the vortex-free profile
  double reduced = 0.0;       ///< reduced energy of u = psi / g
  double identity_gap = 0.0;  ///< |e_gp - e_hat - reduced| / |e_gp|
  double coverage = 0.0;      ///< fraction of the TF disc above the g threshold
  bool low_coverage = false;  ///< set (with a stderr warning) below 90%
};

/// Evaluates the decomposition. The profile is resampled onto the state grid
/// and polished by a short unrotated flow so the discrete profile equation
/// holds on the same stencil; u is formed where g^2 >= max(eps, 0.02 lambda).
EnergyReport energy_decompose(const GpState& state, const RadialProfileG& profile,
                              const TfModel& model);

/// One detected vortex: cluster centroid and integer winding.
struct Vortex {
  std::array<double, 2> position{};
  int winding = 0;
};

/// Vorticity data extracted from a converged state.
struct VorticityResult {
  ScalarField2D mu_field;          ///< vorticity samples; mask = valid region
  std::vector<Vortex> vortices;
  std::vector<double> bin_r;       ///< radial bin centers, width R_TF / n_bins
  std::vector<double> radial_mu;   ///< azimuthal average per bin
  double norm_gap = 0.0;           ///< filled by compare_to_mustar
  double excluded_fraction = 0.0;  ///< TF-disc fraction below the g threshold
};

/// Superfluid-current curl scaled by 1/|log eps|, plaquette phase winding with
/// clustering (flagged cells within 2 cells merge at the winding-weighted
/// centroid), and azimuthal binning of the vorticity.
VorticityResult extract_vorticity(const GpState& state, const RadialProfileG& profile,
                                  const TfModel& model, int n_bins = 32);

/// Radial binning of a point lattice in the same normalization (each point
/// carries vorticity mass 2 pi / |log eps|).
VorticityResult bin_lattice_radial(const VortexLattice& lattice, int n_bins = 32);

/// Weighted-seminorm distance between the binned vorticity and the predicted
/// density over the bulk disc of radius R_TF - (1/(4 R_TF)) / Omega: both sides
/// are compared as bin-center step functions, the difference measure is solved
/// for its potential, and sqrt of the interaction energy is returned. Also
/// stored into result.norm_gap.
double compare_to_mustar(VorticityResult& result, const VortexDensity& density,
                         const TfModel& model, double omega0, double eps);

}  // namespace vtx
