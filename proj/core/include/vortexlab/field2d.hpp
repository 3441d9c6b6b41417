/// @file field2d.hpp
/// @brief Variable-coefficient elliptic solves on a masked disc: weighted
///        Poisson problems, Green-function singularity checks, trial-measure
///        interaction energies, and the assembled energy upper bound.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vortexlab/lattice.hpp"
#include "vortexlab/tf.hpp"

namespace vtx {

/// Uniform Cartesian grid on [-extent, extent]^2, n nodes per side.
struct Grid2D {
  int n = 0;
  double extent = 0.0;
  double spacing() const { return 2.0 * extent / (n - 1); }
  double coord(int i) const { return -extent + i * spacing(); }
  int size() const { return n * n; }
  int idx(int i, int j) const { return j * n + i; }  ///< row-major, x fastest
};

/// Validates n >= 65 and extent >= R_TF for a working grid.
Grid2D make_grid2d(int n, double extent, const TfModel& model);

/// Real samples at grid nodes with an inside-disc mask for Dirichlet solves.
struct ScalarField2D {
  Grid2D grid;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;  ///< 1 where the node is an unknown
};

/// Bulk/annulus radii used by the Green-function layer.
struct DiscDomain {
  double r_inner = 0.0;  ///< R_TF - eps^(2/3) |log eps|^(2/3)
  double r_outer = 0.0;  ///< R_TF + eps^(2/3) |log eps|^(4/3)
};

/// Radii for the given smoothing parameter (default eps = 0.01).
DiscDomain disc_domain(const TfModel& model, double eps = 0.01);

/// Zero field with the inside-disc mask set for radius disc_radius.
ScalarField2D make_masked_field(const Grid2D& grid, double disc_radius);

/// Solves -div(rho^-1 grad h) = source with zero Dirichlet data on the
/// staircase disc of radius disc_radius: 5-point finite volumes with
/// face-averaged coefficients, Jacobi-preconditioned conjugate gradient to
/// relative residual tol. Throws ConvergenceError on stall and
/// ValidationError for sources supported outside the masked disc.
ScalarField2D solve_weighted_poisson(const ScalarField2D& source, const TfModel& model,
                                     double disc_radius, double tol = 1e-9);

/// One (x, y) evaluation pair for the Green-function check.
struct GreenPair {
  std::array<double, 2> x{};
  std::array<double, 2> y{};
};

/// Deterministic sample pairs sharing n_sources source columns, all inside
/// 0.85 disc_radius and separated by at least 4 base-grid spacings.
std::vector<GreenPair> make_green_sample_pairs(const TfModel& model, double disc_radius,
                                               int n_pairs, int n_sources,
                                               std::uint64_t seed, int n_base);

/// Outcome of the log-singularity measurement on base and refined grids.
struct GreenCheck {
  double deviation = 0.0;        ///< sup |G + rho(y)/(2 pi) log|x-y|| refined
  double deviation_base = 0.0;   ///< same on the base grid
  double rel_change = 0.0;       ///< |refined - base| / base
  double min_g = 0.0;            ///< positivity witness over sampled pairs
  double symmetry_gap = 0.0;     ///< max |G(x,y) - G(y,x)| over probe pairs
};

/// Measures the Green-function log-singularity deviation over sample pairs on
/// an n_base grid and its refinement (2 n_base - 1), sharing source solves.
GreenCheck green_singularity_check(const TfModel& model, double disc_radius,
                                   const std::vector<GreenPair>& sample_pairs,
                                   int n_base = 513, double tol = 1e-9);

/// Interaction-energy split for the smoothed lattice measure.
struct InteractionEnergy {
  double total = 0.0;            ///< int (1/(2 rho)) |grad h|^2 for the full source
  double per_vortex_cost = 0.0;  ///< sum of single-ball energies, no 1/2 factor
  double interaction = 0.0;      ///< cross-ball remainder, no 1/2 factor
};

/// Builds the trial measure on the grid, solves for its potential and each
/// single-ball potential, and splits the energy. Balls must span >= 6 cells.
InteractionEnergy trial_interaction_energy(const VortexLattice& lattice,
                                           const TfModel& model, const Grid2D& grid);

/// Assembled leading-order upper bound and its ratio to the target.
struct UpperBound {
  double estimate = 0.0;  ///< 2 pi L sum H(a_i) + L^2 (interaction of mu_star)
  double target = 0.0;    ///< I_TF L^2
  double ratio = 0.0;     ///< estimate / target
};

/// Leading-order energy bound for the lattice configuration; the measure
/// interaction enters through the radial fast path on the support disc.
UpperBound upper_bound_energy(const VortexLattice& lattice, const TfModel& model,
                              double omega0, const Grid2D& grid);

// ============================================================================
// Field exchange formats.
// ============================================================================

/// Binary block: header (n, extent as 8-byte floats) then row-major values.
void write_field_block(const std::string& path, const ScalarField2D& field);
ScalarField2D read_field_block(const std::string& path);

/// Flat CSV `x,y,value`, full double precision.
void write_field_csv(const std::string& path, const ScalarField2D& field);

}  // namespace vtx
