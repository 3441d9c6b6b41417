/// @file mustar.hpp
/// @brief Predicted vortex density: the distributional divergence density
///        behind the minimizing measure, its support radii, and the limit
///        energy obtained by pairing it with the vortex cost H.

#pragma once

#include <vector>

#include "vortexlab/tf.hpp"

namespace vtx {

/// Roots of H and of the pre-truncation density, plus their minimum.
struct SupportRadii {
  double r1 = 0.0;      ///< unique zero of H in (0, R_TF)
  double r2 = 0.0;      ///< unique zero of the pre-truncation density
  double r_star = 0.0;  ///< min(r1, r2); support radius of the density
};

/// Radially sampled vortex density prediction on [0, R_TF].
struct VortexDensity {
  std::vector<double> grid;     ///< uniform radii on [0, R_TF]
  std::vector<double> m_star;   ///< pre-truncation density; -inf at the edge
  std::vector<double> mu_star;  ///< [m_star]_+ restricted to r <= r_star
  double r1 = 0.0;
  double r2 = 0.0;
  double r_star = 0.0;
  double total_mass = 0.0;  ///< 2 pi int_0^{r_star} m_star r dr
  double i_tf = 0.0;        ///< (1/2) 2 pi int_0^{r_star} H m_star r dr
};

/// Pre-truncation density via the assembled differential form
/// (1/2)[(log rho)'' + (log rho)'/r] + 2 omega0. Throws for r >= R_TF;
/// returns -inf inside the last 1e-10 relative sliver of the support.
double m_star_diff_form(const TfModel& model, double omega0, double r);

/// Same density via the simplified closed form
/// 2 omega0 - s^2 lambda r^(s-2) / (8 rho^2). Domain handling as above.
double m_star_rational_form(const TfModel& model, double omega0, double r);

/// Pre-truncation density; evaluates both forms and returns the rational one.
/// The two agree to ~1e-12 relative (mutual coding-slip oracle).
double m_star_of_r(const TfModel& model, double omega0, double r);

/// Brent roots of H and of the density; tolerance 1e-12 on radius, brackets
/// (1e-8 R_TF, R_TF(1 - 1e-10)). Throws ValidationError("no nucleation")
/// when omega0 <= omega_c1 (H >= 0, empty support).
SupportRadii support_radii(const TfModel& model, double omega0);

/// Truncated density value [m_star(r)]_+ 1_{r <= r_star}; total function of r.
double mu_star_density(const TfModel& model, double omega0, const SupportRadii& radii,
                       double r);

/// Samples the density on n_nodes uniform radii over [0, R_TF] and integrates
/// mass and limit energy over [0, r_star]. n_nodes >= 256. For
/// omega0 <= omega_c1 returns the zero density with zero mass and energy.
VortexDensity mu_star(const TfModel& model, double omega0, int n_nodes);

}  // namespace vtx
