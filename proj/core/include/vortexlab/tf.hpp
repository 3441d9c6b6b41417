/// @file tf.hpp
/// @brief Thomas-Fermi layer: trap parameters, TF profile, critical rotation
///        speed, and the vortex cost/gain functions F and H.

#pragma once

#include <vector>

namespace vtx {

/// Trap exponent and rotation coefficient (Omega = omega0 |log eps|).
struct TrapParams {
  double s = 2.0;       ///< trap potential r^s; s >= 2
  double omega0 = 0.0;  ///< rotation coefficient; > 0
};

/// Derived TF quantities. Immutable after build_tf_model.
struct TfModel {
  TrapParams params;
  double lambda_tf = 0.0;  ///< normalization parameter of the TF profile
  double r_tf = 0.0;       ///< TF support radius, lambda_tf^(1/s)
  double etf_coeff = 0.0;  ///< TF ground-state energy times eps^2
};

/// Radially sampled cost/gain profile on [0, R_TF].
struct CostProfile {
  std::vector<double> grid;  ///< uniform radii, both endpoints included
  std::vector<double> f_tf;  ///< rotational gain F(r) <= 0, F(R_TF) = 0
  std::vector<double> h_tf;  ///< vortex cost H(r) = rho/2 + F
  double omega1 = 0.0;       ///< first-critical-speed coefficient
};

/// Builds the derived TF model. Throws ValidationError for s < 2 or
/// omega0 <= 0.
TfModel build_tf_model(const TrapParams& params);

/// TF density (1/2)[lambda - r^s]_+; zero at and outside r_tf. Total function.
double rho_tf(const TfModel& model, double r);

/// d(rho_tf)/dr for r inside the support, 0 outside.
double drho_tf(const TfModel& model, double r);

/// First critical rotation coefficient Omega_1 = (pi/2) lambda_tf.
double omega_c1(const TfModel& model);

/// Closed-form rotational gain F(r) on [0, r_tf]; clamped to 0 beyond.
double f_tf(const TfModel& model, double omega0, double r);

/// Independent quadrature path for F: -omega0 * int_r^{R} t rho(t) dt.
double f_tf_quadrature(const TfModel& model, double omega0, double r);

/// Vortex cost H(r) = rho/2 + F.
double h_tf(const TfModel& model, double omega0, double r);

/// dH/dr = r [ -(s/4) r^(s-2) + (omega0/2)(lambda - r^s) ] inside the support.
double dh_tf(const TfModel& model, double omega0, double r);

/// Samples F and H on a uniform n_nodes grid over [0, r_tf]. n_nodes >= 64.
CostProfile cost_profile(const TfModel& model, double omega0, int n_nodes);

}  // namespace vtx
