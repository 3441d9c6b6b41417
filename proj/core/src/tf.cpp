/// @file tf.cpp
/// @brief Thomas-Fermi closed forms and their quadrature cross-checks.

#include "vortexlab/tf.hpp"

#include <cmath>
#include <numbers>

#include "vortexlab/detail/numerics.hpp"
#include "vortexlab/errors.hpp"

namespace vtx {

namespace {

constexpr double kPi = std::numbers::pi;

/// r^s via exp(s log r); r = 0 maps to 0 (s >= 2 always here).
double pow_rs(double r, double s) {
  if (s == 0.0) return 1.0;
  if (r <= 0.0) return 0.0;
  return std::exp(s * std::log(r));
}

}  // namespace

TfModel build_tf_model(const TrapParams& params) {
  if (!(params.s >= 2.0)) throw ValidationError("build_tf_model: require s >= 2");
  if (!(params.omega0 > 0.0)) throw ValidationError("build_tf_model: require omega0 > 0");
  TfModel m;
  m.params = params;
  const double s = params.s;
  m.lambda_tf = std::pow(2.0 * (s + 2.0) / (kPi * s), s / (s + 2.0));
  m.r_tf = std::pow(m.lambda_tf, 1.0 / s);
  m.etf_coeff = kPi * s / (4.0 * (s + 1.0)) * std::pow(m.lambda_tf, 2.0 * (s + 1.0) / s);
  return m;
}

double rho_tf(const TfModel& model, double r) {
  const double v = model.lambda_tf - pow_rs(r, model.params.s);
  return v > 0.0 ? 0.5 * v : 0.0;
}

double drho_tf(const TfModel& model, double r) {
  if (r <= 0.0 || r >= model.r_tf) return 0.0;
  const double s = model.params.s;
  return -0.5 * s * pow_rs(r, s - 1.0);
}

double omega_c1(const TfModel& model) { return 0.5 * kPi * model.lambda_tf; }

double f_tf(const TfModel& model, double omega0, double r) {
  if (r >= model.r_tf) return 0.0;
  const double s = model.params.s;
  const double R = model.r_tf;
  const double rs = pow_rs(R, s);
  const double term = rs * (R * R - r * r) -
                      2.0 / (s + 2.0) * (pow_rs(R, s + 2.0) - pow_rs(r, s + 2.0));
  return -0.25 * omega0 * term;
}

double f_tf_quadrature(const TfModel& model, double omega0, double r) {
  if (r >= model.r_tf) return 0.0;
  return -omega0 * detail::gauss_integrate(
                       [&](double t) { return t * rho_tf(model, t); }, r, model.r_tf, 8);
}

double h_tf(const TfModel& model, double omega0, double r) {
  return 0.5 * rho_tf(model, r) + f_tf(model, omega0, r);
}

double dh_tf(const TfModel& model, double omega0, double r) {
  if (r <= 0.0 || r >= model.r_tf) return 0.0;
  const double s = model.params.s;
  return r * (-0.25 * s * pow_rs(r, s - 2.0) +
              0.5 * omega0 * (model.lambda_tf - pow_rs(r, s)));
}

CostProfile cost_profile(const TfModel& model, double omega0, int n_nodes) {
  if (n_nodes < 64) throw ValidationError("cost_profile: require n_nodes >= 64");
  if (!(omega0 > 0.0)) throw ValidationError("cost_profile: require omega0 > 0");
  CostProfile p;
  p.omega1 = omega_c1(model);
  p.grid.resize(n_nodes);
  p.f_tf.resize(n_nodes);
  p.h_tf.resize(n_nodes);
  const double dr = model.r_tf / (n_nodes - 1);
  for (int i = 0; i < n_nodes; ++i) {
    const double r = i * dr;
    p.grid[i] = r;
    p.f_tf[i] = f_tf(model, omega0, r);
    p.h_tf[i] = h_tf(model, omega0, r);
  }
  return p;
}

}  // namespace vtx
