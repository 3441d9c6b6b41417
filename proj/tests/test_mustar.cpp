/// @file test_mustar.cpp
/// @brief Predicted vortex density: the two expression trees, support radii,
///        and quadrature anchors.

#include <cmath>

#include "doctest.h"
#include "vortexlab/errors.hpp"
#include "vortexlab/mustar.hpp"
#include "vortexlab/tf.hpp"

using namespace vtx;

namespace {

constexpr double kPi = 3.14159265358979323846;

TfModel model_at(double s, double crit_multiple) {
  TfModel probe = build_tf_model({s, 1.0});
  return build_tf_model({s, crit_multiple * omega_c1(probe)});
}

}  // namespace

TEST_SUITE("mustar") {

TEST_CASE("density value at the origin") {
  TfModel m = model_at(2.0, 2.0);
  double w0 = m.params.omega0;
  // 2 omega0 - 2/lambda for the harmonic trap.
  double expect = 2.0 * w0 - 2.0 / m.lambda_tf;
  CHECK(std::abs(expect - 5.317361552716547) <= 1e-12);
  CHECK(std::abs(m_star_diff_form(m, w0, 0.0) - expect) <= 1e-12);
  CHECK(std::abs(m_star_rational_form(m, w0, 0.0) - expect) <= 1e-12);
  CHECK(std::abs(m_star_of_r(m, w0, 0.0) - expect) <= 1e-12);
}

TEST_CASE("both expression trees agree on the support") {
  for (double s : {2.0, 4.0}) {
    TfModel m = model_at(s, 2.0);
    double w0 = m.params.omega0;
    SupportRadii radii = support_radii(m, w0);
    double sup = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double r = radii.r_star * i / 200.0;
      sup = std::max(sup, std::abs(m_star_diff_form(m, w0, r) - m_star_rational_form(m, w0, r)));
    }
    CHECK(sup <= 1e-10);
  }
}

TEST_CASE("harmonic support radii collapse to the same root") {
  TfModel m = model_at(2.0, 2.0);
  SupportRadii radii = support_radii(m, m.params.omega0);
  double expect = m.r_tf / std::sqrt(2.0);
  CHECK(std::abs(radii.r1 - expect) <= 1e-10);
  CHECK(std::abs(radii.r2 - expect) <= 1e-10);
  CHECK(std::abs(radii.r_star - std::min(radii.r1, radii.r2)) == 0.0);
  CHECK(std::abs(radii.r_star - 0.7511255444649424) <= 1e-10);
}

TEST_CASE("quartic trap orders the radii") {
  TfModel m = model_at(4.0, 2.0);
  SupportRadii radii = support_radii(m, m.params.omega0);
  CHECK(radii.r1 > 0.0);
  CHECK(radii.r1 < radii.r2);
  CHECK(radii.r2 < m.r_tf);
  CHECK(radii.r_star == radii.r1);
  CHECK(std::abs(radii.r1 - 0.638666378892) <= 1e-9);
  CHECK(std::abs(radii.r2 - 0.675200363156) <= 1e-9);
}

TEST_CASE("sampled density and quadrature anchors") {
  TfModel m = model_at(2.0, 2.0);
  double w0 = m.params.omega0;
  VortexDensity vd = mu_star(m, w0, 2048);
  REQUIRE(vd.grid.size() == 2048);
  CHECK(std::abs(vd.total_mass - 2.0 * kPi) <= 1e-5);
  CHECK(std::abs(vd.i_tf - (-0.46658120713842843)) <= 1e-6);
  // The truncated density is nonnegative and supported inside r_star.
  for (std::size_t i = 0; i < vd.grid.size(); ++i) {
    CHECK(vd.mu_star[i] >= 0.0);
    if (vd.grid[i] > vd.r_star) CHECK(vd.mu_star[i] == 0.0);
  }
}

TEST_CASE("pointwise density splits at the support edge") {
  TfModel m = model_at(2.0, 2.0);
  double w0 = m.params.omega0;
  SupportRadii radii = support_radii(m, w0);
  double inside = mu_star_density(m, w0, radii, 0.5 * radii.r_star);
  double outside = mu_star_density(m, w0, radii, 1.01 * radii.r_star);
  CHECK(inside > 0.0);
  CHECK(outside == 0.0);
  CHECK(std::abs(inside - m_star_of_r(m, w0, 0.5 * radii.r_star)) <= 1e-12);
}

TEST_CASE("refinement tightens the mass quadrature") {
  TfModel m = model_at(2.0, 2.0);
  double w0 = m.params.omega0;
  double coarse = std::abs(mu_star(m, w0, 512).total_mass - 2.0 * kPi);
  double fine = std::abs(mu_star(m, w0, 8192).total_mass - 2.0 * kPi);
  CHECK(fine < coarse);
}

TEST_CASE("parameter validation") {
  TfModel m = model_at(2.0, 2.0);
  CHECK_THROWS_AS(mu_star(m, m.params.omega0, 128), ValidationError);
  // Below the critical speed no vortices nucleate: the density degrades to an
  // empty prediction rather than throwing, but the radii solver is a hard error.
  VortexDensity quiet = mu_star(m, 0.5 * omega_c1(m), 2048);
  CHECK(quiet.total_mass == 0.0);
  CHECK(quiet.r_star == 0.0);
  for (double v : quiet.mu_star) CHECK(v == 0.0);
  CHECK_THROWS_AS(support_radii(m, 0.5 * omega_c1(m)), ValidationError);
  CHECK_THROWS_AS(m_star_of_r(m, m.params.omega0, m.r_tf), ValidationError);
}

}  // TEST_SUITE
