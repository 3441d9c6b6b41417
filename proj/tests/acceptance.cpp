/// @file acceptance.cpp
/// @brief Shipping gate: one pass/fail line per criterion, with the measured
///        numbers printed so regressions are diagnosable from the log alone.
///
/// Usage: acceptance [N ...]  (criterion numbers 1..10; none runs all).
/// Exit code: number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "vortexlab/field2d.hpp"
#include "vortexlab/gpflow.hpp"
#include "vortexlab/lattice.hpp"
#include "vortexlab/mustar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/tf.hpp"

using namespace vtx;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_criterion_checks_failed = 0;

// Always-on check: prints the failing condition and keeps going so one bad
// number does not hide the rest of the criterion's diagnostics.
#define REQUIRE(cond)                                                  \
  do {                                                                 \
    if (!(cond)) {                                                     \
      std::printf("       check failed (%s:%d): %s\n", __FILE__,       \
                  __LINE__, #cond);                                    \
      ++g_criterion_checks_failed;                                     \
    }                                                                  \
  } while (0)

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

TfModel model_2x() {
  TfModel probe = build_tf_model({2.0, 1.0});
  return build_tf_model({2.0, 2.0 * omega_c1(probe)});
}

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double* slope,
                double* r_squared) {
  double n = (double)x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  *slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  *r_squared = r * r;
}

// ============================================================================
// 1. Closed-form support radii at twice the critical speed.
// ============================================================================
void criterion_01() {
  TfModel m = model_2x();
  SupportRadii radii = support_radii(m, m.params.omega0);
  double r1_ratio = radii.r1 / m.r_tf;
  double r2_ratio = radii.r2 / m.r_tf;
  // Reference expression the r2 ratio is pinned to, at A = omega0 R_TF^2.
  double A = m.params.omega0 * m.r_tf * m.r_tf;
  double r2_reference = std::sqrt(1.0 - (1.0 / (4.0 * A)) * (std::sqrt(1.0 + 3.0 / (2.0 * A)) - 1.0));
  std::printf("       r1/R = %.12f (target sqrt(1/2) = %.12f)\n", r1_ratio, std::sqrt(0.5));
  std::printf("       r2/R = %.12f (pinned reference = %.12f)\n", r2_ratio, r2_reference);
  REQUIRE(std::abs(r1_ratio - std::sqrt(0.5)) <= 1e-10);
  // Honest measurement: r2 is the root of the pre-truncation density; the
  // pinned expression is not that root (nor any other computed quantity).
  REQUIRE(std::abs(r2_ratio - r2_reference) <= 1e-10);
}

// ============================================================================
// 2. Proximal-gradient recovery of the minimizing density at 2048 nodes.
// ============================================================================
void criterion_02() {
  TfModel m = model_2x();
  double w0 = m.params.omega0;
  SupportRadii radii = support_radii(m, w0);
  VortexDensity vd = mu_star(m, w0, 2048);

  MinimizeResult from_zero = minimize(m, w0, zero_measure(radii.r_star, 2048));
  RadialMeasure ref = mu_star_measure(m, w0, from_zero.minimizer.grid);
  double gap_zero = weighted_l1_gap(from_zero.minimizer, ref) / (2.0 * kPi);
  double rel_zero = std::abs(from_zero.report.total - vd.i_tf) / std::abs(vd.i_tf);

  RadialMeasure init = zero_measure(radii.r_star, 2048);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 1.0);
  double a1 = noise(rng), a2 = noise(rng), a3 = noise(rng);
  for (int i = 0; i < init.grid.n; ++i) {
    double r = init.grid.r[i];
    init.density[i] = 2.0 * (a1 * std::exp(-30 * (r - 0.2) * (r - 0.2)) +
                             a2 * std::exp(-50 * (r - 0.45) * (r - 0.45)) +
                             a3 * std::exp(-40 * (r - 0.65) * (r - 0.65)));
  }
  MinimizeResult from_rough = minimize(m, w0, init);
  double gap_rough = weighted_l1_gap(from_rough.minimizer, ref) / (2.0 * kPi);
  double rel_rough = std::abs(from_rough.report.total - vd.i_tf) / std::abs(vd.i_tf);

  std::printf("       zero start:  gap = %.4f%%  relE = %.3e  (%d iters)\n", 100 * gap_zero,
              rel_zero, from_zero.iterations);
  std::printf("       rough start: gap = %.4f%%  relE = %.3e  (%d iters)\n", 100 * gap_rough,
              rel_rough, from_rough.iterations);
  REQUIRE(from_zero.converged);
  REQUIRE(from_rough.converged);
  REQUIRE(gap_zero <= 0.02);
  REQUIRE(gap_rough <= 0.02);
  REQUIRE(rel_zero <= 1e-3);
  REQUIRE(rel_rough <= 1e-3);
}

// ============================================================================
// 3. Stability deficit under random radial perturbations.
// ============================================================================
void criterion_03() {
  TfModel m = model_2x();
  double w0 = m.params.omega0;
  SupportRadii radii = support_radii(m, w0);
  RadialGrid grid = make_radial_grid(radii.r_star, 16384);
  RadialMeasure base = mu_star_measure(m, w0, grid);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  double min_deficit = 1e18;
  for (int k = 0; k < 100; ++k) {
    RadialMeasure nu = base;
    double a1 = noise(rng), a2 = noise(rng);
    double c1 = 0.15 + 0.25 * std::abs(noise(rng)), c2 = 0.3 + 0.3 * std::abs(noise(rng));
    for (int i = 0; i < grid.n; ++i) {
      double r = grid.r[i];
      nu.density[i] += 0.5 * a1 * std::exp(-(r - c1) * (r - c1) / 0.002) +
                       0.5 * a2 * std::exp(-(r - c2) * (r - c2) / 0.004);
    }
    min_deficit = std::min(min_deficit, check_stability(nu, m, w0));
  }
  std::printf("       min deficit over 100 perturbations = %.3e\n", min_deficit);
  REQUIRE(min_deficit >= -1e-8);
}

// ============================================================================
// 4. Log-singularity of the weighted Green function under refinement.
// ============================================================================
void criterion_04() {
  TfModel m = model_2x();
  DiscDomain dd = disc_domain(m, 0.01);
  auto pairs = make_green_sample_pairs(m, dd.r_inner, 50, 8, 20260814, 513);
  GreenCheck gc = green_singularity_check(m, dd.r_inner, pairs, 513, 1e-9);
  std::printf("       sup deviation: base = %.6f refined = %.6f change = %.2f%%\n",
              gc.deviation_base, gc.deviation, 100 * gc.rel_change);
  std::printf("       min kernel value = %.5f  symmetry gap = %.2e\n", gc.min_g, gc.symmetry_gap);
  REQUIRE(std::isfinite(gc.deviation));
  REQUIRE(gc.deviation > 0.0);
  REQUIRE(gc.rel_change <= 0.20);
  REQUIRE(gc.min_g > 0.0);
}

// ============================================================================
// 5. Ring-sum Riemann consistency across five smoothing decades.
// ============================================================================
void criterion_05() {
  TfModel m = model_2x();
  double w0 = m.params.omega0;
  std::vector<double> xs, e_unit, e_cost;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    VortexLattice lat = build_lattice(m, w0, eps, 0, 3);
    RiemannCheck unit = riemann_check(lat, [](double) { return 1.0; });
    RiemannCheck cost = riemann_check(lat, [&](double r) { return h_tf(m, w0, r); });
    xs.push_back(std::log(std::abs(std::log(eps))));
    e_unit.push_back(std::log(unit.error));
    e_cost.push_back(std::log(cost.error));
  }
  double slope_unit, slope_cost, r2;
  linear_fit(xs, e_unit, &slope_unit, &r2);
  linear_fit(xs, e_cost, &slope_cost, &r2);
  std::printf("       log-log error slopes: unit test fn = %.3f, cost fn = %.3f\n", slope_unit,
              slope_cost);
  REQUIRE(slope_unit <= 0.6);
  REQUIRE(slope_cost <= 0.6);
}

// ============================================================================
// 6. Leading-order upper bound against the continuum target.
// ============================================================================
void criterion_06() {
  TfModel m = model_2x();
  double w0 = m.params.omega0;
  const double ladder[] = {0.05, 0.02, 0.01, 0.005};
  std::vector<double> ratios;
  Grid2D grid = make_grid2d(65, 1.2, m);
  std::printf("       ratio(eps):");
  for (double eps : ladder) {
    // Occupancy threshold 3: the default of 4 leaves eps = 0.05 with no
    // configuration at all, which degenerates the first rung.
    VortexLattice lat = build_lattice(m, w0, eps, 0, 3);
    UpperBound ub = upper_bound_energy(lat, m, w0, grid);
    ratios.push_back(ub.ratio);
    std::printf("  %.3g -> %.4f", eps, ub.ratio);
  }
  std::printf("\n");
  bool monotone = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) monotone = monotone && ratios[i] >= ratios[i - 1];
  REQUIRE(monotone);
  REQUIRE(std::abs(1.0 - ratios.back()) <= 0.20);
}

// ============================================================================
// 7. Radial profile estimates: bulk deviation scale and tail decay.
// ============================================================================
void criterion_07() {
  TfModel m = model_2x();
  for (double eps : {0.1, 0.05, 0.025}) {
    RadialProfileG p = solve_radial_profile(m, eps, 4096);
    double e23 = std::pow(eps, 2.0 / 3.0);
    double scale = e23 * std::pow(std::abs(std::log(eps)), 2.0 / 3.0);
    double sup = 0.0;
    for (double r = 0.0; r <= 0.9 * m.r_tf; r += 0.005) {
      double g = sample_profile(p, r);
      sup = std::max(sup, std::abs(g * g - rho_tf(m, r)));
    }
    std::vector<double> xs, ys;
    for (int i = 0; i < p.grid.n; ++i) {
      double r = p.grid.r[i], g = p.g[i];
      if (r >= m.r_tf + 1.5 * e23 && g > 1e-8) {
        xs.push_back(r);
        ys.push_back(std::log(g));
      }
    }
    double slope = 0.0, r2 = 0.0;
    linear_fit(xs, ys, &slope, &r2);
    std::printf("       eps=%.3g: sup dev / scale = %.4f, tail R^2 = %.5f, rate*eps^(2/3) = %.2f\n",
                eps, sup / scale, r2, slope * e23);
    REQUIRE(p.converged);
    REQUIRE(sup / scale <= 1.0);  // bounded by an order-one constant
    REQUIRE(r2 >= 0.98);
    REQUIRE(slope < 0.0);
  }
}

// ============================================================================
// 8. Vortex phase transition of the full 2D minimization.
// ============================================================================
void criterion_08() {
  TfModel m = model_2x();
  const double eps = 0.05;
  Grid2D grid = make_grid2d(257, m.r_tf + 6.0 * std::pow(eps, 2.0 / 3.0), m);
  RadialProfileG profile = solve_radial_profile(m, eps, 4096);

  GpSchedule sch;
  sch.n_starts = 1;  // subcritical basin is convex-like; one start suffices
  GpState slow = minimize_gp(m, 0.5 * omega_c1(m), eps, grid, sch);
  VorticityResult slow_v = extract_vorticity(slow, profile, m);
  EnergyReport slow_e = energy_decompose(slow, profile, m);
  std::printf("       0.5x critical: %zu vortices, reduced = %.2e\n", slow_v.vortices.size(),
              slow_e.reduced);
  REQUIRE(slow.converged);
  REQUIRE(slow_v.vortices.empty());
  REQUIRE(std::abs(slow_e.reduced) <= 1e-4);

  GpSchedule fast_sch;  // defaults: three seeded starts
  GpState fast = minimize_gp(m, m.params.omega0, eps, grid, fast_sch);
  VorticityResult fast_v = extract_vorticity(fast, profile, m);
  EnergyReport fast_e = energy_decompose(fast, profile, m);
  VortexDensity vd = mu_star(m, m.params.omega0, 2048);
  double predicted = std::abs(std::log(eps)) * vd.total_mass / (2.0 * kPi);
  SupportRadii radii = support_radii(m, m.params.omega0);
  double max_radius = 0.0;
  bool windings_ok = true;
  for (const Vortex& v : fast_v.vortices) {
    max_radius = std::max(max_radius, std::hypot(v.position[0], v.position[1]));
    windings_ok = windings_ok && v.winding == 1;
  }
  std::printf("       2x critical: %zu vortices (predicted %.2f +-30%%), max |a| = %.3f\n",
              fast_v.vortices.size(), predicted, max_radius);
  std::printf("       reduced = %.4f, identity gap = %.4f%%, coverage = %.3f\n", fast_e.reduced,
              100 * fast_e.identity_gap, fast_e.coverage);
  double count = (double)fast_v.vortices.size();
  REQUIRE(count >= 0.7 * predicted);
  REQUIRE(count <= 1.3 * predicted);
  REQUIRE(windings_ok);
  REQUIRE(max_radius <= radii.r1 + 0.1);
  REQUIRE(fast_e.reduced < 0.0);
  REQUIRE(fast_e.identity_gap <= 0.005);
}

// ============================================================================
// 9. Extracted vorticity approaches the prediction as smoothing shrinks.
// ============================================================================
void criterion_09() {
  TfModel m = model_2x();
  double w0 = m.params.omega0;
  VortexDensity vd = mu_star(m, w0, 2048);
  std::vector<double> gaps;
  for (double eps : {0.08, 0.05, 0.03}) {
    Grid2D grid = make_grid2d(257, m.r_tf + 6.0 * std::pow(eps, 2.0 / 3.0), m);
    RadialProfileG profile = solve_radial_profile(m, eps, 4096);
    GpSchedule sch;  // three seeded starts
    GpState st = minimize_gp(m, w0, eps, grid, sch);
    VorticityResult vr = extract_vorticity(st, profile, m);
    compare_to_mustar(vr, vd, m, w0, eps);
    gaps.push_back(vr.norm_gap);
    std::printf("       eps=%.3g: %zu vortices, norm gap = %.5f\n", eps, vr.vortices.size(),
                vr.norm_gap);
  }
  REQUIRE(gaps.size() == 3);
  REQUIRE(gaps[1] < gaps[0]);
  REQUIRE(gaps[2] < gaps[1]);
}

// ============================================================================
// 10. Invariant suite: conservation, gradients, operator structure.
// ============================================================================
void criterion_10() {
  TfModel m = model_2x();

  // Mass normalization after a full flow (projection applied every step).
  Grid2D grid = make_grid2d(129, m.r_tf + 6.0 * std::pow(0.08, 2.0 / 3.0), m);
  GpSchedule sch;
  sch.n_starts = 1;
  GpState st = minimize_gp(m, 0.5 * omega_c1(m), 0.08, grid, sch);
  double mass = 0.0;
  for (const auto& z : st.psi) mass += std::norm(z);
  mass *= st.grid.spacing() * st.grid.spacing();
  std::printf("       |mass - 1| = %.2e\n", std::abs(mass - 1.0));
  REQUIRE(std::abs(mass - 1.0) <= 1e-14);

  // Flow gradient against central finite differences at random nodes.
  GpState rnd;
  rnd.grid = make_grid2d(65, m.r_tf + 6.0 * std::pow(0.1, 2.0 / 3.0), m);
  rnd.eps = 0.1;
  rnd.omega0 = m.params.omega0;
  rnd.s = 2.0;
  rnd.psi.assign(rnd.grid.size(), {0.0, 0.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& z : rnd.psi) z = {u(rng), u(rng)};
  std::vector<std::complex<double>> grad = gp_energy_gradient(rnd, m);
  std::uniform_int_distribution<int> pick(1, rnd.grid.n - 2);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int k = rnd.grid.idx(pick(rng), pick(rng));
    double d = 1e-6;
    auto probe = [&](std::complex<double> delta) {
      GpState t = rnd;
      t.psi[k] += delta;
      return gp_energy(t, m);
    };
    double fd_re = (probe({d, 0}) - probe({-d, 0})) / (2.0 * d);
    double fd_im = (probe({0, d}) - probe({0, -d})) / (2.0 * d);
    double scale = std::max({std::abs(fd_re), std::abs(fd_im), 1.0});
    worst = std::max(worst, std::abs(grad[k].real() - fd_re) / scale);
    worst = std::max(worst, std::abs(grad[k].imag() - fd_im) / scale);
  }
  std::printf("       worst gradient mismatch = %.2e\n", worst);
  REQUIRE(worst <= 1e-6);

  // Discrete maximum principle and solve-operator symmetry.
  Grid2D pg = make_grid2d(129, 1.2, m);
  auto ball = [&](double cx, double cy) {
    ScalarField2D f = make_masked_field(pg, 0.9);
    double amp = 1.0 / (kPi * 0.1 * 0.1);
    for (int j = 0; j < pg.n; ++j)
      for (int i = 0; i < pg.n; ++i) {
        double dx = pg.coord(i) - cx, dy = pg.coord(j) - cy;
        if (dx * dx + dy * dy <= 0.01) f.values[pg.idx(i, j)] = amp;
      }
    return f;
  };
  ScalarField2D f = ball(0.25, 0.0), g = ball(-0.2, 0.3);
  ScalarField2D hf = solve_weighted_poisson(f, m, 0.9, 1e-11);
  ScalarField2D hg = solve_weighted_poisson(g, m, 0.9, 1e-11);
  double min_h = 1e18, fg = 0.0, gf = 0.0;
  for (std::size_t k = 0; k < hf.values.size(); ++k) {
    if (!hf.mask[k]) continue;
    min_h = std::min(min_h, hf.values[k]);
    fg += f.values[k] * hg.values[k];
    gf += g.values[k] * hf.values[k];
  }
  std::printf("       min solution = %.2e, adjointness gap = %.2e\n", min_h,
              std::abs(fg - gf) / std::abs(fg));
  REQUIRE(min_h >= -1e-10);
  REQUIRE(std::abs(fg - gf) <= 1e-7 * std::abs(fg));

  // Parallelogram identity of the interaction term.
  double w0 = m.params.omega0;
  SupportRadii radii = support_radii(m, w0);
  RadialGrid rg = make_radial_grid(radii.r_star, 2048);
  RadialMeasure a = mu_star_measure(m, w0, rg);
  RadialMeasure b = zero_measure(radii.r_star, 2048);
  for (int i = 0; i < rg.n; ++i) b.density[i] = std::exp(-20.0 * (rg.r[i] - 0.3) * (rg.r[i] - 0.3));
  RadialMeasure apb = a, amb = a;
  for (int i = 0; i < rg.n; ++i) {
    apb.density[i] += b.density[i];
    amb.density[i] -= b.density[i];
  }
  double lhs = energy(apb, m, w0).interaction + energy(amb, m, w0).interaction;
  double rhs = 2.0 * (energy(a, m, w0).interaction + energy(b, m, w0).interaction);
  std::printf("       bilinearity gap = %.2e\n", std::abs(lhs - rhs) / rhs);
  REQUIRE(std::abs(lhs - rhs) <= 1e-10 * rhs);
}

struct Criterion {
  int id;
  const char* name;
  void (*run)();
  double budget_s;
};

const Criterion kCriteria[] = {
    {1, "closed-form support radii", criterion_01, 1.0},
    {2, "minimizing density recovery", criterion_02, 30.0},
    {3, "stability deficit", criterion_03, 30.0},
    {4, "green function log singularity", criterion_04, 600.0},
    {5, "ring-sum riemann consistency", criterion_05, 5.0},
    {6, "upper bound ratio trend", criterion_06, 900.0},
    {7, "radial profile estimates", criterion_07, 60.0},
    {8, "vortex phase transition", criterion_08, 1200.0},
    {9, "vorticity convergence trend", criterion_09, 2700.0},
    {10, "invariant suite", criterion_10, 300.0},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failed = 0, ran = 0;
  for (const Criterion& c : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    ++ran;
    g_criterion_checks_failed = 0;
    std::printf("-- %02d %s\n", c.id, c.name);
    std::fflush(stdout);
    double t0 = now_s();
    c.run();
    double elapsed = now_s() - t0;
    if (elapsed > c.budget_s) {
      std::printf("       over budget: %.1f s > %.0f s\n", elapsed, c.budget_s);
      ++g_criterion_checks_failed;
    }
    bool ok = g_criterion_checks_failed == 0;
    failed += ok ? 0 : 1;
    std::printf("[%s] %02d %s (%.2f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, elapsed);
    std::fflush(stdout);
  }
  std::printf("== %d/%d criteria passed ==\n", ran - failed, ran);
  return failed;
}
