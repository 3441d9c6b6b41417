/// @file field2d.cpp
/// @brief Masked finite-volume solver, Green checks, and energy assembly.

#include "vortexlab/field2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "vortexlab/detail/numerics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/radial.hpp"

namespace vtx {

namespace {

constexpr double kPi = std::numbers::pi;

/// Coefficient 1/rho with a defensive floor; faces adjacent to masked nodes
/// never probe radii where rho actually vanishes.
double coeff(const TfModel& model, double r) {
  return 1.0 / std::max(rho_tf(model, r), 1e-12);
}

std::vector<double> node_coeffs(const TfModel& model, const Grid2D& g) {
  std::vector<double> c(g.size());
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      c[g.idx(i, j)] = coeff(model, std::hypot(g.coord(i), g.coord(j)));
    }
  }
  return c;
}

/// Active-column range per row for the disc mask; {1, 0} marks an empty row.
std::vector<std::array<int, 2>> row_ranges(const ScalarField2D& f) {
  std::vector<std::array<int, 2>> ranges(f.grid.n, {1, 0});
  for (int j = 0; j < f.grid.n; ++j) {
    int lo = -1, hi = -2;
    for (int i = 0; i < f.grid.n; ++i) {
      if (f.mask[f.grid.idx(i, j)]) {
        if (lo < 0) lo = i;
        hi = i;
      }
    }
    ranges[j] = {lo < 0 ? 1 : lo, lo < 0 ? 0 : hi};
  }
  return ranges;
}

/// y <- A x on masked nodes: 5-point finite volumes, face coefficients are
/// arithmetic means of nodal 1/rho, Dirichlet zero outside the mask.
void apply_operator(const Grid2D& g, const std::vector<std::uint8_t>& mask,
                    const std::vector<double>& c,
                    const std::vector<std::array<int, 2>>& ranges,
                    const std::vector<double>& x, std::vector<double>& y) {
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::fill(y.begin(), y.end(), 0.0);
  for (int j = 0; j < g.n; ++j) {
    for (int i = ranges[j][0]; i <= ranges[j][1]; ++i) {
      const int p = g.idx(i, j);
      if (!mask[p]) continue;
      const double cp = c[p];
      double acc = 0.0;
      const int nb[4] = {p - 1, p + 1, p - g.n, p + g.n};
      for (int f = 0; f < 4; ++f) {
        const double cf = 0.5 * (cp + c[nb[f]]);
        const double xn = mask[nb[f]] ? x[nb[f]] : 0.0;
        acc += cf * (x[p] - xn);
      }
      y[p] = acc * inv_h2;
    }
  }
}

double masked_dot(const std::vector<double>& a, const std::vector<double>& b,
                  std::vector<double>& scratch) {
  for (std::size_t i = 0; i < a.size(); ++i) scratch[i] = a[i] * b[i];
  return detail::pairwise_sum(scratch);
}

/// Fraction of the cell centered at (x, y) covered by the disc |p - b| < rad,
/// by 4x4 subsampling. Smooths the staircase of ball indicators.
double coverage(double x, double y, double bx, double by, double rad, double h) {
  int inside = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double sx = x + ((a + 0.5) / 4.0 - 0.5) * h;
      const double sy = y + ((b + 0.5) / 4.0 - 0.5) * h;
      const double dx = sx - bx, dy = sy - by;
      if (dx * dx + dy * dy < rad * rad) ++inside;
    }
  }
  return inside / 16.0;
}

/// Bilinear sample of a node field.
double interp(const ScalarField2D& f, double x, double y) {
  const Grid2D& g = f.grid;
  const double h = g.spacing();
  const double fx = (x + g.extent) / h, fy = (y + g.extent) / h;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.n - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.n - 2);
  const double tx = fx - i, ty = fy - j;
  return (1 - tx) * (1 - ty) * f.values[g.idx(i, j)] +
         tx * (1 - ty) * f.values[g.idx(i + 1, j)] +
         (1 - tx) * ty * f.values[g.idx(i, j + 1)] +
         tx * ty * f.values[g.idx(i + 1, j + 1)];
}

/// Unit-mass smoothed delta at y: the trial-measure ball profile with
/// amplitude 1/(pi rad^2), coverage-sampled onto the grid.
ScalarField2D unit_ball_source(const Grid2D& g, double disc_radius,
                               std::array<double, 2> y, double rad) {
  ScalarField2D src = make_masked_field(g, disc_radius);
  const double amp = 1.0 / (kPi * rad * rad);
  const double h = g.spacing();
  const int i0 = std::max(0, static_cast<int>((y[0] - rad + g.extent) / h) - 1);
  const int i1 = std::min(g.n - 1, static_cast<int>((y[0] + rad + g.extent) / h) + 1);
  const int j0 = std::max(0, static_cast<int>((y[1] - rad + g.extent) / h) - 1);
  const int j1 = std::min(g.n - 1, static_cast<int>((y[1] + rad + g.extent) / h) + 1);
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const double cov = coverage(g.coord(i), g.coord(j), y[0], y[1], rad, h);
      if (cov > 0.0) src.values[g.idx(i, j)] = amp * cov;
    }
  }
  return src;
}

/// Discrete energy int f h dA = h^T A h of a converged solve.
double source_energy(const ScalarField2D& source, const ScalarField2D& h) {
  const double cell = h.grid.spacing() * h.grid.spacing();
  std::vector<double> terms(source.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = source.values[i] * h.values[i];
  }
  return cell * detail::pairwise_sum(terms);
}

ScalarField2D sample_trial_measure(const TrialMeasure& trial, const Grid2D& g,
                                   double disc_radius) {
  ScalarField2D src = make_masked_field(g, disc_radius);
  const double h = g.spacing();
  for (const auto& p : trial.lattice.points) {
    const double rad = trial.ball_radius;
    const int i0 = std::max(0, static_cast<int>((p[0] - rad + g.extent) / h) - 1);
    const int i1 = std::min(g.n - 1, static_cast<int>((p[0] + rad + g.extent) / h) + 1);
    const int j0 = std::max(0, static_cast<int>((p[1] - rad + g.extent) / h) - 1);
    const int j1 = std::min(g.n - 1, static_cast<int>((p[1] + rad + g.extent) / h) + 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const double cov = coverage(g.coord(i), g.coord(j), p[0], p[1], rad, h);
        if (cov > 0.0) src.values[g.idx(i, j)] += trial.amplitude * cov;
      }
    }
  }
  return src;
}

}  // namespace

Grid2D make_grid2d(int n, double extent, const TfModel& model) {
  if (n < 65) throw ValidationError("make_grid2d: require n >= 65");
  if (!(extent >= model.r_tf)) throw ValidationError("make_grid2d: require extent >= R_TF");
  Grid2D g;
  g.n = n;
  g.extent = extent;
  return g;
}

DiscDomain disc_domain(const TfModel& model, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("disc_domain: require 0 < eps < 1");
  const double L = -std::log(eps);
  const double scale = std::pow(eps, 2.0 / 3.0);
  DiscDomain d;
  d.r_inner = model.r_tf - scale * std::pow(L, 2.0 / 3.0);
  d.r_outer = model.r_tf + scale * std::pow(L, 4.0 / 3.0);
  if (!(d.r_inner > 0.0)) throw ValidationError("disc_domain: eps too large, empty bulk");
  return d;
}

ScalarField2D make_masked_field(const Grid2D& grid, double disc_radius) {
  ScalarField2D f;
  f.grid = grid;
  f.values.assign(grid.size(), 0.0);
  f.mask.assign(grid.size(), 0);
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      // Strictly interior staircase; the outermost node ring stays Dirichlet.
      if (std::hypot(grid.coord(i), grid.coord(j)) < disc_radius &&
          i > 0 && i < grid.n - 1 && j > 0 && j < grid.n - 1) {
        f.mask[grid.idx(i, j)] = 1;
      }
    }
  }
  return f;
}

ScalarField2D solve_weighted_poisson(const ScalarField2D& source, const TfModel& model,
                                     double disc_radius, double tol) {
  const Grid2D& g = source.grid;
  ScalarField2D h = make_masked_field(g, disc_radius);
  for (int p = 0; p < g.size(); ++p) {
    if (source.values[p] != 0.0 && !h.mask[p]) {
      throw ValidationError("solve_weighted_poisson: source outside the masked disc");
    }
  }

  const std::vector<double> c = node_coeffs(model, g);
  const auto ranges = row_ranges(h);
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());

  std::vector<double> diag(g.size(), 1.0);
  for (int j = 0; j < g.n; ++j) {
    for (int i = ranges[j][0]; i <= ranges[j][1]; ++i) {
      const int p = g.idx(i, j);
      if (!h.mask[p]) continue;
      const double cp = c[p];
      diag[p] = inv_h2 * (4.0 * cp + c[p - 1] + c[p + 1] + c[p - g.n] + c[p + g.n]) * 0.5;
    }
  }

  const int n2 = g.size();
  std::vector<double> r = source.values, z(n2, 0.0), p(n2, 0.0), ap(n2, 0.0),
      scratch(n2);
  for (int q = 0; q < n2; ++q) {
    if (!h.mask[q]) r[q] = 0.0;
  }
  const double f_norm = std::sqrt(masked_dot(r, r, scratch));
  if (f_norm == 0.0) return h;

  for (int q = 0; q < n2; ++q) z[q] = h.mask[q] ? r[q] / diag[q] : 0.0;
  p = z;
  double rz = masked_dot(r, z, scratch);

  const int max_iter = 60000;
  double rel = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    apply_operator(g, h.mask, c, ranges, p, ap);
    const double pap = masked_dot(p, ap, scratch);
    const double alpha = rz / pap;
    for (int q = 0; q < n2; ++q) {
      h.values[q] += alpha * p[q];
      r[q] -= alpha * ap[q];
    }
    rel = std::sqrt(masked_dot(r, r, scratch)) / f_norm;
    if (rel <= tol) return h;
    for (int q = 0; q < n2; ++q) z[q] = h.mask[q] ? r[q] / diag[q] : 0.0;
    const double rz_new = masked_dot(r, z, scratch);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int q = 0; q < n2; ++q) p[q] = z[q] + beta * p[q];
  }
  std::ostringstream msg;
  msg << "solve_weighted_poisson: no convergence, relative residual " << rel
      << " after " << max_iter << " iterations";
  throw ConvergenceError(msg.str());
}

std::vector<GreenPair> make_green_sample_pairs(const TfModel& model, double disc_radius,
                                               int n_pairs, int n_sources,
                                               std::uint64_t seed, int n_base) {
  if (n_sources < 1 || n_pairs < n_sources) {
    throw ValidationError("make_green_sample_pairs: bad pair/source counts");
  }
  const double h_base = 2.0 * model.r_tf / (n_base - 1);
  const double r_max = 0.85 * disc_radius;
  std::mt19937_64 rng(seed);
  auto draw_point = [&]() {
    // Uniform in the admissible disc by rejection on the bounding square.
    for (;;) {
      const double x = detail::uniform(rng, -r_max, r_max);
      const double y = detail::uniform(rng, -r_max, r_max);
      if (std::hypot(x, y) <= r_max) return std::array<double, 2>{x, y};
    }
  };
  std::vector<std::array<double, 2>> sources(n_sources);
  for (auto& s : sources) s = draw_point();

  std::vector<GreenPair> pairs;
  pairs.reserve(n_pairs);
  int k = 0;
  while (static_cast<int>(pairs.size()) < n_pairs) {
    const auto& y = sources[k % n_sources];
    const auto x = draw_point();
    if (std::hypot(x[0] - y[0], x[1] - y[1]) >= 4.0 * h_base) {
      pairs.push_back({x, y});
      ++k;
    }
  }
  return pairs;
}

GreenCheck green_singularity_check(const TfModel& model, double disc_radius,
                                   const std::vector<GreenPair>& sample_pairs,
                                   int n_base, double tol) {
  if (sample_pairs.empty()) throw ValidationError("green_singularity_check: no pairs");
  const double h_base = 2.0 * model.r_tf / (n_base - 1);
  const double ball = 4.0 * h_base;  // fixed across refinement

  auto sup_deviation = [&](int n_grid, double* min_g, double* sym_gap) {
    const Grid2D g = make_grid2d(n_grid, model.r_tf, model);
    if (ball < 3.0 * g.spacing()) {
      std::fprintf(stderr, "green_singularity_check: smoothing ball under-resolved\n");
    }
    double sup = 0.0, gmin = 1e300;
    // Solves are shared across pairs with the same source point.
    std::vector<std::array<double, 2>> done_y;
    std::vector<ScalarField2D> sols;
    auto solve_at = [&](const std::array<double, 2>& y) -> const ScalarField2D& {
      for (std::size_t i = 0; i < done_y.size(); ++i) {
        if (done_y[i] == y) return sols[i];
      }
      const ScalarField2D src = unit_ball_source(g, disc_radius, y, ball);
      sols.push_back(solve_weighted_poisson(src, model, disc_radius, tol));
      done_y.push_back(y);
      return sols.back();
    };
    for (const auto& pr : sample_pairs) {
      const ScalarField2D& sol = solve_at(pr.y);
      const double G = interp(sol, pr.x[0], pr.x[1]);
      const double d = std::hypot(pr.x[0] - pr.y[0], pr.x[1] - pr.y[1]);
      const double ry = std::hypot(pr.y[0], pr.y[1]);
      const double dev = std::abs(G + rho_tf(model, ry) / (2.0 * kPi) * std::log(d));
      sup = std::max(sup, dev);
      gmin = std::min(gmin, G);
    }
    if (min_g) *min_g = gmin;
    if (sym_gap) {
      double gap = 0.0;
      const std::size_t probes = std::min<std::size_t>(3, sample_pairs.size());
      for (std::size_t i = 0; i < probes; ++i) {
        const auto& pr = sample_pairs[i];
        const double gxy = interp(solve_at(pr.y), pr.x[0], pr.x[1]);
        const double gyx = interp(solve_at(pr.x), pr.y[0], pr.y[1]);
        gap = std::max(gap, std::abs(gxy - gyx));
      }
      *sym_gap = gap;
    }
    return sup;
  };

  GreenCheck out;
  out.deviation_base = sup_deviation(n_base, &out.min_g, &out.symmetry_gap);
  out.deviation = sup_deviation(2 * n_base - 1, nullptr, nullptr);
  out.rel_change = std::abs(out.deviation - out.deviation_base) /
                   std::max(out.deviation_base, 1e-300);
  return out;
}

InteractionEnergy trial_interaction_energy(const VortexLattice& lattice,
                                           const TfModel& model, const Grid2D& grid) {
  InteractionEnergy out;
  if (lattice.empty()) return out;
  if (2.0 * lattice.eps / grid.spacing() < 6.0) {
    throw ValidationError("trial_interaction_energy: balls span fewer than 6 cells");
  }
  const TrialMeasure trial = trial_measure(lattice);
  const double disc_radius = disc_domain(model, lattice.eps).r_inner;

  const ScalarField2D full_src = sample_trial_measure(trial, grid, disc_radius);
  const ScalarField2D full_h = solve_weighted_poisson(full_src, model, disc_radius);
  const double e_full = source_energy(full_src, full_h);  // no 1/2 factor

  double diag = 0.0;
  for (const auto& p : lattice.points) {
    VortexLattice single = lattice;
    single.points = {p};
    single.circles.clear();
    single.n_total = 1;
    const TrialMeasure tm = trial_measure(single);
    const ScalarField2D src = sample_trial_measure(tm, grid, disc_radius);
    const ScalarField2D h = solve_weighted_poisson(src, model, disc_radius);
    diag += source_energy(src, h);
  }
  out.per_vortex_cost = diag;
  out.interaction = e_full - diag;
  out.total = 0.5 * e_full;
  return out;
}

UpperBound upper_bound_energy(const VortexLattice& lattice, const TfModel& model,
                              double omega0, const Grid2D& grid) {
  (void)grid;  // the measure interaction uses the radial fast path
  UpperBound out;
  const double L = -std::log(lattice.eps);
  const VortexDensity density = mu_star(model, omega0, 4096);
  out.target = density.i_tf * L * L;
  if (lattice.empty()) {
    out.ratio = 0.0;
    return out;
  }
  std::vector<double> hvals(lattice.points.size());
  for (std::size_t i = 0; i < lattice.points.size(); ++i) {
    const auto& p = lattice.points[i];
    hvals[i] = h_tf(model, omega0, std::hypot(p[0], p[1]));
  }
  const double sum_h = detail::pairwise_sum(hvals);

  const RadialGrid rg = make_radial_grid(density.r_star, 4096);
  const RadialMeasure mu = mu_star_measure(model, omega0, rg);
  const RenormReport rep = energy(mu, model, omega0);

  out.estimate = 2.0 * kPi * L * sum_h + L * L * rep.interaction;
  out.ratio = out.estimate / out.target;
  return out;
}

// ============================================================================
// Field exchange formats.
// ============================================================================

void write_field_block(const std::string& path, const ScalarField2D& field) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw MissingInputError("write_field_block: cannot open " + path);
  const double header[2] = {static_cast<double>(field.grid.n), field.grid.extent};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  os.write(reinterpret_cast<const char*>(field.values.data()),
           static_cast<std::streamsize>(field.values.size() * sizeof(double)));
}

ScalarField2D read_field_block(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingInputError("read_field_block: cannot open " + path);
  double header[2];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!is) throw ValidationError("read_field_block: truncated header");
  ScalarField2D f;
  f.grid.n = static_cast<int>(header[0]);
  f.grid.extent = header[1];
  if (f.grid.n < 2 || f.grid.n > 1 << 16) {
    throw ValidationError("read_field_block: implausible grid size");
  }
  f.values.resize(static_cast<std::size_t>(f.grid.n) * f.grid.n);
  f.mask.assign(f.values.size(), 0);
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!is) throw ValidationError("read_field_block: truncated payload");
  return f;
}

void write_field_csv(const std::string& path, const ScalarField2D& field) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw MissingInputError("write_field_csv: cannot open " + path);
  os << "x,y,value\n";
  char line[128];
  for (int j = 0; j < field.grid.n; ++j) {
    for (int i = 0; i < field.grid.n; ++i) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", field.grid.coord(i),
                    field.grid.coord(j), field.values[field.grid.idx(i, j)]);
      os << line;
    }
  }
}

}  // namespace vtx
