/// @file gpflow.cpp
/// @brief Radial profile solve, 2D rotating flow, vorticity extraction, and
///        the weighted-norm comparison.

#include "vortexlab/gpflow.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "vortexlab/detail/numerics.hpp"
#include "vortexlab/errors.hpp"

namespace vtx {

namespace {

constexpr double kPi = std::numbers::pi;
using cvec = std::vector<std::complex<double>>;

double pow_rs(double r, double s) {
  if (s == 0.0) return 1.0;
  if (r <= 0.0) return 0.0;
  return std::exp(s * std::log(r));
}

// ============================================================================
// Radial vortex-free profile.
// ============================================================================

/// Discrete L2 mass 2 pi int g^2 r dr on the profile grid.
double profile_mass(const RadialGrid& grid, const std::vector<double>& g) {
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) terms[i] = grid.w[i] * grid.r[i] * g[i] * g[i];
  return 2.0 * kPi * detail::neumaier_sum(terms);
}

struct ProfileEnergy {
  double kinetic = 0.0;      ///< int |g'|^2 dA
  double trap = 0.0;         ///< int r^s g^2 dA
  double quartic = 0.0;      ///< int g^4 dA
  double total = 0.0;        ///< kinetic/2 + eps^-2 (trap + quartic)
  double lambda_hat = 0.0;   ///< eps^2 kinetic/2 + trap + 2 quartic
};

ProfileEnergy profile_energy(const RadialGrid& grid, const std::vector<double>& g,
                             double eps, double s) {
  const int n = grid.n;
  std::vector<double> kin(n), trap(n), quart(n);
  for (int i = 0; i < n; ++i) {
    double dg;
    if (i == 0) {
      dg = 0.0;  // radial symmetry
    } else if (i == n - 1) {
      dg = (g[i] - g[i - 1]) / grid.dr;
    } else {
      dg = (g[i + 1] - g[i - 1]) / (2.0 * grid.dr);
    }
    const double wr = grid.w[i] * grid.r[i];
    kin[i] = wr * dg * dg;
    trap[i] = wr * pow_rs(grid.r[i], s) * g[i] * g[i];
    quart[i] = wr * g[i] * g[i] * g[i] * g[i];
  }
  ProfileEnergy e;
  e.kinetic = 2.0 * kPi * detail::neumaier_sum(kin);
  e.trap = 2.0 * kPi * detail::neumaier_sum(trap);
  e.quartic = 2.0 * kPi * detail::neumaier_sum(quart);
  e.total = 0.5 * e.kinetic + (e.trap + e.quartic) / (eps * eps);
  e.lambda_hat = 0.5 * eps * eps * e.kinetic + e.trap + 2.0 * e.quartic;
  return e;
}

/// Tridiagonal solve (Thomas); diagonally dominant by construction.
void thomas_solve(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                  std::vector<double>& rhs) {
  const int n = static_cast<int>(b.size());
  for (int i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= b[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

}  // namespace

RadialProfileG solve_radial_profile(const TfModel& model, double eps, int n_nodes,
                                    double tol) {
  if (!(eps > 0.0 && eps <= 0.2)) {
    throw ValidationError("solve_radial_profile: require 0 < eps <= 0.2");
  }
  if (n_nodes < 1024) throw ValidationError("solve_radial_profile: require n_nodes >= 1024");
  const double s = model.params.s;
  const double r_max = model.r_tf + std::max(0.5, 6.0 * std::pow(eps, 2.0 / 3.0));
  RadialProfileG out;
  out.grid = make_radial_grid(r_max, n_nodes);
  out.eps = eps;
  const RadialGrid& grid = out.grid;
  const int n = grid.n;
  const double inv_e2 = 1.0 / (eps * eps);

  std::vector<double>& g = out.g;
  g.assign(n, 0.0);
  for (int i = 0; i < n - 1; ++i) {
    g[i] = std::sqrt(rho_tf(model, grid.r[i]) + 1e-3 * model.lambda_tf);
  }
  double mass = profile_mass(grid, g);
  for (auto& v : g) v /= std::sqrt(mass);

  const double dt = 5e-3;
  const double inv_dr2 = 1.0 / (grid.dr * grid.dr);
  std::vector<double> a(n), b(n), c(n), rhs(n);
  double e_prev = profile_energy(grid, g, eps, s).total;
  int stall = 0;
  const int max_steps = 200000;
  for (int step = 1; step <= max_steps; ++step) {
    // row 0: symmetry stencil; row n-1: Dirichlet.
    a[0] = 0.0;
    b[0] = 2.0 * inv_dr2 + inv_e2 * 2.0 * g[0] * g[0] + 1.0 / dt;
    c[0] = -2.0 * inv_dr2;
    rhs[0] = g[0] / dt;
    for (int i = 1; i < n - 1; ++i) {
      const double r = grid.r[i];
      a[i] = -0.5 * inv_dr2 + 0.25 / (r * grid.dr);
      c[i] = -0.5 * inv_dr2 - 0.25 / (r * grid.dr);
      b[i] = inv_dr2 + inv_e2 * (pow_rs(r, s) + 2.0 * g[i] * g[i]) + 1.0 / dt;
      rhs[i] = g[i] / dt;
    }
    a[n - 1] = 0.0;
    b[n - 1] = 1.0;
    c[n - 1] = 0.0;
    rhs[n - 1] = 0.0;
    thomas_solve(a, b, c, rhs);
    g = rhs;
    mass = profile_mass(grid, g);
    for (auto& v : g) v /= std::sqrt(mass);

    const double e_cur = profile_energy(grid, g, eps, s).total;
    out.iterations = step;
    if (std::abs(e_prev - e_cur) <= tol * std::max(std::abs(e_cur), 1.0)) {
      if (++stall >= 5) {
        out.converged = true;
        break;
      }
    } else {
      stall = 0;
    }
    e_prev = e_cur;
  }
  if (!out.converged) {
    std::fprintf(stderr, "solve_radial_profile: energy did not stall within %d steps\n",
                 max_steps);
  }

  const ProfileEnergy e = profile_energy(grid, g, eps, s);
  out.e_hat = e.total;
  out.lambda_hat = e.lambda_hat;

  // Defect of the discrete profile equation, in chemical-potential units.
  double res_sup = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double r = grid.r[i];
    const double lap = (g[i + 1] - 2.0 * g[i] + g[i - 1]) * inv_dr2 +
                       (g[i + 1] - g[i - 1]) / (2.0 * r * grid.dr);
    const double res = -0.5 * lap + inv_e2 * (pow_rs(r, s) + 2.0 * g[i] * g[i]) * g[i] -
                       inv_e2 * e.lambda_hat * g[i];
    res_sup = std::max(res_sup, std::abs(res) * eps * eps);
  }
  out.el_residual = res_sup;
  return out;
}

double sample_profile(const RadialProfileG& profile, double r) {
  const RadialGrid& grid = profile.grid;
  if (r <= 0.0) return profile.g.front();
  if (r >= grid.r_dom) return 0.0;
  const double t = r / grid.dr;
  const int i = std::min(static_cast<int>(t), grid.n - 2);
  const double frac = t - i;
  return (1.0 - frac) * profile.g[i] + frac * profile.g[i + 1];
}

// ============================================================================
// 2D flow machinery.
// ============================================================================

namespace {

/// Applies (I + (dt/2)(-Laplacian))^-1 on the grid interior via DST-I,
/// homogeneous Dirichlet on the outer node ring.
class DirichletInverter {
 public:
  DirichletInverter(int n, double extent) : n_(n), m_(n - 2) {
    h_ = 2.0 * extent / (n - 1);
    buf_ = static_cast<double*>(fftw_malloc(sizeof(double) * m_ * m_));
    std::fill(buf_, buf_ + m_ * m_, 0.0);
    plan_ = fftw_plan_r2r_2d(m_, m_, buf_, buf_, FFTW_RODFT00, FFTW_RODFT00,
                             FFTW_MEASURE);
    eig_.resize(m_);
    for (int p = 0; p < m_; ++p) {
      eig_[p] = (2.0 - 2.0 * std::cos(kPi * (p + 1) / (m_ + 1))) / (h_ * h_);
    }
    factor_.resize(static_cast<std::size_t>(m_) * m_);
    dt_ = -1.0;
  }
  DirichletInverter(const DirichletInverter&) = delete;
  DirichletInverter& operator=(const DirichletInverter&) = delete;
  ~DirichletInverter() {
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }

  void set_dt(double dt) {
    if (dt == dt_) return;
    dt_ = dt;
    const double scale = 1.0 / (4.0 * (m_ + 1.0) * (m_ + 1.0));
    for (int q = 0; q < m_; ++q) {
      for (int p = 0; p < m_; ++p) {
        factor_[static_cast<std::size_t>(q) * m_ + p] =
            scale / (1.0 + 0.5 * dt * (eig_[p] + eig_[q]));
      }
    }
  }

  /// In-place solve; boundary ring is reset to zero.
  void apply(cvec& psi) {
    for (int comp = 0; comp < 2; ++comp) {
      for (int q = 0; q < m_; ++q) {
        for (int p = 0; p < m_; ++p) {
          const std::complex<double>& z = psi[(q + 1) * n_ + (p + 1)];
          buf_[q * m_ + p] = comp == 0 ? z.real() : z.imag();
        }
      }
      fftw_execute(plan_);
      for (std::size_t k = 0; k < factor_.size(); ++k) buf_[k] *= factor_[k];
      fftw_execute(plan_);
      for (int q = 0; q < m_; ++q) {
        for (int p = 0; p < m_; ++p) {
          std::complex<double>& z = psi[(q + 1) * n_ + (p + 1)];
          if (comp == 0) {
            z = {buf_[q * m_ + p], z.imag()};
          } else {
            z = {z.real(), buf_[q * m_ + p]};
          }
        }
      }
    }
    for (int i = 0; i < n_; ++i) {
      psi[i] = 0.0;
      psi[static_cast<std::size_t>(n_) * (n_ - 1) + i] = 0.0;
      psi[static_cast<std::size_t>(i) * n_] = 0.0;
      psi[static_cast<std::size_t>(i) * n_ + n_ - 1] = 0.0;
    }
  }

 private:
  int n_, m_;
  double h_, dt_;
  double* buf_;
  fftw_plan plan_;
  std::vector<double> eig_;
  std::vector<double> factor_;
};

/// Precomputed per-node data shared by energy, gradient, and the flow.
struct FlowContext {
  Grid2D grid;
  double eps = 0.0;
  double omega = 0.0;  ///< full rotation speed Omega
  double inv_e2 = 0.0;
  std::vector<double> pot;  ///< eps^-2 r^s per node
  std::vector<double> xs;   ///< coordinate per index
};

FlowContext make_context(const Grid2D& grid, const TfModel& model, double eps,
                         double omega) {
  FlowContext ctx;
  ctx.grid = grid;
  ctx.eps = eps;
  ctx.omega = omega;
  ctx.inv_e2 = 1.0 / (eps * eps);
  ctx.xs.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) ctx.xs[i] = grid.coord(i);
  ctx.pot.resize(grid.size());
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      ctx.pot[grid.idx(i, j)] =
          ctx.inv_e2 * pow_rs(std::hypot(ctx.xs[i], ctx.xs[j]), model.params.s);
    }
  }
  return ctx;
}

/// Discrete energy: edge-difference kinetic term (ghosts zero), centered
/// rotation term, pointwise potential and interaction.
double flow_energy(const FlowContext& ctx, const cvec& psi, std::vector<double>& terms) {
  const int n = ctx.grid.n;
  const double h = ctx.grid.spacing();
  const double h2 = h * h;
  terms.resize(psi.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = ctx.grid.idx(i, j);
      const std::complex<double> z = psi[p];
      const std::complex<double> zl = i > 0 ? psi[p - 1] : 0.0;
      const std::complex<double> zr = i < n - 1 ? psi[p + 1] : 0.0;
      const std::complex<double> zd = j > 0 ? psi[p - n] : 0.0;
      const std::complex<double> zu = j < n - 1 ? psi[p + n] : 0.0;
      double kin = std::norm(z - zl) + std::norm(z - zd);
      if (i == n - 1) kin += std::norm(z);
      if (j == n - 1) kin += std::norm(z);
      kin *= 0.5;
      const std::complex<double> dx = (zr - zl) / (2.0 * h);
      const std::complex<double> dy = (zu - zd) / (2.0 * h);
      const double rot = -ctx.omega * h2 *
                         (ctx.xs[i] * std::imag(std::conj(z) * dy) -
                          ctx.xs[j] * std::imag(std::conj(z) * dx));
      const double n2 = std::norm(z);
      const double pot = h2 * (ctx.pot[p] * n2 + ctx.inv_e2 * n2 * n2);
      terms[p] = kin + rot + pot;
    }
  }
  return detail::pairwise_sum(terms);
}

double quartic_integral(const FlowContext& ctx, const cvec& psi,
                        std::vector<double>& terms) {
  const double h2 = ctx.grid.spacing() * ctx.grid.spacing();
  terms.resize(psi.size());
  for (std::size_t p = 0; p < psi.size(); ++p) {
    const double n2 = std::norm(psi[p]);
    terms[p] = h2 * n2 * n2;
  }
  return detail::pairwise_sum(terms);
}

/// Renormalizes to unit discrete L2 mass; returns the pre-projection mass.
double project_unit_mass(const FlowContext& ctx, cvec& psi, std::vector<double>& terms) {
  const double h2 = ctx.grid.spacing() * ctx.grid.spacing();
  terms.resize(psi.size());
  for (std::size_t p = 0; p < psi.size(); ++p) terms[p] = h2 * std::norm(psi[p]);
  const double mass = detail::neumaier_sum(terms);
  const double inv = 1.0 / std::sqrt(mass);
  for (auto& z : psi) z *= inv;
  return mass;
}

/// One split step: exact pointwise decay of potential + interaction, explicit
/// centered rotation, spectral implicit diffusion. No projection here.
void flow_step(const FlowContext& ctx, DirichletInverter& inv, double dt, const cvec& in,
               cvec& work, cvec& out) {
  const int n = ctx.grid.n;
  const double h = ctx.grid.spacing();
  work.resize(in.size());
  out.resize(in.size());
  for (std::size_t p = 0; p < in.size(); ++p) {
    const double decay = std::exp(-dt * (ctx.pot[p] + 2.0 * ctx.inv_e2 * std::norm(in[p])));
    work[p] = in[p] * decay;
  }
  if (ctx.omega != 0.0) {
    const std::complex<double> irot(0.0, -ctx.omega * dt / (2.0 * h));
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int p = ctx.grid.idx(i, j);
        const std::complex<double> zl = i > 0 ? work[p - 1] : 0.0;
        const std::complex<double> zr = i < n - 1 ? work[p + 1] : 0.0;
        const std::complex<double> zd = j > 0 ? work[p - n] : 0.0;
        const std::complex<double> zu = j < n - 1 ? work[p + n] : 0.0;
        // r_perp . grad = -y d_x + x d_y
        out[p] = work[p] + irot * (ctx.xs[i] * (zu - zd) - ctx.xs[j] * (zr - zl));
      }
    }
  } else {
    out = work;
  }
  inv.set_dt(dt);
  inv.apply(out);
}

struct FlowOutcome {
  double energy = 0.0;
  int steps = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> trace;
};

/// Runs the guarded flow in place. Steps that raise the energy beyond the
/// acceptance slack are rejected with a halved dt; dt regrows slowly after
/// sustained acceptance up to dt_cap.
FlowOutcome run_flow(const FlowContext& ctx, DirichletInverter& inv, cvec& psi,
                     const GpSchedule& sched, int max_steps, double dt_cap) {
  FlowOutcome out;
  std::vector<double> terms;
  cvec work, trial;
  double dt = std::min(sched.dt0, dt_cap);
  double energy = flow_energy(ctx, psi, terms);
  out.trace.emplace_back(0, energy);
  // Stall detection compares the best energy against a window checkpoint; the
  // per-step change near the minimum is roundoff jitter and cannot be used.
  double best = energy, ckpt_best = energy;
  int accepted = 0, streak = 0;
  for (int step = 1; step <= max_steps; ++step) {
    flow_step(ctx, inv, dt, psi, work, trial);
    project_unit_mass(ctx, trial, terms);
    const double e_new = flow_energy(ctx, trial, terms);
    const double slack = 1e-9 * (1.0 + std::abs(energy));
    if (!std::isfinite(e_new) || e_new > energy + slack) {
      dt *= 0.5;
      streak = 0;
      if (dt < 1e-8) break;  // step collapsed; report non-convergence
      continue;
    }
    psi.swap(trial);
    out.steps = step;
    out.trace.emplace_back(step, e_new);
    if (std::getenv("VORTEXLAB_FLOW_DEBUG") && step % 500 == 0) {
      std::fprintf(stderr, "dbg step=%d dt=%.3g dE=%.3g best=%.12g\n", step, dt,
                   e_new - energy, best);
    }
    energy = e_new;
    best = std::min(best, energy);
    if (++accepted % sched.stall_window == 0) {
      if (ckpt_best - best < sched.tol * std::max(1.0, std::abs(best))) {
        out.converged = true;
        break;
      }
      ckpt_best = best;
    }
    if (++streak >= 100 && dt < dt_cap) {
      dt = std::min(dt * 1.5, dt_cap);
      streak = 0;
    }
  }
  out.energy = energy;
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, int start) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (start + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Initial state: radial profile times the lattice phase factor, optionally
/// with jittered vortex positions and small amplitude noise (start > 0).
cvec initial_state(const FlowContext& ctx, const RadialProfileG& profile,
                   const VortexLattice& lattice, std::uint64_t seed, int start) {
  const int n = ctx.grid.n;
  std::mt19937_64 rng(mix_seed(seed, start));
  std::normal_distribution<double> jitter(0.0, 0.3 * ctx.eps);
  std::vector<std::array<double, 2>> points = lattice.points;
  if (start > 0) {
    for (auto& p : points) {
      p[0] += jitter(rng);
      p[1] += jitter(rng);
    }
  }
  cvec psi(ctx.grid.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = ctx.xs[i], y = ctx.xs[j];
      std::complex<double> phase(1.0, 0.0);
      for (const auto& a : points) {
        const std::complex<double> dz(x - a[0], y - a[1]);
        const double mag = std::abs(dz);
        phase *= mag < 1e-14 ? 0.0 : dz / mag;
      }
      double amp = sample_profile(profile, std::hypot(x, y));
      if (start > 0) amp *= 1.0 + 0.02 * detail::uniform(rng, -1.0, 1.0);
      psi[ctx.grid.idx(i, j)] = amp * phase;
    }
  }
  return psi;
}

double g_threshold(const TfModel& model, double eps) {
  return std::max(eps, 0.02 * model.lambda_tf);
}

}  // namespace

double gp_energy(const GpState& state, const TfModel& model) {
  const FlowContext ctx =
      make_context(state.grid, model, state.eps, state.omega0 * -std::log(state.eps));
  std::vector<double> terms;
  return flow_energy(ctx, state.psi, terms);
}

std::vector<std::complex<double>> gp_energy_gradient(const GpState& state,
                                                     const TfModel& model) {
  const FlowContext ctx =
      make_context(state.grid, model, state.eps, state.omega0 * -std::log(state.eps));
  const int n = state.grid.n;
  const double h = state.grid.spacing();
  const double h2 = h * h;
  const cvec& psi = state.psi;
  cvec grad(psi.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = state.grid.idx(i, j);
      const std::complex<double> z = psi[p];
      const std::complex<double> zl = i > 0 ? psi[p - 1] : 0.0;
      const std::complex<double> zr = i < n - 1 ? psi[p + 1] : 0.0;
      const std::complex<double> zd = j > 0 ? psi[p - n] : 0.0;
      const std::complex<double> zu = j < n - 1 ? psi[p + n] : 0.0;
      const std::complex<double> kin = 4.0 * z - zl - zr - zd - zu;
      const std::complex<double> dx = (zr - zl) / (2.0 * h);
      const std::complex<double> dy = (zu - zd) / (2.0 * h);
      const std::complex<double> rot =
          std::complex<double>(0.0, 2.0 * ctx.omega * h2) *
          (ctx.xs[i] * dy - ctx.xs[j] * dx);
      const std::complex<double> pot =
          2.0 * h2 * (ctx.pot[p] + 2.0 * ctx.inv_e2 * std::norm(z)) * z;
      grad[p] = kin + rot + pot;
    }
  }
  return grad;
}

GpState minimize_gp(const TfModel& model, double omega0, double eps, const Grid2D& grid,
                    const GpSchedule& schedule) {
  if (!(eps > 0.0 && eps < 0.5)) throw ValidationError("minimize_gp: require 0 < eps < 0.5");
  if (grid.spacing() > eps / 2.0 + 1e-15) {
    throw ValidationError("minimize_gp: grid spacing must resolve the healing length eps/2");
  }
  const double min_extent = model.r_tf + 6.0 * std::pow(eps, 2.0 / 3.0);
  if (grid.extent < min_extent - 1e-12) {
    throw ValidationError("minimize_gp: extent too small for the density tail");
  }
  if (schedule.n_starts < 1 || schedule.max_steps < 1) {
    throw ValidationError("minimize_gp: bad schedule");
  }
  const double L = -std::log(eps);
  const double omega = omega0 * L;
  const FlowContext ctx = make_context(grid, model, eps, omega);
  const RadialProfileG profile = solve_radial_profile(model, eps, 4096);
  const VortexLattice lattice = build_lattice(model, omega0, eps, 0, 3);

  // Explicit centered rotation is damped by the implicit diffusion only below
  // this step; the energy guard handles the rest.
  const double adv = omega * std::sqrt(2.0) * grid.extent;
  const double dt_cap = std::min(schedule.dt_max, 0.8 / (adv * adv + 1e-30));

  DirichletInverter inv(grid.n, grid.extent);
  GpState best;
  std::vector<double> terms;
  for (int start = 0; start < schedule.n_starts; ++start) {
    cvec psi = initial_state(ctx, profile, lattice, schedule.seed, start);
    project_unit_mass(ctx, psi, terms);
    FlowOutcome run = run_flow(ctx, inv, psi, schedule, schedule.max_steps, dt_cap);
    if (start == 0 || run.energy < best.energy) {
      best.grid = grid;
      best.psi = std::move(psi);
      best.eps = eps;
      best.omega0 = omega0;
      best.s = model.params.s;
      best.energy_trace = std::move(run.trace);
      best.energy = run.energy;
      best.converged = run.converged;
      best.steps = run.steps;
      best.best_start = start;
    }
  }
  best.lambda_hat = eps * eps * best.energy + quartic_integral(ctx, best.psi, terms);
  return best;
}

EnergyReport energy_decompose(const GpState& state, const RadialProfileG& profile,
                              const TfModel& model) {
  if (profile.eps != state.eps) {
    throw ValidationError("energy_decompose: profile and state eps differ");
  }
  const Grid2D& grid = state.grid;
  const int n = grid.n;
  const double L = -std::log(state.eps);
  const double omega = state.omega0 * L;
  const FlowContext ctx = make_context(grid, model, state.eps, omega);
  const FlowContext ctx0 = make_context(grid, model, state.eps, 0.0);
  std::vector<double> terms;

  // Polish the resampled profile with a short unrotated flow so the discrete
  // profile equation holds on this grid's stencil.
  cvec g2d(grid.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      g2d[grid.idx(i, j)] = sample_profile(profile, std::hypot(ctx.xs[i], ctx.xs[j]));
    }
  }
  project_unit_mass(ctx0, g2d, terms);
  DirichletInverter inv(grid.n, grid.extent);
  GpSchedule polish;
  polish.tol = 1e-9;
  polish.stall_window = 50;
  run_flow(ctx0, inv, g2d, polish, 2000, polish.dt_max);

  EnergyReport rep;
  rep.e_gp = flow_energy(ctx, state.psi, terms);
  rep.e_hat = flow_energy(ctx, g2d, terms);  // rotation term vanishes: g2d real

  const double thr = g_threshold(model, state.eps);
  std::vector<std::uint8_t> covered(grid.size(), 0);
  int inside = 0, above = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = grid.idx(i, j);
      const double gsq = std::norm(g2d[p]);
      covered[p] = gsq >= thr;
      if (std::hypot(ctx.xs[i], ctx.xs[j]) <= model.r_tf) {
        ++inside;
        above += covered[p];
      }
    }
  }
  rep.coverage = inside > 0 ? static_cast<double>(above) / inside : 0.0;
  if (rep.coverage < 0.9) {
    rep.low_coverage = true;
    std::fprintf(stderr, "energy_decompose: g threshold keeps only %.1f%% of the bulk\n",
                 100.0 * rep.coverage);
  }

  const double h = grid.spacing();
  const double h2 = h * h;
  std::vector<double> red(grid.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = grid.idx(i, j);
      if (!covered[p]) continue;
      const std::complex<double> u = state.psi[p] / g2d[p].real();
      const double g2 = std::norm(g2d[p]);
      double acc = 0.0;
      // kinetic: down/left edges with covered partners, edge-averaged g^2
      if (i > 0 && covered[p - 1]) {
        acc += 0.25 * (g2 + std::norm(g2d[p - 1])) *
               std::norm(u - state.psi[p - 1] / g2d[p - 1].real());
      }
      if (j > 0 && covered[p - n]) {
        acc += 0.25 * (g2 + std::norm(g2d[p - n])) *
               std::norm(u - state.psi[p - n] / g2d[p - n].real());
      }
      // rotation: centered differences, all stencil nodes covered
      if (i > 0 && i < n - 1 && j > 0 && j < n - 1 && covered[p - 1] && covered[p + 1] &&
          covered[p - n] && covered[p + n]) {
        const std::complex<double> dux =
            (state.psi[p + 1] / g2d[p + 1].real() - state.psi[p - 1] / g2d[p - 1].real()) /
            (2.0 * h);
        const std::complex<double> duy =
            (state.psi[p + n] / g2d[p + n].real() - state.psi[p - n] / g2d[p - n].real()) /
            (2.0 * h);
        acc += -omega * h2 * g2 *
               (ctx.xs[i] * std::imag(std::conj(u) * duy) -
                ctx.xs[j] * std::imag(std::conj(u) * dux));
      }
      const double dev = 1.0 - std::norm(u);
      acc += h2 * ctx.inv_e2 * g2 * g2 * dev * dev;
      red[p] = acc;
    }
  }
  rep.reduced = detail::pairwise_sum(red);
  rep.identity_gap = std::abs(rep.e_gp - rep.e_hat - rep.reduced) /
                     std::max(std::abs(rep.e_gp), 1e-300);
  return rep;
}

// ============================================================================
// Vorticity extraction and comparison.
// ============================================================================

namespace {

double wrap_phase(double d) { return std::remainder(d, 2.0 * kPi); }

}  // namespace

VorticityResult extract_vorticity(const GpState& state, const RadialProfileG& profile,
                                  const TfModel& model, int n_bins) {
  if (n_bins < 4) throw ValidationError("extract_vorticity: require n_bins >= 4");
  const Grid2D& grid = state.grid;
  const int n = grid.n;
  const double L = -std::log(state.eps);
  const double thr = g_threshold(model, state.eps);

  VorticityResult out;
  out.mu_field.grid = grid;
  out.mu_field.values.assign(grid.size(), 0.0);
  out.mu_field.mask.assign(grid.size(), 0);

  std::vector<std::uint8_t> covered(grid.size(), 0);
  std::vector<std::complex<double>> u(grid.size(), 0.0);
  int inside = 0, below = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = grid.idx(i, j);
      const double r = std::hypot(grid.coord(i), grid.coord(j));
      const double g = sample_profile(profile, r);
      const bool ok = g * g >= thr;
      covered[p] = ok;
      if (ok) u[p] = state.psi[p] / g;
      if (r <= model.r_tf) {
        ++inside;
        below += !ok;
      }
    }
  }
  out.excluded_fraction = inside > 0 ? static_cast<double>(below) / inside : 1.0;

  // Superfluid current on nodes whose centered stencil is covered.
  const double h = grid.spacing();
  std::vector<double> jx(grid.size(), 0.0), jy(grid.size(), 0.0);
  std::vector<std::uint8_t> jvalid(grid.size(), 0);
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const int p = grid.idx(i, j);
      if (!(covered[p] && covered[p - 1] && covered[p + 1] && covered[p - n] &&
            covered[p + n])) {
        continue;
      }
      const std::complex<double> uc = std::conj(u[p]);
      jx[p] = std::imag(uc * (u[p + 1] - u[p - 1])) / (2.0 * h);
      jy[p] = std::imag(uc * (u[p + n] - u[p - n])) / (2.0 * h);
      jvalid[p] = 1;
    }
  }
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const int p = grid.idx(i, j);
      if (!(jvalid[p] && jvalid[p - 1] && jvalid[p + 1] && jvalid[p - n] &&
            jvalid[p + n])) {
        continue;
      }
      const double curl =
          (jy[p + 1] - jy[p - 1] - (jx[p + n] - jx[p - n])) / (2.0 * h);
      out.mu_field.values[p] = curl / L;
      out.mu_field.mask[p] = 1;
    }
  }

  // Plaquette winding on cells with four covered corners.
  struct Cell {
    int i, j;
    double w;
  };
  std::vector<Cell> flagged;
  for (int j = 0; j < n - 1; ++j) {
    for (int i = 0; i < n - 1; ++i) {
      const int p = grid.idx(i, j);
      if (!(covered[p] && covered[p + 1] && covered[p + n] && covered[p + n + 1])) continue;
      const double a0 = std::arg(u[p]);
      const double a1 = std::arg(u[p + 1]);
      const double a2 = std::arg(u[p + n + 1]);
      const double a3 = std::arg(u[p + n]);
      const double w = wrap_phase(a1 - a0) + wrap_phase(a2 - a1) + wrap_phase(a3 - a2) +
                       wrap_phase(a0 - a3);
      if (std::abs(w) >= 0.9 * 2.0 * kPi) flagged.push_back({i, j, w});
    }
  }
  // Cluster flagged cells within Chebyshev distance 2.
  std::vector<int> label(flagged.size(), -1);
  int n_clusters = 0;
  for (std::size_t a = 0; a < flagged.size(); ++a) {
    if (label[a] >= 0) continue;
    label[a] = n_clusters;
    std::vector<std::size_t> queue{a};
    while (!queue.empty()) {
      const std::size_t cur = queue.back();
      queue.pop_back();
      for (std::size_t b = 0; b < flagged.size(); ++b) {
        if (label[b] >= 0) continue;
        if (std::abs(flagged[b].i - flagged[cur].i) <= 2 &&
            std::abs(flagged[b].j - flagged[cur].j) <= 2) {
          label[b] = n_clusters;
          queue.push_back(b);
        }
      }
    }
    ++n_clusters;
  }
  for (int c = 0; c < n_clusters; ++c) {
    double wsum = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t a = 0; a < flagged.size(); ++a) {
      if (label[a] != c) continue;
      const double w = flagged[a].w;
      wsum += w;
      cx += w * (grid.coord(flagged[a].i) + 0.5 * h);
      cy += w * (grid.coord(flagged[a].j) + 0.5 * h);
    }
    const int winding = static_cast<int>(std::lround(wsum / (2.0 * kPi)));
    if (winding == 0 || wsum == 0.0) continue;
    out.vortices.push_back({{cx / wsum, cy / wsum}, winding});
  }

  // Azimuthal average of the vorticity over equal-width annuli.
  const double width = model.r_tf / n_bins;
  out.bin_r.resize(n_bins);
  out.radial_mu.assign(n_bins, 0.0);
  std::vector<int> counts(n_bins, 0);
  for (int b = 0; b < n_bins; ++b) out.bin_r[b] = (b + 0.5) * width;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = grid.idx(i, j);
      if (!out.mu_field.mask[p]) continue;
      const double r = std::hypot(grid.coord(i), grid.coord(j));
      const int b = static_cast<int>(r / width);
      if (b >= n_bins) continue;
      out.radial_mu[b] += out.mu_field.values[p];
      counts[b] += 1;
    }
  }
  for (int b = 0; b < n_bins; ++b) {
    if (counts[b] > 0) out.radial_mu[b] /= counts[b];
  }
  return out;
}

VorticityResult bin_lattice_radial(const VortexLattice& lattice, int n_bins) {
  if (n_bins < 4) throw ValidationError("bin_lattice_radial: require n_bins >= 4");
  if (!(lattice.eps > 0.0 && lattice.eps < 1.0)) {
    throw ValidationError("bin_lattice_radial: lattice carries no eps");
  }
  const double L = -std::log(lattice.eps);
  const double r_tf = lattice.model.r_tf;
  const double width = r_tf / n_bins;
  VorticityResult out;
  out.bin_r.resize(n_bins);
  out.radial_mu.assign(n_bins, 0.0);
  for (int b = 0; b < n_bins; ++b) out.bin_r[b] = (b + 0.5) * width;
  for (const auto& p : lattice.points) {
    const double r = std::hypot(p[0], p[1]);
    const int b = std::min(static_cast<int>(r / width), n_bins - 1);
    out.radial_mu[b] += 1.0;
  }
  for (int b = 0; b < n_bins; ++b) {
    const double r_in = b * width, r_out = (b + 1) * width;
    const double area = kPi * (r_out * r_out - r_in * r_in);
    out.radial_mu[b] *= 2.0 * kPi / (L * area);
  }
  return out;
}

double compare_to_mustar(VorticityResult& result, const VortexDensity& density,
                         const TfModel& model, double omega0, double eps) {
  if (result.radial_mu.empty()) {
    throw ValidationError("compare_to_mustar: radial_mu missing");
  }
  const double L = -std::log(eps);
  const double omega = omega0 * L;
  const double r_bulk = model.r_tf - 0.25 / (model.r_tf * omega);
  if (!(r_bulk > 0.0)) throw ValidationError("compare_to_mustar: bulk radius collapsed");

  const int n_bins = static_cast<int>(result.radial_mu.size());
  const double width = model.r_tf / n_bins;
  const SupportRadii radii{density.r1, density.r2, density.r_star};

  const RadialGrid grid = make_radial_grid(r_bulk, 2048);
  RadialMeasure delta;
  delta.grid = grid;
  delta.density.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const int b = std::min(static_cast<int>(grid.r[i] / width), n_bins - 1);
    // Both sides as bin-center step functions, so matched inputs cancel exactly.
    const double predicted = mu_star_density(model, omega0, radii, (b + 0.5) * width);
    delta.density[i] = result.radial_mu[b] - predicted;
  }
  const RenormReport rep = energy(delta, model, omega0);
  result.norm_gap = std::sqrt(std::max(rep.interaction, 0.0));
  return result.norm_gap;
}

}  // namespace vtx
