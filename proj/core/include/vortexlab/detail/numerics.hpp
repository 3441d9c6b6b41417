/// @file numerics.hpp
/// @brief Small deterministic numeric kernels: compensated and pairwise sums,
///        trapezoid quadrature, cumulative integrals, Brent root finding,
///        Gauss-Legendre panels, and portable uniform deviates.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace vtx::detail {

// ============================================================================
// Reductions. Both are fixed-order and therefore bit-reproducible.
// ============================================================================

/// Neumaier compensated sum; error independent of length for well-scaled data.
inline double neumaier_sum(std::span<const double> v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  return s + c;
}

/// Pairwise tree sum with a fixed bracketing independent of the caller.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// ============================================================================
// Quadrature on uniform grids.
// ============================================================================

/// Composite trapezoid weights for n uniform nodes spanning [0, len]:
/// dr at interior nodes, dr/2 at the two endpoints.
inline std::vector<double> trapezoid_weights(std::size_t n, double len) {
  if (n < 2) throw std::invalid_argument("trapezoid_weights: need >= 2 nodes");
  const double dr = len / static_cast<double>(n - 1);
  std::vector<double> w(n, dr);
  w.front() = 0.5 * dr;
  w.back() = 0.5 * dr;
  return w;
}

/// sum_i w_i f_i with compensated accumulation.
inline double weighted_sum(std::span<const double> w, std::span<const double> f) {
  if (w.size() != f.size()) throw std::invalid_argument("weighted_sum: size mismatch");
  std::vector<double> prod(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) prod[i] = w[i] * f[i];
  return neumaier_sum(prod);
}

/// Cumulative trapezoid prefix c_i = c_{i-1} + dr (g_{i-1} + g_i)/2, c_0 = 0.
inline std::vector<double> cumulative_trapezoid(std::span<const double> g, double dr) {
  std::vector<double> c(g.size(), 0.0);
  double acc = 0.0, comp = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double inc = 0.5 * dr * (g[i - 1] + g[i]);
    const double t = acc + inc;
    if (std::abs(acc) >= std::abs(inc)) {
      comp += (acc - t) + inc;
    } else {
      comp += (inc - t) + acc;
    }
    acc = t;
    c[i] = acc + comp;
  }
  return c;
}

// ============================================================================
// Root finding.
// ============================================================================

/// Classic bracketed Brent. Requires f(a) f(b) <= 0; returns the root to
/// absolute tolerance tol on the abscissa.
inline double brent_root(const std::function<double(double)>& f, double a, double b,
                         double tol, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::invalid_argument("brent_root: endpoints do not bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

// ============================================================================
// Gauss-Legendre 16-point panel, exact for smooth integrands at panel scale.
// ============================================================================

inline constexpr double kGl16X[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr double kGl16W[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

/// Integral of f over [a, b] with m Gauss-Legendre 16-point panels.
inline double gauss_integrate(const std::function<double(double)>& f, double a, double b,
                              int panels = 8) {
  double total = 0.0;
  const double step = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * step;
    const double mid = lo + 0.5 * step, half = 0.5 * step;
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
      s += kGl16W[i] * (f(mid + half * kGl16X[i]) + f(mid - half * kGl16X[i]));
    }
    total += s * half;
  }
  return total;
}

// ============================================================================
// Portable deterministic deviates (uniform_real_distribution is not portable).
// ============================================================================

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// ============================================================================
// Least squares line fit, used by decay- and trend-checks.
// ============================================================================

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: bad input");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return out;
}

}  // namespace vtx::detail
