/// @file main.cpp
/// @brief vortexctl: command-line front end of the vortex toolkit. Each
///        subcommand dispatches to one library layer, writes its CSV/JSON
///        (and binary) artifacts, and finishes with a run manifest that
///        inventories every emitted file with a content hash.
///
/// Exit codes: 0 success, 2 validation, 3 convergence failure, 4 missing
/// input. Failures print one machine-readable JSON object on stderr.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vortexlab/errors.hpp"
#include "vortexlab/field2d.hpp"
#include "vortexlab/gpflow.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/lattice.hpp"
#include "vortexlab/mustar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/tf.hpp"
#include "vortexlab/version.hpp"

namespace {

using nlohmann::json;
using namespace vtx;

// ============================================================================
// Run plumbing: output root, stage timing, artifact inventory, manifest.
// ============================================================================

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

/// Collects emitted files (paths relative to the run directory) and stage
/// wall times; writes the manifest last so its presence marks a finished run.
struct RunDir {
  std::string root;
  std::vector<std::string> files;
  std::vector<std::pair<std::string, double>> stages;
  double t_last = now_s();

  explicit RunDir(std::string dir) : root(std::move(dir)) {
    std::filesystem::create_directories(root);
  }

  std::string abs(const std::string& rel) const { return root + "/" + rel; }

  void put_text(const std::string& rel, const std::string& content) {
    auto slash = rel.rfind('/');
    if (slash != std::string::npos) std::filesystem::create_directories(abs(rel.substr(0, slash)));
    write_text_atomic(abs(rel), content);
    files.push_back(rel);
  }

  void put_field(const std::string& rel, const ScalarField2D& field) {
    auto slash = rel.rfind('/');
    if (slash != std::string::npos) std::filesystem::create_directories(abs(rel.substr(0, slash)));
    write_field_block(abs(rel), field);
    files.push_back(rel);
  }

  void stage(const std::string& name) {
    double t = now_s();
    stages.emplace_back(name, t - t_last);
    t_last = t;
  }

  /// Manifest carries the config echo, version, stage times, and the file
  /// inventory. inventory_hash folds the per-file hashes, so reruns with
  /// identical data files report an identical value even though wall times
  /// differ.
  void finish(const std::string& command, const json& config) {
    json inventory = json::array();
    std::string acc;
    for (const std::string& f : files) {
      std::string h = hash_hex(file_hash(abs(f)));
      inventory.push_back({{"path", f}, {"fnv1a", h}});
      acc += f + ":" + h + "\n";
    }
    json stage_arr = json::array();
    for (const auto& [name, seconds] : stages)
      stage_arr.push_back({{"name", name}, {"seconds", seconds}});
    json m = {{"command", command},          {"version", kVersionString},
              {"config", config},            {"stages", stage_arr},
              {"outputs", inventory},        {"inventory_hash", hash_hex(fnv1a(acc))}};
    write_text_atomic(abs("manifest.json"), m.dump(2) + "\n");
  }
};

std::string default_out() {
  const char* env = std::getenv("VORTEXLAB_OUT");
  return (env && *env) ? env : ".";
}

/// Reads a whole file; absence is a missing prior stage, not a bug.
std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// ============================================================================
// Shared options.
// ============================================================================

struct CommonOpts {
  double s = 2.0;
  std::string omega0 = "2x-crit";
  std::string out;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--s", o.s, "trap steepness exponent, >= 2")->capture_default_str();
  cmd->add_option("--omega0", o.omega0,
                  "rotation coefficient: a number, or '<k>x-crit' for k times the "
                  "first critical coefficient")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "output directory (default: $VORTEXLAB_OUT or '.')");
  cmd->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();
}

double parse_number(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError(std::string(what) + ": expected a number, got '" + text + "'");
  }
  if (used != text.size())
    throw ValidationError(std::string(what) + ": trailing characters in '" + text + "'");
  return v;
}

/// '--omega0 3.5' is taken literally; '--omega0 1.5x-crit' scales the first
/// critical coefficient of the requested trap.
double resolve_omega0(const std::string& text, double s) {
  const std::string suffix = "x-crit";
  TfModel probe = build_tf_model({s, 1.0});
  if (text.size() > suffix.size() &&
      text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
    double k = parse_number(text.substr(0, text.size() - suffix.size()), "omega0 multiplier");
    if (!(k > 0.0)) throw ValidationError("omega0 multiplier must be positive");
    return k * omega_c1(probe);
  }
  return parse_number(text, "omega0");
}

TfModel make_model(const CommonOpts& c, double* omega0) {
  *omega0 = resolve_omega0(c.omega0, c.s);
  return build_tf_model({c.s, *omega0});
}

json common_echo(const CommonOpts& c, double omega0) {
  return {{"s", c.s}, {"omega0", omega0}, {"omega0_arg", c.omega0}, {"seed", c.seed}};
}

std::string eps_dir(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eps_%g", eps);
  return buf;
}

/// Sweep plumbing: a single eps writes into the run root, a list into one
/// subdirectory per value. Runs are independent and executed serially.
std::vector<std::pair<double, std::string>> sweep_dirs(double eps,
                                                       const std::vector<double>& eps_list) {
  std::vector<std::pair<double, std::string>> out;
  if (eps_list.empty()) {
    out.emplace_back(eps, "");
  } else {
    for (double e : eps_list) out.emplace_back(e, eps_dir(e) + "/");
  }
  return out;
}

// ============================================================================
// tf: analytic profile and cost layer.
// ============================================================================

struct TfOpts {
  CommonOpts c;
  int n = 1024;
};

void run_tf(const TfOpts& o) {
  RunDir run(o.c.out);
  double w0 = 0.0;
  TfModel m = make_model(o.c, &w0);
  CostProfile cp = cost_profile(m, w0, o.n);
  run.stage("solve");
  run.put_text("profile.csv", render_csv(profile_table(m, cp)));
  json summary = {{"s", o.c.s},
                  {"omega0", w0},
                  {"lambda", m.lambda_tf},
                  {"r_tf", m.r_tf},
                  {"etf_coeff", m.etf_coeff},
                  {"omega_c1", omega_c1(m)},
                  {"cost_origin", h_tf(m, w0, 0.0)}};
  run.put_text("summary.json", summary.dump(2) + "\n");
  run.stage("write");
  json cfg = common_echo(o.c, w0);
  cfg["n"] = o.n;
  run.finish("tf", cfg);
}

// ============================================================================
// mustar: predicted vortex density.
// ============================================================================

struct MustarOpts {
  CommonOpts c;
  int n = 2048;
};

void run_mustar(const MustarOpts& o) {
  RunDir run(o.c.out);
  double w0 = 0.0;
  TfModel m = make_model(o.c, &w0);
  VortexDensity vd = mu_star(m, w0, o.n);
  run.stage("solve");
  run.put_text("density.csv", render_csv(density_table(vd)));
  json summary = {{"s", o.c.s},
                  {"omega0", w0},
                  {"r1", vd.r1},
                  {"r2", vd.r2},
                  {"r_star", vd.r_star},
                  {"r1_over_r_tf", vd.r1 / m.r_tf},
                  {"r2_over_r_tf", vd.r2 / m.r_tf},
                  {"total_mass", vd.total_mass},
                  {"i_tf", vd.i_tf},
                  {"density_origin", m_star_of_r(m, w0, 0.0)}};
  run.put_text("summary.json", summary.dump(2) + "\n");
  run.stage("write");
  json cfg = common_echo(o.c, w0);
  cfg["n"] = o.n;
  run.finish("mustar", cfg);
}

// ============================================================================
// renorm-min: proximal-gradient minimization over radial measures.
// ============================================================================

struct RenormOpts {
  CommonOpts c;
  std::string init = "zero";
  int n = 1024;
  int max_iter = 50000;
  double tol = 1e-10;
};

void run_renorm_min(const RenormOpts& o) {
  RunDir run(o.c.out);
  double w0 = 0.0;
  TfModel m = make_model(o.c, &w0);
  SupportRadii radii = support_radii(m, w0);

  RadialMeasure init = zero_measure(radii.r_star, o.n);
  if (o.init == "mustar") {
    init = mu_star_measure(m, w0, init.grid);
  } else if (o.init == "rough") {
    std::mt19937_64 rng(o.c.seed ? o.c.seed : 11);
    std::normal_distribution<double> noise(0.0, 1.0);
    double a1 = noise(rng), a2 = noise(rng), a3 = noise(rng);
    for (int i = 0; i < init.grid.n; ++i) {
      double r = init.grid.r[i];
      init.density[i] = 2.0 * (a1 * std::exp(-30 * (r - 0.2) * (r - 0.2)) +
                               a2 * std::exp(-50 * (r - 0.45) * (r - 0.45)) +
                               a3 * std::exp(-40 * (r - 0.65) * (r - 0.65)));
    }
  } else if (o.init != "zero") {
    throw ValidationError("init: expected zero, mustar, or rough, got '" + o.init + "'");
  }

  MinimizeResult res = minimize(m, w0, init, o.max_iter, o.tol);
  run.stage("minimize");

  PotentialH h = solve_potential(res.minimizer, m);
  run.put_text("minimizer.csv", render_csv(measure_table(res.minimizer, h)));
  CsvTable trace{{"iteration", "energy"}, {}};
  for (const auto& [it, e] : res.trace) trace.rows.push_back({(double)it, e});
  run.put_text("trace.csv", render_csv(trace));

  RadialMeasure ref = mu_star_measure(m, w0, res.minimizer.grid);
  double gap = weighted_l1_gap(res.minimizer, ref) / (2.0 * 3.14159265358979323846);
  json summary = {{"s", o.c.s},
                  {"omega0", w0},
                  {"init", o.init},
                  {"converged", res.converged},
                  {"iterations", res.iterations},
                  {"step", res.step},
                  {"l1_gap", gap},
                  {"energy",
                   {{"interaction", res.report.interaction},
                    {"cost", res.report.cost},
                    {"gain", res.report.gain},
                    {"total", res.report.total}}}};
  run.put_text("summary.json", summary.dump(2) + "\n");
  run.stage("write");
  json cfg = common_echo(o.c, w0);
  cfg["init"] = o.init;
  cfg["n"] = o.n;
  cfg["max_iter"] = o.max_iter;
  cfg["tol"] = o.tol;
  run.finish("renorm-min", cfg);
  if (!res.converged)
    throw ConvergenceError("renorm-min: no stall within " + std::to_string(o.max_iter) +
                           " iterations (artifacts were written)");
}

// ============================================================================
// lattice: ring trial configurations, sweepable over eps.
// ============================================================================

struct LatticeOpts {
  CommonOpts c;
  double eps = 0.01;
  std::vector<double> eps_list;
  int k0 = 0;
  int min_points = 4;
};

void run_lattice(const LatticeOpts& o) {
  RunDir run(o.c.out);
  double w0 = 0.0;
  TfModel m = make_model(o.c, &w0);
  for (const auto& [eps, dir] : sweep_dirs(o.eps, o.eps_list)) {
    VortexLattice lat = build_lattice(m, w0, eps, o.k0, o.min_points);
    run.stage(dir.empty() ? "build" : dir + "build");
    run.put_text(dir + "lattice.csv", render_csv(lattice_table(lat)));
    json rings = json::array();
    for (const LatticeCircle& c : lat.circles)
      rings.push_back({{"k", c.k}, {"radius", c.rho_k}, {"count", c.n_k}});
    json summary = {{"s", o.c.s},      {"omega0", w0},           {"eps", eps},
                    {"k0", lat.k0},    {"n_points", lat.n_total}, {"rings", rings}};
    run.put_text(dir + "summary.json", summary.dump(2) + "\n");
    run.stage(dir.empty() ? "write" : dir + "write");
  }
  json cfg = common_echo(o.c, w0);
  cfg["eps"] = o.eps_list.empty() ? json(o.eps) : json(o.eps_list);
  cfg["k0"] = o.k0;
  cfg["min_points"] = o.min_points;
  run.finish("lattice", cfg);
}

// ============================================================================
// green: weighted Green-function singularity probe, sweepable over eps.
// ============================================================================

struct GreenOpts {
  CommonOpts c;
  double eps = 0.01;
  std::vector<double> eps_list;
  int pairs = 12;
  int sources = 4;
  int n_base = 257;
  double tol = 1e-9;
};

void run_green(const GreenOpts& o) {
  RunDir run(o.c.out);
  double w0 = 0.0;
  TfModel m = make_model(o.c, &w0);
  for (const auto& [eps, dir] : sweep_dirs(o.eps, o.eps_list)) {
    DiscDomain dd = disc_domain(m, eps);
    auto pairs = make_green_sample_pairs(m, dd.r_inner, o.pairs, o.sources, o.c.seed, o.n_base);
    GreenCheck gc = green_singularity_check(m, dd.r_inner, pairs, o.n_base, o.tol);
    run.stage(dir.empty() ? "solve" : dir + "solve");
    CsvTable pt{{"x1", "y1", "x2", "y2"}, {}};
    for (const GreenPair& p : pairs) pt.rows.push_back({p.x[0], p.x[1], p.y[0], p.y[1]});
    run.put_text(dir + "pairs.csv", render_csv(pt));
    json summary = {{"s", o.c.s},
                    {"omega0", w0},
                    {"eps", eps},
                    {"r_inner", dd.r_inner},
                    {"r_outer", dd.r_outer},
                    {"n_base", o.n_base},
                    {"deviation_base", gc.deviation_base},
                    {"deviation", gc.deviation},
                    {"rel_change", gc.rel_change},
                    {"min_g", gc.min_g},
                    {"symmetry_gap", gc.symmetry_gap}};
    run.put_text(dir + "summary.json", summary.dump(2) + "\n");
    run.stage(dir.empty() ? "write" : dir + "write");
  }
  json cfg = common_echo(o.c, w0);
  cfg["eps"] = o.eps_list.empty() ? json(o.eps) : json(o.eps_list);
  cfg["pairs"] = o.pairs;
  cfg["sources"] = o.sources;
  cfg["n_base"] = o.n_base;
  run.finish("green", cfg);
}

// ============================================================================
// gp: full 2D ground-state solve with plot-ready exports, sweepable over eps.
// ============================================================================

struct GpOpts {
  CommonOpts c;
  double eps = 0.05;
  std::vector<double> eps_list;
  int n = 257;
  double extent = 0.0;  // 0 = automatic working extent
  int starts = 3;
  int max_steps = 20000;
  int bins = 32;
};

void run_gp(const GpOpts& o) {
  RunDir run(o.c.out);
  double w0 = 0.0;
  TfModel m = make_model(o.c, &w0);
  bool supercritical = w0 > omega_c1(m);
  std::vector<double> failed_eps;

  for (const auto& [eps, dir] : sweep_dirs(o.eps, o.eps_list)) {
    double extent = o.extent > 0.0 ? o.extent : m.r_tf + 6.0 * std::pow(eps, 2.0 / 3.0);
    Grid2D grid = make_grid2d(o.n, extent, m);
    GpSchedule sch;
    sch.n_starts = o.starts;
    sch.max_steps = o.max_steps;
    sch.seed = o.c.seed;
    GpState st = minimize_gp(m, w0, eps, grid, sch);
    run.stage(dir.empty() ? "flow" : dir + "flow");
    RadialProfileG prof = solve_radial_profile(m, eps, 4096);
    EnergyReport er = energy_decompose(st, prof, m);
    VorticityResult vr = extract_vorticity(st, prof, m, o.bins);
    run.stage(dir.empty() ? "analyze" : dir + "analyze");

    // Snapshot: two field blocks round-trip the complex state exactly.
    ScalarField2D re;
    re.grid = grid;
    re.values.resize(grid.size());
    re.mask.assign(grid.size(), 1);
    ScalarField2D im = re;
    for (int k = 0; k < grid.size(); ++k) {
      re.values[k] = st.psi[k].real();
      im.values[k] = st.psi[k].imag();
    }
    run.put_field(dir + "psi_re.bin", re);
    run.put_field(dir + "psi_im.bin", im);

    // Plot-ready density heatmap, subsampled to at most 129 nodes per axis.
    int stride = std::max(1, (o.n - 1) / 128);
    CsvTable heat{{"x", "y", "density"}, {}};
    for (int j = 0; j < grid.n; j += stride)
      for (int i = 0; i < grid.n; i += stride)
        heat.rows.push_back({grid.coord(i), grid.coord(j), std::norm(st.psi[grid.idx(i, j)])});
    run.put_text(dir + "density.csv", render_csv(heat));
    run.put_text(dir + "vortices.csv", render_csv(vortex_table(vr.vortices)));
    CsvTable trace{{"step", "energy"}, {}};
    for (const auto& [step, e] : st.energy_trace) trace.rows.push_back({(double)step, e});
    run.put_text(dir + "energy_trace.csv", render_csv(trace));
    if (supercritical) {
      VortexDensity vd = mu_star(m, w0, 2048);
      run.put_text(dir + "radial_mu.csv", render_csv(radial_mu_table(vr, vd, m, w0)));
    }

    json summary = {{"s", o.c.s},
                    {"omega0", w0},
                    {"eps", eps},
                    {"n", o.n},
                    {"extent", extent},
                    {"energy", st.energy},
                    {"lambda_hat", st.lambda_hat},
                    {"converged", st.converged},
                    {"steps", st.steps},
                    {"best_start", st.best_start},
                    {"n_vortices", vr.vortices.size()},
                    {"excluded_fraction", vr.excluded_fraction},
                    {"e_hat", er.e_hat},
                    {"reduced", er.reduced},
                    {"identity_gap", er.identity_gap},
                    {"coverage", er.coverage}};
    run.put_text(dir + "summary.json", summary.dump(2) + "\n");
    run.stage(dir.empty() ? "write" : dir + "write");
    if (!st.converged) failed_eps.push_back(eps);
  }

  json cfg = common_echo(o.c, w0);
  cfg["eps"] = o.eps_list.empty() ? json(o.eps) : json(o.eps_list);
  cfg["n"] = o.n;
  cfg["extent"] = o.extent;
  cfg["starts"] = o.starts;
  cfg["max_steps"] = o.max_steps;
  cfg["bins"] = o.bins;
  run.finish("gp", cfg);
  if (!failed_eps.empty()) {
    std::string msg = "gp: flow did not stall at eps =";
    for (double e : failed_eps) msg += " " + fmt_double(e);
    throw ConvergenceError(msg + " (artifacts were written)");
  }
}

// ============================================================================
// compare: binned vorticity of a gp run against a mustar run.
// ============================================================================

struct CompareOpts {
  std::string gp_dir;
  std::string mustar_dir;
  std::string out;
};

void run_compare(const CompareOpts& o) {
  json gps = read_json(o.gp_dir + "/summary.json");
  json mus = read_json(o.mustar_dir + "/summary.json");
  double s = gps.at("s"), w0 = gps.at("omega0"), eps = gps.at("eps");
  double s2 = mus.at("s"), w02 = mus.at("omega0");
  if (std::abs(s - s2) > 1e-12 || std::abs(w0 - w02) > 1e-9 * std::max(1.0, std::abs(w0)))
    throw ValidationError("compare: gp and mustar runs disagree on (s, omega0)");

  CsvTable rmu = read_csv(o.gp_dir + "/radial_mu.csv");
  if (rmu.columns.size() < 2 || rmu.columns[0] != "r" || rmu.columns[1] != "mu_avg")
    throw ValidationError("compare: radial_mu.csv does not carry (r, mu_avg) columns");
  VorticityResult vr;
  for (const auto& row : rmu.rows) {
    vr.bin_r.push_back(row[0]);
    vr.radial_mu.push_back(row[1]);
  }
  VortexDensity vd;
  vd.r1 = mus.at("r1");
  vd.r2 = mus.at("r2");
  vd.r_star = mus.at("r_star");

  TfModel m = build_tf_model({s, w0});
  RunDir run(o.out);
  double gap = compare_to_mustar(vr, vd, m, w0, eps);
  run.stage("compare");
  json result = {{"s", s},
                 {"omega0", w0},
                 {"eps", eps},
                 {"n_bins", vr.radial_mu.size()},
                 {"n_vortices", gps.at("n_vortices")},
                 {"norm_gap", gap}};
  run.put_text("compare.json", result.dump(2) + "\n");
  run.stage("write");
  json cfg = {{"gp", o.gp_dir}, {"mustar", o.mustar_dir}};
  run.finish("compare", cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortexctl: rotating-condensate vortex toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; command-line flags win");
  app.set_version_flag("--version", kVersionString);

  TfOpts tf_o;
  CLI::App* tf_cmd = app.add_subcommand("tf", "analytic density and vortex-cost profiles");
  add_common(tf_cmd, tf_o.c);
  tf_cmd->add_option("--n", tf_o.n, "profile sample count")->capture_default_str();

  MustarOpts mu_o;
  CLI::App* mu_cmd = app.add_subcommand("mustar", "predicted vortex density and support radii");
  add_common(mu_cmd, mu_o.c);
  mu_cmd->add_option("--n", mu_o.n, "radial sample count")->capture_default_str();

  RenormOpts rn_o;
  CLI::App* rn_cmd =
      app.add_subcommand("renorm-min", "minimize the renormalized energy over radial measures");
  add_common(rn_cmd, rn_o.c);
  rn_cmd->add_option("--init", rn_o.init, "starting measure: zero, mustar, or rough")
      ->capture_default_str();
  rn_cmd->add_option("--n", rn_o.n, "radial grid nodes")->capture_default_str();
  rn_cmd->add_option("--max-iter", rn_o.max_iter, "iteration cap")->capture_default_str();
  rn_cmd->add_option("--tol", rn_o.tol, "relative energy stall tolerance")->capture_default_str();

  LatticeOpts la_o;
  CLI::App* la_cmd = app.add_subcommand("lattice", "ring trial vortex configurations");
  add_common(la_cmd, la_o.c);
  la_cmd->add_option("--eps", la_o.eps, "smoothing parameter")->capture_default_str();
  la_cmd->add_option("--eps-list", la_o.eps_list, "sweep values; one subdirectory per value")
      ->delimiter(',');
  la_cmd->add_option("--k0", la_o.k0, "smallest ring index")->capture_default_str();
  la_cmd->add_option("--min-points", la_o.min_points, "occupancy threshold per ring")
      ->capture_default_str();

  GreenOpts gr_o;
  CLI::App* gr_cmd = app.add_subcommand("green", "weighted Green-function singularity probe");
  add_common(gr_cmd, gr_o.c);
  gr_cmd->add_option("--eps", gr_o.eps, "smoothing parameter (sets the bulk disc)")
      ->capture_default_str();
  gr_cmd->add_option("--eps-list", gr_o.eps_list, "sweep values; one subdirectory per value")
      ->delimiter(',');
  gr_cmd->add_option("--pairs", gr_o.pairs, "sample pair count")->capture_default_str();
  gr_cmd->add_option("--sources", gr_o.sources, "shared source count")->capture_default_str();
  gr_cmd->add_option("--n-base", gr_o.n_base, "base grid nodes per axis")->capture_default_str();
  gr_cmd->add_option("--tol", gr_o.tol, "solver tolerance")->capture_default_str();

  GpOpts gp_o;
  CLI::App* gp_cmd = app.add_subcommand("gp", "2D ground-state solve and vorticity extraction");
  add_common(gp_cmd, gp_o.c);
  gp_cmd->add_option("--eps", gp_o.eps, "smoothing parameter")->capture_default_str();
  gp_cmd->add_option("--eps-list", gp_o.eps_list, "sweep values; one subdirectory per value")
      ->delimiter(',');
  gp_cmd->add_option("--n", gp_o.n, "grid nodes per axis")->capture_default_str();
  gp_cmd->add_option("--extent", gp_o.extent, "half-width of the grid; 0 picks the working size")
      ->capture_default_str();
  gp_cmd->add_option("--starts", gp_o.starts, "multi-start count")->capture_default_str();
  gp_cmd->add_option("--max-steps", gp_o.max_steps, "flow step cap per start")
      ->capture_default_str();
  gp_cmd->add_option("--bins", gp_o.bins, "radial vorticity bins")->capture_default_str();

  CompareOpts cp_o;
  CLI::App* cp_cmd =
      app.add_subcommand("compare", "weighted gap between a gp run and a mustar run");
  cp_cmd->add_option("--gp", cp_o.gp_dir, "directory of a prior gp run")->required();
  cp_cmd->add_option("--mustar", cp_o.mustar_dir, "directory of a prior mustar run")->required();
  cp_cmd->add_option("--out", cp_o.out, "output directory (default: $VORTEXLAB_OUT or '.')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (tf_o.c.out.empty()) tf_o.c.out = default_out();
    if (mu_o.c.out.empty()) mu_o.c.out = default_out();
    if (rn_o.c.out.empty()) rn_o.c.out = default_out();
    if (la_o.c.out.empty()) la_o.c.out = default_out();
    if (gr_o.c.out.empty()) gr_o.c.out = default_out();
    if (gp_o.c.out.empty()) gp_o.c.out = default_out();
    if (cp_o.out.empty()) cp_o.out = default_out();
    if (*tf_cmd) run_tf(tf_o);
    if (*mu_cmd) run_mustar(mu_o);
    if (*rn_cmd) run_renorm_min(rn_o);
    if (*la_cmd) run_lattice(la_o);
    if (*gr_cmd) run_green(gr_o);
    if (*gp_cmd) run_gp(gp_o);
    if (*cp_cmd) run_compare(cp_o);
  } catch (const ValidationError& e) {
    std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << json{{"error", {{"type", "convergence"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  } catch (const MissingInputError& e) {
    std::cerr << json{{"error", {{"type", "missing-input"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 4;
  }
  return 0;
}
