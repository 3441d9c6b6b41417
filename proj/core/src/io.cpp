/// @file io.cpp
/// @brief Atomic writes, hashing, and CSV render/parse.

#include "vortexlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vortexlab/errors.hpp"

namespace vtx {

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw MissingInputError("write_text_atomic: cannot open " + tmp);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw MissingInputError("write_text_atomic: short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw MissingInputError("write_text_atomic: rename failed: " + ec.message());
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingInputError("file_hash: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return fnv1a(ss.str());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw ValidationError("render_csv: row width mismatch");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += fmt_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MissingInputError("read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("read_csv: empty file " + path);
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.columns.push_back(cell);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw ValidationError("read_csv: bad number '" + cell + "' in " + path);
      }
      if (pos != cell.size()) {
        throw ValidationError("read_csv: trailing junk '" + cell + "' in " + path);
      }
      row.push_back(v);
    }
    if (row.size() != table.columns.size()) {
      throw ValidationError("read_csv: ragged row in " + path);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ============================================================================
// Module-owned formats.
// ============================================================================

CsvTable profile_table(const TfModel& model, const CostProfile& profile) {
  CsvTable t;
  t.columns = {"r", "rho_tf", "f_tf", "h_tf"};
  t.rows.reserve(profile.grid.size());
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    const double r = profile.grid[i];
    t.rows.push_back({r, rho_tf(model, r), profile.f_tf[i], profile.h_tf[i]});
  }
  return t;
}

CsvTable density_table(const VortexDensity& density) {
  CsvTable t;
  t.columns = {"r", "m_star", "mu_star"};
  t.rows.reserve(density.grid.size());
  for (std::size_t i = 0; i < density.grid.size(); ++i) {
    t.rows.push_back({density.grid[i], density.m_star[i], density.mu_star[i]});
  }
  return t;
}

CsvTable measure_table(const RadialMeasure& nu, const PotentialH& h) {
  if (nu.grid.n != h.grid.n) throw ValidationError("measure_table: grid mismatch");
  CsvTable t;
  t.columns = {"r", "nu", "h_nu"};
  t.rows.reserve(nu.density.size());
  for (std::size_t i = 0; i < nu.density.size(); ++i) {
    t.rows.push_back({nu.grid.r[i], nu.density[i], h.h[i]});
  }
  return t;
}

CsvTable lattice_table(const VortexLattice& lattice) {
  CsvTable t;
  t.columns = {"x", "y", "k"};
  t.rows.reserve(lattice.points.size());
  std::size_t p = 0;
  for (const auto& circle : lattice.circles) {
    for (int i = 0; i < circle.n_k && p < lattice.points.size(); ++i, ++p) {
      t.rows.push_back(
          {lattice.points[p][0], lattice.points[p][1], static_cast<double>(circle.k)});
    }
  }
  return t;
}

CsvTable vortex_table(const std::vector<Vortex>& vortices) {
  CsvTable t;
  t.columns = {"x", "y", "winding"};
  t.rows.reserve(vortices.size());
  for (const auto& v : vortices) {
    t.rows.push_back({v.position[0], v.position[1], static_cast<double>(v.winding)});
  }
  return t;
}

CsvTable radial_mu_table(const VorticityResult& result, const VortexDensity& density,
                         const TfModel& model, double omega0) {
  CsvTable t;
  t.columns = {"r", "mu_avg", "mu_star"};
  const SupportRadii radii{density.r1, density.r2, density.r_star};
  t.rows.reserve(result.bin_r.size());
  for (std::size_t b = 0; b < result.bin_r.size(); ++b) {
    t.rows.push_back({result.bin_r[b], result.radial_mu[b],
                      mu_star_density(model, omega0, radii, result.bin_r[b])});
  }
  return t;
}

}  // namespace vtx
