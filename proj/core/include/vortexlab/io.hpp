/// @file io.hpp
/// @brief Deterministic artifact IO: atomic text writes, content hashing, and
///        the CSV formats owned by the computation modules.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vortexlab/gpflow.hpp"
#include "vortexlab/lattice.hpp"
#include "vortexlab/mustar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/tf.hpp"

namespace vtx {

/// Writes content to path via a sibling temp file and rename, so readers
/// never observe a partial file. Throws MissingInputError on IO failure.
void write_text_atomic(const std::string& path, const std::string& content);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a(const std::string& bytes);

/// FNV-1a 64-bit hash of a file's contents. Throws MissingInputError.
std::uint64_t file_hash(const std::string& path);

/// Hash rendered as 16 lowercase hex digits.
std::string hash_hex(std::uint64_t h);

/// Formats a double with round-trip precision (%.17g).
std::string fmt_double(double v);

/// Generic numeric CSV: one header line, then comma-separated doubles.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Renders a table; every row must match the header width.
std::string render_csv(const CsvTable& table);

/// Parses a table written by render_csv. Throws ValidationError on malformed
/// input, MissingInputError if the file cannot be read.
CsvTable read_csv(const std::string& path);

// ============================================================================
// Module-owned formats.
// ============================================================================

/// `r,rho_tf,f_tf,h_tf` for a sampled cost profile.
CsvTable profile_table(const TfModel& model, const CostProfile& profile);

/// `r,m_star,mu_star` for the predicted vortex density.
CsvTable density_table(const VortexDensity& density);

/// `r,nu,h_nu` for a radial measure and its potential.
CsvTable measure_table(const RadialMeasure& nu, const PotentialH& h);

/// `x,y,k` for the lattice point configuration (ring index per point).
CsvTable lattice_table(const VortexLattice& lattice);

/// `x,y,winding` for detected vortices.
CsvTable vortex_table(const std::vector<Vortex>& vortices);

/// `r,mu_avg,mu_star` for binned vorticity against the prediction at the
/// same bin centers.
CsvTable radial_mu_table(const VorticityResult& result, const VortexDensity& density,
                         const TfModel& model, double omega0);

}  // namespace vtx
