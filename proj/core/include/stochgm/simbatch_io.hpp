#pragma once

#include <filesystem>
#include <iosfwd>

#include "stochgm/gm_model.hpp"
#include "stochgm/resp_spectrum.hpp"

namespace stochgm {

// Columnar SimBatch file, little-endian:
//
//   char[8]   magic "SGMBATCH"
//   uint32    version (1)
//   uint32    engine (0 temporal, 1 spectral)
//   uint64    n (realizations)
//   uint64    m (samples per realization)
//   float64   dt
//   uint64    seed
//   float64   log_ai, d595, t_mid, omega_mid, omega_rate, zeta_f, fc_hz, t_total
//   float64   data[m][n]   (time-step major: column j holds sample j of every row)

void write_simbatch(std::ostream& out, const SimBatch& batch);
SimBatch read_simbatch(std::istream& in);
void save_simbatch(const std::filesystem::path& path, const SimBatch& batch);
SimBatch load_simbatch(const std::filesystem::path& path);

/// CSV with a `t_s` column followed by one column per realization (m/s^2).
void write_simbatch_csv(std::ostream& out, const SimBatch& batch);

/// "# damping=0.05" line, then `T_s,Sa_g`.
void write_spectrum_csv(std::ostream& out, const ResponseSpectrum& spectrum);

}  // namespace stochgm
