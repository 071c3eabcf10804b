#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stochgm/params.hpp"

namespace stochgm {

struct RecordMeta {
  std::string event;
  std::optional<double> magnitude;
  std::optional<double> distance_km;
  std::optional<double> vs30_mps;
  /// Externally supplied corner frequency (flat-file value, prediction
  /// equation, constant baseline ...). Never computed here.
  std::optional<double> source_fc_hz;
};

/// Uniformly sampled ground acceleration in units of g.
struct AccelerogramRecord {
  std::string id;
  double dt = 0.0;
  std::vector<double> accel_g;
  RecordMeta meta;

  double duration() const { return dt * static_cast<double>(accel_g.size() - 1); }
  void validate() const;
};

/// Parses a PEER NGA AT2 file. Accepts both header spellings
/// "NPTS=  n, DT= x SEC" and "n  x  NPTS, DT".
AccelerogramRecord parse_at2(std::string_view raw_text, std::string id = {});

/// AT2 text with 7 significant digits, five values per line.
std::string write_at2(const AccelerogramRecord& record, std::string_view title = {});

AccelerogramRecord read_at2_file(const std::filesystem::path& path);

/// g -> m/s^2. The only unit conversion in the library.
std::vector<double> to_si(std::span<const double> accel_g);

// ---------------------------------------------------------------------------
// Manifest
//
//   # comment
//   [entry]
//   id          = RSN1517
//   record      = records/RSN1517_CHICHI_TCU.AT2   (relative to the manifest)
//   params_file = params/RSN1517.txt                (optional, key = value)
//   log_ai = -0.72      d595 = 23.1    t_mid = 18.4    t_total = 60
//   omega_mid = 18.8    omega_rate = -0.09    zeta_f = 0.31
//   fc_hz = 0.54                                    (optional model f_c)
//   source_fc_hz = 0.1                              (optional baseline f_c)
//   event = Chi-Chi     magnitude = 7.62   distance_km = 45   vs30_mps = 620
//
// One key per line. Inline keys override keys from params_file.
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string id;
  std::optional<std::filesystem::path> record_path;  // resolved, absolute
  std::optional<GMParams> params;                    // fc_hz = 0 if not given
  std::optional<double> fc_hz;
  RecordMeta meta;
};

struct CatalogManifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;
};

CatalogManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
CatalogManifest read_manifest(const std::filesystem::path& manifest_path);
std::string write_manifest(const CatalogManifest& manifest);

struct CatalogEntry {
  std::string id;
  std::optional<AccelerogramRecord> record;
  std::vector<double> accel;  // m/s^2, empty without a record
  std::optional<GMParams> params;
  std::optional<double> fc_hz;
  RecordMeta meta;

  double dt() const { return record ? record->dt : 0.0; }
  /// Model parameters; f_c is fc_hz when given, else 0. Throws without params.
  GMParams params_or_throw() const;
};

struct Catalog {
  std::vector<CatalogEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

/// Loads every record referenced by the manifest; parse errors are
/// rethrown with the entry id. An empty manifest yields an empty catalog
/// and a logged warning.
Catalog load_catalog(const std::filesystem::path& manifest_path);
Catalog load_catalog(const CatalogManifest& manifest);

}  // namespace stochgm
