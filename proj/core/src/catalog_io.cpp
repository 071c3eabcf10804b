#include "stochgm/catalog_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "stochgm/error.hpp"
#include "stochgm/types.hpp"

namespace stochgm {
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

double parse_double(std::string_view token, bool* ok) {
  // strtod accepts Fortran-style ".1234E-02" and a leading '+'; the
  // double-precision exponent letter D is mapped to E first.
  std::string buf(token);
  for (auto& c : buf) {
    if (c == 'D' || c == 'd') c = 'E';
  }
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  *ok = end != buf.c_str() && *end == '\0';
  return v;
}

struct At2Header {
  std::size_t npts = 0;
  double dt = 0.0;
};

At2Header parse_at2_header(std::string_view line) {
  const std::string s(line);
  static const std::regex kNew(R"(NPTS\s*=\s*([0-9]+)\s*,?\s*DT\s*=\s*([-+0-9.eEdD]+))",
                               std::regex::icase);
  static const std::regex kOld(R"(^\s*([0-9]+)\s+([-+0-9.eEdD]+)\s+NPTS\s*,?\s*DT)",
                               std::regex::icase);
  std::smatch m;
  if (!std::regex_search(s, m, kNew) && !std::regex_search(s, m, kOld)) {
    throw Error(Errc::malformed_header, "cannot locate NPTS and DT in \"" + s + "\"");
  }
  At2Header h;
  h.npts = static_cast<std::size_t>(std::stoull(m[1].str()));
  std::string dt = m[2].str();
  for (char& c : dt) {
    if (c == 'd' || c == 'D') c = 'E';
  }
  bool ok = false;
  h.dt = parse_double(dt, &ok);
  if (!ok || !(h.dt > 0.0) || !std::isfinite(h.dt)) {
    throw Error(Errc::malformed_header, "invalid DT \"" + m[2].str() + "\"");
  }
  return h;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

void AccelerogramRecord::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(Errc::invalid_argument, "record " + id + ": dt must be positive");
  }
  if (accel_g.size() < 2) {
    throw Error(Errc::invalid_argument, "record " + id + ": needs at least 2 samples");
  }
  for (std::size_t i = 0; i < accel_g.size(); ++i) {
    if (!std::isfinite(accel_g[i])) {
      throw Error(Errc::non_finite_sample,
                  "record " + id + ": sample " + std::to_string(i) + " is not finite");
    }
  }
}

AccelerogramRecord parse_at2(std::string_view raw_text, std::string id) {
  const auto lines = split_lines(raw_text);
  if (lines.size() < 4) {
    throw Error(Errc::malformed_header, "AT2 text has fewer than 4 header lines");
  }
  const At2Header header = parse_at2_header(lines[3]);

  AccelerogramRecord rec;
  rec.id = std::move(id);
  rec.dt = header.dt;
  rec.meta.event = std::string(trim(lines[1]));
  rec.accel_g.reserve(header.npts);

  for (std::size_t li = 4; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      bool ok = false;
      const double v = parse_double(line.substr(pos, end - pos), &ok);
      if (!ok) {
        throw Error(Errc::non_finite_sample, "unparseable value \"" +
                                                 std::string(line.substr(pos, end - pos)) +
                                                 "\" on line " + std::to_string(li + 1));
      }
      if (!std::isfinite(v)) {
        throw Error(Errc::non_finite_sample,
                    "sample " + std::to_string(rec.accel_g.size()) + " is not finite");
      }
      rec.accel_g.push_back(v);
      pos = end;
    }
  }
  if (rec.accel_g.size() != header.npts) {
    throw Error(Errc::count_mismatch, "header declares NPTS=" + std::to_string(header.npts) +
                                          " but " + std::to_string(rec.accel_g.size()) +
                                          " values were found");
  }
  rec.validate();
  return rec;
}

std::string write_at2(const AccelerogramRecord& record, std::string_view title) {
  std::string out;
  out.reserve(record.accel_g.size() * 16 + 256);
  out += "PEER NGA STRONG MOTION DATABASE RECORD\n";
  out += title.empty() ? (record.meta.event.empty() ? record.id : record.meta.event)
                       : std::string(title);
  out += '\n';
  out += "ACCELERATION TIME SERIES IN UNITS OF G\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "NPTS=%7zu, DT= %.10g SEC\n", record.accel_g.size(), record.dt);
  out += buf;
  for (std::size_t i = 0; i < record.accel_g.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%15.6E", record.accel_g[i]);
    out += buf;
    if (i % 5 == 4 || i + 1 == record.accel_g.size()) out += '\n';
  }
  return out;
}

AccelerogramRecord read_at2_file(const fs::path& path) {
  return parse_at2(read_text(path), path.stem().string());
}

std::vector<double> to_si(std::span<const double> accel_g) {
  std::vector<double> out(accel_g.size());
  for (std::size_t i = 0; i < accel_g.size(); ++i) out[i] = accel_g[i] * kGravity;
  return out;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace {

using KeyValues = std::map<std::string, std::string>;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "id",        "record",     "params_file", "log_ai",      "d595",
      "t_mid",     "omega_mid",  "omega_rate",  "zeta_f",      "fc_hz",
      "t_total",   "event",      "magnitude",   "distance_km", "vs30_mps",
      "source_fc_hz"};
  return keys;
}

void parse_key_value(std::string_view line, std::size_t lineno, KeyValues& kv,
                     const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw Error(Errc::manifest_error,
                where + " line " + std::to_string(lineno) + ": expected key = value");
  }
  std::string key(trim(line.substr(0, eq)));
  std::string value(trim(line.substr(eq + 1)));
  if (!known_keys().count(key)) {
    throw Error(Errc::manifest_error,
                where + " line " + std::to_string(lineno) + ": unknown key \"" + key + "\"");
  }
  kv[key] = value;
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

KeyValues read_params_file(const fs::path& path) {
  KeyValues kv;
  const std::string text = read_text(path);
  std::size_t lineno = 0;
  for (auto raw : split_lines(text)) {
    ++lineno;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    parse_key_value(line, lineno, kv, path.string());
  }
  return kv;
}

std::optional<double> number(const KeyValues& kv, const std::string& key, const std::string& id) {
  const auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  bool ok = false;
  const double v = parse_double(it->second, &ok);
  if (!ok || !std::isfinite(v)) {
    throw Error(Errc::manifest_error,
                "entry " + id + ": \"" + key + "\" is not a number: " + it->second);
  }
  return v;
}

ManifestEntry build_entry(KeyValues kv, const fs::path& base_dir, std::size_t index) {
  ManifestEntry e;
  const auto id_it = kv.find("id");
  if (id_it == kv.end() || id_it->second.empty()) {
    throw Error(Errc::manifest_error, "entry #" + std::to_string(index + 1) + " has no id");
  }
  e.id = id_it->second;

  if (auto it = kv.find("params_file"); it != kv.end()) {
    fs::path p = it->second;
    if (p.is_relative()) p = base_dir / p;
    KeyValues from_file;
    try {
      from_file = read_params_file(p);
    } catch (const Error& err) {
      rethrow_with_context(err, "entry " + e.id);
    }
    for (auto& [k, v] : from_file) kv.try_emplace(k, v);
  }
  if (auto it = kv.find("record"); it != kv.end()) {
    fs::path p = it->second;
    if (p.is_relative()) p = base_dir / p;
    e.record_path = p.lexically_normal();
  }

  static const char* kCore[] = {"log_ai", "d595", "t_mid", "omega_mid", "omega_rate", "zeta_f"};
  std::size_t present = 0;
  for (const char* k : kCore) present += kv.count(k);
  if (present > 0) {
    if (present != std::size(kCore)) {
      throw Error(Errc::manifest_error,
                  "entry " + e.id +
                      ": model parameters need all of log_ai, d595, t_mid, omega_mid, "
                      "omega_rate, zeta_f");
    }
    GMParams p;
    p.log_ai = *number(kv, "log_ai", e.id);
    p.d595 = *number(kv, "d595", e.id);
    p.t_mid = *number(kv, "t_mid", e.id);
    p.omega_mid = *number(kv, "omega_mid", e.id);
    p.omega_rate = *number(kv, "omega_rate", e.id);
    p.zeta_f = *number(kv, "zeta_f", e.id);
    p.t_total = number(kv, "t_total", e.id).value_or(0.0);
    e.params = p;
  }
  e.fc_hz = number(kv, "fc_hz", e.id);
  if (e.fc_hz && e.params) e.params->fc_hz = *e.fc_hz;

  if (auto it = kv.find("event"); it != kv.end()) e.meta.event = it->second;
  e.meta.magnitude = number(kv, "magnitude", e.id);
  e.meta.distance_km = number(kv, "distance_km", e.id);
  e.meta.vs30_mps = number(kv, "vs30_mps", e.id);
  e.meta.source_fc_hz = number(kv, "source_fc_hz", e.id);
  return e;
}

}  // namespace

CatalogManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
  CatalogManifest manifest;
  manifest.base_dir = base_dir;
  std::optional<KeyValues> current;
  std::set<std::string> ids;

  auto flush = [&] {
    if (!current) return;
    auto entry = build_entry(std::move(*current), base_dir, manifest.entries.size());
    if (!ids.insert(entry.id).second) {
      throw Error(Errc::manifest_error, "duplicate entry id \"" + entry.id + "\"");
    }
    manifest.entries.push_back(std::move(entry));
    current.reset();
  };

  std::size_t lineno = 0;
  for (auto raw : split_lines(text)) {
    ++lineno;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    if (line == "[entry]") {
      flush();
      current.emplace();
      continue;
    }
    if (!current) {
      throw Error(Errc::manifest_error,
                  "line " + std::to_string(lineno) + ": key outside of an [entry] block");
    }
    parse_key_value(line, lineno, *current, "manifest");
  }
  flush();
  return manifest;
}

CatalogManifest read_manifest(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) {
    throw Error(Errc::io_error, "manifest not found: " + manifest_path.string());
  }
  const auto base = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
  return parse_manifest(read_text(manifest_path), fs::absolute(base));
}

std::string write_manifest(const CatalogManifest& manifest) {
  std::ostringstream os;
  os.precision(10);
  os << "# stochgm catalog manifest\n";
  for (const auto& e : manifest.entries) {
    os << "\n[entry]\nid = " << e.id << '\n';
    if (e.record_path) {
      auto rel = e.record_path->lexically_relative(manifest.base_dir);
      os << "record = " << (rel.empty() ? e.record_path->string() : rel.string()) << '\n';
    }
    if (e.params) {
      const auto& p = *e.params;
      os << "log_ai = " << p.log_ai << "\nd595 = " << p.d595 << "\nt_mid = " << p.t_mid
         << "\nomega_mid = " << p.omega_mid << "\nomega_rate = " << p.omega_rate
         << "\nzeta_f = " << p.zeta_f << '\n';
      if (p.t_total > 0.0) os << "t_total = " << p.t_total << '\n';
    }
    if (e.fc_hz) os << "fc_hz = " << *e.fc_hz << '\n';
    if (!e.meta.event.empty()) os << "event = " << e.meta.event << '\n';
    if (e.meta.magnitude) os << "magnitude = " << *e.meta.magnitude << '\n';
    if (e.meta.distance_km) os << "distance_km = " << *e.meta.distance_km << '\n';
    if (e.meta.vs30_mps) os << "vs30_mps = " << *e.meta.vs30_mps << '\n';
    if (e.meta.source_fc_hz) os << "source_fc_hz = " << *e.meta.source_fc_hz << '\n';
  }
  return os.str();
}

GMParams CatalogEntry::params_or_throw() const {
  if (!params) throw Error(Errc::manifest_error, "entry " + id + " has no model parameters");
  GMParams p = *params;
  p.fc_hz = fc_hz.value_or(0.0);
  return p;
}

Catalog load_catalog(const CatalogManifest& manifest) {
  Catalog catalog;
  if (manifest.entries.empty()) {
    spdlog::warn("manifest has no entries; catalog is empty");
    return catalog;
  }
  catalog.entries.reserve(manifest.entries.size());
  for (const auto& m : manifest.entries) {
    CatalogEntry e;
    e.id = m.id;
    e.params = m.params;
    e.fc_hz = m.fc_hz;
    e.meta = m.meta;
    if (m.record_path) {
      if (!fs::exists(*m.record_path)) {
        throw Error(Errc::io_error,
                    "entry " + m.id + ": record file not found: " + m.record_path->string());
      }
      try {
        auto rec = read_at2_file(*m.record_path);
        rec.id = m.id;
        if (!m.meta.event.empty()) rec.meta.event = m.meta.event;
        rec.meta.magnitude = m.meta.magnitude;
        rec.meta.distance_km = m.meta.distance_km;
        rec.meta.vs30_mps = m.meta.vs30_mps;
        rec.meta.source_fc_hz = m.meta.source_fc_hz;
        e.accel = to_si(rec.accel_g);
        e.record = std::move(rec);
      } catch (const Error& err) {
        rethrow_with_context(err, "entry " + m.id);
      }
      if (e.params && e.params->t_total <= 0.0) e.params->t_total = e.record->duration();
    }
    if (e.params) {
      if (e.params->t_total <= 0.0) {
        throw Error(Errc::manifest_error,
                    "entry " + m.id + ": t_total is required when no record is given");
      }
      try {
        e.params_or_throw().validate();
      } catch (const Error& err) {
        throw Error(Errc::manifest_error, "entry " + m.id + ": " + err.what());
      }
    }
    catalog.entries.push_back(std::move(e));
  }
  return catalog;
}

Catalog load_catalog(const fs::path& manifest_path) {
  return load_catalog(read_manifest(manifest_path));
}

}  // namespace stochgm
