#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochgm/gm_model.hpp"
#include "stochgm/rng.hpp"

namespace stochgm::cli {

struct RunConfig {
  std::string subcommand;
  std::filesystem::path out = "stochgm-out";
  std::uint64_t seed = kDefaultSeed;
  int jobs = 0;
  Engine engine = Engine::temporal;

  std::filesystem::path manifest;
  std::filesystem::path compare;      // stats: second catalog
  bool simulate_compare = false;      // stats: simulate the second catalog from its params
  std::filesystem::path input;        // convert / spectrum
  std::string format;                 // convert target: csv | at2
  std::filesystem::path model;        // sample-params: load instead of fit
  std::size_t n = 0;                  // 0: subcommand default
  std::optional<std::string> fc_grid; // lo:hi:step
  std::size_t mc = 100;
  std::optional<std::string> periods; // lo:hi:count
  std::optional<std::string> match;   // lo:hi:count
  std::optional<double> dt;
  std::optional<double> fc;
  std::optional<double> t_total;
  double damping = 0.05;
  bool write_csv = false;
  std::vector<std::string> families;  // column=family
};

/// Collects output paths and summary values for the run log.
struct RunLog {
  nlohmann::json outputs = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  void add_output(const std::filesystem::path& p) { outputs.push_back(p.string()); }
};

void cmd_convert(const RunConfig& cfg, RunLog& log);
void cmd_simulate(const RunConfig& cfg, RunLog& log);
void cmd_spectrum(const RunConfig& cfg, RunLog& log);
void cmd_fit_fc(const RunConfig& cfg, RunLog& log);
void cmd_stats(const RunConfig& cfg, RunLog& log);
void cmd_sensitivity(const RunConfig& cfg, RunLog& log);
void cmd_sample_params(const RunConfig& cfg, RunLog& log);

/// "lo:hi:x" with three numeric fields.
std::array<double, 3> parse_triplet(const std::string& text, const std::string& flag);

}  // namespace stochgm::cli
