#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "stochgm/error.hpp"
#include "stochgm/parallel.hpp"

namespace fs = std::filesystem;
using namespace stochgm;
using namespace stochgm::cli;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("stochgm");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("STOCHGM_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honor it when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j = {{"subcommand", c.subcommand},
                      {"out", c.out.string()},
                      {"seed", c.seed},
                      {"jobs", jobs()},
                      {"engine", std::string(to_string(c.engine))},
                      {"damping", c.damping},
                      {"mc", c.mc},
                      {"n", c.n}};
  auto opt_path = [&](const char* key, const fs::path& p) {
    if (!p.empty()) j[key] = p.string();
  };
  opt_path("manifest", c.manifest);
  opt_path("compare", c.compare);
  opt_path("input", c.input);
  opt_path("model", c.model);
  if (c.simulate_compare) j["simulate_compare"] = true;
  if (!c.format.empty()) j["to"] = c.format;
  if (c.fc_grid) j["fc_grid"] = *c.fc_grid;
  if (c.periods) j["periods"] = *c.periods;
  if (c.match) j["match_periods"] = *c.match;
  if (c.dt) j["dt"] = *c.dt;
  if (c.fc) j["fc"] = *c.fc;
  if (c.t_total) j["t_total"] = *c.t_total;
  if (!c.families.empty()) j["families"] = c.families;
  return j;
}

void write_run_log(const fs::path& dir, const nlohmann::json& j) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "run_log.json");
  if (!out) {
    spdlog::error("cannot write run log to {}", (dir / "run_log.json").string());
    return;
  }
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  RunConfig cfg;
  std::string engine = "temporal";

  CLI::App app{"Site-based stochastic ground-motion simulation with a fitted high-pass corner frequency"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--seed", cfg.seed, "Master random seed");
  app.add_option("--jobs", cfg.jobs, "Worker threads (0: all cores)");
  app.add_option("--engine", engine, "Simulation engine")->check(CLI::IsMember({"temporal", "spectral"}));
  app.add_option("--damping", cfg.damping, "SDOF damping ratio");

  auto* convert = app.add_subcommand("convert", "Convert between AT2 and CSV");
  convert->add_option("--input", cfg.input, "AT2 or CSV file");
  convert->add_option("--manifest", cfg.manifest, "Convert every record of a catalog");
  convert->add_option("--to", cfg.format, "Target format")->check(CLI::IsMember({"csv", "at2"}));

  auto* simulate = app.add_subcommand("simulate", "Simulate motions for every catalog entry");
  simulate->add_option("--manifest", cfg.manifest, "Catalog manifest")->required();
  simulate->add_option("--n", cfg.n, "Realizations per entry (default 1)");
  simulate->add_option("--dt", cfg.dt, "Time step (default: record dt or 0.01 s)");
  simulate->add_option("--fc", cfg.fc, "Override the corner frequency (Hz)");
  simulate->add_option("--t-total", cfg.t_total, "Override the duration (s)");
  simulate->add_flag("--csv", cfg.write_csv, "Also write CSV time series");

  auto* spectrum = app.add_subcommand("spectrum", "Response spectra of records or simulated batches");
  spectrum->add_option("--input", cfg.input, "AT2 record or .sgmb batch");
  spectrum->add_option("--manifest", cfg.manifest, "Catalog manifest");
  spectrum->add_option("--periods", cfg.periods, "lo:hi:count, log-spaced");

  auto* fit = app.add_subcommand("fit-fc", "Fit the high-pass corner frequency per record");
  fit->add_option("--manifest", cfg.manifest, "Catalog manifest")->required();
  fit->add_option("--fc-grid", cfg.fc_grid, "lo:hi:step in Hz (default 0:2:0.01)");
  fit->add_option("--mc", cfg.mc, "Monte Carlo realizations per grid point");
  fit->add_option("--match-periods", cfg.match, "lo:hi:count in s (default 1:10:30)");

  auto* stats = app.add_subcommand("stats", "Quantiles, dispersion and correlation of ln Sa");
  stats->add_option("--manifest", cfg.manifest, "Catalog manifest")->required();
  stats->add_option("--compare", cfg.compare, "Second catalog to compare against");
  stats->add_flag("--simulate-compare", cfg.simulate_compare, "Simulate the second catalog from its parameters");
  stats->add_option("--n", cfg.n, "Realizations per simulated entry (default 1)");
  stats->add_option("--periods", cfg.periods, "lo:hi:count, log-spaced");
  stats->add_option("--fc", cfg.fc, "Corner frequency for simulated entries (Hz)");

  auto* sens = app.add_subcommand("sensitivity", "Regression sensitivity of ln Sa to the model inputs");
  sens->add_option("--manifest", cfg.manifest, "Catalog manifest")->required();
  sens->add_option("--periods", cfg.periods, "lo:hi:count, log-spaced");

  auto* sample = app.add_subcommand("sample-params", "Fit a joint parameter model and sample from it");
  sample->add_option("--manifest", cfg.manifest, "Catalog with parameters to fit");
  sample->add_option("--model", cfg.model, "Joint model JSON to sample instead of fitting");
  sample->add_option("--n", cfg.n, "Number of samples (default 100)");
  sample->add_option("--t-total", cfg.t_total, "Duration for the sampled manifest (s)");
  sample->add_option("--family", cfg.families, "Marginal override, column=family");

  nlohmann::json log_json;
  log_json["argv"] = std::vector<std::string>(argv, argv + argc);
  RunLog run;
  int code = 0;
  const auto start = std::chrono::steady_clock::now();

  auto fail = [&](int exit_code, const std::string& kind, const std::string& name, const std::string& msg) {
    spdlog::error("{}", msg);
    log_json["status"] = "error";
    log_json["error"] = {{"kind", kind}, {"code", name}, {"message", msg}};
    code = exit_code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << '\n';
    fail(1, "usage", e.get_name(), e.what());
    log_json["config"] = config_json(cfg);
    write_run_log(cfg.out, log_json);
    return code;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    cfg.engine = engine_from_string(engine);
    set_jobs(cfg.jobs);
    if (cfg.subcommand == "convert") cmd_convert(cfg, run);
    else if (cfg.subcommand == "simulate") cmd_simulate(cfg, run);
    else if (cfg.subcommand == "spectrum") cmd_spectrum(cfg, run);
    else if (cfg.subcommand == "fit-fc") cmd_fit_fc(cfg, run);
    else if (cfg.subcommand == "stats") cmd_stats(cfg, run);
    else if (cfg.subcommand == "sensitivity") cmd_sensitivity(cfg, run);
    else if (cfg.subcommand == "sample-params") cmd_sample_params(cfg, run);
    log_json["status"] = "ok";
  } catch (const Error& e) {
    const int exit_code = e.kind() == ErrorKind::usage ? 1 : e.kind() == ErrorKind::data ? 2 : 3;
    const char* kind = exit_code == 1 ? "usage" : exit_code == 2 ? "data" : "numerical";
    fail(exit_code, kind, to_string(e.code()), e.what());
  } catch (const fs::filesystem_error& e) {
    fail(2, "data", "io_error", e.what());
  } catch (const std::exception& e) {
    fail(3, "numerical", "internal", e.what());
  }

  log_json["config"] = config_json(cfg);
  log_json["outputs"] = run.outputs;
  log_json["summary"] = run.summary;
  log_json["elapsed_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_log(cfg.out, log_json);
  return code;
}
