#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "stochgm/catalog_io.hpp"
#include "stochgm/catalog_stats.hpp"
#include "stochgm/error.hpp"
#include "stochgm/fc_opt.hpp"
#include "stochgm/param_dist.hpp"
#include "stochgm/resp_spectrum.hpp"
#include "stochgm/sensitivity.hpp"
#include "stochgm/simbatch_io.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace stochgm::cli {
namespace {

constexpr double kCorrelationAnchors[] = {0.1, 0.5, 1.0, 4.0};

std::ofstream open_out(const fs::path& path, RunLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out.precision(10);
  log.add_output(path);
  return out;
}

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) {
    throw Error(Errc::io_error, "cannot create output directory " + cfg.out.string());
  }
}

std::vector<double> period_grid(const RunConfig& cfg) {
  if (!cfg.periods) return standard_period_grid();
  const auto t = parse_triplet(*cfg.periods, "--periods");
  if (t[2] < 1.0 || t[2] != std::floor(t[2])) {
    throw Error(Errc::invalid_argument, "--periods count must be a positive integer");
  }
  return log_spaced(t[0], t[1], static_cast<std::size_t>(t[2]));
}

/// The grid with the correlation anchor periods merged in.
std::vector<double> with_anchors(std::vector<double> periods) {
  for (double a : kCorrelationAnchors) {
    const bool present = std::any_of(periods.begin(), periods.end(),
                                     [&](double p) { return std::abs(p - a) < 1e-9 * a; });
    if (!present) periods.push_back(a);
  }
  std::sort(periods.begin(), periods.end());
  return periods;
}

std::size_t index_of(const std::vector<double>& periods, double t) {
  return static_cast<std::size_t>(
      std::min_element(periods.begin(), periods.end(),
                       [&](double a, double b) { return std::abs(a - t) < std::abs(b - t); }) -
      periods.begin());
}

Catalog load_nonempty(const fs::path& manifest) {
  if (manifest.empty()) throw Error(Errc::invalid_argument, "--manifest is required");
  auto cat = load_catalog(manifest);
  if (cat.empty()) throw Error(Errc::manifest_error, "catalog " + manifest.string() + " is empty");
  return cat;
}

GMParams entry_params(const CatalogEntry& e, const RunConfig& cfg) {
  GMParams p = e.params_or_throw();
  if (cfg.fc) p.fc_hz = *cfg.fc;
  if (cfg.t_total) p.t_total = *cfg.t_total;
  return p;
}

double entry_dt(const CatalogEntry& e, const RunConfig& cfg) {
  if (cfg.dt) return *cfg.dt;
  return e.record ? e.dt() : 0.01;
}

std::string csv_row(std::initializer_list<double> values) {
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << v;
    first = false;
  }
  return os.str();
}

/// ln Sa rows for a catalog: recorded motions where present, otherwise
/// `reps` simulations from the entry parameters. `simulate_all` ignores
/// the records.
SpectraMatrix catalog_spectra(const Catalog& cat, const RunConfig& cfg, const std::vector<double>& periods,
                              bool simulate_all, std::size_t reps, std::uint64_t lane) {
  std::vector<Eigen::RowVectorXd> rows;
  SpectraMatrix sm;
  sm.periods = periods;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto& e = cat.entries[i];
    try {
      if (e.record && !simulate_all) {
        const RowMatrix a = Eigen::Map<const RowMatrix>(e.accel.data(), 1, static_cast<Eigen::Index>(e.accel.size()));
        rows.push_back(log_sa_rows(a, e.dt(), periods, cfg.damping).row(0));
        sm.ids.push_back(e.id);
        continue;
      }
      const auto p = entry_params(e, cfg);
      const auto batch =
          simulate_motions(p, entry_dt(e, cfg), reps, substream_seed(cfg.seed, i, lane), cfg.engine);
      const RowMatrix y = batch_log_sa(batch, periods, cfg.damping);
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        rows.push_back(y.row(r));
        sm.ids.push_back(reps == 1 ? e.id : e.id + "#" + std::to_string(r));
      }
    } catch (const Error& err) {
      rethrow_with_context(err, "entry " + e.id);
    }
  }
  sm.log_sa.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(periods.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) sm.log_sa.row(static_cast<Eigen::Index>(i)) = rows[i];
  return sm;
}

void write_matrix_csv(const fs::path& path, const std::vector<double>& periods, const Eigen::MatrixXd& m,
                      RunLog& log) {
  auto out = open_out(path, log);
  out << "T_s";
  for (double t : periods) out << ',' << t;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << periods[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << m(i, j);
    out << '\n';
  }
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::array<double, 3> parse_triplet(const std::string& text, const std::string& flag) {
  std::array<double, 3> out{};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const auto colon = text.find(':', pos);
    if ((k < 2) == (colon == std::string::npos)) {
      throw Error(Errc::invalid_argument, flag + " expects lo:hi:x, got \"" + text + "\"");
    }
    const std::string field = text.substr(pos, k < 2 ? colon - pos : std::string::npos);
    char* end = nullptr;
    out[static_cast<std::size_t>(k)] = std::strtod(field.c_str(), &end);
    if (field.empty() || *end != '\0') {
      throw Error(Errc::invalid_argument, flag + ": \"" + field + "\" is not a number");
    }
    pos = colon + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

void cmd_convert(const RunConfig& cfg, RunLog& log) {
  prepare_out(cfg);
  std::vector<fs::path> inputs;
  if (!cfg.input.empty()) inputs.push_back(cfg.input);
  if (!cfg.manifest.empty()) {
    for (const auto& e : read_manifest(cfg.manifest).entries) {
      if (e.record_path) inputs.push_back(*e.record_path);
    }
  }
  if (inputs.empty()) throw Error(Errc::invalid_argument, "convert needs --input or --manifest");

  for (const auto& in : inputs) {
    std::string ext = in.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    const std::string target = cfg.format.empty() ? (ext == ".csv" ? "at2" : "csv") : cfg.format;
    if (target == "csv") {
      const auto rec = read_at2_file(in);
      auto out = open_out(cfg.out / (in.stem().string() + ".csv"), log);
      out << "t_s,accel_g\n";
      for (std::size_t i = 0; i < rec.accel_g.size(); ++i) {
        out << rec.dt * static_cast<double>(i) << ',' << rec.accel_g[i] << '\n';
      }
    } else if (target == "at2") {
      std::ifstream f(in);
      if (!f) throw Error(Errc::io_error, "cannot open " + in.string());
      std::string line;
      std::getline(f, line);
      std::vector<double> t, a;
      std::size_t lineno = 1;
      while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        double tv = 0.0, av = 0.0;
        char comma = 0;
        std::istringstream ls(line);
        if (!(ls >> tv >> comma >> av) || comma != ',') {
          throw Error(Errc::non_finite_sample, in.string() + " line " + std::to_string(lineno) +
                                                   ": expected t_s,accel_g");
        }
        t.push_back(tv);
        a.push_back(av);
      }
      if (t.size() < 2) throw Error(Errc::count_mismatch, in.string() + " has fewer than 2 samples");
      AccelerogramRecord rec;
      rec.id = in.stem().string();
      rec.dt = t[1] - t[0];
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t[i] - t[i - 1] - rec.dt) > 1e-6 * rec.dt + 1e-12) {
          throw Error(Errc::malformed_header, in.string() + ": samples are not uniformly spaced");
        }
      }
      rec.accel_g = std::move(a);
      rec.validate();
      auto out = open_out(cfg.out / (rec.id + ".AT2"), log);
      out << write_at2(rec);
    } else {
      throw Error(Errc::invalid_argument, "--to must be csv or at2");
    }
  }
  log.summary["converted"] = inputs.size();
}

// ---------------------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, RunLog& log) {
  const auto cat = load_nonempty(cfg.manifest);
  prepare_out(cfg);
  const std::size_t n = cfg.n == 0 ? 1 : cfg.n;
  auto summary = open_out(cfg.out / "simulate_summary.csv", log);
  summary << "id,realization,arias_m_s,pga_g,d595_s,t_mid_s\n";
  nlohmann::json entries = nlohmann::json::array();

  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto& e = cat.entries[i];
    SimBatch batch;
    try {
      const auto p = entry_params(e, cfg);
      batch = simulate_motions(p, entry_dt(e, cfg), n, substream_seed(cfg.seed, i), cfg.engine);
    } catch (const Error& err) {
      rethrow_with_context(err, "entry " + e.id);
    }
    save_simbatch(cfg.out / (e.id + ".sgmb"), batch);
    log.add_output(cfg.out / (e.id + ".sgmb"));
    if (cfg.write_csv) {
      auto out = open_out(cfg.out / (e.id + ".csv"), log);
      write_simbatch_csv(out, batch);
    }
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t r = 0; r < batch.size(); ++r) {
      const auto row = batch.row(r);
      const auto sp = extract_simple_params(row, batch.dt);
      double pga = 0.0;
      for (double v : row) pga = std::max(pga, std::abs(v));
      summary << e.id << ',' << r << ',' << csv_row({sp.arias, pga / kGravity, sp.d595, sp.t_mid}) << '\n';
      sum += sp.arias;
      sum2 += sp.arias * sp.arias;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = n > 1 ? (sum2 - sum * mean) / static_cast<double>(n - 1) : 0.0;
    entries.push_back({{"id", e.id},
                       {"seed", batch.seed},
                       {"realizations", n},
                       {"samples", batch.length()},
                       {"dt", batch.dt},
                       {"fc_hz", batch.params.fc_hz},
                       {"arias_target_m_s", batch.params.arias()},
                       {"arias_mean_m_s", mean},
                       {"arias_se_m_s", std::sqrt(std::max(var, 0.0) / static_cast<double>(n))}});
    spdlog::info("{}: {} realizations, mean AI {:.4g} m/s (target {:.4g})", e.id, n, mean,
                 batch.params.arias());
  }
  log.summary["entries"] = entries;
}

// ---------------------------------------------------------------------------

void cmd_spectrum(const RunConfig& cfg, RunLog& log) {
  prepare_out(cfg);
  const auto periods = period_grid(cfg);
  std::size_t written = 0;

  auto record_spectrum = [&](const std::string& id, std::span<const double> accel_si, double dt) {
    const auto sp = compute_sa(accel_si, dt, periods, cfg.damping);
    if (sp.any_under_resolved()) {
      spdlog::warn("{}: periods shorter than 2 dt = {} s are under-resolved", id, 2.0 * dt);
    }
    auto out = open_out(cfg.out / (id + "_spectrum.csv"), log);
    write_spectrum_csv(out, sp);
    ++written;
  };

  if (!cfg.input.empty()) {
    if (cfg.input.extension() == ".sgmb") {
      const auto batch = load_simbatch(cfg.input);
      const RowMatrix y = batch_log_sa(batch, periods, cfg.damping);
      auto out = open_out(cfg.out / (cfg.input.stem().string() + "_spectra.csv"), log);
      out << "# Sa in g, damping=" << cfg.damping << "; one row per realization\nrealization";
      for (double t : periods) out << ",T" << t;
      out << '\n';
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        out << r;
        for (Eigen::Index j = 0; j < y.cols(); ++j) out << ',' << std::exp(y(r, j)) / kGravity;
        out << '\n';
      }
      ++written;
    } else {
      const auto rec = read_at2_file(cfg.input);
      record_spectrum(rec.id, to_si(rec.accel_g), rec.dt);
    }
  }
  if (!cfg.manifest.empty()) {
    const auto cat = load_nonempty(cfg.manifest);
    for (const auto& e : cat.entries) {
      if (!e.record) {
        spdlog::warn("{}: no record, skipped", e.id);
        continue;
      }
      record_spectrum(e.id, e.accel, e.dt());
    }
  }
  if (written == 0) throw Error(Errc::invalid_argument, "spectrum needs --input or a manifest with records");
  log.summary["spectra"] = written;
  log.summary["periods"] = periods.size();
}

// ---------------------------------------------------------------------------

void cmd_fit_fc(const RunConfig& cfg, RunLog& log) {
  const auto cat = load_nonempty(cfg.manifest);
  prepare_out(cfg);
  FcSearchConfig search;
  if (cfg.fc_grid) {
    const auto g = parse_triplet(*cfg.fc_grid, "--fc-grid");
    search.grid_lo = g[0];
    search.grid_hi = g[1];
    search.step = g[2];
  }
  if (cfg.match) {
    const auto m = parse_triplet(*cfg.match, "--match-periods");
    search.band_lo = m[0];
    search.band_hi = m[1];
    search.n_match_points = static_cast<std::size_t>(m[2]);
  }
  search.n_mc = cfg.mc;
  search.damping = cfg.damping;
  search.validate();

  std::vector<FcFit> fits;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto& e = cat.entries[i];
    if (!e.record) throw Error(Errc::manifest_error, "entry " + e.id + " has no record to fit");
    FcSearchConfig c = search;
    c.seed = substream_seed(cfg.seed, i);
    try {
      fits.push_back(optimize_fc(e.accel, e.dt(), e.params_or_throw(), c, cfg.engine));
    } catch (const Error& err) {
      rethrow_with_context(err, "entry " + e.id);
    }
    spdlog::info("{}: fc* = {:.2f} Hz (eps {:.3g})", e.id, fits.back().fc_star,
                 fits.back().epsilon[fits.back().index]);
  }

  auto table = open_out(cfg.out / "fc_fit.csv", log);
  table << "id,fc_star_hz,epsilon_min,source_fc_hz\n";
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto& e = cat.entries[i];
    table << e.id << ',' << fits[i].fc_star << ',' << fits[i].epsilon[fits[i].index] << ',';
    if (e.meta.source_fc_hz) table << *e.meta.source_fc_hz;
    table << '\n';
    rows.push_back({{"id", e.id}, {"fc_star_hz", fits[i].fc_star}});
  }

  auto curves = open_out(cfg.out / "epsilon_curves.csv", log);
  curves << "fc_hz";
  for (const auto& e : cat.entries) curves << ',' << e.id;
  curves << '\n';
  const auto& grid = fits.front().grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    curves << grid[k];
    for (const auto& f : fits) curves << ',' << f.epsilon[k];
    curves << '\n';
  }

  Panel panel{"Objective over the corner-frequency grid", "f_c (Hz)", "epsilon", false, false, {}, {}};
  for (std::size_t i = 0; i < cat.size() && i < 8; ++i) {
    panel.series.push_back({cat.entries[i].id, grid, fits[i].epsilon, false});
  }
  if (cat.size() > 8) spdlog::info("epsilon_curves.svg shows the first 8 of {} records", cat.size());
  write_svg(cfg.out / "epsilon_curves.svg", {panel}, 1, "f_c fit");
  log.add_output(cfg.out / "epsilon_curves.svg");

  // The same catalog with fc_hz set to the fitted values; record paths are
  // rewritten relative to the output directory.
  auto manifest = read_manifest(cfg.manifest);
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    manifest.entries[i].fc_hz = fits[i].fc_star;
    if (manifest.entries[i].params) manifest.entries[i].params->fc_hz = fits[i].fc_star;
  }
  manifest.base_dir = fs::absolute(cfg.out);
  auto fitted = open_out(cfg.out / "fitted_manifest.txt", log);
  fitted << write_manifest(manifest);

  log.summary["records"] = rows;
  log.summary["grid"] = {{"lo", search.grid_lo}, {"hi", search.grid_hi}, {"step", search.step}};
  log.summary["mc"] = search.n_mc;
}

// ---------------------------------------------------------------------------

void cmd_stats(const RunConfig& cfg, RunLog& log) {
  const auto cat = load_nonempty(cfg.manifest);
  prepare_out(cfg);
  const auto periods = with_anchors(period_grid(cfg));
  const std::size_t reps = cfg.n == 0 ? 1 : cfg.n;

  struct Labeled {
    std::string label;
    SpectraMatrix sm;
  };
  std::vector<Labeled> sets;
  sets.push_back({"primary", catalog_spectra(cat, cfg, periods, false, reps, 1)});
  if (!cfg.compare.empty()) {
    const auto other = load_nonempty(cfg.compare);
    sets.push_back({"comparison", catalog_spectra(other, cfg, periods, cfg.simulate_compare, reps, 2)});
  }

  Panel quant{"Sa quantiles (5, 50, 95%)", "T (s)", "Sa (g)", true, true, {}, {}};
  Panel disp{"Dispersion", "T (s)", "std of ln Sa", true, false, {}, {}};
  std::vector<Panel> corr_panels;
  for (double t2 : kCorrelationAnchors) {
    corr_panels.push_back({"T2 = " + csv_row({t2}) + " s", "T1 (s)", "correlation", true, false,
                           std::make_pair(-1.0, 1.0), {}});
  }
  std::vector<std::vector<double>> medians, stds;
  std::vector<Eigen::MatrixXd> rhos;
  nlohmann::json summary = nlohmann::json::array();

  for (const auto& s : sets) {
    const auto q05 = spectral_quantiles(s.sm, 0.05);
    const auto q50 = spectral_quantiles(s.sm, 0.5);
    const auto q95 = spectral_quantiles(s.sm, 0.95);
    const auto sd = spectral_std(s.sm);
    const Eigen::MatrixXd rho = spectral_correlation(s.sm);
    auto out = open_out(cfg.out / ("stats_" + s.label + ".csv"), log);
    out << "T_s,q05_g,q50_g,q95_g,mean_ln_sa,std_ln_sa\n";
    std::vector<double> g05, g50, g95;
    for (std::size_t j = 0; j < periods.size(); ++j) {
      g05.push_back(std::exp(q05[j]) / kGravity);
      g50.push_back(std::exp(q50[j]) / kGravity);
      g95.push_back(std::exp(q95[j]) / kGravity);
      out << csv_row({periods[j], g05[j], g50[j], g95[j], s.sm.log_sa.col(static_cast<Eigen::Index>(j)).mean(), sd[j]})
          << '\n';
    }
    write_matrix_csv(cfg.out / ("correlation_" + s.label + ".csv"), periods, rho, log);

    const bool dashed = s.label != "primary";
    quant.series.push_back({s.label + " median", periods, g50, dashed});
    quant.series.push_back({s.label + " 5%", periods, g05, dashed});
    quant.series.push_back({s.label + " 95%", periods, g95, dashed});
    disp.series.push_back({s.label, periods, sd, dashed});
    for (std::size_t k = 0; k < std::size(kCorrelationAnchors); ++k) {
      const auto col = index_of(periods, kCorrelationAnchors[k]);
      corr_panels[k].series.push_back({s.label, periods, to_vec(rho.col(static_cast<Eigen::Index>(col))), dashed});
    }
    medians.push_back(q50);
    stds.push_back(sd);
    rhos.push_back(rho);
    summary.push_back({{"label", s.label}, {"rows", s.sm.records()}});
  }

  std::vector<Panel> spectra_panels = {quant, disp};
  if (sets.size() == 2) {
    Panel cmp{"Comparison minus primary", "T (s)", "difference", true, false, {}, {}};
    std::vector<double> dmed, dstd;
    for (std::size_t j = 0; j < periods.size(); ++j) {
      dmed.push_back(medians[1][j] - medians[0][j]);
      dstd.push_back(stds[1][j] - stds[0][j]);
    }
    cmp.series.push_back({"ln median ratio", periods, dmed, false});
    cmp.series.push_back({"std difference", periods, dstd, true});
    spectra_panels.push_back(cmp);
    log.summary["correlation_frobenius_distance"] = (rhos[1] - rhos[0]).norm();
  }
  write_svg(cfg.out / "spectra.svg", spectra_panels, static_cast<int>(spectra_panels.size()),
            "Response spectrum statistics (5% damping)");
  log.add_output(cfg.out / "spectra.svg");
  write_svg(cfg.out / "correlation.svg", corr_panels, 2, "Spectral correlation rho(T1, T2)");
  log.add_output(cfg.out / "correlation.svg");
  log.summary["catalogs"] = summary;
}

// ---------------------------------------------------------------------------

void cmd_sensitivity(const RunConfig& cfg, RunLog& log) {
  const auto cat = load_nonempty(cfg.manifest);
  prepare_out(cfg);
  const auto periods = with_anchors(period_grid(cfg));
  const auto sm = catalog_spectra(cat, cfg, periods, false, 1, 3);

  Eigen::MatrixXd theta(static_cast<Eigen::Index>(cat.size()), static_cast<Eigen::Index>(kNumInputs));
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto th = entry_params(cat.entries[i], cfg).theta();
    for (std::size_t k = 0; k < kNumInputs; ++k) theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = th[k];
  }
  std::vector<std::string> labels(kInputLabels.begin(), kInputLabels.end());
  const DesignMatrix dm(theta, labels);
  const auto bundle = fit_regression(dm, sm.log_sa, periods);
  const DesignMatrix without_fc(theta.leftCols(kNumInputs - 1),
                                std::vector<std::string>(labels.begin(), labels.end() - 1));
  const auto r2 = r_squared(bundle);
  const auto r2_nofc = r_squared(fit_regression(without_fc, sm.log_sa, periods));

  {
    auto out = open_out(cfg.out / "r2.csv", log);
    out << "T_s,r2,r2_without_fc\n";
    for (std::size_t j = 0; j < periods.size(); ++j) out << csv_row({periods[j], r2[j], r2_nofc[j]}) << '\n';
  }
  const auto w = weighted_coefficients(bundle);
  {
    auto out = open_out(cfg.out / "weighted_coefficients.csv", log);
    out << "T_s";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t j = 0; j < periods.size(); ++j) {
      out << periods[j];
      for (std::size_t k = 0; k < kNumInputs; ++k) out << ',' << w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
      out << '\n';
    }
  }

  const NeglectMode modes[] = {NeglectMode::full, NeglectMode::const_fc, NeglectMode::no_cov};
  const char* mode_names[] = {"full", "const_fc", "no_cov"};
  std::vector<ScenarioSurfaces> scen;
  for (auto m : modes) scen.push_back(scenario_neglect_fc(bundle, m));
  {
    auto out = open_out(cfg.out / "variance_scenarios.csv", log);
    out << "T_s,var_full,var_const_fc,var_no_cov,sd_full,sd_const_fc,sd_no_cov\n";
    auto sd = [](double v) { return v >= 0.0 ? std::sqrt(v) : std::nan(""); };
    for (std::size_t j = 0; j < periods.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out << csv_row({periods[j], scen[0].variance(jj), scen[1].variance(jj), scen[2].variance(jj),
                      sd(scen[0].variance(jj)), sd(scen[1].variance(jj)), sd(scen[2].variance(jj))})
          << '\n';
    }
  }
  for (std::size_t m = 0; m < 3; ++m) {
    write_matrix_csv(cfg.out / (std::string("correlation_") + mode_names[m] + ".csv"), periods,
                     scen[m].correlation, log);
    if (!scen[m].negative_variance.empty()) {
      spdlog::warn("{}: {} periods with negative recomputed variance", mode_names[m],
                   scen[m].negative_variance.size());
      log.summary[std::string("negative_variance_") + mode_names[m]] = scen[m].negative_variance.size();
    }
  }
  {
    auto out = open_out(cfg.out / "appendix_b.csv", log);
    out << "T1_s,T2_s,cov_total,term1_pct,term2_pct,term3_pct,term4_pct,sum_pct\n";
    for (double t2 : kCorrelationAnchors) {
      const auto k = index_of(periods, t2);
      for (std::size_t j = 0; j < periods.size(); ++j) {
        const auto c = covariance_decompose(bundle, j, k);
        const auto pct = c.percentages();
        out << csv_row({periods[j], periods[k], c.total, pct[0], pct[1], pct[2], pct[3],
                        pct[0] + pct[1] + pct[2] + pct[3]})
            << '\n';
      }
    }
  }

  Panel r2_panel{"Coefficient of determination", "T (s)", "R^2", true, false, std::make_pair(0.0, 1.0), {}};
  r2_panel.series.push_back({"all inputs", periods, r2, false});
  r2_panel.series.push_back({"without f_c", periods, r2_nofc, true});
  Panel w_panel{"Weighted regression coefficients", "T (s)", "beta * sigma", true, false, {}, {}};
  for (std::size_t k = 0; k < kNumInputs; ++k) {
    w_panel.series.push_back({labels[k], periods, to_vec(w.row(static_cast<Eigen::Index>(k)).transpose()), false});
  }
  write_svg(cfg.out / "sensitivity.svg", {r2_panel, w_panel}, 2, "Regression sensitivity of ln Sa");
  log.add_output(cfg.out / "sensitivity.svg");

  Panel v_panel{"Standard deviation of ln Sa", "T (s)", "std", true, false, {}, {}};
  for (std::size_t m = 0; m < 3; ++m) {
    std::vector<double> sd;
    for (Eigen::Index j = 0; j < scen[m].variance.size(); ++j) sd.push_back(std::sqrt(std::max(scen[m].variance(j), 0.0)));
    v_panel.series.push_back({mode_names[m], periods, sd, m > 0});
  }
  std::vector<Panel> scen_panels = {v_panel};
  for (double t2 : kCorrelationAnchors) {
    const auto k = static_cast<Eigen::Index>(index_of(periods, t2));
    Panel p{"rho(T1, " + csv_row({t2}) + " s)", "T1 (s)", "correlation", true, false, std::make_pair(-1.0, 1.0), {}};
    for (std::size_t m = 0; m < 3; ++m) p.series.push_back({mode_names[m], periods, to_vec(scen[m].correlation.col(k)), m > 0});
    scen_panels.push_back(p);
  }
  write_svg(cfg.out / "scenarios.svg", scen_panels, 3, "Neglecting f_c variability");
  log.add_output(cfg.out / "scenarios.svg");

  log.summary["records"] = cat.size();
  log.summary["periods"] = periods.size();
  log.summary["r2_min"] = *std::min_element(r2.begin(), r2.end());
  log.summary["r2_max"] = *std::max_element(r2.begin(), r2.end());
}

// ---------------------------------------------------------------------------

void cmd_sample_params(const RunConfig& cfg, RunLog& log) {
  prepare_out(cfg);
  JointParamModel model;
  double t_total = cfg.t_total.value_or(0.0);
  if (!cfg.model.empty()) {
    model = load_joint_model(cfg.model);
  } else {
    const auto cat = load_nonempty(cfg.manifest);
    Eigen::MatrixXd data(static_cast<Eigen::Index>(cat.size()), static_cast<Eigen::Index>(kNumInputs));
    double longest = 0.0;
    for (std::size_t i = 0; i < cat.size(); ++i) {
      const auto p = cat.entries[i].params_or_throw();
      longest = std::max(longest, p.t_total);
      const auto th = p.theta();
      for (std::size_t k = 0; k < kNumInputs; ++k) data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = th[k];
    }
    if (!cfg.t_total) t_total = longest;
    auto families = default_families();
    for (const auto& spec : cfg.families) {
      const auto eq = spec.find('=');
      const std::string col = spec.substr(0, eq);
      const auto it = std::find(kInputLabels.begin(), kInputLabels.end(), col);
      if (eq == std::string::npos || it == kInputLabels.end()) {
        throw Error(Errc::invalid_argument, "--family expects <column>=<family>, got \"" + spec + "\"");
      }
      families[static_cast<std::size_t>(it - kInputLabels.begin())] = family_from_string(spec.substr(eq + 1));
    }
    model = fit_joint(data, families, std::vector<std::string>(kInputLabels.begin(), kInputLabels.end()));
    save_joint_model(cfg.out / "joint_model.json", model);
    log.add_output(cfg.out / "joint_model.json");
  }
  const bool is_gm = model.dims() == kNumInputs;
  const std::size_t n = cfg.n == 0 ? 100 : cfg.n;
  const auto sample = sample_params(model, n, cfg.seed, is_gm ? gm_params_validator(t_total) : RowValidator{});

  {
    auto out = open_out(cfg.out / "sampled_params.csv", log);
    for (std::size_t k = 0; k < model.dims(); ++k) {
      out << (k ? "," : "") << (k < model.labels.size() ? model.labels[k] : "x" + std::to_string(k));
    }
    out << '\n';
    for (Eigen::Index i = 0; i < sample.values.rows(); ++i) {
      for (Eigen::Index k = 0; k < sample.values.cols(); ++k) out << (k ? "," : "") << sample.values(i, k);
      out << '\n';
    }
  }
  if (is_gm && t_total > 0.0) {
    CatalogManifest m;
    m.base_dir = fs::absolute(cfg.out);
    for (Eigen::Index i = 0; i < sample.values.rows(); ++i) {
      std::array<double, kNumInputs> th{};
      for (std::size_t k = 0; k < kNumInputs; ++k) th[k] = sample.values(i, static_cast<Eigen::Index>(k));
      ManifestEntry e;
      char id[32];
      std::snprintf(id, sizeof id, "S%05ld", static_cast<long>(i));
      e.id = id;
      e.params = GMParams::from_theta(th, t_total);
      e.fc_hz = e.params->fc_hz;
      m.entries.push_back(std::move(e));
    }
    auto out = open_out(cfg.out / "sampled_manifest.txt", log);
    out << write_manifest(m);
  }
  log.summary["samples"] = n;
  log.summary["drawn"] = sample.drawn;
  log.summary["rejected"] = sample.rejected;
  log.summary["t_total"] = t_total;
}

}  // namespace stochgm::cli
