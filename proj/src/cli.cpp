#include "resedf/cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "resedf/edf.hpp"
#include "resedf/efficiency.hpp"
#include "resedf/errors.hpp"
#include "resedf/parallel.hpp"

namespace resedf::cli {

namespace {

using io::ConfigError;
using io::format_number;
using io::KeyValueConfig;

KeyValueConfig load_or_empty(const std::filesystem::path& path)
{
  return path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
}

localpoly::KernelSpec parse_kernel(const std::string& text)
{
  localpoly::KernelSpec spec;
  for (const auto& name : io::split(text, ',')) {
    if (name == "tricube") {
      spec.coordinates.push_back(localpoly::KernelDensity::tricube);
    } else if (name == "epanechnikov") {
      spec.coordinates.push_back(localpoly::KernelDensity::epanechnikov);
    } else if (name == "biweight") {
      spec.coordinates.push_back(localpoly::KernelDensity::biweight);
    } else if (name == "uniform") {
      spec.coordinates.push_back(localpoly::KernelDensity::uniform);
    } else {
      throw ConfigError("config key 'kernel': unknown kernel '" + name + "'");
    }
  }
  return spec;
}

std::optional<double> parse_bandwidth(const KeyValueConfig& cfg)
{
  const std::string raw = cfg.get_string("bandwidth", "auto");
  if (raw == "auto") {
    return std::nullopt;
  }
  const double h = cfg.get_double("bandwidth", 0.0);
  if (!(h > 0.0)) {
    throw ConfigError("config key 'bandwidth': must be 'auto' or a positive number");
  }
  return h;
}

int parse_degree(const KeyValueConfig& cfg)
{
  const auto d = cfg.get_int("degree", 3);
  if (d < 0 || d > 10) {
    throw ConfigError("config key 'degree': must be between 0 and 10");
  }
  return static_cast<int>(d);
}

std::vector<double> parse_grid(const KeyValueConfig& cfg, const std::string& prefix)
{
  const double lo = cfg.get_double(prefix + "_min", -5.0);
  const double hi = cfg.get_double(prefix + "_max", 5.0);
  const double step = cfg.get_double(prefix + "_step", 0.01);
  if (!(step > 0.0) || !(hi >= lo)) {
    throw ConfigError("config keys '" + prefix + "_*': need " + prefix + "_max >= " + prefix + "_min and " +
                      prefix + "_step > 0");
  }
  return edf::uniform_grid(lo, hi, step);
}

localpoly::NegativeVariance parse_negative_variance(const KeyValueConfig& cfg)
{
  const std::string raw = cfg.get_string("negative_variance", "drop");
  if (raw == "drop") {
    return localpoly::NegativeVariance::drop;
  }
  if (raw == "keep") {
    return localpoly::NegativeVariance::keep;
  }
  throw ConfigError("config key 'negative_variance': must be 'drop' or 'keep'");
}

std::size_t parse_workers(const KeyValueConfig& cfg)
{
  const auto w = cfg.get_int("workers", 0);
  if (w < 0) {
    throw ConfigError("config key 'workers': must be nonnegative");
  }
  return static_cast<std::size_t>(w);
}

std::ofstream open_output(const std::filesystem::path& path)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path.string());
  }
  return out;
}

std::string t_label(double t) { return "t=" + format_number(t); }

} // namespace

EstimateSettings estimate_settings(const KeyValueConfig& cfg)
{
  cfg.require_known({"degree", "bandwidth", "kernel", "variance_floor", "bandwidth_cap_factor", "negative_variance",
                     "grid_min", "grid_max", "grid_step", "workers"});
  EstimateSettings s;
  s.degree = parse_degree(cfg);
  s.bandwidth = parse_bandwidth(cfg);
  s.kernel = parse_kernel(cfg.get_string("kernel", "tricube"));
  s.variance_floor = cfg.get_double("variance_floor", s.variance_floor);
  s.bandwidth_cap_factor = cfg.get_double("bandwidth_cap_factor", s.bandwidth_cap_factor);
  s.negative_variance = parse_negative_variance(cfg);
  s.grid = parse_grid(cfg, "grid");
  s.workers = parse_workers(cfg);
  return s;
}

simulation::StudyConfig study_config(const KeyValueConfig& cfg)
{
  cfg.require_known({"sample_sizes", "replications", "eval_points", "mise_grid_min", "mise_grid_max",
                     "mise_grid_step", "seed", "degree", "bandwidth", "kernel", "variance_floor",
                     "bandwidth_cap_factor", "negative_variance", "max_resamples", "workers"});
  simulation::StudyConfig s;
  s.sample_sizes = cfg.get_sizes("sample_sizes", s.sample_sizes);
  const auto replications = cfg.get_int("replications", static_cast<long long>(s.replications));
  if (replications < 2) {
    throw ConfigError("config key 'replications': need at least 2");
  }
  s.replications = static_cast<std::size_t>(replications);
  s.eval_points = cfg.get_doubles("eval_points", s.eval_points);
  s.mise_grid = parse_grid(cfg, "mise_grid");
  if (cfg.has("seed")) {
    const auto seed = cfg.get_sizes("seed", {});
    if (seed.size() != 1) {
      throw ConfigError("config key 'seed': expected one nonnegative integer");
    }
    s.seed = seed.front();
  }
  s.degree = parse_degree(cfg);
  s.bandwidth = parse_bandwidth(cfg);
  s.kernel = parse_kernel(cfg.get_string("kernel", "tricube"));
  s.variance_floor = cfg.get_double("variance_floor", s.variance_floor);
  s.bandwidth_cap_factor = cfg.get_double("bandwidth_cap_factor", s.bandwidth_cap_factor);
  s.negative_variance = parse_negative_variance(cfg);
  const auto resamples = cfg.get_int("max_resamples", static_cast<long long>(s.max_resamples));
  if (resamples < 0) {
    throw ConfigError("config key 'max_resamples': must be nonnegative");
  }
  s.max_resamples = static_cast<std::size_t>(resamples);
  s.workers = parse_workers(cfg);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

EfficiencySettings efficiency_settings(const KeyValueConfig& cfg)
{
  cfg.require_known({"law", "observation_rate", "grid_min", "grid_max", "grid_step", "workers"});
  EfficiencySettings s;
  s.law = cfg.get_string("law", s.law);
  if (s.law != "normal") {
    throw ConfigError("config key 'law': only 'normal' is built in");
  }
  s.observation_rate = cfg.get_double("observation_rate", s.observation_rate);
  if (!(s.observation_rate > 0.0 && s.observation_rate <= 1.0)) {
    throw ConfigError("config key 'observation_rate': must lie in (0, 1]");
  }
  s.grid = parse_grid(cfg, "grid");
  return s;
}

std::size_t effective_workers(std::optional<std::size_t> override_value, std::size_t config_value)
{
  if (override_value && *override_value > 0) {
    return *override_value;
  }
  if (const auto env = workers_from_environment(); env > 0) {
    return env;
  }
  return resolve_workers(config_value);
}

void cmd_estimate(const RunConfig& run)
{
  const auto settings = estimate_settings(load_or_empty(run.config_path));
  const Dataset data = io::ingest_dataset(run.data_path);
  if (data.complete_count() == 0) {
    throw InsufficientDataError("data file has no complete cases (delta = 1)");
  }

  localpoly::SmootherConfig smoother;
  smoother.dimension = data.dimension();
  smoother.degree = settings.degree;
  smoother.bandwidth = settings.bandwidth ? *settings.bandwidth : localpoly::bandwidth_rule(std::max<std::size_t>(data.size(), 2));
  smoother.kernel = settings.kernel;
  smoother.variance_floor = settings.variance_floor;
  smoother.bandwidth_cap_factor = settings.bandwidth_cap_factor;
  smoother.negative_variance = settings.negative_variance;

  const auto residuals =
    edf::complete_case_residuals(data, smoother, effective_workers(run.workers, settings.workers));
  const auto curve = edf::edf_curve(residuals, settings.grid);

  auto out = open_output(run.out_path);
  out << "t,F_hat\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << format_number(curve.grid[i]) << ',' << format_number(curve.values[i]) << '\n';
  }
  out << "# diagnostics\n"
      << "# n," << data.size() << '\n'
      << "# N," << residuals.count() << '\n'
      << "# degree," << smoother.degree << '\n'
      << "# bandwidth," << format_number(smoother.bandwidth) << '\n'
      << "# clamped," << residuals.clamped << '\n'
      << "# dropped," << residuals.dropped << '\n'
      << "# rank_fallbacks," << residuals.rank_fallbacks << '\n'
      << "# escalated," << residuals.escalated << '\n';

  if (!run.fits_path.empty()) {
    auto fits = open_output(run.fits_path);
    fits << "row";
    for (std::size_t k = 0; k < data.dimension(); ++k) {
      fits << ",x" << k + 1;
    }
    fits << ",y,r_hat,sigma_hat,residual\n";
    for (std::size_t i = 0; i < residuals.count(); ++i) {
      const std::size_t row = residuals.source_rows[i];
      fits << row;
      for (const double v : data.covariates(row)) {
        fits << ',' << format_number(v);
      }
      fits << ',' << format_number(data.response(row)) << ',' << format_number(residuals.fitted_mean[i]) << ','
           << format_number(residuals.fitted_scale[i]) << ',' << format_number(residuals.values[i]) << '\n';
    }
  }
}

void cmd_simulate(const RunConfig& run)
{
  auto config = study_config(load_or_empty(run.config_path));
  if (run.seed) {
    config.seed = *run.seed;
  }
  config.workers = effective_workers(run.workers, config.workers);
  const auto study = simulation::run_study(config);

  std::filesystem::create_directories(run.out_path);
  const auto& points = config.eval_points;
  {
    auto out = open_output(run.out_path / "table1.csv");
    out << "n";
    for (const double t : points) {
      out << ",bias(" << t_label(t) << "),var(" << t_label(t) << ')';
    }
    out << '\n';
    for (const auto& table : study.tables) {
      out << table.n;
      for (std::size_t i = 0; i < points.size(); ++i) {
        out << ',' << format_number(table.scaled_bias[i]) << ',' << format_number(table.scaled_variance[i]);
      }
      out << '\n';
    }
    out << "inf";
    for (std::size_t i = 0; i < points.size(); ++i) {
      out << ",0," << format_number(study.asymptotic.amse[i]);
    }
    out << '\n';
  }
  {
    auto out = open_output(run.out_path / "table2.csv");
    out << "n";
    for (const double t : points) {
      out << ',' << t_label(t);
    }
    out << ",AMISE\n";
    for (const auto& table : study.tables) {
      out << table.n;
      for (const double v : table.scaled_mse) {
        out << ',' << format_number(v);
      }
      out << ',' << format_number(table.scaled_mise) << '\n';
    }
    out << "inf";
    for (const double v : study.asymptotic.amse) {
      out << ',' << format_number(v);
    }
    out << ',' << format_number(study.asymptotic.amise) << '\n';
  }
  {
    auto out = open_output(run.out_path / "study.csv");
    out << "key,value\n"
        << "seed," << config.seed << '\n'
        << "replications," << config.replications << '\n'
        << "degree," << config.degree << '\n'
        << "observation_rate," << format_number(study.asymptotic.observation_rate) << '\n';
    for (const auto& table : study.tables) {
      out << "resamples_n" << table.n << ',' << table.resamples << '\n';
      out << "dropped_n" << table.n << ',' << table.dropped << '\n';
    }
  }
}

void cmd_efficiency(const RunConfig& run)
{
  const auto settings = efficiency_settings(load_or_empty(run.config_path));
  const auto law = efficiency::ErrorLaw::standard_normal();
  const efficiency::MissingnessSummary miss(settings.observation_rate);
  const auto curve = efficiency::amse_curve(law, miss, settings.grid);
  const double total = efficiency::trapezoid(settings.grid, curve);

  auto out = open_output(run.out_path);
  out << "t,AMSE\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << format_number(settings.grid[i]) << ',' << format_number(curve[i]) << '\n';
  }
  out << "AMISE," << format_number(total) << '\n';
}

int run(int argc, char** argv)
{
  CLI::App app{"Residual-based error distribution estimation with responses missing at random"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::uint64_t seed = 0;
  std::size_t workers = 0;

  auto* estimate = app.add_subcommand("estimate", "Estimate the error distribution from a data file");
  estimate->add_option("--data", cfg.data_path, "CSV with header x1,...,xm,y,delta")->required()->check(CLI::ExistingFile);
  estimate->add_option("--config", cfg.config_path, "key = value configuration")->check(CLI::ExistingFile);
  estimate->add_option("--out", cfg.out_path, "output CSV (t,F_hat)")->required();
  estimate->add_option("--fits", cfg.fits_path, "optional per-row fitted values");
  estimate->add_option("--workers", workers, "worker threads (overrides RESEDF_WORKERS)");

  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo study and write both tables");
  simulate->add_option("--config", cfg.config_path, "key = value configuration")->check(CLI::ExistingFile);
  simulate->add_option("--out", cfg.out_path, "output directory")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "master seed override");
  simulate->add_option("--workers", workers, "worker threads (overrides RESEDF_WORKERS)");

  auto* eff = app.add_subcommand("efficiency", "Asymptotic MSE curve and AMISE");
  eff->add_option("--config", cfg.config_path, "key = value configuration")->check(CLI::ExistingFile);
  eff->add_option("--out", cfg.out_path, "output CSV (t,AMSE)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsage;
  }
  if (workers > 0) {
    cfg.workers = workers;
  }
  if (seed_opt->count() > 0) {
    cfg.seed = seed;
  }

  try {
    if (estimate->parsed()) {
      cfg.subcommand = Subcommand::estimate;
      cmd_estimate(cfg);
    } else if (simulate->parsed()) {
      cfg.subcommand = Subcommand::simulate;
      cmd_simulate(cfg);
    } else {
      cfg.subcommand = Subcommand::efficiency;
      cmd_efficiency(cfg);
    }
  } catch (const io::ConfigError& e) {
    std::cerr << "resedf: " << e.what() << '\n';
    return kUsage;
  } catch (const DataFormatError& e) {
    std::cerr << "resedf: " << e.what() << '\n';
    return kDataError;
  } catch (const InsufficientDataError& e) {
    std::cerr << "resedf: insufficient data: " << e.what() << '\n';
    return kDataError;
  } catch (const QuadratureError& e) {
    std::cerr << "resedf: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DegenerateMomentsError& e) {
    std::cerr << "resedf: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "resedf: " << e.what() << '\n';
    return kUsage;
  }
  return kSuccess;
}

} // namespace resedf::cli
