#include "resedf/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

#include "resedf/edf.hpp"
#include "resedf/efficiency.hpp"
#include "resedf/errors.hpp"
#include "resedf/parallel.hpp"
#include "resedf/quadrature.hpp"

namespace resedf::simulation {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

TrueModel TrueModel::reference()
{
  TrueModel m;
  m.regression = [](std::span<const double> x) {
    return 1.0 + x[0] - x[1] + 2.0 * std::exp(-0.5 * std::sqrt(x[0] * x[0] + x[1] * x[1]));
  };
  m.scale = [](std::span<const double> x) { return std::sqrt(1.0 + 2.0 * x[0] * x[0] + 2.0 * x[1] * x[1]); };
  m.observation_probability = [](std::span<const double> x) {
    return 1.0 - 1.0 / (1.0 + std::exp(-(x[0] + x[1]) / 2.0));
  };
  m.covariate_bounds = {{-1.0, 1.0}, {-1.0, 1.0}};
  return m;
}

void StudyConfig::validate() const
{
  if (sample_sizes.empty()) {
    throw std::invalid_argument("StudyConfig: no sample sizes");
  }
  for (const auto n : sample_sizes) {
    if (n < 2) {
      throw std::invalid_argument("StudyConfig: sample sizes must be at least 2");
    }
  }
  if (replications < 1) {
    throw std::invalid_argument("StudyConfig: replications must be positive");
  }
  if (eval_points.empty()) {
    throw std::invalid_argument("StudyConfig: no evaluation points");
  }
  const auto grid = resolved_mise_grid();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("StudyConfig: MISE grid must be strictly increasing");
    }
  }
  if (degree < 0) {
    throw std::invalid_argument("StudyConfig: degree must be nonnegative");
  }
  if (bandwidth && !(*bandwidth > 0.0)) {
    throw std::invalid_argument("StudyConfig: bandwidth must be positive");
  }
}

std::vector<double> StudyConfig::resolved_mise_grid() const
{
  return mise_grid.empty() ? edf::uniform_grid(-5.0, 5.0, 0.01) : mise_grid;
}

localpoly::SmootherConfig StudyConfig::smoother_for(std::size_t n, std::size_t dimension) const
{
  localpoly::SmootherConfig s;
  s.dimension = dimension;
  s.degree = degree;
  s.bandwidth = bandwidth ? *bandwidth : localpoly::bandwidth_rule(n);
  s.kernel = kernel;
  s.variance_floor = variance_floor;
  s.bandwidth_cap_factor = bandwidth_cap_factor;
  s.negative_variance = negative_variance;
  return s;
}

Stream derive_stream(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t attempt)
{
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (const std::uint64_t word : {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(attempt)}) {
    state = key ^ word;
    key = splitmix64(state);
  }
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t v = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(v);
    words[i + 1] = static_cast<std::uint32_t>(v >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Stream(seq);
}

SimulatedSample generate_dataset(const TrueModel& model, std::size_t n, Stream& stream)
{
  const std::size_t m = model.dimension();
  if (m == 0) {
    throw std::invalid_argument("generate_dataset: model has no covariates");
  }
  SimulatedSample out{Dataset(m), {}, {}};
  out.data.reserve(n);
  out.data.set_bounds(model.covariate_bounds);
  out.errors.reserve(n);
  out.observation_probability.reserve(n);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto& b = model.covariate_bounds[k];
      x[k] = b.lower + (b.upper - b.lower) * unit(stream);
    }
    const double e = model.error_law.sample(stream);
    const double pi = model.observation_probability(x);
    const bool observed = unit(stream) < pi;
    const double y = model.regression(x) + model.scale(x) * e;
    out.data.add_row(x, observed ? y : 0.0, observed);
    out.errors.push_back(e);
    out.observation_probability.push_back(pi);
  }
  return out;
}

ReplicationResult run_replication(const TrueModel& model, std::size_t n, const StudyConfig& config,
                                  std::size_t k)
{
  const auto smoother = config.smoother_for(n, model.dimension());
  const auto grid = config.resolved_mise_grid();
  for (std::size_t attempt = 0;; ++attempt) {
    Stream stream = derive_stream(config.seed, n, k, attempt);
    const SimulatedSample sample = generate_dataset(model, n, stream);
    try {
      const auto residuals = edf::complete_case_residuals_serial(sample.data, smoother);
      ReplicationResult out;
      out.n = n;
      out.index = k;
      out.resamples = attempt;
      out.dropped = residuals.dropped;
      out.at_points.reserve(config.eval_points.size());
      for (const double t : config.eval_points) {
        out.at_points.push_back(edf::edf_evaluate(residuals, t));
      }
      out.on_grid = edf::edf_curve(residuals, grid).values;
      return out;
    } catch (const InsufficientDataError&) {
      if (attempt >= config.max_resamples) {
        throw;
      }
    }
  }
}

std::vector<ReplicationResult> run_replications_serial(const TrueModel& model, std::size_t n,
                                                       const StudyConfig& config)
{
  std::vector<ReplicationResult> out;
  out.reserve(config.replications);
  for (std::size_t k = 0; k < config.replications; ++k) {
    out.push_back(run_replication(model, n, config, k));
  }
  return out;
}

std::vector<ReplicationResult> run_replications(const TrueModel& model, std::size_t n,
                                                const StudyConfig& config)
{
  std::vector<ReplicationResult> out(config.replications);
  std::exception_ptr failure;
  const auto count = static_cast<long long>(config.replications);
  const int threads = static_cast<int>(resolve_workers(config.workers));

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long k = 0; k < count; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = run_replication(model, n, config, static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical(resedf_replication_failure)
      if (!failure) {
        failure = std::current_exception();
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  std::sort(out.begin(), out.end(),
            [](const ReplicationResult& a, const ReplicationResult& b) { return a.index < b.index; });
  return out;
}

SummaryTable summarize(std::span<const ReplicationResult> results, const TrueModel& model,
                       const StudyConfig& config)
{
  if (results.size() < 2) {
    throw std::invalid_argument("summarize: need at least two replications");
  }
  const std::size_t n = results.front().n;
  const std::size_t points = config.eval_points.size();
  const auto grid = config.resolved_mise_grid();
  for (const auto& r : results) {
    if (r.n != n || r.at_points.size() != points || r.on_grid.size() != grid.size()) {
      throw std::invalid_argument("summarize: replications disagree in sample size or grid");
    }
  }
  const double R = static_cast<double>(results.size());
  const double nn = static_cast<double>(n);

  // Per target t: (sqrt(n) bias, n var, n mse) from the R draws of F_hat(t).
  struct Moments {
    double bias, variance, mse;
  };
  auto moments = [&](auto value_of, double truth) {
    const double shift = value_of(results.front());
    double sum = 0.0;
    for (const auto& r : results) {
      sum += value_of(r) - shift;
    }
    const double offset = sum / R;
    double ss = 0.0;
    double se = 0.0;
    for (const auto& r : results) {
      const double v = value_of(r);
      const double d = (v - shift) - offset;
      ss += d * d;
      se += (v - truth) * (v - truth);
    }
    return Moments{std::sqrt(nn) * (shift + offset - truth), nn * ss / (R - 1.0), nn * se / R};
  };

  SummaryTable table;
  table.n = n;
  table.replications = results.size();
  table.seed = config.seed;
  table.eval_points = config.eval_points;
  for (const auto& r : results) {
    table.resamples += r.resamples;
    table.dropped += r.dropped;
  }
  for (std::size_t i = 0; i < points; ++i) {
    const auto mo = moments([i](const ReplicationResult& r) { return r.at_points[i]; },
                            model.error_law.cdf(config.eval_points[i]));
    table.scaled_bias.push_back(mo.bias);
    table.scaled_variance.push_back(mo.variance);
    table.scaled_mse.push_back(mo.mse);
  }
  std::vector<double> grid_mse(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    grid_mse[g] = moments([g](const ReplicationResult& r) { return r.on_grid[g]; },
                          model.error_law.cdf(grid[g]))
                    .mse;
  }
  table.scaled_mise = efficiency::trapezoid(grid, grid_mse);
  return table;
}

double observation_rate(const TrueModel& model)
{
  const std::size_t m = model.dimension();
  std::vector<double> x(m);
  // Integrate coordinate k with the others fixed, innermost coordinate last.
  std::function<double(std::size_t)> integrate = [&](std::size_t k) -> double {
    const auto& b = model.covariate_bounds[k];
    const double width = b.upper - b.lower;
    return efficiency::quadrature(
             [&, k](double v) {
               x[k] = v;
               return k + 1 == m ? model.observation_probability(x) : integrate(k + 1);
             },
             {b.lower, b.upper}, 1e-10) /
           width;
  };
  return integrate(0);
}

AsymptoticRow asymptotic_row(const TrueModel& model, const StudyConfig& config)
{
  AsymptoticRow row;
  row.observation_rate = observation_rate(model);
  const efficiency::MissingnessSummary miss(row.observation_rate);
  row.eval_points = config.eval_points;
  for (const double t : config.eval_points) {
    row.amse.push_back(efficiency::asymptotic_variance_F(model.error_law, miss, t));
  }
  row.amise = efficiency::amise(model.error_law, miss, config.resolved_mise_grid());
  return row;
}

StudyResult run_study(const StudyConfig& config, const TrueModel& model)
{
  config.validate();
  StudyResult out;
  for (const auto n : config.sample_sizes) {
    const auto results = run_replications(model, n, config);
    out.tables.push_back(summarize(results, model, config));
  }
  out.asymptotic = asymptotic_row(model, config);
  return out;
}

} // namespace resedf::simulation
