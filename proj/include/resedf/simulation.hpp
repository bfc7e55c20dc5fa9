#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "resedf/dataset.hpp"
#include "resedf/error_law.hpp"
#include "resedf/localpoly.hpp"

//! Monte Carlo study of the complete-case residual EDF.
namespace resedf::simulation {

using CovariateFunction = std::function<double(std::span<const double>)>;

//! Y = r(X) + sigma(X) e with X uniform on a box and P(delta = 1 | X) = pi(X).
struct TrueModel {
  CovariateFunction regression;
  CovariateFunction scale;
  CovariateFunction observation_probability;
  efficiency::ErrorLaw error_law = efficiency::ErrorLaw::standard_normal();
  std::vector<Bounds> covariate_bounds;

  std::size_t dimension() const noexcept { return covariate_bounds.size(); }

  //! r = 1 + x1 - x2 + 2 exp(-|x|/2), sigma = sqrt(1 + 2 x1^2 + 2 x2^2),
  //! pi = 1 - 1/(1 + exp(-(x1 + x2)/2)), X ~ U(-1, 1)^2, e ~ N(0, 1).
  static TrueModel reference();
};

struct StudyConfig {
  std::vector<std::size_t> sample_sizes{100, 200, 500, 1000};
  std::size_t replications = 1000;
  std::vector<double> eval_points{-3.0, -2.0, -1.0, 0.0};
  std::vector<double> mise_grid; // empty -> [-5, 5] step 0.01
  std::uint64_t seed = 20260101;
  int degree = 3;
  //! Fixed bandwidth; unset -> 3 (n log n)^{-1/7}.
  std::optional<double> bandwidth;
  localpoly::KernelSpec kernel{};
  double variance_floor = 1e-6;
  double bandwidth_cap_factor = 4.0;
  localpoly::NegativeVariance negative_variance = localpoly::NegativeVariance::drop;
  //! Fallback streams tried for one replication before giving up.
  std::size_t max_resamples = 50;
  std::size_t workers = 0;

  void validate() const;
  std::vector<double> resolved_mise_grid() const;
  localpoly::SmootherConfig smoother_for(std::size_t n, std::size_t dimension) const;
};

using Stream = std::mt19937_64;

//! Independent stream for replication k of sample size n. The derivation is a
//! pure function of its arguments, so results do not depend on scheduling.
Stream derive_stream(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t attempt = 0);

struct SimulatedSample {
  Dataset data;
  std::vector<double> errors;                  // true e_j, also for delta = 0 rows
  std::vector<double> observation_probability; // pi(X_j)
};

//! n draws of (X, delta Y, delta); the stored response of delta = 0 rows is 0.
SimulatedSample generate_dataset(const TrueModel& model, std::size_t n, Stream& stream);

struct ReplicationResult {
  std::size_t n = 0;
  std::size_t index = 0;
  std::vector<double> at_points; // F_hat at StudyConfig::eval_points
  std::vector<double> on_grid;   // F_hat on the MISE grid
  std::size_t resamples = 0;     // fallback streams consumed
  std::size_t dropped = 0;       // complete cases without a usable scale
};

ReplicationResult run_replication(const TrueModel& model, std::size_t n, const StudyConfig& config,
                                  std::size_t k);

//! All replications for one sample size, distributed over OpenMP workers and
//! returned sorted by replication index.
std::vector<ReplicationResult> run_replications(const TrueModel& model, std::size_t n,
                                                const StudyConfig& config);

//! Single-threaded reference for `run_replications`.
std::vector<ReplicationResult> run_replications_serial(const TrueModel& model, std::size_t n,
                                                       const StudyConfig& config);

struct SummaryTable {
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t resamples = 0;
  std::size_t dropped = 0;
  std::vector<double> eval_points;
  std::vector<double> scaled_bias;     // sqrt(n) (mean - F)
  std::vector<double> scaled_variance; // n * sample variance (R - 1 denominator)
  std::vector<double> scaled_mse;      // n * mean squared error (R denominator)
  double scaled_mise = 0.0;            // trapezoid of n * MSE over the MISE grid
};

SummaryTable summarize(std::span<const ReplicationResult> results, const TrueModel& model,
                       const StudyConfig& config);

//! E[pi(X)] under the uniform covariate law, by tensor-product quadrature.
double observation_rate(const TrueModel& model);

struct AsymptoticRow {
  double observation_rate = 0.0;
  std::vector<double> eval_points;
  std::vector<double> amse;
  double amise = 0.0;
};

AsymptoticRow asymptotic_row(const TrueModel& model, const StudyConfig& config);

struct StudyResult {
  std::vector<SummaryTable> tables;
  AsymptoticRow asymptotic;
};

StudyResult run_study(const StudyConfig& config, const TrueModel& model = TrueModel::reference());

} // namespace resedf::simulation
