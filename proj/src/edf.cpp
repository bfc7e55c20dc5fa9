#include "resedf/edf.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "resedf/errors.hpp"
#include "resedf/parallel.hpp"

namespace resedf::edf {

namespace {

struct RowFit {
  double residual;
  double mean;
  double scale;
  bool undefined_scale;
  localpoly::FitDiagnostics diagnostics;
};

RowFit fit_row(const localpoly::Smoother& smoother, const CompleteCases& cases, std::size_t i)
{
  const auto s = smoother.sigma(cases.covariates(i));
  const bool undefined = s.raw_variance < -smoother.config().variance_floor;
  return {(cases.y[i] - s.mean) / s.sigma, s.mean, s.sigma, undefined, s.diagnostics};
}

ResidualSet assemble(const CompleteCases& cases, const std::vector<RowFit>& fits,
                     localpoly::NegativeVariance policy)
{
  ResidualSet out;
  out.values.reserve(fits.size());
  out.source_rows.reserve(fits.size());
  out.fitted_mean.reserve(fits.size());
  out.fitted_scale.reserve(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& f = fits[i];
    out.clamped += f.diagnostics.variance_clamped ? 1 : 0;
    out.rank_fallbacks += f.diagnostics.rank_deficient ? 1 : 0;
    out.escalated += f.diagnostics.escalations > 0 ? 1 : 0;
    if (f.undefined_scale && policy == localpoly::NegativeVariance::drop) {
      ++out.dropped;
      continue;
    }
    out.values.push_back(f.residual);
    out.source_rows.push_back(cases.source_rows[i]);
    out.fitted_mean.push_back(f.mean);
    out.fitted_scale.push_back(f.scale);
  }
  if (out.values.empty()) {
    throw InsufficientDataError("every complete case has a negative variance estimate");
  }
  return out;
}

} // namespace

ResidualSet complete_case_residuals_serial(const Dataset& data, const localpoly::SmootherConfig& config)
{
  const localpoly::Smoother smoother(data, config);
  const CompleteCases cases = complete_cases(data);
  std::vector<RowFit> fits;
  fits.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    fits.push_back(fit_row(smoother, cases, i));
  }
  return assemble(cases, fits, config.negative_variance);
}

ResidualSet complete_case_residuals(const Dataset& data, const localpoly::SmootherConfig& config,
                                    std::size_t workers)
{
  const localpoly::Smoother smoother(data, config);
  const CompleteCases cases = complete_cases(data);
  std::vector<RowFit> fits(cases.size());
  std::exception_ptr failure;
  const auto count = static_cast<long long>(cases.size());
  const int threads = static_cast<int>(resolve_workers(workers));

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    try {
      fits[static_cast<std::size_t>(i)] = fit_row(smoother, cases, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(resedf_residual_failure)
      if (!failure) {
        failure = std::current_exception();
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return assemble(cases, fits, config.negative_variance);
}

double edf_evaluate(const ResidualSet& residuals, double t)
{
  if (residuals.count() == 0) {
    throw InsufficientDataError("edf_evaluate: no residuals");
  }
  const auto below = std::count_if(residuals.values.begin(), residuals.values.end(),
                                   [t](double r) { return r <= t; });
  return static_cast<double>(below) / static_cast<double>(residuals.count());
}

EdfCurve edf_curve(std::span<const double> residuals, std::span<const double> grid)
{
  if (residuals.empty()) {
    throw InsufficientDataError("edf_curve: no residuals");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("edf_curve: grid must be strictly increasing");
    }
  }
  std::vector<double> sorted(residuals.begin(), residuals.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  EdfCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.resize(grid.size());
  const auto count = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static) if (count > 4096)
  for (long long i = 0; i < count; ++i) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), grid[static_cast<std::size_t>(i)]);
    curve.values[static_cast<std::size_t>(i)] = static_cast<double>(it - sorted.begin()) / n;
  }
  return curve;
}

EdfCurve edf_curve(const ResidualSet& residuals, std::span<const double> grid)
{
  return edf_curve(std::span<const double>(residuals.values), grid);
}

double expansion_oracle(std::span<const double> errors, std::span<const std::uint8_t> deltas,
                        const efficiency::ErrorLaw& law, double t)
{
  if (errors.size() != deltas.size()) {
    throw std::invalid_argument("expansion_oracle: errors and indicators differ in length");
  }
  const double ft = law.density(t);
  double total = 0.0;
  std::size_t complete = 0;
  for (std::size_t j = 0; j < errors.size(); ++j) {
    if (deltas[j] == 0) {
      continue;
    }
    ++complete;
    const double e = errors[j];
    total += (e <= t ? 1.0 : 0.0) + ft * (e + 0.5 * t * (e * e - 1.0));
  }
  if (complete == 0) {
    throw InsufficientDataError("expansion_oracle: no complete cases");
  }
  return total / static_cast<double>(complete);
}

EdfCurve expansion_curve(std::span<const double> errors, std::span<const std::uint8_t> deltas,
                         const efficiency::ErrorLaw& law, std::span<const double> grid)
{
  EdfCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.reserve(grid.size());
  for (const double t : grid) {
    curve.values.push_back(expansion_oracle(errors, deltas, law, t));
  }
  return curve;
}

double sup_distance(const EdfCurve& a, const EdfCurve& b)
{
  if (a.grid != b.grid || a.values.size() != b.values.size()) {
    throw std::invalid_argument("sup_distance: curves are on different grids");
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    sup = std::max(sup, std::abs(a.values[i] - b.values[i]));
  }
  return sup;
}

std::vector<double> uniform_grid(double lower, double upper, double step)
{
  if (!(step > 0.0) || !(upper >= lower)) {
    throw std::invalid_argument("uniform_grid: need step > 0 and upper >= lower");
  }
  const auto steps = static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9));
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    grid[i] = lower + static_cast<double>(i) * step;
  }
  return grid;
}

} // namespace resedf::edf
