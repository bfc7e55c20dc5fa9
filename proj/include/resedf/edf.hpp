#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "resedf/dataset.hpp"
#include "resedf/error_law.hpp"
#include "resedf/localpoly.hpp"

namespace resedf::edf {

//! Standardized complete-case residuals (Y_j - r_hat(X_j)) / sigma_hat(X_j).
struct ResidualSet {
  std::vector<double> values;           // one per retained complete case, dataset order
  std::vector<std::size_t> source_rows; // dataset row of each residual
  std::vector<double> fitted_mean;      // r_hat(X_j)
  std::vector<double> fitted_scale;     // sigma_hat(X_j)
  std::size_t clamped = 0;              // sigma_hat hit the variance floor
  std::size_t rank_fallbacks = 0;       // minimum-norm solutions
  std::size_t escalated = 0;            // fits needing a wider bandwidth
  std::size_t dropped = 0;              // complete cases left out for a negative variance estimate

  std::size_t count() const noexcept { return values.size(); }
};

//! Residuals of every complete case, the smoother fitted on the same data.
//! Parallel over complete cases (`workers` = 0 resolves via resolve_workers).
ResidualSet complete_case_residuals(const Dataset& data, const localpoly::SmootherConfig& config,
                                    std::size_t workers = 0);

//! Single-threaded reference for `complete_case_residuals`.
ResidualSet complete_case_residuals_serial(const Dataset& data, const localpoly::SmootherConfig& config);

//! (1/N) #{residual <= t}
double edf_evaluate(const ResidualSet& residuals, double t);

struct EdfCurve {
  std::vector<double> grid;
  std::vector<double> values;
};

//! Pointwise `edf_evaluate` over a strictly increasing grid.
EdfCurve edf_curve(const ResidualSet& residuals, std::span<const double> grid);
EdfCurve edf_curve(std::span<const double> residuals, std::span<const double> grid);

//! (1/N) sum_j delta_j [1[e_j <= t] + f(t){e_j + (t/2)(e_j^2 - 1)}], N = sum delta_j,
//! the linearization of the residual EDF in the true errors.
double expansion_oracle(std::span<const double> errors, std::span<const std::uint8_t> deltas,
                        const efficiency::ErrorLaw& law, double t);

EdfCurve expansion_curve(std::span<const double> errors, std::span<const std::uint8_t> deltas,
                         const efficiency::ErrorLaw& law, std::span<const double> grid);

//! max over the shared grid of |a - b|.
double sup_distance(const EdfCurve& a, const EdfCurve& b);

//! lower, lower + step, ... up to upper (inclusive within rounding).
std::vector<double> uniform_grid(double lower, double upper, double step);

} // namespace resedf::edf
