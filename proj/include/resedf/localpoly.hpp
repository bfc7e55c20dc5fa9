#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "resedf/dataset.hpp"

//! Multivariate local polynomial smoothing of E(Y^a | X = x) on complete cases.
namespace resedf::localpoly {

struct MultiIndex {
  std::vector<int> entries;

  int order() const noexcept;
  std::size_t dimension() const noexcept { return entries.size(); }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

//! Every multi-index of total order <= degree, graded lexicographic, zero index first.
std::vector<MultiIndex> multi_index_set(std::size_t dimension, int degree);

//! prod_k u_k^{i_k} / i_k!
double psi(const MultiIndex& index, std::span<const double> u);

//! Univariate kernel densities supported on [-1, 1].
enum class KernelDensity {
  tricube,      // (70/81)(1 - |u|^3)^3
  epanechnikov, // (3/4)(1 - u^2)
  biweight,     // (15/16)(1 - u^2)^2
  uniform,      // 1/2
};

double kernel_density(KernelDensity density, double u) noexcept;

//! Product kernel w(u) = w_1(u_1) ... w_m(u_m). An empty list means tricube in
//! every coordinate; a single entry is broadcast to all coordinates.
struct KernelSpec {
  std::vector<KernelDensity> coordinates;

  KernelDensity density(std::size_t k) const noexcept;
};

//! prod_k w_k(u_k / bandwidth); zero as soon as one |u_k| exceeds the bandwidth.
double kernel_weight(const KernelSpec& kernel, std::span<const double> u, double bandwidth);

//! 3 (n log n)^{-1/7}
double bandwidth_rule(std::size_t n);

//! Residual construction where the variance estimate r2_hat - r_hat^2 is
//! negative beyond the floor, so sigma_hat has no real value: `drop` leaves the
//! point out of the residual set, `keep` divides by the floored scale.
enum class NegativeVariance { drop, keep };

struct SmootherConfig {
  std::size_t dimension = 1;
  int degree = 3;
  double bandwidth = 1.0;
  KernelSpec kernel{};
  double variance_floor = 1e-6;
  //! Largest bandwidth tried, as a multiple of `bandwidth`.
  double bandwidth_cap_factor = 4.0;
  NegativeVariance negative_variance = NegativeVariance::drop;

  void validate() const;
  std::size_t basis_size() const;
};

struct FitDiagnostics {
  std::size_t effective_count = 0; // complete cases with positive kernel weight
  bool rank_deficient = false;     // minimum-norm fallback was used
  double bandwidth_used = 0.0;
  int escalations = 0;             // number of 1.5x bandwidth increases
  bool variance_clamped = false;   // only set by sigma estimates
};

struct WlsSolution {
  Eigen::VectorXd coefficients;
  bool rank_deficient = false;
};

//! Minimizes sum_j w_j (target_j - row_j' gamma)^2. A rank-deficient weighted
//! design yields the minimum-norm minimizer with `rank_deficient` set.
WlsSolution wls_solve(const std::vector<std::vector<double>>& rows,
                      std::span<const double> weights,
                      std::span<const double> targets);

//! Solves gram * X = rhs column-wise via complete orthogonal decomposition.
WlsSolution solve_normal_equations(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs);

struct MomentFit {
  double mean = 0.0;          // gamma_{1,0}
  double second_moment = 0.0; // gamma_{2,0}
  FitDiagnostics diagnostics;
};

struct SigmaFit {
  double sigma = 0.0;
  double mean = 0.0;
  double raw_variance = 0.0; // second moment minus squared mean, before the floor
  FitDiagnostics diagnostics;
};

//! sqrt(max(second_moment - mean^2, floor)); `clamped` reports use of the floor.
double sigma_from_moments(double mean, double second_moment, double variance_floor, bool* clamped = nullptr);

//! Local polynomial smoother bound to the complete cases of one dataset.
//!
//! Both moment fits share the design and weights at a point, so they are
//! computed from a single set of normal equations. The object is immutable
//! after construction and `fit` may be called concurrently.
class Smoother {
public:
  Smoother(const Dataset& data, SmootherConfig config);

  MomentFit fit(std::span<const double> x0) const;
  SigmaFit sigma(std::span<const double> x0) const;

  const SmootherConfig& config() const noexcept { return config_; }
  const std::vector<MultiIndex>& basis() const noexcept { return basis_; }
  std::size_t complete_count() const noexcept { return cases_.size(); }

private:
  struct Accumulated {
    Eigen::MatrixXd gram;
    Eigen::MatrixXd rhs; // columns: Y, Y^2
    std::size_t effective = 0;
  };

  void accumulate(std::span<const double> x0, double bandwidth, Accumulated& acc) const;

  SmootherConfig config_;
  CompleteCases cases_;
  std::vector<MultiIndex> basis_;
};

//! gamma_{a,0} for a in {1, 2}.
MomentFit fit_moments(const Dataset& data, std::span<const double> x0, const SmootherConfig& config);

struct ConditionalMoment {
  double estimate = 0.0;
  FitDiagnostics diagnostics;
};

ConditionalMoment fit_conditional_moment(const Dataset& data, std::span<const double> x0,
                                         const SmootherConfig& config, int power);

SigmaFit estimate_sigma(const Dataset& data, std::span<const double> x0, const SmootherConfig& config);

} // namespace resedf::localpoly
