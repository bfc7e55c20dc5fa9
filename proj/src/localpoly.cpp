#include "resedf/localpoly.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

#include "resedf/errors.hpp"

namespace resedf::localpoly {

namespace {

// Relative pivot threshold of the complete orthogonal decomposition.
constexpr double kRankThreshold = 1e-10;
constexpr double kEscalation = 1.5;

double factorial(int k)
{
  double f = 1.0;
  for (int i = 2; i <= k; ++i) {
    f *= i;
  }
  return f;
}

// All compositions of `order` into `slots` parts, first part descending.
void compositions(std::size_t slots, int order, std::vector<int>& prefix, std::vector<MultiIndex>& out)
{
  if (slots == 1) {
    prefix.push_back(order);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int first = order; first >= 0; --first) {
    prefix.push_back(first);
    compositions(slots - 1, order - first, prefix, out);
    prefix.pop_back();
  }
}

} // namespace

int MultiIndex::order() const noexcept
{
  return std::accumulate(entries.begin(), entries.end(), 0);
}

std::vector<MultiIndex> multi_index_set(std::size_t dimension, int degree)
{
  if (dimension == 0 || degree < 0) {
    throw std::invalid_argument("multi_index_set: need dimension >= 1 and degree >= 0");
  }
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  for (int order = 0; order <= degree; ++order) {
    compositions(dimension, order, prefix, out);
  }
  return out;
}

double psi(const MultiIndex& index, std::span<const double> u)
{
  if (index.dimension() != u.size()) {
    throw std::invalid_argument("psi: multi-index has dimension " + std::to_string(index.dimension()) +
                                " but the point has " + std::to_string(u.size()));
  }
  double value = 1.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    value *= std::pow(u[k], index.entries[k]) / factorial(index.entries[k]);
  }
  return value;
}

double kernel_density(KernelDensity density, double u) noexcept
{
  const double a = std::abs(u);
  if (a > 1.0) {
    return 0.0;
  }
  switch (density) {
  case KernelDensity::tricube: {
    const double c = 1.0 - a * a * a;
    return (70.0 / 81.0) * c * c * c;
  }
  case KernelDensity::epanechnikov:
    return 0.75 * (1.0 - a * a);
  case KernelDensity::biweight: {
    const double c = 1.0 - a * a;
    return (15.0 / 16.0) * c * c;
  }
  case KernelDensity::uniform:
    return 0.5;
  }
  return 0.0;
}

KernelDensity KernelSpec::density(std::size_t k) const noexcept
{
  if (coordinates.empty()) {
    return KernelDensity::tricube;
  }
  if (coordinates.size() == 1) {
    return coordinates.front();
  }
  return coordinates[std::min(k, coordinates.size() - 1)];
}

double kernel_weight(const KernelSpec& kernel, std::span<const double> u, double bandwidth)
{
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("kernel_weight: bandwidth must be positive");
  }
  double w = 1.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (std::abs(u[k]) > bandwidth) {
      return 0.0;
    }
    w *= kernel_density(kernel.density(k), u[k] / bandwidth);
  }
  return w;
}

double bandwidth_rule(std::size_t n)
{
  if (n < 2) {
    throw std::invalid_argument("bandwidth_rule: sample size must be at least 2");
  }
  const double nn = static_cast<double>(n);
  return 3.0 * std::pow(nn * std::log(nn), -1.0 / 7.0);
}

void SmootherConfig::validate() const
{
  if (dimension == 0) {
    throw std::invalid_argument("SmootherConfig: dimension must be positive");
  }
  if (degree < 0) {
    throw std::invalid_argument("SmootherConfig: degree must be nonnegative");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("SmootherConfig: bandwidth must be positive and finite");
  }
  if (!(variance_floor > 0.0)) {
    throw std::invalid_argument("SmootherConfig: variance floor must be positive");
  }
  if (!(bandwidth_cap_factor >= 1.0) || !std::isfinite(bandwidth_cap_factor)) {
    throw std::invalid_argument("SmootherConfig: bandwidth cap factor must be >= 1");
  }
  if (kernel.coordinates.size() > 1 && kernel.coordinates.size() != dimension) {
    throw std::invalid_argument("SmootherConfig: kernel lists " + std::to_string(kernel.coordinates.size()) +
                                " coordinate densities for dimension " + std::to_string(dimension));
  }
}

std::size_t SmootherConfig::basis_size() const
{
  // binomial(m + d, d)
  double b = 1.0;
  for (int i = 1; i <= degree; ++i) {
    b = b * static_cast<double>(dimension + static_cast<std::size_t>(i)) / i;
  }
  return static_cast<std::size_t>(std::llround(b));
}

WlsSolution solve_normal_equations(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs)
{
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankThreshold);
  cod.compute(gram);
  WlsSolution out;
  out.coefficients = cod.solve(rhs);
  out.rank_deficient = cod.rank() < gram.cols();
  return out;
}

WlsSolution wls_solve(const std::vector<std::vector<double>>& rows,
                      std::span<const double> weights,
                      std::span<const double> targets)
{
  if (rows.size() != weights.size() || rows.size() != targets.size()) {
    throw std::invalid_argument("wls_solve: rows, weights and targets differ in length");
  }
  if (rows.empty()) {
    throw EmptyWindowError("wls_solve: empty window");
  }
  const std::size_t p = rows.front().size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  bool any_positive = false;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != p) {
      throw std::invalid_argument("wls_solve: ragged design rows");
    }
    if (weights[j] < 0.0) {
      throw std::invalid_argument("wls_solve: negative weight");
    }
    if (weights[j] == 0.0) {
      continue;
    }
    any_positive = true;
    const Eigen::Map<const Eigen::VectorXd> row(rows[j].data(), static_cast<Eigen::Index>(p));
    gram.noalias() += weights[j] * row * row.transpose();
    rhs.noalias() += weights[j] * targets[j] * row;
  }
  if (!any_positive) {
    throw EmptyWindowError("wls_solve: empty window (all weights are zero)");
  }
  return solve_normal_equations(gram, rhs);
}

double sigma_from_moments(double mean, double second_moment, double variance_floor, bool* clamped)
{
  const double variance = second_moment - mean * mean;
  const bool use_floor = !(variance >= variance_floor);
  if (clamped != nullptr) {
    *clamped = use_floor;
  }
  return std::sqrt(use_floor ? variance_floor : variance);
}

Smoother::Smoother(const Dataset& data, SmootherConfig config)
  : config_(std::move(config))
  , cases_(complete_cases(data))
{
  config_.validate();
  if (config_.dimension != data.dimension()) {
    throw std::invalid_argument("Smoother: config dimension " + std::to_string(config_.dimension) +
                                " does not match data dimension " + std::to_string(data.dimension()));
  }
  if (cases_.size() == 0) {
    throw InsufficientDataError("no complete cases in dataset");
  }
  basis_ = multi_index_set(config_.dimension, config_.degree);
  assert(basis_.front().order() == 0);
}

void Smoother::accumulate(std::span<const double> x0, double bandwidth, Accumulated& acc) const
{
  const std::size_t m = config_.dimension;
  const std::size_t p = basis_.size();
  const int d = config_.degree;

  acc.gram.setZero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  acc.rhs.setZero(static_cast<Eigen::Index>(p), 2);
  acc.effective = 0;

  std::vector<double> u(m);
  std::vector<double> powers(m * static_cast<std::size_t>(d + 1));
  Eigen::VectorXd phi(static_cast<Eigen::Index>(p));

  for (std::size_t j = 0; j < cases_.size(); ++j) {
    const auto xj = cases_.covariates(j);
    double w = 1.0;
    for (std::size_t k = 0; k < m && w > 0.0; ++k) {
      u[k] = (xj[k] - x0[k]) / bandwidth;
      w *= kernel_density(config_.kernel.density(k), u[k]);
    }
    if (!(w > 0.0)) {
      continue;
    }
    ++acc.effective;

    // powers[k*(d+1) + e] = u_k^e / e!
    for (std::size_t k = 0; k < m; ++k) {
      double* row = powers.data() + k * static_cast<std::size_t>(d + 1);
      row[0] = 1.0;
      for (int e = 1; e <= d; ++e) {
        row[e] = row[e - 1] * u[k] / e;
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      double v = 1.0;
      const auto& entries = basis_[i].entries;
      for (std::size_t k = 0; k < m; ++k) {
        v *= powers[k * static_cast<std::size_t>(d + 1) + static_cast<std::size_t>(entries[k])];
      }
      phi[static_cast<Eigen::Index>(i)] = v;
    }

    const double y = cases_.y[j];
    acc.gram.selfadjointView<Eigen::Lower>().rankUpdate(phi, w);
    acc.rhs.col(0).noalias() += (w * y) * phi;
    acc.rhs.col(1).noalias() += (w * y * y) * phi;
  }
  acc.gram.triangularView<Eigen::StrictlyUpper>() = acc.gram.transpose();
}

MomentFit Smoother::fit(std::span<const double> x0) const
{
  if (x0.size() != config_.dimension) {
    throw std::invalid_argument("Smoother::fit: evaluation point has wrong dimension");
  }
  const double cap = config_.bandwidth * config_.bandwidth_cap_factor;
  double h = config_.bandwidth;
  Accumulated acc;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankThreshold);

  for (int escalations = 0;; ++escalations) {
    accumulate(x0, h, acc);
    const bool at_cap = h >= cap;
    if (acc.effective > 0) {
      cod.compute(acc.gram);
      const bool full_rank = cod.rank() == acc.gram.cols();
      if (full_rank || at_cap) {
        const Eigen::MatrixXd gamma = cod.solve(acc.rhs);
        MomentFit out;
        out.mean = gamma(0, 0);
        out.second_moment = gamma(0, 1);
        out.diagnostics.effective_count = acc.effective;
        out.diagnostics.rank_deficient = !full_rank;
        out.diagnostics.bandwidth_used = h;
        out.diagnostics.escalations = escalations;
        return out;
      }
    } else if (at_cap) {
      throw InsufficientDataError("no complete case within bandwidth " + std::to_string(h) +
                                  " of the evaluation point");
    }
    h = std::min(h * kEscalation, cap);
  }
}

SigmaFit Smoother::sigma(std::span<const double> x0) const
{
  const MomentFit m = fit(x0);
  SigmaFit out;
  out.mean = m.mean;
  out.raw_variance = m.second_moment - m.mean * m.mean;
  out.diagnostics = m.diagnostics;
  out.sigma = sigma_from_moments(m.mean, m.second_moment, config_.variance_floor,
                                 &out.diagnostics.variance_clamped);
  return out;
}

MomentFit fit_moments(const Dataset& data, std::span<const double> x0, const SmootherConfig& config)
{
  return Smoother(data, config).fit(x0);
}

ConditionalMoment fit_conditional_moment(const Dataset& data, std::span<const double> x0,
                                         const SmootherConfig& config, int power)
{
  if (power != 1 && power != 2) {
    throw std::invalid_argument("fit_conditional_moment: power must be 1 or 2");
  }
  const MomentFit m = fit_moments(data, x0, config);
  return {power == 1 ? m.mean : m.second_moment, m.diagnostics};
}

SigmaFit estimate_sigma(const Dataset& data, std::span<const double> x0, const SmootherConfig& config)
{
  return Smoother(data, config).sigma(x0);
}

} // namespace resedf::localpoly
