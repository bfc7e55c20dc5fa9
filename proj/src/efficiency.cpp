#include "resedf/efficiency.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "resedf/errors.hpp"

namespace resedf::efficiency {

MissingnessSummary::MissingnessSummary(double observation_rate)
  : rate_(observation_rate)
{
  if (!(observation_rate > 0.0 && observation_rate <= 1.0)) {
    throw std::invalid_argument("observation rate E[delta] must lie in (0, 1], got " +
                                std::to_string(observation_rate));
  }
}

ScalarFunction indicator_below(double t)
{
  return {[t](double z) { return z <= t ? 1.0 : 0.0; }, {t}};
}

ScalarFunction constant_function(double c)
{
  return {[c](double) { return c; }, {}};
}

double score_location(const ErrorLaw& law, double z)
{
  const double f = law.density(z);
  if (!(f > 0.0)) {
    throw std::domain_error("score_location: density vanishes at z = " + std::to_string(z));
  }
  return -law.density_derivative(z) / f;
}

double score_scale(const ErrorLaw& law, double z)
{
  return -1.0 + z * score_location(law, z);
}

Eigen::Matrix2d jd_inverse(double third_moment, double fourth_moment)
{
  const double denominator = fourth_moment - third_moment * third_moment - 1.0;
  if (!(denominator > 0.0)) {
    throw DegenerateMomentsError("jd_inverse: E[e^4] - E[e^3]^2 - 1 must be positive");
  }
  Eigen::Matrix2d m;
  m << fourth_moment - 1.0, -2.0 * third_moment, -2.0 * third_moment, 4.0;
  return m / denominator;
}

namespace {

// (z^2 - mu3 z - 1) / (mu4 - mu3^2 - 1)
double quadratic_weight(const ErrorLaw& law, double z)
{
  const double denominator = law.moment_denominator();
  if (!(denominator > 0.0)) {
    throw DegenerateMomentsError("E[e^4] - E[e^3]^2 - 1 must be positive");
  }
  return (z * z - law.third_moment() * z - 1.0) / denominator;
}

} // namespace

Eigen::Vector2d ld(const ErrorLaw& law, double z)
{
  const double c = quadratic_weight(law, z);
  return {z - c * law.third_moment(), 2.0 * c};
}

Eigen::Vector2d l0(const ErrorLaw& law, double z)
{
  const Eigen::Vector2d score{score_location(law, z), score_scale(law, z)};
  return score - ld(law, z);
}

GradientComponents::GradientComponents(const ErrorLaw& law_ref)
  : law(&law_ref)
  , jd_inv(jd_inverse(law_ref.third_moment(), law_ref.fourth_moment()))
{}

ProjectedFunction::ProjectedFunction(const ErrorLaw& law, ScalarFunction h)
  : h_(std::move(h))
  , third_(law.third_moment())
  , denominator_(law.moment_denominator())
{
  if (!(denominator_ > 0.0)) {
    throw DegenerateMomentsError("h0_projection: E[e^4] - E[e^3]^2 - 1 must be positive");
  }
  mean_h_ = law.expectation(h_.value, h_.breakpoints);
  mean_eh_ = law.expectation([this](double z) { return z * h_(z); }, h_.breakpoints);
  mean_e2h_ = law.expectation([this](double z) { return z * z * h_(z); }, h_.breakpoints);
}

double ProjectedFunction::operator()(double z) const
{
  const double c = (z * z - third_ * z - 1.0) / denominator_;
  return h_(z) - mean_h_ - z * mean_eh_ - c * (mean_e2h_ - third_ * mean_eh_ - mean_h_);
}

ProjectedFunction h0_projection(const ErrorLaw& law, ScalarFunction h)
{
  return ProjectedFunction(law, std::move(h));
}

double influence_F(const ErrorLaw& law, const MissingnessSummary& miss, bool delta, double e, double t)
{
  if (!delta) {
    return 0.0;
  }
  const double indicator = e <= t ? 1.0 : 0.0;
  const double core = indicator - law.cdf(t) + law.density(t) * (e + 0.5 * t * (e * e - 1.0));
  return core / miss.observation_rate();
}

EfficientInfluence::EfficientInfluence(const ErrorLaw& law, const MissingnessSummary& miss, ScalarFunction h)
  : law_(&law)
  , rate_(miss.observation_rate())
  , h0_(law, std::move(h))
  , gram_inv_(jd_inverse(law.third_moment(), law.fourth_moment()).inverse())
{
  const auto& cuts = h0_.breakpoints();
  h0_l0_[0] = law.expectation([this](double z) { return h0_(z) * l0(*law_, z)[0]; }, cuts);
  h0_l0_[1] = law.expectation([this](double z) { return h0_(z) * l0(*law_, z)[1]; }, cuts);
}

double EfficientInfluence::operator()(bool delta, double e) const
{
  if (!delta) {
    return 0.0;
  }
  const double correction = h0_l0_.dot(gram_inv_ * ld(*law_, e));
  return (h0_(e) - correction) / rate_;
}

EfficientInfluence efficient_influence_general(const ErrorLaw& law, const MissingnessSummary& miss,
                                               ScalarFunction h)
{
  return EfficientInfluence(law, miss, std::move(h));
}

double asymptotic_variance_F(const ErrorLaw& law, const MissingnessSummary& miss, double t)
{
  const double Ft = law.cdf(t);
  const double ft = law.density(t);
  const double cut[] = {t};
  const double second_moment = law.expectation(
    [=](double z) {
      const double core = (z <= t ? 1.0 : 0.0) - Ft + ft * (z + 0.5 * t * (z * z - 1.0));
      return core * core;
    },
    cut);
  return second_moment / miss.observation_rate();
}

std::vector<double> amse_curve(const ErrorLaw& law, const MissingnessSummary& miss,
                               std::span<const double> grid)
{
  std::vector<double> out(grid.size());
  const auto count = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = asymptotic_variance_F(law, miss, grid[static_cast<std::size_t>(i)]);
  }
  return out;
}

double trapezoid(std::span<const double> grid, std::span<const double> values)
{
  if (grid.size() != values.size()) {
    throw std::invalid_argument("trapezoid: grid and values differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    total += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  }
  return total;
}

double amise(const ErrorLaw& law, const MissingnessSummary& miss, std::span<const double> grid)
{
  const auto curve = amse_curve(law, miss, grid);
  return trapezoid(grid, curve);
}

} // namespace resedf::efficiency
