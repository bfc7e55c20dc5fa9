#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "resedf/dataset.hpp"
#include "resedf/error_law.hpp"

namespace resedf::testing {

inline double normal_pdf(double z, double mean = 0.0, double sd = 1.0)
{
  const double u = (z - mean) / sd;
  return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double z, double mean = 0.0, double sd = 1.0)
{
  return 0.5 * std::erfc(-(z - mean) / (sd * std::numbers::sqrt2));
}

//! Skewed bimodal law: 0.3 N(1.4, 0.4^2) + 0.7 N(-0.6, 0.4^2), mean 0, variance 1.
//! Moments come from the component formulas, not from quadrature.
inline efficiency::ErrorLaw skewed_mixture_law()
{
  constexpr double p = 0.3, m1 = 1.4, m2 = -0.6, s = 0.4;
  auto mu3 = [&](double m) { return m * m * m + 3.0 * m * s * s; };
  auto mu4 = [&](double m) { return m * m * m * m + 6.0 * m * m * s * s + 3.0 * s * s * s * s; };

  efficiency::ErrorLaw::Definition def;
  def.name = "skewed-mixture";
  def.density = [=](double z) { return p * normal_pdf(z, m1, s) + (1 - p) * normal_pdf(z, m2, s); };
  def.cdf = [=](double z) { return p * normal_cdf(z, m1, s) + (1 - p) * normal_cdf(z, m2, s); };
  def.density_derivative = [=](double z) {
    return -p * (z - m1) / (s * s) * normal_pdf(z, m1, s) - (1 - p) * (z - m2) / (s * s) * normal_pdf(z, m2, s);
  };
  def.third_moment = p * mu3(m1) + (1 - p) * mu3(m2);
  def.fourth_moment = p * mu4(m1) + (1 - p) * mu4(m2);
  def.support = {-6.0, 6.0};
  return efficiency::ErrorLaw::from_definition(std::move(def));
}

//! n rows with X ~ U(lo, hi)^m, y = g(x), every third row unobserved.
template <class F>
Dataset uniform_design(std::size_t n, std::size_t m, double lo, double hi, std::mt19937_64& rng, F&& g,
                       bool with_missing = true)
{
  Dataset data(m);
  std::uniform_real_distribution<double> unit(lo, hi);
  std::vector<double> x(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (auto& v : x) {
      v = unit(rng);
    }
    const bool observed = !with_missing || j % 3 != 2;
    data.add_row(x, g(x), observed);
  }
  return data;
}

//! Copy of `data` with every delta = 0 response replaced by `value`.
inline Dataset corrupt_missing(const Dataset& data, double value)
{
  Dataset out(data.dimension());
  for (std::size_t j = 0; j < data.size(); ++j) {
    const bool obs = data.observed(j);
    out.add_row(data.covariates(j), obs ? data.response(j) : value, obs);
  }
  return out;
}

} // namespace resedf::testing
