#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "resedf/error_law.hpp"

//! Efficient influence functions for linear functionals E[h(e)] of the error
//! law in the heteroskedastic regression model with responses missing at
//! random, and the asymptotic variance of the residual-based EDF.
namespace resedf::efficiency {

//! Observation probability E[delta] = E[pi(X)], in (0, 1].
class MissingnessSummary {
public:
  explicit MissingnessSummary(double observation_rate);
  double observation_rate() const noexcept { return rate_; }

private:
  double rate_;
};

//! Real function together with the points where it jumps.
struct ScalarFunction {
  std::function<double(double)> value;
  std::vector<double> breakpoints;

  double operator()(double z) const { return value(z); }
};

ScalarFunction indicator_below(double t); // z -> 1[z <= t]
ScalarFunction constant_function(double c);

//! -f'(z)/f(z); throws std::domain_error where f(z) = 0.
double score_location(const ErrorLaw& law, double z);
//! -1 - z f'(z)/f(z)
double score_scale(const ErrorLaw& law, double z);

//! J_d^{-1} = [[mu4 - 1, -2 mu3], [-2 mu3, 4]] / (mu4 - mu3^2 - 1)
Eigen::Matrix2d jd_inverse(double third_moment, double fourth_moment);

//! Score vector l(z) = (l1, l2) minus its projection on the span of z, z^2 - mu3 z - 1.
Eigen::Vector2d l0(const ErrorLaw& law, double z);
Eigen::Vector2d ld(const ErrorLaw& law, double z);

//! Everything from the canonical gradient that depends only on the law.
struct GradientComponents {
  const ErrorLaw* law;
  Eigen::Matrix2d jd_inv;

  explicit GradientComponents(const ErrorLaw& law);
  double l1(double z) const { return score_location(*law, z); }
  double l2(double z) const { return score_scale(*law, z); }
  Eigen::Vector2d l0(double z) const { return efficiency::l0(*law, z); }
  Eigen::Vector2d ld(double z) const { return efficiency::ld(*law, z); }
};

//! Projection of h onto {s : E s(e) = E e s(e) = E e^2 s(e) = 0}. The three
//! moments of h are computed once by quadrature at construction.
class ProjectedFunction {
public:
  ProjectedFunction(const ErrorLaw& law, ScalarFunction h);

  double operator()(double z) const;
  const std::vector<double>& breakpoints() const noexcept { return h_.breakpoints; }

  double mean_h() const noexcept { return mean_h_; }
  double mean_eh() const noexcept { return mean_eh_; }
  double mean_e2h() const noexcept { return mean_e2h_; }

private:
  ScalarFunction h_;
  double mean_h_;
  double mean_eh_;
  double mean_e2h_;
  double third_;
  double denominator_;
};

ProjectedFunction h0_projection(const ErrorLaw& law, ScalarFunction h);

//! (delta/E delta) [1[e <= t] - F(t) + f(t){e + (t/2)(e^2 - 1)}]
double influence_F(const ErrorLaw& law, const MissingnessSummary& miss, bool delta, double e, double t);

//! (delta/E delta) [h0(e) - E[h0 l0]' G^{-1} l_d(e)] with G = E[l_d l_d'].
//! G is the matrix `jd_inverse` returns, so the correction uses its inverse.
class EfficientInfluence {
public:
  EfficientInfluence(const ErrorLaw& law, const MissingnessSummary& miss, ScalarFunction h);

  double operator()(bool delta, double e) const;
  const Eigen::Vector2d& h0_l0_moment() const noexcept { return h0_l0_; }
  const ProjectedFunction& projection() const noexcept { return h0_; }

private:
  const ErrorLaw* law_;
  double rate_;
  ProjectedFunction h0_;
  Eigen::Vector2d h0_l0_;
  Eigen::Matrix2d gram_inv_;
};

EfficientInfluence efficient_influence_general(const ErrorLaw& law, const MissingnessSummary& miss,
                                               ScalarFunction h);

//! E[phi(delta, e, t)^2] for the EDF influence function.
double asymptotic_variance_F(const ErrorLaw& law, const MissingnessSummary& miss, double t);

//! Asymptotic variance at every grid point (OpenMP over the grid).
std::vector<double> amse_curve(const ErrorLaw& law, const MissingnessSummary& miss,
                               std::span<const double> grid);

//! Trapezoidal integral dt of the asymptotic variance over `grid`.
double amise(const ErrorLaw& law, const MissingnessSummary& miss, std::span<const double> grid);

double trapezoid(std::span<const double> grid, std::span<const double> values);

} // namespace resedf::efficiency
