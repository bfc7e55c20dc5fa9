#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "resedf/quadrature.hpp"

namespace resedf::efficiency {

//! Standardized error distribution (mean 0, variance 1).
//!
//! Besides f, F and f', the efficiency formulas need E[e^3] and E[e^4]; the
//! moments and the standardization are checked by quadrature when a law is
//! built from a user definition.
class ErrorLaw {
public:
  struct Definition {
    std::string name;
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(double)> density_derivative;
    //! Optional; sampling falls back to numerical inversion of `cdf`.
    std::function<double(double)> quantile;
    double third_moment = 0.0;
    double fourth_moment = 3.0;
    //! Integration range carrying all but a negligible amount of mass.
    Interval support = kDefaultDomain;
    //! Points where f or f' is not smooth.
    std::vector<double> breakpoints;
  };

  static ErrorLaw standard_normal();

  //! Validates mean 0, variance 1, the stated third and fourth moments,
  //! mu4 - mu3^2 - 1 > 0 and finite location/scale Fisher information.
  static ErrorLaw from_definition(Definition definition, double tol = 1e-6);

  double density(double z) const { return def_.density(z); }
  double cdf(double z) const { return def_.cdf(z); }
  double density_derivative(double z) const { return def_.density_derivative(z); }
  double third_moment() const noexcept { return def_.third_moment; }
  double fourth_moment() const noexcept { return def_.fourth_moment; }
  //! mu4 - mu3^2 - 1
  double moment_denominator() const noexcept;
  Interval support() const noexcept { return def_.support; }
  const std::vector<double>& breakpoints() const noexcept { return def_.breakpoints; }
  const std::string& name() const noexcept { return def_.name; }
  bool is_standard_normal() const noexcept { return normal_; }

  //! E[g(e)] by quadrature over the support; `extra_breakpoints` mark jumps of g.
  double expectation(const std::function<double(double)>& g,
                     std::span<const double> extra_breakpoints = {},
                     double tol = kDefaultTolerance) const;

  double sample(std::mt19937_64& engine) const;

private:
  explicit ErrorLaw(Definition def, bool normal)
    : def_(std::move(def))
    , normal_(normal)
  {}

  Definition def_;
  bool normal_ = false;
};

} // namespace resedf::efficiency
