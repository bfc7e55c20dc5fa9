#include "resedf/error_law.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "resedf/errors.hpp"

namespace resedf::efficiency {

ErrorLaw ErrorLaw::standard_normal()
{
  Definition def;
  def.name = "normal";
  def.density = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
  def.cdf = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  def.density_derivative = [](double z) {
    return -z * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  };
  def.third_moment = 0.0;
  def.fourth_moment = 3.0;
  def.support = kDefaultDomain;
  return ErrorLaw(std::move(def), true);
}

ErrorLaw ErrorLaw::from_definition(Definition def, double tol)
{
  if (!def.density || !def.cdf || !def.density_derivative) {
    throw std::invalid_argument("ErrorLaw: density, cdf and density derivative are required");
  }
  ErrorLaw law(std::move(def), false);
  if (!(law.moment_denominator() > 0.0)) {
    throw DegenerateMomentsError("ErrorLaw: E[e^4] - E[e^3]^2 - 1 must be positive");
  }

  auto check = [&](const char* what, double got, double want) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream msg;
      msg << "ErrorLaw '" << law.name() << "': " << what << " is " << got << ", expected " << want;
      throw std::invalid_argument(msg.str());
    }
  };
  check("total mass", law.expectation([](double) { return 1.0; }), 1.0);
  check("mean", law.expectation([](double z) { return z; }), 0.0);
  check("variance", law.expectation([](double z) { return z * z; }), 1.0);
  check("third moment", law.expectation([](double z) { return z * z * z; }), law.third_moment());
  check("fourth moment", law.expectation([](double z) { return z * z * z * z; }), law.fourth_moment());

  const double fisher = law.expectation([&law](double z) {
    const double f = law.density(z);
    if (!(f > 0.0)) {
      return 0.0;
    }
    const double score = law.density_derivative(z) / f;
    return (1.0 + z * z) * score * score;
  });
  if (!std::isfinite(fisher)) {
    throw std::invalid_argument("ErrorLaw: location/scale Fisher information is not finite");
  }
  return law;
}

double ErrorLaw::moment_denominator() const noexcept
{
  return def_.fourth_moment - def_.third_moment * def_.third_moment - 1.0;
}

double ErrorLaw::expectation(const std::function<double(double)>& g,
                             std::span<const double> extra_breakpoints, double tol) const
{
  std::vector<double> cuts(def_.breakpoints);
  cuts.insert(cuts.end(), extra_breakpoints.begin(), extra_breakpoints.end());
  return quadrature([&](double z) { return g(z) * def_.density(z); }, def_.support, tol, cuts);
}

double ErrorLaw::sample(std::mt19937_64& engine) const
{
  if (normal_) {
    return std::normal_distribution<double>(0.0, 1.0)(engine);
  }
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  if (def_.quantile) {
    return def_.quantile(u);
  }
  const double lo = def_.support.lower;
  const double hi = def_.support.upper;
  if (u <= def_.cdf(lo)) {
    return lo;
  }
  if (u >= def_.cdf(hi)) {
    return hi;
  }
  boost::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve([&](double z) { return def_.cdf(z) - u; }, lo, hi,
                                                      boost::math::tools::eps_tolerance<double>(50),
                                                      iterations);
  return 0.5 * (root.first + root.second);
}

} // namespace resedf::efficiency
