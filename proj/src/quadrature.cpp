#include "resedf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "resedf/errors.hpp"

namespace resedf::efficiency {

namespace {
constexpr unsigned kMaxDepth = 15;
constexpr double kInternalFactor = 0.1;
}

double quadrature(const std::function<double(double)>& integrand, Interval domain, double tol,
                  std::span<const double> breakpoints)
{
  if (!(domain.lower <= domain.upper)) {
    throw std::invalid_argument("quadrature: empty or reversed domain");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("quadrature: tolerance must be positive");
  }
  std::vector<double> cuts{domain.lower};
  for (const double b : breakpoints) {
    if (b > domain.lower && b < domain.upper) {
      cuts.push_back(b);
    }
  }
  cuts.push_back(domain.upper);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Pieces share the tolerance budget.
  const double piece_tol = tol / static_cast<double>(std::max<std::size_t>(1, cuts.size() - 1));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (a == b) {
      continue;
    }
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, a, b, kMaxDepth, kInternalFactor * piece_tol, &error, &l1);
    if (!std::isfinite(value) || error > piece_tol * std::max(1.0, l1)) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << a << ", " << b << "]: error estimate " << error;
      throw QuadratureError(msg.str());
    }
    total += value;
  }
  return total;
}

} // namespace resedf::efficiency
