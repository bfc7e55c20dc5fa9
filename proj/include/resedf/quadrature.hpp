#pragma once

#include <functional>
#include <span>

namespace resedf::efficiency {

struct Interval {
  double lower;
  double upper;
};

inline constexpr Interval kDefaultDomain{-10.0, 10.0};
inline constexpr double kDefaultTolerance = 1e-8;

//! Adaptive Gauss-Kronrod integral of `integrand` over `domain`.
//!
//! The domain is split at every breakpoint strictly inside it, so integrands
//! with jumps (indicators) are integrated piecewise-smooth. Throws
//! QuadratureError if a piece's error estimate stays above
//! tol * max(1, |integral|_1) after the maximum number of bisections.
double quadrature(const std::function<double(double)>& integrand,
                  Interval domain = kDefaultDomain,
                  double tol = kDefaultTolerance,
                  std::span<const double> breakpoints = {});

} // namespace resedf::efficiency
