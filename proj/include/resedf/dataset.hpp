#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace resedf {

struct Bounds {
  double lower;
  double upper;
};

//! Sample of triples (X, delta*Y, delta) with X in R^m.
//!
//! Responses of rows with delta = 0 are stored (so a file or generator can hand
//! them over verbatim) but cannot be read back: `response()` refuses them.
//! Estimators only ever see the rows extracted by `complete_cases()`.
class Dataset {
public:
  explicit Dataset(std::size_t dimension);

  void add_row(std::span<const double> x, double y, bool observed);
  void reserve(std::size_t rows);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return observed_.size(); }
  std::size_t complete_count() const noexcept { return complete_; }

  std::span<const double> covariates(std::size_t row) const;
  bool observed(std::size_t row) const { return observed_.at(row) != 0; }
  std::span<const std::uint8_t> indicators() const noexcept { return observed_; }

  //! Response of a complete case; throws std::logic_error for delta = 0 rows.
  double response(std::size_t row) const;

  //! Raw response column including delta = 0 rows. Not for estimators.
  std::span<const double> stored_responses() const noexcept { return y_; }

  //! Per-coordinate covariate range; explicit bounds override the observed range.
  std::vector<Bounds> bounds() const;
  void set_bounds(std::vector<Bounds> bounds);

private:
  std::size_t dimension_;
  std::size_t complete_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<std::uint8_t> observed_;
  std::vector<Bounds> bounds_;
};

//! Contiguous copy of the delta = 1 rows, in original order.
struct CompleteCases {
  std::size_t dimension = 0;
  std::vector<double> x; // row-major, dimension entries per row
  std::vector<double> y;
  std::vector<std::size_t> source_rows;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> covariates(std::size_t i) const
  {
    return {x.data() + i * dimension, dimension};
  }
};

CompleteCases complete_cases(const Dataset& data);

} // namespace resedf
