#include "resedf/dataset.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace resedf {

Dataset::Dataset(std::size_t dimension)
  : dimension_(dimension)
{
  if (dimension == 0) {
    throw std::invalid_argument("Dataset: covariate dimension must be positive");
  }
}

void Dataset::add_row(std::span<const double> x, double y, bool observed)
{
  if (x.size() != dimension_) {
    throw std::invalid_argument("Dataset::add_row: expected " + std::to_string(dimension_) +
                                " covariates, got " + std::to_string(x.size()));
  }
  x_.insert(x_.end(), x.begin(), x.end());
  y_.push_back(y);
  observed_.push_back(observed ? 1 : 0);
  if (observed) {
    ++complete_;
  }
}

void Dataset::reserve(std::size_t rows)
{
  x_.reserve(rows * dimension_);
  y_.reserve(rows);
  observed_.reserve(rows);
}

std::span<const double> Dataset::covariates(std::size_t row) const
{
  if (row >= size()) {
    throw std::out_of_range("Dataset::covariates: row out of range");
  }
  return {x_.data() + row * dimension_, dimension_};
}

double Dataset::response(std::size_t row) const
{
  if (!observed(row)) {
    throw std::logic_error("Dataset::response: row " + std::to_string(row) +
                           " has a missing response");
  }
  return y_[row];
}

std::vector<Bounds> Dataset::bounds() const
{
  if (!bounds_.empty()) {
    return bounds_;
  }
  std::vector<Bounds> out(dimension_, Bounds{std::numeric_limits<double>::infinity(),
                                             -std::numeric_limits<double>::infinity()});
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t k = 0; k < dimension_; ++k) {
      const double v = x_[j * dimension_ + k];
      out[k].lower = std::min(out[k].lower, v);
      out[k].upper = std::max(out[k].upper, v);
    }
  }
  return out;
}

void Dataset::set_bounds(std::vector<Bounds> bounds)
{
  if (!bounds.empty() && bounds.size() != dimension_) {
    throw std::invalid_argument("Dataset::set_bounds: dimension mismatch");
  }
  for (const auto& b : bounds) {
    if (!(b.lower <= b.upper)) {
      throw std::invalid_argument("Dataset::set_bounds: lower bound exceeds upper bound");
    }
  }
  bounds_ = std::move(bounds);
}

CompleteCases complete_cases(const Dataset& data)
{
  CompleteCases cc;
  cc.dimension = data.dimension();
  cc.x.reserve(data.complete_count() * data.dimension());
  cc.y.reserve(data.complete_count());
  cc.source_rows.reserve(data.complete_count());
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (!data.observed(j)) {
      continue;
    }
    const auto x = data.covariates(j);
    cc.x.insert(cc.x.end(), x.begin(), x.end());
    cc.y.push_back(data.response(j));
    cc.source_rows.push_back(j);
  }
  return cc;
}

} // namespace resedf
