#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wfit/errors.hpp"

namespace wfit {

/// Validated lifetimes in days. Values are kept in input order; a sorted copy is
/// maintained alongside. Ties are allowed.
class Sample {
 public:
  Sample() = default;

  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("sample is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("sample value " + std::to_string(i) + " is not a positive finite number");
      }
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
    sum_ = std::accumulate(values_.begin(), values_.end(), 0.0);
    for (double v : values_) sum_log_ += std::log(v);
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> sorted() const noexcept { return sorted_; }

  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  double sum() const noexcept { return sum_; }
  double sum_log() const noexcept { return sum_log_; }
  double mean() const { return sum_ / static_cast<double>(size()); }

  std::size_t distinct_count() const {
    if (sorted_.empty()) return 0;
    std::size_t k = 1;
    for (std::size_t i = 1; i < sorted_.size(); ++i) k += sorted_[i] != sorted_[i - 1];
    return k;
  }

  /// New sample with every value multiplied by c > 0.
  Sample scaled(double c) const {
    std::vector<double> v(values_);
    for (auto& x : v) x *= c;
    return Sample(std::move(v));
  }

  Sample subset(std::span<const std::size_t> indices) const {
    std::vector<double> v;
    v.reserve(indices.size());
    for (auto i : indices) v.push_back(values_.at(i));
    return Sample(std::move(v));
  }

  friend bool operator==(const Sample& a, const Sample& b) { return a.values_ == b.values_; }

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  double sum_ = 0.0;
  double sum_log_ = 0.0;
};

}  // namespace wfit
