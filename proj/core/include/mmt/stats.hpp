#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mmt {

/// Streaming mean / variance (Welford), mergeable in a fixed order.
class MeanAccumulator {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const MeanAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n_a = static_cast<double>(count_);
    const double n_b = static_cast<double>(other.count_);
    const double n = n_a + n_b;
    const double delta = other.mean_ - mean_;
    mean_ += delta * (n_b / n);
    m2_ += other.m2_ + delta * delta * (n_a * n_b / n);
    count_ += other.count_;
  }

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double stderr_of_mean() const {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// One accumulator per grid point.
class MeanAccumulatorArray {
 public:
  MeanAccumulatorArray() = default;
  explicit MeanAccumulatorArray(std::size_t size) : acc_(size) {}

  MeanAccumulator& operator[](std::size_t i) { return acc_[i]; }
  const MeanAccumulator& operator[](std::size_t i) const { return acc_[i]; }
  std::size_t size() const { return acc_.size(); }

  void merge(const MeanAccumulatorArray& other) {
    if (acc_.empty()) {
      acc_ = other.acc_;
      return;
    }
    for (std::size_t i = 0; i < acc_.size() && i < other.acc_.size(); ++i) acc_[i].merge(other.acc_[i]);
  }

 private:
  std::vector<MeanAccumulator> acc_;
};

}  // namespace mmt
