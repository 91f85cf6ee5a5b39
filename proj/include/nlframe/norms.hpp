#pragma once

#include <limits>
#include <string>

#include "nlframe/common.hpp"

namespace nlframe {

// A norm on finite-dimensional coordinate vectors: either a p-norm with
// p in [1, inf] or a weighted-l1 norm, times a positive scale factor.
class NormSpec {
 public:
  static NormSpec lp(double p, double scale = 1.0);
  static NormSpec l1(double scale = 1.0) { return lp(1.0, scale); }
  static NormSpec l2(double scale = 1.0) { return lp(2.0, scale); }
  static NormSpec linf(double scale = 1.0) {
    return lp(std::numeric_limits<double>::infinity(), scale);
  }
  static NormSpec weighted_l1(Vector weights, double scale = 1.0);

  double operator()(const Vector& v) const;

  bool is_p_norm() const { return weights_.size() == 0; }
  bool is_weighted() const { return weights_.size() > 0; }
  bool is_l2() const;
  bool is_l1() const;
  bool is_linf() const;
  double p() const { return p_; }
  double scale() const { return scale_; }
  const Vector& weights() const { return weights_; }

  NormSpec scaled(double factor) const;
  std::string describe() const;

 private:
  NormSpec() = default;
  double p_ = 2.0;
  double scale_ = 1.0;
  Vector weights_;  // nonempty iff weighted-l1
};

}  // namespace nlframe
