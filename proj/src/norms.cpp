#include "nlframe/norms.hpp"

#include <cmath>
#include <sstream>

namespace nlframe {

NormSpec NormSpec::lp(double p, double scale) {
  require(p >= 1.0, "NormSpec: p must be >= 1");
  require(scale > 0.0 && std::isfinite(scale), "NormSpec: scale must be positive");
  NormSpec n;
  n.p_ = p;
  n.scale_ = scale;
  return n;
}

NormSpec NormSpec::weighted_l1(Vector weights, double scale) {
  require(weights.size() > 0, "NormSpec: empty weight vector");
  require((weights.array() > 0.0).all() && all_finite(weights),
          "NormSpec: weights must be positive and finite");
  require(scale > 0.0 && std::isfinite(scale), "NormSpec: scale must be positive");
  NormSpec n;
  n.p_ = 1.0;
  n.scale_ = scale;
  n.weights_ = std::move(weights);
  return n;
}

double NormSpec::operator()(const Vector& v) const {
  if (is_weighted()) {
    require(v.size() == weights_.size(), "NormSpec: dimension mismatch with weights");
    return scale_ * (weights_.array() * v.array().abs()).sum();
  }
  if (std::isinf(p_)) return scale_ * v.lpNorm<Eigen::Infinity>();
  if (p_ == 1.0) return scale_ * v.lpNorm<1>();
  if (p_ == 2.0) return scale_ * v.norm();
  return scale_ * std::pow(v.array().abs().pow(p_).sum(), 1.0 / p_);
}

bool NormSpec::is_l2() const { return is_p_norm() && p_ == 2.0; }
bool NormSpec::is_l1() const { return is_p_norm() && p_ == 1.0; }
bool NormSpec::is_linf() const { return is_p_norm() && std::isinf(p_); }

NormSpec NormSpec::scaled(double factor) const {
  require(factor > 0.0 && std::isfinite(factor), "NormSpec: bad scale factor");
  NormSpec n = *this;
  n.scale_ = scale_ * factor;
  return n;
}

std::string NormSpec::describe() const {
  std::ostringstream os;
  if (is_weighted()) {
    os << "weighted-l1";
  } else if (std::isinf(p_)) {
    os << "linf";
  } else {
    os << "l" << p_;
  }
  if (scale_ != 1.0) os << " x" << scale_;
  return os.str();
}

}  // namespace nlframe
