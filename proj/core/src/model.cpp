#include "nlrt/model.hpp"

#include <algorithm>
#include <cmath>

#include "nlrt/error.hpp"

namespace nlrt {

void PerturbedWalkModel::validate() const {
  increment.validate();
  stationary.validate();
  quadratic.validate();
  if (!(mu() > 0.0)) throw ConfigError("model: increment mean must be > 0");
  if (n0 < 1) throw ConfigError("model: n0 must be >= 1");
  if (!(std::isfinite(horizon_factor) && horizon_factor >= 1.0))
    throw ConfigError("model: horizon_factor must be finite and >= 1");
  if (!quadratic.q.empty() && quadratic.dim() != vector.dim())
    throw ConfigError("model: Q is " + std::to_string(quadratic.dim()) + "x" +
                      std::to_string(quadratic.dim()) + " but the vector law has dimension " +
                      std::to_string(vector.dim()));
  if (residual.kind == ResidualSpec::Kind::hook && !residual.hook)
    throw ConfigError("model: residual hook kind without a function");
}

std::optional<double> PerturbedWalkModel::arrival_rate() const {
  if (stationary.needs_gaps()) return stationary.arrival_rate;
  return std::nullopt;
}

ChiSquareMixture PerturbedWalkModel::mixture() const {
  if (quadratic.is_zero()) return ChiSquareMixture({0.0});
  return mixture_weights(quadratic, CovarianceEstimate::analytic(vector.covariance(increment)));
}

double PerturbedWalkModel::zeta_limit_mean() const {
  return mixture_mean(mixture()) + residual.asymptotic_mean();
}

std::size_t PerturbedWalkModel::horizon(double a) const {
  return static_cast<std::size_t>(std::ceil(horizon_factor * (a / mu() + 100.0)));
}

PathStepper::PathStepper(const PerturbedWalkModel& model, const RngStream& stream,
                         std::size_t min_window)
    : model_(&model),
      source_(model.increment, model.vector, stream, model.arrival_rate()),
      depth_(std::max({std::size_t{1}, model.stationary.window(), min_window})),
      buf_(4 * depth_ + 64),
      pos_(buf_.size()),
      y_(model.vector.dim(), 0.0),
      t_(model.vector.dim(), 0.0) {
  for (std::size_t i = 0; i < depth_; ++i) push(source_.next(y_));
  std::fill(y_.begin(), y_.end(), 0.0);
}

void PathStepper::push(const Draw& w) {
  if (pos_ == 0) {
    // Slide the newest depth-1 draws to the far end; amortized O(1).
    const std::size_t keep = depth_ - 1;
    std::copy_backward(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(keep), buf_.end());
    pos_ = buf_.size() - keep;
  }
  buf_[--pos_] = w;
}

void PathStepper::step() {
  push(source_.next(y_));
  ++n_;
  s_ += buf_[pos_].x;
  for (std::size_t i = 0; i < t_.size(); ++i) t_[i] += y_[i];
  xi_ = xi_value(model_->stationary, window());
  zq_ = model_->quadratic.q.empty() ? 0.0 : nlrt::zeta_quadratic(t_, n_, model_->quadratic);
  if (model_->residual.kind != ResidualSpec::Kind::zero)
    zr_ = model_->residual.evaluate({n_, s_, xi_, t_, window()});
}

}  // namespace nlrt
