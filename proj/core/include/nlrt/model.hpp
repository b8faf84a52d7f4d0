#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nlrt/increment_law.hpp"
#include "nlrt/mixture.hpp"
#include "nlrt/perturbation.hpp"
#include "nlrt/walk.hpp"

namespace nlrt {

/// Z_n = S_n + xi_n + zeta_n with zeta_n = T_n' Q T_n / n + zeta''_n.
struct PerturbedWalkModel {
  IncrementLaw increment = IncrementLaw::exponential(1.0);
  VectorLaw vector;
  StationarySpec stationary;
  QuadraticSpec quadratic = QuadraticSpec::none();
  ResidualSpec residual;
  std::int64_t n0 = 1;
  double horizon_factor = 10.0;

  void validate() const;

  double mu() const { return increment.mean(); }
  double sigma2() const { return increment.variance(); }
  std::size_t dim() const { return vector.dim(); }
  /// Interarrival rate when the stationary part reads gaps.
  std::optional<double> arrival_rate() const;

  /// Limit law of zeta'_n from the analytic covariance of Y_1.
  ChiSquareMixture mixture() const;
  /// lambda plus the limiting mean of the residual.
  double zeta_limit_mean() const;

  /// Last index examined when looking for a crossing of level a.
  std::size_t horizon(double a) const;
};

/// Walks one path of the model forward, one index per step(). Before index 1
/// the stepper draws window().size() extra W's so xi_1 already has a full history.
class PathStepper {
 public:
  /// min_window widens window() beyond what xi needs, for event predicates.
  PathStepper(const PerturbedWalkModel& model, const RngStream& stream,
              std::size_t min_window = 0);

  void step();

  std::int64_t n() const noexcept { return n_; }
  double s() const noexcept { return s_; }
  double xi() const noexcept { return xi_; }
  double zeta_quadratic() const noexcept { return zq_; }
  double zeta_residual() const noexcept { return zr_; }
  double zeta() const noexcept { return zq_ + zr_; }
  double z() const noexcept { return s_ + xi_ + zq_ + zr_; }
  const Draw& current() const noexcept { return buf_[pos_]; }
  std::span<const double> t() const noexcept { return t_; }
  std::span<const double> y() const noexcept { return y_; }
  /// W_n, W_{n-1}, ... newest first, `depth` long.
  std::span<const Draw> window() const noexcept { return {buf_.data() + pos_, depth_}; }

 private:
  void push(const Draw& w);

  const PerturbedWalkModel* model_;
  DrawSource source_;
  std::size_t depth_;
  std::vector<Draw> buf_;
  std::size_t pos_;
  std::vector<double> y_;
  std::vector<double> t_;
  std::int64_t n_ = 0;
  double s_ = 0.0;
  double xi_ = 0.0;
  double zq_ = 0.0;
  double zr_ = 0.0;
};

}  // namespace nlrt
