#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlrt/increment_law.hpp"
#include "nlrt/matrix.hpp"
#include "nlrt/parallel.hpp"
#include "nlrt/rng.hpp"

namespace nlrt {

enum class VectorKind {
  none,                // d = 0
  centered_increment,  // Y = X - mu, d = 1
  gaussian,            // Y ~ N(0, covariance), independent of X
};

std::string to_string(VectorKind k);
VectorKind vector_kind_from_string(const std::string& name);

/// Law of the mean-zero vector increments Y_k = psi(W_k).
class VectorLaw {
 public:
  VectorLaw() = default;
  static VectorLaw none() { return {}; }
  static VectorLaw centered_increment();
  static VectorLaw gaussian(Matrix covariance);

  VectorKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept;
  /// Covariance of Y_1 given the increment law it may be built from.
  Matrix covariance(const IncrementLaw& law) const;
  const Matrix& gaussian_covariance() const noexcept { return covariance_; }
  const Matrix& cholesky() const noexcept { return factor_; }

  friend bool operator==(const VectorLaw& a, const VectorLaw& b) {
    return a.kind_ == b.kind_ && a.covariance_ == b.covariance_;
  }

 private:
  VectorKind kind_ = VectorKind::none;
  Matrix covariance_;
  Matrix factor_;  // lower-triangular, factor * factor' = covariance
};

/// One driving element W_k as seen by the maps phi, psi and xi.
struct Draw {
  double x = 0.0;     // X_k = phi(W_k)
  double base = 0.0;  // base variate of the increment law (a lifetime in staggered entry)
  double gap = 0.0;   // interarrival time eta_k, when the model carries one
};

/// Sequential generator of W_1, W_2, ... from one RngStream. Per draw it
/// consumes, in order: the increment, the interarrival gap (if enabled) and
/// the Gaussian coordinates (if any).
class DrawSource {
 public:
  DrawSource(const IncrementLaw& law, const VectorLaw& vector_law, const RngStream& stream,
             std::optional<double> arrival_rate = std::nullopt);

  Draw next(std::span<double> y);
  std::size_t dim() const noexcept { return dim_; }

 private:
  Philox4x32 gen_;
  IncrementLaw::Sampler sampler_;
  VectorKind vector_kind_;
  std::size_t dim_;
  double mu_;
  Matrix factor_;
  std::optional<std::exponential_distribution<double>> gaps_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> z_;
};

struct WalkPath {
  std::vector<double> increments;         // X_1..X_n
  std::vector<double> partial_sums;       // S_1..S_n
  std::size_t dim = 0;                    // d, 0 when no vector law
  std::vector<double> vector_increments;  // Y_1..Y_n, row-major n x d
  std::vector<double> vector_sums;        // T_1..T_n, row-major n x d

  std::size_t size() const noexcept { return increments.size(); }
  std::span<const double> y(std::size_t k) const { return {vector_increments.data() + k * dim, dim}; }
  std::span<const double> t(std::size_t k) const { return {vector_sums.data() + k * dim, dim}; }
};

WalkPath sample_walk(const IncrementLaw& law, const VectorLaw& vector_law, std::size_t n,
                     const RngStream& stream);

struct WindowCountEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  /// Chebyshev bound on P[S_horizon <= a + b]; crossings past the horizon are lost.
  double escape_bound = 0.0;
  std::optional<std::string> warning;
};

/// Monte Carlo estimate of the renewal measure V(a, a+b] = E #{n >= 1 : a < S_n <= a+b}.
/// Replication r uses stream.for_replication(r).
WindowCountEstimate renewal_window_count(const IncrementLaw& law, double a, double b,
                                         std::size_t horizon, std::size_t reps,
                                         const RngStream& stream, const Parallelism& par = {});

/// S_t - a at the first t with S_t > a, one value per replication.
std::vector<double> plain_overshoot(const IncrementLaw& law, double a, std::size_t reps,
                                    const RngStream& stream, double horizon_factor = 10.0,
                                    const Parallelism& par = {});

}  // namespace nlrt
