#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nlrt/matrix.hpp"
#include "nlrt/perturbation.hpp"
#include "nlrt/rng.hpp"

namespace nlrt {

/// zeta = sum_i lambda_i chi2_{1,i}, independent chi-squares, weights of any sign.
/// All-zero weights give the degenerate law at 0.
class ChiSquareMixture {
 public:
  ChiSquareMixture() = default;
  explicit ChiSquareMixture(std::vector<double> weights, double cdf_tolerance = 1e-6);

  const std::vector<double>& weights() const noexcept { return weights_; }
  double cdf_tolerance() const noexcept { return cdf_tolerance_; }
  bool is_degenerate() const;
  bool all_nonnegative() const;
  bool all_nonpositive() const;

 private:
  std::vector<double> weights_;
  double cdf_tolerance_ = 1e-6;
};

struct CovarianceEstimate {
  enum class Source { analytic, empirical };

  Matrix sigma;
  Source source = Source::analytic;
  std::size_t samples = 0;

  static CovarianceEstimate analytic(Matrix sigma);
  /// Unbiased sample covariance of row-major d-vectors.
  static CovarianceEstimate empirical(std::span<const double> rows, std::size_t d);
};

/// Eigenvalues of Sigma^{1/2} Q Sigma^{1/2}, sorted descending.
ChiSquareMixture mixture_weights(const QuadraticSpec& q, const CovarianceEstimate& sigma);

/// L(z) by inversion of the characteristic function prod_j (1 - 2 i lambda_j t)^{-1/2}.
/// Throws NumericError when the quadrature error estimate
/// exceeds the mixture's cdf_tolerance.
double mixture_cdf(const ChiSquareMixture& mix, double z);

/// L(z) for many z. Quadrature nodes are kept between calls, so a call costs a
/// fraction of mixture_cdf; values can differ from mixture_cdf in the last bits
/// and depend on the order of earlier calls. Not thread-safe.
class MixtureCdf {
 public:
  explicit MixtureCdf(ChiSquareMixture mix);
  ~MixtureCdf();
  MixtureCdf(MixtureCdf&&) noexcept;
  MixtureCdf& operator=(MixtureCdf&&) noexcept;

  double operator()(double z);
  const ChiSquareMixture& mixture() const noexcept { return mix_; }

 private:
  struct Quadrature;
  ChiSquareMixture mix_;
  std::unique_ptr<Quadrature> quad_;
};

double mixture_mean(const ChiSquareMixture& mix);

/// Smallest z with L(z) >= p, by bracketing root search on mixture_cdf.
double mixture_quantile(const ChiSquareMixture& mix, double p);

/// One draw of sum_i lambda_i Z_i^2.
double sample_mixture(const ChiSquareMixture& mix, Philox4x32& gen);

}  // namespace nlrt
