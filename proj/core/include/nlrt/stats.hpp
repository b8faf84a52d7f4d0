#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlrt {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error, summed in index order.
MeanSe mean_se(std::span<const double> xs);

double sample_correlation(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> xs);

double normal_cdf(double x);
/// Upper tail of a chi-square with one degree of freedom.
double chi2_1_survival(double x);

/// P[K > lambda] for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);
/// Asymptotic one-sample KS critical distance at level alpha.
double ks_critical(double alpha, std::size_t n);
/// Asymptotic two-sample KS critical distance at level alpha.
double ks_critical_two_sample(double alpha, std::size_t n, std::size_t m);

/// sup_x |F_n(x) - F(x)| for a continuous F; `sorted` must be ascending.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

struct KsBound {
  double lower = 0.0;  // attained at evaluated order statistics
  double upper = 0.0;  // valid bound on the exact statistic
  std::size_t evaluations = 0;
};

/// KS distance when F is expensive: F is evaluated at every `stride`-th order
/// statistic and monotonicity brackets the points in between.
KsBound ks_statistic_bounded(std::span<const double> sorted,
                             const std::function<double(double)>& cdf, std::size_t stride);

double ks_two_sample(std::span<const double> sorted_a, std::span<const double> sorted_b);

/// 2x2 table of median splits of x and y, with a one-df chi-square statistic.
struct QuadrantTest {
  std::array<std::size_t, 4> counts{};  // (x low, y low), (low, high), (high, low), (high, high)
  double chi2 = 0.0;
  double p_value = 1.0;
};

QuadrantTest quadrant_test(std::span<const double> x, std::span<const double> y);

}  // namespace nlrt
