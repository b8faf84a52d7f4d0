#include "nlrt/stats.hpp"

#include <algorithm>
#include <cmath>

#include "nlrt/error.hpp"

namespace nlrt {

MeanSe mean_se(std::span<const double> xs) {
  MeanSe out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double n = static_cast<double>(xs.size());
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

double sample_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("correlation: bad sizes");
  const MeanSe mx = mean_se(x), my = mean_se(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx.mean, dy = y[i] - my.mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw ContractViolation("median of empty sample");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  if (xs.size() % 2 == 1) return xs[mid];
  const double hi = xs[mid];
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi2_1_survival(double x) { return x <= 0.0 ? 1.0 : std::erfc(std::sqrt(0.5 * x)); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical(double alpha, std::size_t n) {
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(double alpha, std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) * std::sqrt((nn + mm) / (nn * mm));
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

KsBound ks_statistic_bounded(std::span<const double> sorted,
                             const std::function<double(double)>& cdf, std::size_t stride) {
  KsBound out;
  const std::size_t n = sorted.size();
  if (n == 0) return out;
  stride = std::max<std::size_t>(1, stride);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);

  const double nn = static_cast<double>(n);
  std::vector<double> f(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    f[k] = cdf(sorted[idx[k]]);
    const double i = static_cast<double>(idx[k]);
    out.lower = std::max({out.lower, (i + 1.0) / nn - f[k], f[k] - i / nn});
  }
  out.upper = out.lower;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const double i = static_cast<double>(idx[k - 1]);
    const double j = static_cast<double>(idx[k]);
    out.upper = std::max({out.upper, (j + 1.0) / nn - f[k - 1], f[k] - i / nn});
  }
  out.evaluations = idx.size();
  return out;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

QuadrantTest quadrant_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw ContractViolation("quadrant test: bad sizes");
  const double mx = median({x.begin(), x.end()});
  const double my = median({y.begin(), y.end()});
  QuadrantTest out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int cell = (x[i] > mx ? 2 : 0) + (y[i] > my ? 1 : 0);
    ++out.counts[static_cast<std::size_t>(cell)];
  }
  const double n = static_cast<double>(x.size());
  const double r0 = static_cast<double>(out.counts[0] + out.counts[1]);
  const double r1 = static_cast<double>(out.counts[2] + out.counts[3]);
  const double c0 = static_cast<double>(out.counts[0] + out.counts[2]);
  const double c1 = static_cast<double>(out.counts[1] + out.counts[3]);
  const double rows[2] = {r0, r1};
  const double cols[2] = {c0, c1};
  double chi2 = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const double expected = rows[r] * cols[c] / n;
      if (expected > 0.0) {
        const double o = static_cast<double>(out.counts[static_cast<std::size_t>(2 * r + c)]);
        chi2 += (o - expected) * (o - expected) / expected;
      }
    }
  out.chi2 = chi2;
  out.p_value = chi2_1_survival(chi2);
  return out;
}

}  // namespace nlrt
