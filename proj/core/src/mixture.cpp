#include "nlrt/mixture.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "nlrt/error.hpp"

namespace nlrt {

ChiSquareMixture::ChiSquareMixture(std::vector<double> weights, double cdf_tolerance)
    : weights_(std::move(weights)), cdf_tolerance_(cdf_tolerance) {
  if (weights_.empty()) throw ConfigError("mixture: at least one weight is required");
  for (double w : weights_)
    if (!std::isfinite(w)) throw ConfigError("mixture: weights must be finite");
  if (!(cdf_tolerance_ > 0.0)) throw ConfigError("mixture: cdf tolerance must be > 0");
}

bool ChiSquareMixture::is_degenerate() const {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 0.0; });
}

bool ChiSquareMixture::all_nonnegative() const {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w >= 0.0; });
}

bool ChiSquareMixture::all_nonpositive() const {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w <= 0.0; });
}

CovarianceEstimate CovarianceEstimate::analytic(Matrix sigma) {
  return {std::move(sigma), Source::analytic, 0};
}

CovarianceEstimate CovarianceEstimate::empirical(std::span<const double> rows, std::size_t d) {
  if (d == 0 || rows.size() % d != 0 || rows.size() / d < 2)
    throw ContractViolation("empirical covariance: need at least two d-vectors");
  const std::size_t n = rows.size() / d;
  std::vector<double> mean(d, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < d; ++i) mean[i] += rows[k * d + i];
  for (double& m : mean) m /= static_cast<double>(n);
  Matrix s(d, d);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        s(i, j) += (rows[k * d + i] - mean[i]) * (rows[k * d + j] - mean[j]);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i, j) /= static_cast<double>(n - 1);
  return {std::move(s), Source::empirical, n};
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

}  // namespace

ChiSquareMixture mixture_weights(const QuadraticSpec& q, const CovarianceEstimate& sigma) {
  q.validate();
  const std::size_t d = q.dim();
  if (d == 0) return ChiSquareMixture({0.0});
  if (sigma.sigma.rows() != d || sigma.sigma.cols() != d)
    throw ConfigError("mixture_weights: Q and Sigma dimensions differ");
  if (!sigma.sigma.is_symmetric(1e-12 * (1.0 + std::abs(sigma.sigma(0, 0)))))
    throw NumericError("mixture_weights: Sigma is not symmetric", 0.0);

  const Eigen::MatrixXd s = to_eigen(sigma.sigma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -tol)
    throw NumericError("mixture_weights: Sigma is not positive semidefinite", ev.minCoeff());
  const Eigen::MatrixXd root =
      es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd m = root * to_eigen(q.q) * root;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ms(m, Eigen::EigenvaluesOnly);
  std::vector<double> w(ms.eigenvalues().data(), ms.eigenvalues().data() + d);
  std::sort(w.begin(), w.end(), std::greater<>());
  return ChiSquareMixture(std::move(w));
}

double mixture_mean(const ChiSquareMixture& mix) {
  double total = 0.0;
  for (double w : mix.weights()) total += w;
  return total;
}

struct MixtureCdf::Quadrature {
  boost::math::quadrature::ooura_fourier_sin<double> sin{1e-12};
  boost::math::quadrature::ooura_fourier_cos<double> cos{1e-12};
  boost::math::quadrature::exp_sinh<double> half_line;
};

MixtureCdf::MixtureCdf(ChiSquareMixture mix) : mix_(std::move(mix)) {}
MixtureCdf::~MixtureCdf() = default;
MixtureCdf::MixtureCdf(MixtureCdf&&) noexcept = default;
MixtureCdf& MixtureCdf::operator=(MixtureCdf&&) noexcept = default;

double mixture_cdf(const ChiSquareMixture& mix, double z) { return MixtureCdf(mix)(z); }

double MixtureCdf::operator()(double z) {
  const ChiSquareMixture& mix = mix_;
  if (!std::isfinite(z)) {
    if (std::isnan(z)) throw ContractViolation("mixture_cdf: z is NaN");
    return z > 0 ? 1.0 : 0.0;
  }
  if (mix.is_degenerate()) return z >= 0.0 ? 1.0 : 0.0;
  if (mix.all_nonnegative() && z <= 0.0) return 0.0;
  if (mix.all_nonpositive() && z >= 0.0) return 1.0;

  std::vector<double> w;
  for (double l : mix.weights())
    if (l != 0.0) w.push_back(l);
  double mean = 0.0;
  for (double l : w) mean += l;

  // L(z) = 1/2 - (1/pi) int_0^inf sin(A(u) - z u / 2) / (u rho(u)) du,
  // A(u) = 1/2 sum atan(l u), rho(u) = prod (1 + l^2 u^2)^{1/4}.
  // Splitting sin(A - w u) puts both pieces in Fourier form for Ooura's rule.
  auto phase = [&](double u) {
    double a = 0.0;
    for (double l : w) a += std::atan(l * u);
    return 0.5 * a;
  };
  auto modulus = [&](double u) {
    double p = 0.0;
    for (double l : w) p += std::log1p(l * l * u * u);
    return std::exp(0.25 * p);
  };

  if (!quad_) quad_ = std::make_unique<Quadrature>();
  const double omega = 0.5 * z;
  double integral = 0.0;
  double err = 0.0;
  if (omega == 0.0) {
    auto f = [&](double u) {
      if (u == 0.0) return 0.5 * mean;
      return std::sin(phase(u)) / (u * modulus(u));
    };
    double l1 = 0.0;
    integral = quad_->half_line.integrate(f, 1e-12, &err, &l1);
    err *= std::max(1.0, l1);
  } else {
    const double om = std::abs(omega);
    auto even = [&](double u) {
      if (u == 0.0) return 0.5 * mean;
      return std::sin(phase(u)) / (u * modulus(u));
    };
    auto odd = [&](double u) { return std::cos(phase(u)) / (u * modulus(u)); };
    const auto [c, c_rel] = quad_->cos.integrate(even, om);
    const auto [s, s_rel] = quad_->sin.integrate(odd, om);
    integral = c - std::copysign(1.0, omega) * s;
    err = c_rel * std::abs(c) + s_rel * std::abs(s);
  }
  const double achieved = err / std::numbers::pi;
  if (!std::isfinite(integral) || achieved > mix.cdf_tolerance())
    throw NumericError("mixture_cdf: quadrature did not reach the requested tolerance", achieved);
  return std::clamp(0.5 - integral / std::numbers::pi, 0.0, 1.0);
}

double mixture_quantile(const ChiSquareMixture& mix, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ContractViolation("mixture_quantile: p must lie in (0, 1)");
  if (mix.is_degenerate()) return 0.0;
  double spread = 0.0;
  for (double l : mix.weights()) spread += 2.0 * l * l;
  spread = std::sqrt(spread);
  const double mean = mixture_mean(mix);
  double lo = mix.all_nonnegative() ? 0.0 : mean - 10.0 * spread;
  double hi = mix.all_nonpositive() ? 0.0 : mean + 10.0 * spread;
  MixtureCdf cdf(mix);
  while (cdf(lo) > p) lo -= 10.0 * spread;
  while (cdf(hi) < p) hi += 10.0 * spread;
  boost::uintmax_t iters = 200;
  auto f = [&](double z) { return cdf(z) - p; };
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f(lo), f(hi), boost::math::tools::eps_tolerance<double>(45), iters);
  return 0.5 * (a + b);
}

double sample_mixture(const ChiSquareMixture& mix, Philox4x32& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double total = 0.0;
  for (double l : mix.weights()) {
    const double z = normal(gen);
    total += l * z * z;
  }
  return total;
}

}  // namespace nlrt
