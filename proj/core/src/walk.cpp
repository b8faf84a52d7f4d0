#include "nlrt/walk.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nlrt/error.hpp"
#include "nlrt/stats.hpp"

namespace nlrt {

std::string to_string(VectorKind k) {
  switch (k) {
    case VectorKind::none: return "none";
    case VectorKind::centered_increment: return "centered_increment";
    case VectorKind::gaussian: return "gaussian";
  }
  return "?";
}

VectorKind vector_kind_from_string(const std::string& name) {
  for (VectorKind k : {VectorKind::none, VectorKind::centered_increment, VectorKind::gaussian})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown vector law '" + name + "'");
}

VectorLaw VectorLaw::centered_increment() {
  VectorLaw v;
  v.kind_ = VectorKind::centered_increment;
  return v;
}

VectorLaw VectorLaw::gaussian(Matrix covariance) {
  if (!covariance.is_square() || covariance.rows() == 0)
    throw ConfigError("gaussian vector law: covariance must be a nonempty square matrix");
  if (!covariance.is_symmetric(1e-12))
    throw ConfigError("gaussian vector law: covariance must be symmetric");
  const auto d = static_cast<Eigen::Index>(covariance.rows());
  Eigen::MatrixXd c(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      c(i, j) = covariance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  // Eigen square root handles PSD (singular) covariances that LLT rejects.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const double tol = 1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -tol)
    throw ConfigError("gaussian vector law: covariance is not positive semidefinite");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = es.eigenvectors() * root.asDiagonal();

  VectorLaw v;
  v.kind_ = VectorKind::gaussian;
  v.covariance_ = std::move(covariance);
  v.factor_ = Matrix(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      v.factor_(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = factor(i, j);
  return v;
}

std::size_t VectorLaw::dim() const noexcept {
  switch (kind_) {
    case VectorKind::none: return 0;
    case VectorKind::centered_increment: return 1;
    case VectorKind::gaussian: return covariance_.rows();
  }
  return 0;
}

Matrix VectorLaw::covariance(const IncrementLaw& law) const {
  switch (kind_) {
    case VectorKind::none: return {};
    case VectorKind::centered_increment: return Matrix{{law.variance()}};
    case VectorKind::gaussian: return covariance_;
  }
  return {};
}

DrawSource::DrawSource(const IncrementLaw& law, const VectorLaw& vector_law,
                       const RngStream& stream, std::optional<double> arrival_rate)
    : gen_(stream),
      sampler_(law.sampler()),
      vector_kind_(vector_law.kind()),
      dim_(vector_law.dim()),
      mu_(law.mean()),
      factor_(vector_law.cholesky()),
      z_(vector_law.dim()) {
  if (arrival_rate) {
    if (!(std::isfinite(*arrival_rate) && *arrival_rate > 0.0))
      throw ConfigError("arrival rate must be finite and > 0");
    gaps_.emplace(*arrival_rate);
  }
}

Draw DrawSource::next(std::span<double> y) {
  Draw w;
  w.base = sampler_.base(gen_);
  w.x = sampler_.transform(w.base);
  if (gaps_) w.gap = (*gaps_)(gen_);
  switch (vector_kind_) {
    case VectorKind::none: break;
    case VectorKind::centered_increment: y[0] = w.x - mu_; break;
    case VectorKind::gaussian:
      for (auto& z : z_) z = normal_(gen_);
      for (std::size_t i = 0; i < dim_; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) v += factor_(i, j) * z_[j];
        y[i] = v;
      }
      break;
  }
  return w;
}

WalkPath sample_walk(const IncrementLaw& law, const VectorLaw& vector_law, std::size_t n,
                     const RngStream& stream) {
  law.validate();
  DrawSource source(law, vector_law, stream);
  WalkPath path;
  path.dim = source.dim();
  path.increments.reserve(n);
  path.partial_sums.reserve(n);
  path.vector_increments.resize(n * path.dim);
  path.vector_sums.resize(n * path.dim);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::span<double> y(path.vector_increments.data() + k * path.dim, path.dim);
    const Draw w = source.next(y);
    s += w.x;
    path.increments.push_back(w.x);
    path.partial_sums.push_back(s);
    for (std::size_t i = 0; i < path.dim; ++i)
      path.vector_sums[k * path.dim + i] = (k == 0 ? 0.0 : path.vector_sums[(k - 1) * path.dim + i]) + y[i];
  }
  return path;
}

namespace {

// Chebyshev bound on P[S_h <= level] for a walk with drift mu > 0.
double chebyshev_escape(const IncrementLaw& law, double level, std::size_t h) {
  const double hh = static_cast<double>(h);
  const double gap = hh * law.mean() - level;
  if (gap <= 0.0) return 1.0;
  return std::min(1.0, hh * law.variance() / (gap * gap));
}

}  // namespace

WindowCountEstimate renewal_window_count(const IncrementLaw& law, double a, double b,
                                         std::size_t horizon, std::size_t reps,
                                         const RngStream& stream, const Parallelism& par) {
  law.validate();
  if (!(a > 0.0 && b > 0.0)) throw ContractViolation("renewal_window_count: need a, b > 0");
  if (static_cast<double>(horizon) < 3.0 * (a + b) / law.mean())
    throw ContractViolation("renewal_window_count: horizon must be >= 3 (a + b) / mu");
  if (reps == 0) throw ContractViolation("renewal_window_count: reps must be positive");

  std::vector<double> counts(reps);
  parallel_for(reps, par, [&](std::size_t r) {
    DrawSource source(law, VectorLaw::none(), stream.for_replication(r));
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 1; n <= horizon; ++n) {
      s += source.next({}).x;
      if (s > a && s <= a + b) ++count;
    }
    counts[r] = static_cast<double>(count);
  });

  WindowCountEstimate out;
  const MeanSe m = mean_se(counts);
  out.mean = m.mean;
  out.se = m.se;
  out.reps = reps;
  out.escape_bound = chebyshev_escape(law, a + b, horizon);
  if (out.escape_bound > 1e-3)
    out.warning = "horizon may miss crossings of (a, a+b]: P[S_horizon <= a+b] <= " +
                  std::to_string(out.escape_bound);
  return out;
}

std::vector<double> plain_overshoot(const IncrementLaw& law, double a, std::size_t reps,
                                    const RngStream& stream, double horizon_factor,
                                    const Parallelism& par) {
  law.validate();
  if (!(a > 0.0)) throw ContractViolation("plain_overshoot: need a > 0");
  const auto horizon =
      static_cast<std::size_t>(std::ceil(horizon_factor * (a / law.mean() + 100.0)));
  std::vector<double> out(reps);
  std::vector<char> crossed(reps, 0);
  parallel_for(reps, par, [&](std::size_t r) {
    DrawSource source(law, VectorLaw::none(), stream.for_replication(r));
    double s = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
      s += source.next({}).x;
      if (s > a) {
        out[r] = s - a;
        crossed[r] = 1;
        return;
      }
    }
  });
  for (char c : crossed)
    if (!c) throw NumericError("plain_overshoot: a replication did not cross within the horizon", 0.0);
  return out;
}

}  // namespace nlrt
