#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "nlrt/increment_law.hpp"
#include "nlrt/matrix.hpp"
#include "nlrt/walk.hpp"

namespace nlrt {

enum class StationaryKind { zero, instantaneous, geometric_ma, staggered_residual };

/// Scalar maps h on W available to the stationary perturbation.
enum class WMap { identity, square };

std::string to_string(StationaryKind k);
StationaryKind stationary_kind_from_string(const std::string& name);
std::string to_string(WMap m);
WMap wmap_from_string(const std::string& name);

double apply_map(WMap h, const Draw& w);

/// The stationary perturbation xi_n = xi(W_n, W_{n-1}, ...), truncated to the
/// last `depth` driving elements.
///
///  - instantaneous:       h(W_n) - c
///  - geometric_ma:        sum_{i<D} decay^i h(W_{n-i}) - c
///  - staggered_residual:  -[w_ind sum_{k<D} 1{L_{n-k} > G_k} + w_exc sum_{k<D} (L_{n-k} - G_k)_+] - c
///                         where G_k = eta_n + ... + eta_{n-k} and L is the base variate.
///
/// With w_ind = 0 and w_exc = -1 the staggered form is the unexpired residual
/// lifetime of the patients enrolled before tau_n.
struct StationarySpec {
  StationaryKind kind = StationaryKind::zero;
  WMap map = WMap::identity;
  double decay = 0.5;
  std::size_t depth = 1;
  double centering = 0.0;
  double arrival_rate = 1.0;
  double indicator_weight = 0.0;
  double excess_weight = -1.0;

  static StationarySpec zero() { return {}; }
  static StationarySpec instantaneous(WMap h, double centering = 0.0);
  static StationarySpec geometric_ma(WMap h, double decay, std::size_t depth, double centering = 0.0);
  static StationarySpec staggered_residual(double arrival_rate, double indicator_weight,
                                           double excess_weight, std::size_t depth,
                                           double centering = 0.0);

  /// Number of driving elements xi_n reads (W_n back to W_{n-window+1}).
  std::size_t window() const;
  bool needs_gaps() const { return kind == StationaryKind::staggered_residual; }
  void validate() const;

  friend bool operator==(const StationarySpec&, const StationarySpec&) = default;
};

/// E[xi_n] before centering. Throws ConfigError when it has no closed form
/// (the staggered form needs an exponential base law).
double stationary_raw_mean(const StationarySpec& spec, const IncrementLaw& law);

/// Copy of spec with centering = E[xi_n] before centering.
StationarySpec with_auto_centering(StationarySpec spec, const IncrementLaw& law);

/// Smallest D with decay^D / (1 - decay) * scale < tol.
std::size_t geometric_default_depth(double decay, double scale, double tol = 1e-8);
/// Smallest D whose staggered tail mass is below tol for exponential lifetimes.
std::size_t staggered_default_depth(double arrival_rate, double lifetime_rate,
                                    double weight_scale, double tol = 1e-10);

struct TruncationBound {
  double value = 0.0;
  /// true: bound on the error for every path (uses sup|h|); false: bound on E|error|.
  bool almost_sure = true;
};

TruncationBound truncation_bound(const StationarySpec& spec, const IncrementLaw& law);

/// xi_n from a history window, newest first: window[0] = W_n, window[k] = W_{n-k}.
/// Throws ContractViolation if the window is shorter than spec.window().
double xi_value(const StationarySpec& spec, std::span<const Draw> window);

/// Quadratic slowly-changing part zeta'_n = T_n' Q T_n / n.
struct QuadraticSpec {
  Matrix q;
  bool allow_zero = false;  // oracle tests only; the limit law is then degenerate

  static QuadraticSpec none() { return {Matrix{}, true}; }
  std::size_t dim() const noexcept { return q.rows(); }
  bool is_zero() const { return q.empty() || q.is_zero(); }
  void validate() const;

  friend bool operator==(const QuadraticSpec&, const QuadraticSpec&) = default;
};

double zeta_quadratic(std::span<const double> t, std::int64_t n, const QuadraticSpec& spec);

/// zeta~_{m,n} = T_{m,n}' Q T_{m,n} / m, T_{m,n} = Y_{n-m+1} + ... + Y_n.
/// `y` holds Y_1, Y_2, ... row-major (d values each); n is 1-based.
double zeta_window(std::span<const double> y, std::size_t m, std::size_t n,
                   const QuadraticSpec& spec);

struct ResidualContext {
  std::int64_t n = 0;
  double s = 0.0;
  double xi = 0.0;
  std::span<const double> t;
  std::span<const Draw> window;
};

/// The residual zeta''_n.
struct ResidualSpec {
  enum class Kind { zero, constant, hook };

  Kind kind = Kind::zero;
  double value = 0.0;
  std::function<double(const ResidualContext&)> hook;
  /// lim E zeta''_n; the constant itself for Kind::constant.
  double limit_mean = 0.0;

  static ResidualSpec zero() { return {}; }
  static ResidualSpec constant(double c) { return {Kind::constant, c, {}, c}; }
  static ResidualSpec from_hook(std::function<double(const ResidualContext&)> fn,
                                double limit_mean = 0.0) {
    return {Kind::hook, 0.0, std::move(fn), limit_mean};
  }

  double evaluate(const ResidualContext& ctx) const;
  double asymptotic_mean() const { return kind == Kind::zero ? 0.0 : limit_mean; }
};

}  // namespace nlrt
