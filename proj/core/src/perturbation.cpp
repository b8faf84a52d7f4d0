#include "nlrt/perturbation.hpp"

#include <cmath>
#include <limits>

#include "nlrt/error.hpp"

namespace nlrt {

std::string to_string(StationaryKind k) {
  switch (k) {
    case StationaryKind::zero: return "zero";
    case StationaryKind::instantaneous: return "instantaneous";
    case StationaryKind::geometric_ma: return "geometric_ma";
    case StationaryKind::staggered_residual: return "staggered_residual";
  }
  return "?";
}

StationaryKind stationary_kind_from_string(const std::string& name) {
  for (auto k : {StationaryKind::zero, StationaryKind::instantaneous, StationaryKind::geometric_ma,
                 StationaryKind::staggered_residual})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown stationary perturbation '" + name + "'");
}

std::string to_string(WMap m) { return m == WMap::identity ? "identity" : "square"; }

WMap wmap_from_string(const std::string& name) {
  if (name == "identity") return WMap::identity;
  if (name == "square") return WMap::square;
  throw ConfigError("unknown map '" + name + "'");
}

double apply_map(WMap h, const Draw& w) { return h == WMap::identity ? w.x : w.x * w.x; }

StationarySpec StationarySpec::instantaneous(WMap h, double centering) {
  StationarySpec s;
  s.kind = StationaryKind::instantaneous;
  s.map = h;
  s.centering = centering;
  return s;
}

StationarySpec StationarySpec::geometric_ma(WMap h, double decay, std::size_t depth,
                                            double centering) {
  StationarySpec s;
  s.kind = StationaryKind::geometric_ma;
  s.map = h;
  s.decay = decay;
  s.depth = depth;
  s.centering = centering;
  s.validate();
  return s;
}

StationarySpec StationarySpec::staggered_residual(double arrival_rate, double indicator_weight,
                                                  double excess_weight, std::size_t depth,
                                                  double centering) {
  StationarySpec s;
  s.kind = StationaryKind::staggered_residual;
  s.arrival_rate = arrival_rate;
  s.indicator_weight = indicator_weight;
  s.excess_weight = excess_weight;
  s.depth = depth;
  s.centering = centering;
  s.validate();
  return s;
}

std::size_t StationarySpec::window() const {
  switch (kind) {
    case StationaryKind::zero:
    case StationaryKind::instantaneous: return 1;
    case StationaryKind::geometric_ma:
    case StationaryKind::staggered_residual: return depth;
  }
  return 1;
}

void StationarySpec::validate() const {
  if (!std::isfinite(centering)) throw ConfigError("stationary: centering must be finite");
  switch (kind) {
    case StationaryKind::zero:
    case StationaryKind::instantaneous: break;
    case StationaryKind::geometric_ma:
      if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("geometric_ma: decay must lie in (0, 1)");
      if (depth < 1) throw ConfigError("geometric_ma: truncation depth must be >= 1");
      break;
    case StationaryKind::staggered_residual:
      if (!(std::isfinite(arrival_rate) && arrival_rate > 0.0))
        throw ConfigError("staggered_residual: arrival rate must be finite and > 0");
      if (!std::isfinite(indicator_weight) || !std::isfinite(excess_weight))
        throw ConfigError("staggered_residual: weights must be finite");
      if (depth < 1) throw ConfigError("staggered_residual: truncation depth must be >= 1");
      break;
  }
}

namespace {

double map_mean(WMap h, const IncrementLaw& law) {
  return h == WMap::identity ? law.mean() : law.second_moment();
}

double map_abs_sup(WMap h, const IncrementLaw& law) {
  const double b = law.abs_bound();
  return h == WMap::identity ? b : b * b;
}

// E|h(W)|, bounded by the root mean square when no closed form is at hand.
double map_abs_mean_bound(WMap h, const IncrementLaw& law) {
  if (h == WMap::square) return law.second_moment();
  if (law.nonnegative()) return law.mean();
  return std::sqrt(law.second_moment());
}

double staggered_ratio(const StationarySpec& spec, const IncrementLaw& law) {
  if (law.family() != Family::exponential)
    throw ConfigError("staggered_residual: closed-form moments need exponential lifetimes");
  const double theta = law.param1();
  return spec.arrival_rate / (spec.arrival_rate + theta);
}

}  // namespace

double stationary_raw_mean(const StationarySpec& spec, const IncrementLaw& law) {
  switch (spec.kind) {
    case StationaryKind::zero: return 0.0;
    case StationaryKind::instantaneous: return map_mean(spec.map, law);
    case StationaryKind::geometric_ma:
      return map_mean(spec.map, law) * (1.0 - std::pow(spec.decay, static_cast<double>(spec.depth))) /
             (1.0 - spec.decay);
    case StationaryKind::staggered_residual: {
      // P[L > Gamma(k+1, r)] = rho^{k+1} and E(L - Gamma(k+1, r))_+ = rho^{k+1} / theta.
      const double rho = staggered_ratio(spec, law);
      const double theta = law.param1();
      const double geo = rho * (1.0 - std::pow(rho, static_cast<double>(spec.depth))) / (1.0 - rho);
      return -(spec.indicator_weight + spec.excess_weight / theta) * geo;
    }
  }
  return 0.0;
}

StationarySpec with_auto_centering(StationarySpec spec, const IncrementLaw& law) {
  spec.centering = stationary_raw_mean(spec, law);
  return spec;
}

std::size_t geometric_default_depth(double decay, double scale, double tol) {
  if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("geometric_ma: decay must lie in (0, 1)");
  if (!(scale > 0.0) || !std::isfinite(scale)) return 1;
  const double d = std::log(tol * (1.0 - decay) / scale) / std::log(decay);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(d)));
}

std::size_t staggered_default_depth(double arrival_rate, double lifetime_rate,
                                    double weight_scale, double tol) {
  const double rho = arrival_rate / (arrival_rate + lifetime_rate);
  if (!(weight_scale > 0.0)) return 1;
  // weight_scale * rho^{D+1} / (1 - rho) < tol
  const double d = std::log(tol * (1.0 - rho) / weight_scale) / std::log(rho) - 1.0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(d)));
}

TruncationBound truncation_bound(const StationarySpec& spec, const IncrementLaw& law) {
  switch (spec.kind) {
    case StationaryKind::zero:
    case StationaryKind::instantaneous: return {0.0, true};
    case StationaryKind::geometric_ma: {
      const double tail = std::pow(spec.decay, static_cast<double>(spec.depth)) / (1.0 - spec.decay);
      const double sup = map_abs_sup(spec.map, law);
      if (std::isfinite(sup)) return {tail * sup, true};
      return {tail * map_abs_mean_bound(spec.map, law), false};
    }
    case StationaryKind::staggered_residual: {
      const double rho = staggered_ratio(spec, law);
      const double theta = law.param1();
      const double w = std::abs(spec.indicator_weight) + std::abs(spec.excess_weight) / theta;
      return {w * std::pow(rho, static_cast<double>(spec.depth) + 1.0) / (1.0 - rho), false};
    }
  }
  return {0.0, true};
}

double xi_value(const StationarySpec& spec, std::span<const Draw> window) {
  if (window.size() < spec.window())
    throw ContractViolation("xi_value: history shorter than the truncation depth");
  switch (spec.kind) {
    case StationaryKind::zero: return 0.0;
    case StationaryKind::instantaneous: return apply_map(spec.map, window[0]) - spec.centering;
    case StationaryKind::geometric_ma: {
      double total = 0.0;
      double weight = 1.0;
      for (std::size_t i = 0; i < spec.depth; ++i) {
        total += weight * apply_map(spec.map, window[i]);
        weight *= spec.decay;
      }
      return total - spec.centering;
    }
    case StationaryKind::staggered_residual: {
      double indicators = 0.0;
      double excess = 0.0;
      double elapsed = 0.0;
      for (std::size_t k = 0; k < spec.depth; ++k) {
        elapsed += window[k].gap;
        const double left = window[k].base - elapsed;
        if (left > 0.0) {
          indicators += 1.0;
          excess += left;
        }
      }
      return -(spec.indicator_weight * indicators + spec.excess_weight * excess) - spec.centering;
    }
  }
  return 0.0;
}

void QuadraticSpec::validate() const {
  if (q.empty()) {
    if (!allow_zero) throw ConfigError("quadratic: Q is empty but zero was not allowed");
    return;
  }
  if (!q.is_square()) throw ConfigError("quadratic: Q must be square");
  if (!q.is_symmetric()) throw ConfigError("quadratic: Q must be symmetric");
  for (double v : q.values())
    if (!std::isfinite(v)) throw ConfigError("quadratic: Q entries must be finite");
  if (!allow_zero && q.is_zero())
    throw ConfigError("quadratic: Q = 0 makes the limit law degenerate; set allow_zero for oracle tests");
}

double zeta_quadratic(std::span<const double> t, std::int64_t n, const QuadraticSpec& spec) {
  if (n < 1) throw ContractViolation("zeta_quadratic: n must be >= 1");
  if (spec.q.empty()) {
    if (!t.empty()) throw ConfigError("zeta_quadratic: dimension mismatch");
    return 0.0;
  }
  if (t.size() != spec.dim()) throw ConfigError("zeta_quadratic: dimension mismatch");
  return spec.q.quadratic_form(t) / static_cast<double>(n);
}

double zeta_window(std::span<const double> y, std::size_t m, std::size_t n,
                   const QuadraticSpec& spec) {
  if (m < 1 || n < m) throw ContractViolation("zeta_window: need n >= m >= 1");
  const std::size_t d = spec.dim();
  if (d == 0) return 0.0;
  if (y.size() % d != 0) throw ConfigError("zeta_window: dimension mismatch");
  if (y.size() / d < n) throw ContractViolation("zeta_window: Y history does not reach index n");
  std::vector<double> t(d, 0.0);
  for (std::size_t k = n - m + 1; k <= n; ++k)
    for (std::size_t i = 0; i < d; ++i) t[i] += y[(k - 1) * d + i];
  return spec.q.quadratic_form(t) / static_cast<double>(m);
}

double ResidualSpec::evaluate(const ResidualContext& ctx) const {
  double v = 0.0;
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::constant: v = value; break;
    case Kind::hook:
      if (!hook) throw ConfigError("residual: hook kind without a function");
      v = hook(ctx);
      break;
  }
  if (!std::isfinite(v)) throw ContractViolation("residual: non-finite evaluation");
  return v;
}

}  // namespace nlrt
