#include "nlrt/exponential_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "nlrt/error.hpp"
#include "nlrt/stats.hpp"

namespace nlrt {

GStatistic GStatistic::fixed_width_ci() {
  GStatistic s;
  s.kind_ = Kind::fixed_width_ci;
  s.g_ = [](double x, double y) { return (y * y) / (x * x); };
  s.d_ = [](double theta) {
    const double t2 = theta * theta;
    return GDerivatives{1.0 / t2, -2.0 / t2, 2.0 / theta, 6.0 / t2, -4.0 / theta, 2.0};
  };
  return s;
}

GStatistic GStatistic::repeated_lrt() {
  GStatistic s;
  s.kind_ = Kind::repeated_lrt;
  s.g_ = [](double x, double y) { return x * std::log(x / y) + (y - x); };
  s.d_ = [](double theta) {
    return GDerivatives{std::log(theta) + 1.0 / theta - 1.0, std::log(theta), 1.0 - theta, 1.0,
                        -theta, theta * theta};
  };
  return s;
}

GStatistic GStatistic::custom(std::function<double(double, double)> g,
                              std::function<GDerivatives(double)> derivatives) {
  if (!g) throw ConfigError("custom g statistic: function is empty");
  GStatistic s;
  s.kind_ = Kind::custom;
  s.g_ = std::move(g);
  s.d_ = std::move(derivatives);
  return s;
}

std::string to_string(GStatistic::Kind k) {
  switch (k) {
    case GStatistic::Kind::fixed_width_ci: return "fixed_width_ci";
    case GStatistic::Kind::repeated_lrt: return "repeated_lrt";
    case GStatistic::Kind::custom: return "custom";
  }
  return "?";
}

std::string GStatistic::name() const { return to_string(kind_); }

GStatistic g_statistic_from_string(const std::string& name) {
  if (name == "fixed_width_ci") return GStatistic::fixed_width_ci();
  if (name == "repeated_lrt") return GStatistic::repeated_lrt();
  throw ConfigError("unknown g statistic '" + name + "' (expected fixed_width_ci or repeated_lrt)");
}

GDerivatives GStatistic::numeric_derivatives_at(double theta, double step) const {
  const double x = 1.0;
  const double y = 1.0 / theta;
  const double hx = step;
  const double hy = step * y;
  const auto& g = g_;
  GDerivatives d;
  d.g = g(x, y);
  d.g10 = (g(x + hx, y) - g(x - hx, y)) / (2.0 * hx);
  d.g01 = (g(x, y + hy) - g(x, y - hy)) / (2.0 * hy);
  // Second differences need a wider step to stay above rounding noise.
  const double kx = std::sqrt(step) * 0.1;
  const double ky = kx * y;
  d.g20 = (g(x + kx, y) - 2.0 * d.g + g(x - kx, y)) / (kx * kx);
  d.g02 = (g(x, y + ky) - 2.0 * d.g + g(x, y - ky)) / (ky * ky);
  d.g11 = (g(x + kx, y + ky) - g(x + kx, y - ky) - g(x - kx, y + ky) + g(x - kx, y - ky)) /
          (4.0 * kx * ky);
  return d;
}

GDerivatives GStatistic::derivatives_at(double theta) const {
  GDerivatives d = d_ ? d_(theta) : numeric_derivatives_at(theta);
  for (double v : {d.g, d.g10, d.g01, d.g20, d.g11, d.g02})
    if (!std::isfinite(v)) throw ConfigError("g statistic: derivatives are not finite at (1, 1/theta)");
  return d;
}

void StaggeredExponentialModel::validate() const {
  if (!(std::isfinite(arrival_rate) && arrival_rate > 0.0))
    throw ConfigError("trial: arrival_rate must be finite and > 0");
  if (!(std::isfinite(theta) && theta > 0.0)) throw ConfigError("trial: theta must be finite and > 0");
  if (n0 < 1) throw ConfigError("trial: n0 must be >= 1");
  if (xi_truncation < 1) throw ConfigError("trial: xi_truncation must be >= 1");
  if (!(std::isfinite(horizon_factor) && horizon_factor >= 1.0))
    throw ConfigError("trial: horizon_factor must be finite and >= 1");
  g.derivatives_at(theta);
}

std::size_t count_deaths(const TrialState& s) {
  const std::size_t n = s.n();
  std::size_t k = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (s.lifetimes[i - 1] <= s.tau[n] - s.tau[i - 1]) ++k;
  return k;
}

double total_time_on_test(const TrialState& s) {
  const std::size_t n = s.n();
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) total += std::min(s.lifetimes[i - 1], s.tau[n] - s.tau[i - 1]);
  return total;
}

TrialState TrialState::observe(std::vector<double> tau, std::vector<double> lifetimes) {
  if (tau.size() != lifetimes.size() + 1)
    throw ContractViolation("trial state: need tau_0..tau_n and L_1..L_n");
  if (tau.front() != 0.0) throw ContractViolation("trial state: tau_0 must be 0");
  TrialState s;
  s.gaps.reserve(lifetimes.size());
  for (std::size_t k = 1; k < tau.size(); ++k) {
    if (!(tau[k] >= tau[k - 1])) throw ContractViolation("trial state: arrival times must be nondecreasing");
    s.gaps.push_back(tau[k] - tau[k - 1]);
  }
  for (double l : lifetimes)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ContractViolation("trial state: lifetimes must be finite and >= 0");
  s.tau = std::move(tau);
  s.lifetimes = std::move(lifetimes);
  s.deaths = count_deaths(s);
  s.total_time = total_time_on_test(s);
  return s;
}

TrialState simulate_trial(const StaggeredExponentialModel& model, std::size_t n_patients,
                          const RngStream& stream) {
  model.validate();
  if (n_patients < 1) throw ContractViolation("simulate_trial: need at least one patient");
  DrawSource source(IncrementLaw::exponential(model.theta), VectorLaw::none(), stream,
                    model.arrival_rate);
  TrialState s;
  s.pre_lifetimes.resize(model.xi_truncation);
  s.pre_gaps.resize(model.xi_truncation);
  for (std::size_t i = model.xi_truncation; i-- > 0;) {
    const Draw w = source.next({});
    s.pre_lifetimes[i] = w.base;
    s.pre_gaps[i] = w.gap;
  }
  s.tau.assign(1, 0.0);
  for (std::size_t k = 1; k <= n_patients; ++k) {
    const Draw w = source.next({});
    s.lifetimes.push_back(w.base);
    s.gaps.push_back(w.gap);
    s.tau.push_back(s.tau.back() + w.gap);
  }
  s.deaths = count_deaths(s);
  s.total_time = total_time_on_test(s);
  return s;
}

std::optional<double> statistic_Z(const TrialState& state, const GStatistic& g) {
  if (state.deaths == 0) return std::nullopt;
  const double n = static_cast<double>(state.n());
  return n * g(static_cast<double>(state.deaths) / n, state.total_time / n);
}

std::vector<Draw> trial_window(const TrialState& state) {
  const std::size_t n = state.n();
  std::vector<Draw> w;
  w.reserve(n + state.pre_lifetimes.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double l = state.lifetimes[n - 1 - k];
    w.push_back({l, l, state.gaps[n - 1 - k]});
  }
  for (std::size_t i = 0; i < state.pre_lifetimes.size(); ++i)
    w.push_back({state.pre_lifetimes[i], state.pre_lifetimes[i], state.pre_gaps[i]});
  return w;
}

double xi_staggered_residual(const TrialState& state) {
  const std::size_t n = state.n();
  double elapsed = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    elapsed += state.gaps[n - 1 - k];
    const double left = state.lifetimes[n - 1 - k] - elapsed;
    if (left > 0.0) total += left;
  }
  return total;
}

Decomposition decompose(const TrialState& state, const GStatistic& g, double theta,
                        std::size_t xi_truncation) {
  const auto z = statistic_Z(state, g);
  if (!z) throw ContractViolation("decompose: K_n = 0, the statistic is not defined");
  if (xi_truncation < 1) throw ContractViolation("decompose: xi_truncation must be >= 1");
  const GDerivatives d = g.derivatives_at(theta);
  const std::size_t n = state.n();
  const double nn = static_cast<double>(n);
  const double inv = 1.0 / theta;

  Decomposition out;
  out.z = *z;

  double t = 0.0;
  for (double l : state.lifetimes) t += l - inv;
  out.s = nn * d.g + d.g01 * t;

  const std::vector<Draw> window = trial_window(state);
  const std::size_t depth = std::min(xi_truncation, window.size());
  out.xi = xi_value(StationarySpec::staggered_residual(1.0, d.g10, d.g01, depth), window);

  // Terms with index <= 0 that the truncated xi includes, minus enrolled
  // patients it leaves out.
  double ind = 0.0;
  double pos = 0.0;
  double elapsed = 0.0;
  const std::size_t reach = std::max(depth, n);
  for (std::size_t k = 0; k < reach && k < window.size(); ++k) {
    elapsed += window[k].gap;
    const double left = window[k].base - elapsed;
    const bool fictitious = k >= n && k < depth;
    const bool dropped = k < n && k >= depth;
    if (!(fictitious || dropped) || left <= 0.0) continue;
    const double sign = fictitious ? 1.0 : -1.0;
    ind += sign;
    pos += sign * left;
  }
  out.zeta2 = d.g10 * ind + d.g01 * pos;

  const double dt = state.total_time / nn - inv;
  const double dk = static_cast<double>(state.deaths) / nn - 1.0;
  out.zeta1 = 0.5 * nn * (d.g02 * dt * dt + 2.0 * d.g11 * dt * dk + d.g20 * dk * dk);
  out.zeta3 = out.z - (out.s + out.xi + out.zeta1 + out.zeta2);

  out.xi_residual = xi_staggered_residual(state);
  out.zeta_quad = d.g02 * t * t / (2.0 * nn);
  const double xo = out.xi_residual;
  out.zeta1_rest = -d.g02 * t * xo / nn + 0.5 * d.g02 * xo * xo / nn +
                   nn * d.g11 * (t / nn - xo / nn) * dk + 0.5 * nn * d.g20 * dk * dk;
  out.b_event = std::abs(theta * state.total_time / nn - 1.0) <= 0.5 &&
                static_cast<double>(state.deaths) >= 0.5 * nn;
  out.cubic_scale = nn * (std::pow(std::abs(dt), 3) + std::pow(std::abs(dk), 3));
  return out;
}

void TrialTracker::admit(double lifetime, double gap) {
  const double entry = now_;
  ++n_;
  heap_.push_back({entry + lifetime, entry, lifetime});
  std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
  alive_entry_sum_ += entry;
  now_ += gap;
  while (!heap_.empty() && heap_.front().lifetime <= now_ - heap_.front().entry) {
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
    const Pending p = heap_.back();
    heap_.pop_back();
    ++deaths_;
    dead_sum_ += p.lifetime;
    alive_entry_sum_ -= p.entry;
  }
}

double TrialTracker::total_time() const {
  return dead_sum_ + static_cast<double>(heap_.size()) * now_ - alive_entry_sum_;
}

PerturbedWalkModel to_perturbed_model(const StaggeredExponentialModel& model) {
  model.validate();
  const GDerivatives d = model.g.derivatives_at(model.theta);
  if (!(d.g > 0.0))
    throw ConfigError("trial: g(1, 1/theta) must be > 0 for a positive-drift perturbed walk");
  if (d.g01 == 0.0) throw ConfigError("trial: g01(1, 1/theta) = 0 leaves no random walk part");
  PerturbedWalkModel m;
  m.increment = IncrementLaw::exponential(model.theta).affine(d.g - d.g01 / model.theta, d.g01);
  m.vector = VectorLaw::centered_increment();
  m.quadratic.q = Matrix{{d.g02 / (2.0 * d.g01 * d.g01)}};
  m.quadratic.allow_zero = true;
  m.stationary = StationarySpec::staggered_residual(model.arrival_rate, d.g10, d.g01,
                                                    model.xi_truncation);
  m.n0 = model.n0;
  m.horizon_factor = model.horizon_factor;
  return m;
}

namespace {

// Walks one trial, calling visit(n, K, T*) at each tau_n until it returns true.
template <class Visit>
void walk_trial(const StaggeredExponentialModel& model, std::size_t horizon,
                const RngStream& stream, double scale, Visit&& visit) {
  DrawSource source(IncrementLaw::exponential(model.theta), VectorLaw::none(), stream,
                    model.arrival_rate);
  for (std::size_t i = 0; i < model.xi_truncation; ++i) source.next({});
  TrialTracker tracker;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const Draw w = source.next({});
    tracker.admit(scale * w.base, scale * w.gap);
    if (visit(tracker)) return;
  }
}

double statistic(const GStatistic& g, const TrialTracker& t) {
  const double n = static_cast<double>(t.n());
  return n * g(static_cast<double>(t.deaths()) / n, t.total_time() / n);
}

}  // namespace

TrialOutcome run_trial(const StaggeredExponentialModel& model, double a, std::size_t horizon,
                       const RngStream& stream, double lifetime_scale) {
  TrialOutcome out;
  walk_trial(model, horizon, stream, lifetime_scale, [&](const TrialTracker& t) {
    const bool defined = t.deaths() > 0;
    const double z = defined ? statistic(model.g, t) : -std::numeric_limits<double>::infinity();
    const bool stop = defined && static_cast<std::int64_t>(t.n()) >= model.n0 && z > a;
    if (stop || t.n() == horizon) {
      out.t = static_cast<std::int64_t>(t.n());
      out.crossed = stop;
      out.deaths = t.deaths();
      out.total_time = t.total_time();
      out.z = z;
    }
    return stop;
  });
  return out;
}

Example1Summary example1_run(const StaggeredExponentialModel& model, double h, double c,
                             std::size_t reps, const RngStream& stream, const Parallelism& par,
                             std::size_t backward_reps) {
  model.validate();
  if (model.g.kind() != GStatistic::Kind::fixed_width_ci)
    throw ConfigError("example1: the model must use the fixed_width_ci statistic");
  if (!(h > 0.0 && c > 0.0)) throw ConfigError("example1: need h > 0 and c > 0");
  if (reps < 2) throw ContractViolation("example1: need at least two replications");
  if (backward_reps == 0) backward_reps = reps;

  Example1Summary out;
  out.h = h;
  out.c = c;
  out.a = c * c / (h * h);
  out.reps = reps;
  const double mu = model.drift();
  const auto horizon =
      static_cast<std::size_t>(std::ceil(model.horizon_factor * (out.a / mu + 100.0)));

  out.outcomes.resize(reps);
  const RngStream trials = stream.with_stream(streams::trial);
  parallel_for(reps, par, [&](std::size_t r) {
    TrialOutcome o = run_trial(model, out.a, horizon, trials.for_replication(r));
    const double estimate = static_cast<double>(o.deaths) / o.total_time;
    o.covered = o.crossed && std::abs(estimate - model.theta) <= h;
    out.outcomes[r] = o;
  });

  std::vector<double> t, cover;
  std::size_t missed = 0;
  for (const auto& o : out.outcomes) {
    if (!o.crossed) {
      ++missed;
      continue;
    }
    t.push_back(static_cast<double>(o.t));
    cover.push_back(o.covered ? 1.0 : 0.0);
  }
  out.non_crossing_rate = static_cast<double>(missed) / static_cast<double>(reps);
  const MeanSe mt = mean_se(t), mc = mean_se(cover);
  out.mean_t = mt.mean;
  out.se_t = mt.se;
  out.coverage = mc.mean;
  out.se_coverage = mc.se;

  const PerturbedWalkModel walk = to_perturbed_model(model);
  out.constants = estimate_rho_nu(walk, 0, backward_reps, stream.with_stream(streams::backward), par);
  out.predicted_Et = out.constants.predicted_Et(out.a);
  out.difference = out.mean_t - out.predicted_Et;
  out.combined_se = std::hypot(out.se_t, out.constants.se_rho_minus_nu / out.constants.mu);
  return out;
}

Example2Summary example2_run(const StaggeredExponentialModel& model, double a, std::size_t reps,
                             std::size_t horizon, const RngStream& stream, const Parallelism& par) {
  model.validate();
  if (!(a > 0.0)) throw ConfigError("example2: boundary a must be > 0");
  if (horizon < 1) throw ConfigError("example2: horizon must be >= 1");
  if (reps < 2) throw ContractViolation("example2: need at least two replications");
  Example2Summary out;
  out.a = a;
  out.horizon = horizon;
  out.reps = reps;
  out.outcomes.resize(reps);
  const RngStream trials = stream.with_stream(streams::trial);
  parallel_for(reps, par, [&](std::size_t r) {
    out.outcomes[r] = run_trial(model, a, horizon, trials.for_replication(r));
  });
  std::vector<double> rejected, t;
  for (const auto& o : out.outcomes) {
    rejected.push_back(o.crossed ? 1.0 : 0.0);
    if (o.crossed) t.push_back(static_cast<double>(o.t));
  }
  const MeanSe mr = mean_se(rejected);
  out.rejection_rate = mr.mean;
  out.se_rejection = mr.se;
  if (t.size() >= 2) {
    const MeanSe mt = mean_se(t);
    out.mean_t = mt.mean;
    out.se_t = mt.se;
  }
  return out;
}

double calibrate_rst_boundary(const StaggeredExponentialModel& model, double alpha,
                              std::size_t reps, std::size_t horizon, const RngStream& stream,
                              const Parallelism& par) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("calibration: alpha must lie in (0, 1)");
  if (reps < 10) throw ContractViolation("calibration: need at least ten replications");
  StaggeredExponentialModel null_model = model;
  null_model.theta = 1.0;
  null_model.validate();
  std::vector<double> maxima(reps);
  const RngStream runs = stream.with_stream(streams::calibration);
  parallel_for(reps, par, [&](std::size_t r) {
    double best = -std::numeric_limits<double>::infinity();
    walk_trial(null_model, horizon, runs.for_replication(r), 1.0, [&](const TrialTracker& t) {
      if (t.deaths() > 0 && static_cast<std::int64_t>(t.n()) >= null_model.n0)
        best = std::max(best, statistic(null_model.g, t));
      return false;
    });
    maxima[r] = best;
  });
  std::sort(maxima.begin(), maxima.end());
  const auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(reps)));
  return maxima[std::min(reps - 1, k == 0 ? 0 : k - 1)];
}

}  // namespace nlrt
