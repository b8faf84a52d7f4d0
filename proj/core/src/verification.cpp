#include "nlrt/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlrt/error.hpp"
#include "nlrt/mixture.hpp"

namespace nlrt {

WindowBounds WindowBounds::compute(double q, double a, double mu) {
  if (!(q > 1.0 / 3.0 && q < 0.5)) throw ConfigError("window bounds: q must lie in (1/3, 1/2)");
  if (!(a > 0.0) || !(mu > 0.0)) throw ConfigError("window bounds: need a > 0 and mu > 0");
  const double shrink = std::pow(a, -q);
  WindowBounds w;
  w.q = q;
  w.a = a;
  w.m = static_cast<std::int64_t>(std::floor(((1.0 - shrink) / mu) * a));
  w.M = static_cast<std::int64_t>(std::floor(((1.0 + shrink) / mu) * a));
  return w;
}

EventPredicate EventPredicate::always() {
  return {"always", 1, [](std::span<const Draw>, double) { return true; }};
}

EventPredicate EventPredicate::never() {
  return {"never", 1, [](std::span<const Draw>, double) { return false; }};
}

EventPredicate EventPredicate::xi_at_most(double c) {
  return {"xi <= " + std::to_string(c), 1, [c](std::span<const Draw>, double xi) { return xi <= c; }};
}

EventPredicate EventPredicate::increment_above(double c) {
  return {"X > " + std::to_string(c), 1,
          [c](std::span<const Draw> w, double) { return w[0].x > c; }};
}

TheoremReport TheoremReport::make(std::string name, double estimate, double theory, double se,
                                  std::size_t reps) {
  return {std::move(name), estimate, theory, se, reps, std::abs(estimate - theory) <= 3.0 * se};
}

Theorem1Result theorem1_experiment(const PerturbedWalkModel& model, const EventPredicate& b_event,
                                   double y, double a, double b, std::size_t reps,
                                   const RngStream& stream, const Parallelism& par) {
  model.validate();
  if (!(a > 0.0 && b > 0.0)) throw ContractViolation("theorem1_experiment: need a, b > 0");
  if (reps < 2) throw ContractViolation("theorem1_experiment: need at least two replications");
  if (!b_event.test) throw ConfigError("theorem1_experiment: event predicate has no test");

  Theorem1Result out;
  out.horizon = model.horizon(a + b);
  const std::size_t depth = b_event.window_depth;

  std::vector<double> counts(reps);
  const RngStream paths = stream.with_stream(streams::passage);
  parallel_for(reps, par, [&](std::size_t r) {
    PathStepper path(model, paths.for_replication(r), depth);
    std::size_t count = 0;
    for (std::size_t n = 1; n <= out.horizon; ++n) {
      path.step();
      const double z = path.z();
      if (z > a && z <= a + b && path.zeta() <= y && b_event.test(path.window(), path.xi()))
        ++count;
    }
    counts[r] = static_cast<double>(count);
  });

  std::vector<double> hits(reps);
  const RngStream stationary = stream.with_stream(streams::stationary_sample);
  parallel_for(reps, par, [&](std::size_t r) {
    PathStepper path(model, stationary.for_replication(r), depth);
    path.step();
    hits[r] = b_event.test(path.window(), path.xi()) ? 1.0 : 0.0;
  });

  const MeanSe c = mean_se(counts);
  const MeanSe p = mean_se(hits);
  out.count_mean = c.mean;
  out.count_se = c.se;
  out.p_event = p.mean;
  out.se_p_event = p.se;
  out.mixture_cdf_y = mixture_cdf(model.mixture(), y);
  const double scale = b / model.mu() * out.mixture_cdf_y;
  const double se = std::hypot(c.se, scale * p.se);
  out.report = TheoremReport::make("theorem1", c.mean, scale * p.mean, se, reps);
  return out;
}

namespace {

DistanceCheck two_sample_check(std::string name, double distance, std::size_t n, std::size_t m) {
  DistanceCheck d;
  d.name = std::move(name);
  d.distance = distance;
  d.upper = distance;
  d.critical_1pct = ks_critical_two_sample(0.01, n, m);
  d.threshold = d.critical_1pct;
  d.pass = distance <= d.threshold;
  return d;
}

}  // namespace

Theorem3Result theorem3_experiment(const PerturbedWalkModel& model, double a, std::size_t reps,
                                   const RngStream& stream, const Parallelism& par,
                                   std::size_t backward_reps, std::size_t depth,
                                   double zeta_threshold) {
  if (backward_reps == 0) backward_reps = reps;
  Theorem3Result out;
  const auto samples = passage_samples(model, a, reps, stream.with_stream(streams::passage), par);
  out.passages = summarize(a, samples);
  const BackwardRun run =
      backward_min_functional(model, depth, backward_reps, stream.with_stream(streams::backward), par);
  out.constants = constants_from_backward(model, run);
  const double mu = model.mu();

  std::vector<double> r, xi, zeta;
  for (const auto& s : samples) {
    if (!s.crossed) continue;
    r.push_back(s.excess);
    xi.push_back(s.xi_at_stop);
    zeta.push_back(s.zeta_at_stop);
  }
  if (r.size() < 2) throw NumericError("theorem3_experiment: fewer than two crossings", 0.0);

  std::vector<double> r_sorted = r, xi_sorted = xi, zeta_sorted = zeta;
  std::sort(r_sorted.begin(), r_sorted.end());
  std::sort(xi_sorted.begin(), xi_sorted.end());
  std::sort(zeta_sorted.begin(), zeta_sorted.end());

  const ExcessLimitDf f(run.samples, mu);
  out.excess = two_sample_check("excess", ks_statistic(r_sorted, [&](double v) { return f(v); }),
                                r.size(), backward_reps);
  const XiLimitDf g(run.samples, mu);
  out.xi = two_sample_check("xi", ks_statistic(xi_sorted, [&](double v) { return g(v); }),
                            xi.size(), backward_reps);
  out.xi_degenerate = xi_sorted.front() == xi_sorted.back();

  MixtureCdf cdf(model.mixture());
  const std::size_t stride = std::max<std::size_t>(1, (zeta.size() + 1999) / 2000);
  const KsBound kz = ks_statistic_bounded(zeta_sorted, [&](double v) { return cdf(v); }, stride);
  out.zeta.name = "zeta";
  out.zeta.distance = kz.lower;
  out.zeta.upper = kz.upper;
  out.zeta.threshold = zeta_threshold;
  out.zeta.critical_1pct = ks_critical(0.01, zeta.size());
  out.zeta.pass = kz.upper < zeta_threshold;

  out.corr_zeta_excess = sample_correlation(zeta, r);
  out.quadrant_zeta_excess = quadrant_test(zeta, r);
  if (!out.xi_degenerate) {
    out.corr_zeta_xi = sample_correlation(zeta, xi);
    out.quadrant_zeta_xi = quadrant_test(zeta, xi);
  }

  const RenewalConstants& c = out.constants;
  out.rho_vs_excess_mean =
      TheoremReport::make("rho_vs_mean_excess", out.passages.mean_excess, c.rho,
                          std::hypot(out.passages.se_excess, c.se_rho), out.passages.crossed);
  out.nu_vs_xi_mean = TheoremReport::make("nu_vs_mean_xi", out.passages.mean_xi, c.nu,
                                          std::hypot(out.passages.se_xi, c.se_nu),
                                          out.passages.crossed);
  return out;
}

Theorem4Result theorem4_experiment(const PerturbedWalkModel& model, std::span<const double> a_grid,
                                   std::size_t reps, const RngStream& stream,
                                   const Parallelism& par, std::size_t backward_reps,
                                   std::size_t depth) {
  model.validate();
  if (a_grid.empty()) throw ConfigError("theorem4_experiment: empty a grid");
  if (reps < 100) throw ContractViolation("theorem4_experiment: reps must be >= 100");
  if (backward_reps == 0) backward_reps = reps;

  Theorem4Result out;
  out.constants = estimate_rho_nu(model, depth, backward_reps,
                                  stream.with_stream(streams::backward), par);

  std::vector<std::vector<FirstPassageSample>> per_rep(reps);
  const RngStream paths = stream.with_stream(streams::passage);
  parallel_for(reps, par, [&](std::size_t r) {
    per_rep[r] = simulate_passages(model, a_grid, paths.for_replication(r));
  });

  const RenewalConstants& c = out.constants;
  bool usable = true;
  std::vector<FirstPassageSample> column(reps);
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = per_rep[r][i];
    const PassageSummary s = summarize(a_grid[i], column);
    Theorem4Row row;
    row.a = a_grid[i];
    row.mean_t = s.mean_t;
    row.se_t = s.se_t;
    row.predicted = c.predicted_Et(row.a);
    row.difference = row.mean_t - row.predicted;
    row.combined_se = std::hypot(s.se_t, c.se_rho_minus_nu / c.mu);
    row.non_crossing_rate = s.non_crossing_rate;
    row.usable = s.usable;
    usable = usable && s.usable;
    out.rows.push_back(row);
  }

  const Theorem4Row& last = out.rows.back();
  out.final_within = std::abs(last.difference) <= 3.0 * last.combined_se;
  out.strictly_shrinking = true;
  out.shrinking_within_noise = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    const double prev = std::abs(out.rows[i - 1].difference);
    const double cur = std::abs(out.rows[i].difference);
    if (cur > prev) out.strictly_shrinking = false;
    if (cur - prev > 3.0 * std::hypot(out.rows[i - 1].se_t, out.rows[i].se_t))
      out.shrinking_within_noise = false;
  }
  out.pass = out.final_within && out.strictly_shrinking && c.consistent && usable;
  return out;
}

bool nonincreasing_within_noise(std::span<const MeanSe> values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i].mean - values[i - 1].mean > 3.0 * std::hypot(values[i].se, values[i - 1].se))
      return false;
  return true;
}

std::vector<Lemma1Row> lemma1_diagnostic(const PerturbedWalkModel& model, double q,
                                         std::span<const double> a_grid, std::size_t reps,
                                         const RngStream& stream, const Parallelism& par) {
  model.validate();
  if (a_grid.empty()) throw ConfigError("lemma1_diagnostic: empty a grid");
  if (reps < 2) throw ContractViolation("lemma1_diagnostic: need at least two replications");
  const std::size_t levels = a_grid.size();
  std::vector<Lemma1Row> rows(levels);
  std::size_t last = 0;
  for (std::size_t i = 0; i < levels; ++i) {
    rows[i].bounds = WindowBounds::compute(q, a_grid[i], model.mu());
    rows[i].b = 0.5 * std::pow(a_grid[i], 1.0 - q);
    rows[i].horizon = model.horizon(a_grid[i]);
    last = std::max(last, rows[i].horizon);
  }

  // [level][rep]
  std::vector<std::vector<double>> d0(levels, std::vector<double>(reps));
  auto d1 = d0;
  auto tail = d0;
  const RngStream paths = stream.with_stream(streams::passage);
  parallel_for(reps, par, [&](std::size_t r) {
    PathStepper path(model, paths.for_replication(r));
    std::vector<std::size_t> c0(levels, 0), c1(levels, 0), stop(levels, 0);
    for (std::size_t n = 1; n <= last; ++n) {
      path.step();
      const double z = path.z();
      const auto nn = static_cast<std::int64_t>(n);
      for (std::size_t i = 0; i < levels; ++i) {
        const Lemma1Row& row = rows[i];
        if (n > row.horizon) continue;
        const double a = row.bounds.a;
        if (nn <= row.bounds.m && z > a) ++c0[i];
        if (nn > row.bounds.M && z <= a + row.b) ++c1[i];
        if (stop[i] == 0 && nn >= model.n0 && z > a) stop[i] = n;
      }
    }
    for (std::size_t i = 0; i < levels; ++i) {
      const Lemma1Row& row = rows[i];
      d0[i][r] = static_cast<double>(c0[i]);
      d1[i][r] = static_cast<double>(c1[i]);
      // #{n in [M, horizon] : t_a > n}; a path that never crossed counts every index.
      const auto big_m = static_cast<std::size_t>(std::max<std::int64_t>(row.bounds.M, 0));
      const std::size_t t = stop[i] == 0 ? row.horizon + 1 : stop[i];
      tail[i][r] = t > big_m ? static_cast<double>(std::min(t, row.horizon + 1) - big_m) : 0.0;
    }
  });

  for (std::size_t i = 0; i < levels; ++i) {
    rows[i].delta0 = mean_se(d0[i]);
    rows[i].delta1 = mean_se(d1[i]);
    rows[i].tail = mean_se(tail[i]);
    const double h = static_cast<double>(rows[i].horizon);
    const double gap = h * model.mu() - (rows[i].bounds.a + rows[i].b);
    rows[i].drift_tail_bound = gap > 0.0 ? std::min(1.0, h * model.sigma2() / (gap * gap)) : 1.0;
  }
  return rows;
}

std::vector<Lemma3Row> lemma3_diagnostic(const PerturbedWalkModel& model, double q, double epsilon,
                                         std::span<const double> a_grid, std::size_t reps,
                                         const RngStream& stream, const Parallelism& par) {
  model.validate();
  if (!(epsilon > 0.0)) throw ConfigError("lemma3_diagnostic: epsilon must be > 0");
  if (a_grid.empty()) throw ConfigError("lemma3_diagnostic: empty a grid");
  if (reps < 2) throw ContractViolation("lemma3_diagnostic: need at least two replications");
  const std::size_t levels = a_grid.size();
  const std::size_t d = model.dim();
  std::vector<Lemma3Row> rows(levels);
  std::size_t last = 0;
  for (std::size_t i = 0; i < levels; ++i) {
    rows[i].bounds = WindowBounds::compute(q, a_grid[i], model.mu());
    rows[i].epsilon = epsilon;
    if (rows[i].bounds.m < 1)
      throw ConfigError("lemma3_diagnostic: a = " + std::to_string(a_grid[i]) + " gives m < 1");
    last = std::max(last, static_cast<std::size_t>(rows[i].bounds.M));
  }

  // [level][rep][index offset]
  std::vector<std::vector<double>> counts(levels, std::vector<double>(reps));
  std::vector<std::vector<std::vector<char>>> hits(levels, std::vector<std::vector<char>>(reps));
  const RngStream paths = stream.with_stream(streams::passage);
  parallel_for(reps, par, [&](std::size_t r) {
    PathStepper path(model, paths.for_replication(r));
    std::vector<double> y(last * d);
    std::vector<double> zeta(last + 1);
    for (std::size_t n = 1; n <= last; ++n) {
      path.step();
      std::copy(path.y().begin(), path.y().end(), y.begin() + static_cast<std::ptrdiff_t>((n - 1) * d));
      zeta[n] = path.zeta();
    }
    for (std::size_t i = 0; i < levels; ++i) {
      const auto m = static_cast<std::size_t>(rows[i].bounds.m);
      const auto big_m = static_cast<std::size_t>(rows[i].bounds.M);
      auto& h = hits[i][r];
      h.assign(big_m > m ? big_m - m : 0, 0);
      std::size_t count = 0;
      for (std::size_t n = m + 1; n <= big_m; ++n) {
        const double windowed = d == 0 ? 0.0 : zeta_window(y, m, n, model.quadratic);
        if (std::abs(zeta[n] - windowed) >= epsilon) {
          h[n - m - 1] = 1;
          ++count;
        }
      }
      counts[i][r] = static_cast<double>(count);
    }
  });

  for (std::size_t i = 0; i < levels; ++i) {
    rows[i].count = mean_se(counts[i]);
    const std::size_t width = hits[i].front().size();
    rows[i].per_index_rate.assign(width, 0.0);
    for (std::size_t k = 0; k < width; ++k) {
      std::size_t total = 0;
      for (std::size_t r = 0; r < reps; ++r) total += static_cast<std::size_t>(hits[i][r][k]);
      rows[i].per_index_rate[k] = static_cast<double>(total) / static_cast<double>(reps);
    }
  }
  return rows;
}

}  // namespace nlrt
