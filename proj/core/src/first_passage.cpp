#include "nlrt/first_passage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlrt/error.hpp"
#include "nlrt/stats.hpp"

namespace nlrt {

std::vector<FirstPassageSample> simulate_passages(const PerturbedWalkModel& model,
                                                  std::span<const double> levels,
                                                  const RngStream& stream) {
  std::vector<FirstPassageSample> out(levels.size());
  std::vector<std::size_t> horizons(levels.size());
  std::size_t last = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0) || !std::isfinite(levels[i]))
      throw ContractViolation("simulate_passage: level a must be finite and > 0");
    horizons[i] = model.horizon(levels[i]);
    last = std::max(last, horizons[i]);
  }
  std::size_t open = levels.size();
  PathStepper path(model, stream);
  auto record = [&](FirstPassageSample& s, double a) {
    s.t_a = path.n();
    s.excess = path.z() - a;
    s.xi_at_stop = path.xi();
    s.zeta_at_stop = path.zeta();
    s.s_at_stop = path.s();
  };
  std::vector<char> done(levels.size(), 0);
  for (std::size_t n = 1; n <= last && open > 0; ++n) {
    path.step();
    const double z = path.z();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (done[i]) continue;
      if (path.n() >= model.n0 && z > levels[i]) {
        record(out[i], levels[i]);
        out[i].crossed = true;
        done[i] = 1;
        --open;
      } else if (n == horizons[i]) {
        record(out[i], levels[i]);
        done[i] = 1;
        --open;
      }
    }
  }
  return out;
}

FirstPassageSample simulate_passage(const PerturbedWalkModel& model, double a,
                                    const RngStream& stream, PathTrace* trace) {
  if (!trace) return simulate_passages(model, std::span<const double>(&a, 1), stream).front();
  if (!(a > 0.0) || !std::isfinite(a))
    throw ContractViolation("simulate_passage: level a must be finite and > 0");
  const std::size_t horizon = model.horizon(a);
  PathStepper path(model, stream);
  FirstPassageSample s;
  for (std::size_t n = 1; n <= horizon; ++n) {
    path.step();
    trace->z.push_back(path.z());
    const bool crossed = path.n() >= model.n0 && path.z() > a;
    if (crossed || n == horizon) {
      s.t_a = path.n();
      s.excess = path.z() - a;
      s.xi_at_stop = path.xi();
      s.zeta_at_stop = path.zeta();
      s.s_at_stop = path.s();
      s.crossed = crossed;
      break;
    }
  }
  return s;
}

PassageSummary summarize(double a, std::span<const FirstPassageSample> samples) {
  PassageSummary out;
  out.a = a;
  out.reps = samples.size();
  std::vector<double> t, r, xi, zeta, s;
  for (const auto& x : samples) {
    if (!x.crossed) continue;
    t.push_back(static_cast<double>(x.t_a));
    r.push_back(x.excess);
    xi.push_back(x.xi_at_stop);
    zeta.push_back(x.zeta_at_stop);
    s.push_back(x.s_at_stop);
  }
  out.crossed = t.size();
  out.non_crossing_rate =
      out.reps ? static_cast<double>(out.reps - out.crossed) / static_cast<double>(out.reps) : 0.0;
  out.usable = out.non_crossing_rate <= 0.01;
  if (t.empty()) {
    out.usable = false;
    return out;
  }
  auto put = [](std::span<const double> v, double& m, double& se) {
    const MeanSe ms = mean_se(v);
    m = ms.mean;
    se = ms.se;
  };
  put(t, out.mean_t, out.se_t);
  put(r, out.mean_excess, out.se_excess);
  put(xi, out.mean_xi, out.se_xi);
  put(zeta, out.mean_zeta, out.se_zeta);
  put(s, out.mean_s, out.se_s);
  return out;
}

std::vector<FirstPassageSample> passage_samples(const PerturbedWalkModel& model, double a,
                                                std::size_t reps, const RngStream& stream,
                                                const Parallelism& par) {
  model.validate();
  std::vector<FirstPassageSample> out(reps);
  parallel_for(reps, par,
               [&](std::size_t r) { out[r] = simulate_passage(model, a, stream.for_replication(r)); });
  return out;
}

PassageSummary estimate_Et(const PerturbedWalkModel& model, double a, std::size_t reps,
                           const RngStream& stream, const Parallelism& par) {
  if (reps < 100) throw ContractViolation("estimate_Et: reps must be >= 100");
  const auto samples = passage_samples(model, a, reps, stream, par);
  return summarize(a, samples);
}

std::size_t default_backward_depth(const PerturbedWalkModel& model, double tol) {
  const double mu = model.mu();
  const double j = 8.0 * model.sigma2() / (mu * mu * tol);
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(j)));
}

namespace {

double pilot_xi_sd(const PerturbedWalkModel& model, const RngStream& stream) {
  if (model.stationary.kind == StationaryKind::zero) return 0.0;
  PathStepper path(model, {stream.seed, 0, streams::pilot});
  std::vector<double> xs(4000);
  for (double& x : xs) {
    path.step();
    x = path.xi();
  }
  const MeanSe m = mean_se(xs);
  return m.se * std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace

BackwardRun backward_min_functional(const PerturbedWalkModel& model, std::size_t depth,
                                    std::size_t reps, const RngStream& stream,
                                    const Parallelism& par) {
  model.validate();
  BackwardRun run;
  run.depth_cap = depth == 0 ? default_backward_depth(model) : depth;
  run.xi_sd = pilot_xi_sd(model, stream);
  run.samples.resize(reps);

  const StationarySpec& spec = model.stationary;
  const std::size_t window = std::max<std::size_t>(1, spec.window());
  const double sigma = std::sqrt(model.sigma2());
  const double xi_margin = 10.0 * run.xi_sd;
  std::vector<char> capped(reps, 0);

  parallel_for(reps, par, [&](std::size_t r) {
    DrawSource source(model.increment, model.vector, stream.for_replication(r),
                      model.arrival_rate());
    std::vector<double> y(model.vector.dim());
    // g[k] = W_{-k}; xi_{-k} reads g[k .. k + window).
    std::vector<Draw> g;
    g.reserve(256 + window);
    for (std::size_t i = 0; i < window; ++i) g.push_back(source.next(y));
    const double xi0 = xi_value(spec, std::span<const Draw>(g.data(), window));

    BackwardFunctionalSample out;
    out.xi0 = xi0;
    double sum = 0.0;
    double lowest = std::numeric_limits<double>::infinity();
    bool exited = false;
    std::size_t k = 1;
    for (; k <= run.depth_cap; ++k) {
      g.push_back(source.next(y));
      sum += g[k - 1].x;
      const double z = sum + xi0 - xi_value(spec, std::span<const Draw>(g.data() + k, window));
      if (z < lowest) {
        lowest = z;
        out.attained_index = -static_cast<std::int64_t>(k);
      } else if (z - lowest > 10.0 * sigma * std::sqrt(static_cast<double>(k)) + xi_margin) {
        exited = true;
        break;
      }
    }
    out.inf_value = lowest;
    out.truncation_depth = static_cast<std::int64_t>(std::min(k, run.depth_cap));
    run.samples[r] = out;
    capped[r] = exited ? 0 : 1;
  });

  run.capped = static_cast<std::size_t>(std::count(capped.begin(), capped.end(), 1));
  if (run.capped > 0) {
    const double mu = model.mu();
    const double bound = 8.0 * model.sigma2() / (mu * mu * static_cast<double>(run.depth_cap));
    run.warning = std::to_string(run.capped) + " replications reached the depth cap " +
                  std::to_string(run.depth_cap) +
                  " before the early exit; residual dip probability per replication <= " +
                  std::to_string(bound);
  }
  return run;
}

RenewalConstants constants_from_backward(const PerturbedWalkModel& model, const BackwardRun& run) {
  RenewalConstants c;
  c.mu = model.mu();
  c.sigma2 = model.sigma2();
  c.lambda = mixture_mean(model.mixture());
  c.residual_mean = model.residual.asymptotic_mean();
  c.reps = run.samples.size();
  if (c.reps < 2) throw ContractViolation("estimate_rho_nu: need at least two replications");

  std::vector<double> rho(c.reps), nu(c.reps), diff(c.reps), mass(c.reps);
  for (std::size_t i = 0; i < c.reps; ++i) {
    const double plus = std::max(run.samples[i].inf_value, 0.0);
    rho[i] = plus * plus / (2.0 * c.mu);
    nu[i] = run.samples[i].xi0 * plus / c.mu;
    diff[i] = rho[i] - nu[i];
    mass[i] = plus / c.mu;
  }
  const MeanSe r = mean_se(rho), v = mean_se(nu), d = mean_se(diff), m = mean_se(mass);
  c.rho = r.mean;
  c.se_rho = r.se;
  c.nu = v.mean;
  c.se_nu = v.se;
  c.se_rho_minus_nu = d.se;
  c.normalization = m.mean;
  c.se_normalization = m.se;
  c.consistent = std::abs(m.mean - 1.0) <= std::max(5.0 * m.se, 1e-12);
  c.warning = run.warning;
  return c;
}

RenewalConstants estimate_rho_nu(const PerturbedWalkModel& model, std::size_t depth,
                                 std::size_t reps, const RngStream& stream,
                                 const Parallelism& par) {
  return constants_from_backward(model, backward_min_functional(model, depth, reps, stream, par));
}

ExcessLimitDf::ExcessLimitDf(std::span<const BackwardFunctionalSample> samples, double mu)
    : mu_(mu) {
  sorted_.reserve(samples.size());
  for (const auto& s : samples) sorted_.push_back(std::max(s.inf_value, 0.0));
  std::sort(sorted_.begin(), sorted_.end());
  prefix_.resize(sorted_.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted_.size(); ++i) prefix_[i + 1] = prefix_[i] + sorted_[i];
}

double ExcessLimitDf::operator()(double r) const {
  if (r <= 0.0 || sorted_.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(
      std::lower_bound(sorted_.begin(), sorted_.end(), r) - sorted_.begin());
  const double n = static_cast<double>(sorted_.size());
  return (prefix_[k] + r * static_cast<double>(sorted_.size() - k)) / (n * mu_);
}

XiLimitDf::XiLimitDf(std::span<const BackwardFunctionalSample> samples, double mu)
    : total_n_(static_cast<double>(samples.size())), mu_(mu) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return samples[i].xi0 < samples[j].xi0; });
  xi_.reserve(samples.size());
  prefix_.assign(1, 0.0);
  for (std::size_t i : order) {
    xi_.push_back(samples[i].xi0);
    prefix_.push_back(prefix_.back() + std::max(samples[i].inf_value, 0.0));
  }
}

double XiLimitDf::operator()(double y) const {
  if (xi_.empty()) return 0.0;
  const auto k =
      static_cast<std::size_t>(std::upper_bound(xi_.begin(), xi_.end(), y) - xi_.begin());
  return prefix_[k] / (total_n_ * mu_);
}

}  // namespace nlrt
