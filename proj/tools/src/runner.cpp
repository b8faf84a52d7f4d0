#include "nlrt_app/runner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "nlrt/error.hpp"
#include "nlrt/exponential_model.hpp"
#include "nlrt/first_passage.hpp"
#include "nlrt/mixture.hpp"
#include "nlrt/stats.hpp"
#include "nlrt/verification.hpp"
#include "nlrt/version.hpp"

namespace nlrt::app {

namespace {

const std::vector<std::string> passage_columns = {
    "a", "reps", "crossed", "non_crossing_rate", "usable", "mean_t", "se_t", "mean_excess",
    "se_excess", "mean_xi", "se_xi", "mean_zeta", "se_zeta"};

void passage_row(Csv& csv, const PassageSummary& s) {
  csv << s.a << s.reps << s.crossed << s.non_crossing_rate << s.usable << s.mean_t << s.se_t
      << s.mean_excess << s.se_excess << s.mean_xi << s.se_xi << s.mean_zeta << s.se_zeta;
  csv.end_row();
}

const std::vector<std::string> constants_columns = {
    "mu", "sigma2", "rho", "se_rho", "nu", "se_nu", "se_rho_minus_nu", "lambda", "residual_mean",
    "normalization", "se_normalization", "consistent", "backward_reps"};

void constants_row(Csv& csv, const RenewalConstants& c) {
  csv << c.mu << c.sigma2 << c.rho << c.se_rho << c.nu << c.se_nu << c.se_rho_minus_nu << c.lambda
      << c.residual_mean << c.normalization << c.se_normalization << c.consistent << c.reps;
  csv.end_row();
}

std::size_t or_reps(std::size_t v, std::size_t reps) { return v == 0 ? reps : v; }

void run_simulate(const ExperimentConfig& cfg, Bundle& out) {
  const PerturbedWalkModel model = cfg.model.build();
  const Parallelism par{cfg.workers};
  Csv summary(passage_columns);
  Csv reps({"a", "replication", "crossed", "t_a", "excess", "xi", "zeta"});
  for (double a : cfg.a_grid) {
    const auto samples =
        passage_samples(model, a, cfg.reps, {cfg.seed, 0, streams::passage}, par);
    const PassageSummary s = summarize(a, samples);
    passage_row(summary, s);
    out.non_crossing_rate = std::max(out.non_crossing_rate, s.non_crossing_rate);
    for (std::size_t r = 0; r < samples.size(); ++r) {
      const auto& x = samples[r];
      reps << a << r << x.crossed << x.t_a << x.excess << x.xi_at_stop << x.zeta_at_stop;
      reps.end_row();
    }
    if (!s.usable) out.notes.push_back("a = " + format_double(a) + ": non-crossing rate above 1%");
  }
  out.tables.emplace("simulate", std::move(summary));
  out.tables.emplace("simulate_replications", std::move(reps));
}

void run_constants(const ExperimentConfig& cfg, Bundle& out) {
  const PerturbedWalkModel model = cfg.model.build();
  const Parallelism par{cfg.workers};
  const BackwardRun run = backward_min_functional(model, cfg.depth, or_reps(cfg.backward_reps, cfg.reps),
                                                  {cfg.seed, 0, streams::backward}, par);
  const RenewalConstants c = constants_from_backward(model, run);

  // Empirical E zeta_n, reported next to lambda rather than in place of it.
  const std::size_t paths = std::min<std::size_t>(cfg.reps, 10000);
  std::vector<double> zeta(paths);
  parallel_for(paths, par, [&](std::size_t r) {
    PathStepper p(model, {cfg.seed, r, streams::passage});
    for (std::size_t n = 0; n < cfg.eta_n; ++n) p.step();
    zeta[r] = p.zeta();
  });
  const MeanSe eta = mean_se(zeta);

  auto columns = constants_columns;
  for (const char* extra : {"depth_cap", "capped", "eta_n", "eta_empirical", "se_eta"})
    columns.emplace_back(extra);
  Csv csv(columns);
  csv << c.mu << c.sigma2 << c.rho << c.se_rho << c.nu << c.se_nu << c.se_rho_minus_nu << c.lambda
      << c.residual_mean << c.normalization << c.se_normalization << c.consistent << c.reps
      << run.depth_cap << run.capped << cfg.eta_n << eta.mean << eta.se;
  csv.end_row();
  out.tables.emplace("constants", std::move(csv));
  if (!c.consistent) {
    out.failed = true;
    out.notes.push_back("normalization E[(inf Z*)_+]/mu = " + format_double(c.normalization) +
                        " is more than 5 SE from 1");
  }
  if (run.warning) out.notes.push_back(*run.warning);
}

void run_thm1(const ExperimentConfig& cfg, Bundle& out) {
  const PerturbedWalkModel model = cfg.model.build();
  const ChiSquareMixture mix = model.mixture();
  const double y = cfg.y ? *cfg.y : mixture_quantile(mix, 0.5);
  const EventPredicate event = cfg.event.build();
  const Theorem1Result r = theorem1_experiment(model, event, y, cfg.a, cfg.b, cfg.reps,
                                               {cfg.seed, 0, 0}, Parallelism{cfg.workers});
  Csv csv({"a", "b", "y", "event", "estimate", "theory", "std_error", "n_reps", "pass", "p_event",
           "se_p_event", "mixture_cdf_y", "horizon"});
  csv << cfg.a << cfg.b << y << event.description << r.report.estimate << r.report.theory
      << r.report.std_error << r.report.n_reps << r.report.pass << r.p_event << r.se_p_event
      << r.mixture_cdf_y << r.horizon;
  csv.end_row();
  out.tables.emplace("theorem1", std::move(csv));
  out.failed = !r.report.pass;
}

void run_thm3(const ExperimentConfig& cfg, Bundle& out) {
  const PerturbedWalkModel model = cfg.model.build();
  const Theorem3Result r =
      theorem3_experiment(model, cfg.a, cfg.reps, {cfg.seed, 0, 0}, Parallelism{cfg.workers},
                          or_reps(cfg.backward_reps, cfg.reps), cfg.depth, cfg.zeta_threshold);
  Csv csv({"check", "statistic", "upper", "reference", "threshold", "pass"});
  for (const DistanceCheck* d : {&r.excess, &r.zeta, &r.xi}) {
    csv << ("ks_" + d->name) << d->distance << d->upper << d->critical_1pct << d->threshold << d->pass;
    csv.end_row();
    if (!d->pass) out.failed = true;
  }
  for (const TheoremReport* t : {&r.rho_vs_excess_mean, &r.nu_vs_xi_mean}) {
    csv << t->name << t->estimate << t->estimate << t->theory << 3.0 * t->std_error << t->pass;
    csv.end_row();
    if (!t->pass) out.failed = true;
  }
  csv << "corr_zeta_excess" << r.corr_zeta_excess << r.corr_zeta_excess << 0.0 << 0.0 << true;
  csv.end_row();
  csv << "corr_zeta_xi" << r.corr_zeta_xi << r.corr_zeta_xi << 0.0 << 0.0 << true;
  csv.end_row();
  csv << "quadrant_zeta_excess_p" << r.quadrant_zeta_excess.p_value << r.quadrant_zeta_excess.chi2
      << 0.01 << 0.01 << (r.quadrant_zeta_excess.p_value >= 0.01);
  csv.end_row();
  csv << "quadrant_zeta_xi_p" << r.quadrant_zeta_xi.p_value << r.quadrant_zeta_xi.chi2 << 0.01
      << 0.01 << (r.quadrant_zeta_xi.p_value >= 0.01);
  csv.end_row();
  out.tables.emplace("theorem3", std::move(csv));

  Csv passages(passage_columns);
  passage_row(passages, r.passages);
  out.tables.emplace("theorem3_passages", std::move(passages));
  Csv constants(constants_columns);
  constants_row(constants, r.constants);
  out.tables.emplace("theorem3_constants", std::move(constants));
  out.non_crossing_rate = r.passages.non_crossing_rate;
  if (!r.passages.usable || !r.constants.consistent) out.failed = true;
}

void run_thm4(const ExperimentConfig& cfg, Bundle& out) {
  const PerturbedWalkModel model = cfg.model.build();
  const Theorem4Result r =
      theorem4_experiment(model, cfg.a_grid, cfg.reps, {cfg.seed, 0, 0}, Parallelism{cfg.workers},
                          or_reps(cfg.backward_reps, cfg.reps), cfg.depth);
  Csv csv({"a", "mean_t", "se_t", "predicted", "difference", "combined_se", "within_3se",
           "non_crossing_rate", "usable"});
  for (const auto& row : r.rows) {
    csv << row.a << row.mean_t << row.se_t << row.predicted << row.difference << row.combined_se
        << (std::abs(row.difference) <= 3.0 * row.combined_se) << row.non_crossing_rate << row.usable;
    csv.end_row();
    out.non_crossing_rate = std::max(out.non_crossing_rate, row.non_crossing_rate);
  }
  out.tables.emplace("theorem4", std::move(csv));
  Csv constants(constants_columns);
  constants_row(constants, r.constants);
  out.tables.emplace("theorem4_constants", std::move(constants));
  out.failed = !r.pass;
  out.notes.push_back(std::string("final difference within 3 SE: ") + (r.final_within ? "yes" : "no") +
                      "; |difference| non-increasing: " + (r.strictly_shrinking ? "yes" : "no") +
                      "; normalization consistent: " + (r.constants.consistent ? "yes" : "no"));
}

void run_lemma1(const ExperimentConfig& cfg, Bundle& out) {
  const PerturbedWalkModel model = cfg.model.build();
  const auto rows = lemma1_diagnostic(model, cfg.q, cfg.a_grid, cfg.reps, {cfg.seed, 0, 0},
                                      Parallelism{cfg.workers});
  Csv csv({"a", "q", "m", "M", "b", "horizon", "delta0", "se_delta0", "delta1", "se_delta1",
           "tail", "se_tail", "drift_tail_bound"});
  for (const auto& r : rows) {
    csv << r.bounds.a << r.bounds.q << r.bounds.m << r.bounds.M << r.b << r.horizon << r.delta0.mean
        << r.delta0.se << r.delta1.mean << r.delta1.se << r.tail.mean << r.tail.se
        << r.drift_tail_bound;
    csv.end_row();
  }
  out.tables.emplace("lemma1", std::move(csv));
}

void run_lemma3(const ExperimentConfig& cfg, Bundle& out) {
  const PerturbedWalkModel model = cfg.model.build();
  const auto rows = lemma3_diagnostic(model, cfg.q, cfg.epsilon, cfg.a_grid, cfg.reps,
                                      {cfg.seed, 0, 0}, Parallelism{cfg.workers});
  Csv csv({"a", "q", "m", "M", "epsilon", "count", "se_count"});
  Csv per_index({"a", "n", "rate"});
  for (const auto& r : rows) {
    csv << r.bounds.a << r.bounds.q << r.bounds.m << r.bounds.M << r.epsilon << r.count.mean
        << r.count.se;
    csv.end_row();
    for (std::size_t k = 0; k < r.per_index_rate.size(); ++k) {
      per_index << r.bounds.a << static_cast<std::int64_t>(r.bounds.m + 1 + static_cast<std::int64_t>(k))
                << r.per_index_rate[k];
      per_index.end_row();
    }
  }
  out.tables.emplace("lemma3", std::move(csv));
  out.tables.emplace("lemma3_per_index", std::move(per_index));
}

const std::vector<std::string> trial_columns = {"replication", "crossed", "t", "deaths",
                                                "total_time", "z", "covered"};

void run_fwci(const ExperimentConfig& cfg, Bundle& out) {
  const StaggeredExponentialModel model = cfg.trial.build();
  const Example1Summary s = example1_run(model, cfg.h, cfg.c, cfg.reps, {cfg.seed, 0, 0},
                                         Parallelism{cfg.workers}, or_reps(cfg.backward_reps, cfg.reps));
  Csv csv({"theta", "h", "c", "a", "reps", "non_crossing_rate", "mean_t", "se_t", "coverage",
           "se_coverage", "predicted_Et", "difference", "combined_se", "rho", "nu", "lambda",
           "normalization", "consistent"});
  csv << model.theta << s.h << s.c << s.a << s.reps << s.non_crossing_rate << s.mean_t << s.se_t
      << s.coverage << s.se_coverage << s.predicted_Et << s.difference << s.combined_se
      << s.constants.rho << s.constants.nu << s.constants.lambda << s.constants.normalization
      << s.constants.consistent;
  csv.end_row();
  Csv reps(trial_columns);
  for (std::size_t r = 0; r < s.outcomes.size(); ++r) {
    const auto& o = s.outcomes[r];
    reps << r << o.crossed << o.t << o.deaths << o.total_time << o.z << o.covered;
    reps.end_row();
  }
  out.tables.emplace("example_fwci", std::move(csv));
  out.tables.emplace("example_fwci_replications", std::move(reps));
  out.non_crossing_rate = s.non_crossing_rate;
  if (!s.constants.consistent) out.failed = true;
}

void run_rst(const ExperimentConfig& cfg, Bundle& out) {
  const StaggeredExponentialModel base = cfg.trial.build();
  const Parallelism par{cfg.workers};
  const double a = cfg.boundary ? *cfg.boundary
                                : calibrate_rst_boundary(base, cfg.alpha,
                                                         or_reps(cfg.calibration_reps, cfg.reps),
                                                         cfg.horizon, {cfg.seed, 0, 0}, par);
  Csv csv({"theta", "a", "calibrated", "alpha", "horizon", "reps", "rejection_rate",
           "se_rejection", "mean_t", "se_t"});
  auto columns = trial_columns;
  columns.insert(columns.begin(), "theta");
  Csv reps(columns);
  for (double theta : cfg.thetas) {
    StaggeredExponentialModel m = base;
    m.theta = theta;
    const Example2Summary s = example2_run(m, a, cfg.reps, cfg.horizon, {cfg.seed, 0, 0}, par);
    csv << theta << a << !cfg.boundary << cfg.alpha << cfg.horizon << s.reps << s.rejection_rate
        << s.se_rejection << s.mean_t << s.se_t;
    csv.end_row();
    for (std::size_t r = 0; r < s.outcomes.size(); ++r) {
      const auto& o = s.outcomes[r];
      reps << theta << r << o.crossed << o.t << o.deaths << o.total_time << o.z << o.covered;
      reps.end_row();
    }
  }
  out.tables.emplace("example_rst", std::move(csv));
  out.tables.emplace("example_rst_replications", std::move(reps));
}

}  // namespace

Bundle execute(const ExperimentConfig& config) {
  config.validate();
  Bundle out;
  const std::string& k = config.kind;
  if (k == "simulate") run_simulate(config, out);
  else if (k == "constants") run_constants(config, out);
  else if (k == "verify-thm1") run_thm1(config, out);
  else if (k == "verify-thm3") run_thm3(config, out);
  else if (k == "verify-thm4") run_thm4(config, out);
  else if (k == "diag-lemma1") run_lemma1(config, out);
  else if (k == "diag-lemma3") run_lemma3(config, out);
  else if (k == "example-fwci") run_fwci(config, out);
  else if (k == "example-rst") run_rst(config, out);
  return out;
}

int run(const ExperimentConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Bundle bundle;
  try {
    bundle = execute(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericError& e) {
    log << "numeric error: " << e.what() << " (achieved " << e.achieved_tolerance() << ")\n";
    return exit_numeric;
  } catch (const ContractViolation& e) {
    log << "usage error: " << e.what() << "\n";
    return exit_config;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  namespace fs = std::filesystem;
  const fs::path dir(config.output);
  nlohmann::json manifest;
  manifest["kind"] = config.kind;
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = config.seed;
  manifest["reps"] = config.reps;
  manifest["version"] = nlrt::version;
  manifest["wall_time_seconds"] = seconds;
  manifest["non_crossing_rate"] = bundle.non_crossing_rate;
  manifest["workers"] = config.workers;
  manifest["failed"] = bundle.failed;
  manifest["notes"] = bundle.notes;
  try {
    fs::create_directories(dir);
    std::vector<std::string> files;
    for (const auto& [name, csv] : bundle.tables) {
      const fs::path file = dir / (name + ".csv");
      std::ofstream f(file, std::ios::binary);
      f << csv.text();
      if (!f) throw std::runtime_error("cannot write " + file.string());
      files.push_back(file.filename().string());
    }
    manifest["files"] = files;
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
    if (!f) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  } catch (const std::exception& e) {
    log << "i/o error: " << e.what() << "\n";
    return exit_io;
  }
  for (const auto& note : bundle.notes) log << note << "\n";
  log << config.kind << ": wrote " << bundle.tables.size() << " table(s) to " << dir.string()
      << (bundle.failed ? " [FAILED]" : "") << "\n";
  return bundle.failed ? exit_failed : exit_ok;
}

}  // namespace nlrt::app
