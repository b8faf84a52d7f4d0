#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlrt/exponential_model.hpp"
#include "nlrt/model.hpp"
#include "nlrt/verification.hpp"

namespace nlrt::app {

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "simulate",    "constants",   "verify-thm1", "verify-thm3",  "verify-thm4",
      "diag-lemma1", "diag-lemma3", "example-fwci", "example-rst"};
  return kinds;
}

struct ModelConfig {
  IncrementLaw increment = IncrementLaw::exponential(1.0);
  VectorLaw vector;
  StationarySpec stationary;
  bool auto_centering = false;  // centering = E xi before centering
  bool auto_depth = false;      // depth from the truncation-bound rule
  QuadraticSpec quadratic = QuadraticSpec::none();
  std::optional<double> residual_constant;
  std::int64_t n0 = 1;
  double horizon_factor = 10.0;

  PerturbedWalkModel build() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrialConfig {
  double arrival_rate = 1.0;
  double theta = 1.0;
  std::string statistic = "fixed_width_ci";
  std::int64_t n0 = 10;
  std::size_t xi_truncation = 200;
  double horizon_factor = 10.0;

  StaggeredExponentialModel build() const;
  friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

struct EventConfig {
  std::string kind = "always";  // always | never | xi_at_most | increment_above
  double value = 0.0;

  EventPredicate build() const;
  friend bool operator==(const EventConfig&, const EventConfig&) = default;
};

struct ExperimentConfig {
  std::string kind = "simulate";
  std::uint64_t seed = 1;
  std::size_t reps = 1000;
  unsigned workers = 1;
  std::string output = "nlrt-out";

  ModelConfig model;
  TrialConfig trial;

  double a = 100.0;
  std::vector<double> a_grid = {25.0, 50.0, 100.0};
  double b = 0.5;
  std::optional<double> y;  // empty: median of the limit law L
  EventConfig event;
  double q = 0.4;
  double epsilon = 0.5;
  std::size_t backward_reps = 0;  // 0: same as reps
  std::size_t depth = 0;          // 0: automatic backward depth
  double zeta_threshold = 0.03;
  std::size_t eta_n = 1000;       // index for the empirical E zeta_n column

  double h = 0.2;
  double c = 1.96;

  double alpha = 0.04;
  std::size_t horizon = 500;
  std::size_t calibration_reps = 0;  // 0: same as reps
  std::optional<double> boundary;    // empty: calibrate under theta = 1
  std::vector<double> thetas = {1.0, 2.0};

  /// Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);
std::string to_yaml(const ExperimentConfig& config);

/// FNV-1a of the canonical YAML with the run-only fields (workers, output) reset.
std::string config_hash(const ExperimentConfig& config);

}  // namespace nlrt::app
