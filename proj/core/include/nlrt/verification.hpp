#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlrt/first_passage.hpp"
#include "nlrt/model.hpp"
#include "nlrt/stats.hpp"

namespace nlrt {

struct WindowBounds {
  double q = 0.4;
  double a = 0.0;
  std::int64_t m = 0;  // floor((1 - a^-q) a / mu)
  std::int64_t M = 0;  // floor((1 + a^-q) a / mu)

  static WindowBounds compute(double q, double a, double mu);
};

/// Cylinder event on (W_n, ..., W_{n-depth+1}) and xi_n.
struct EventPredicate {
  std::string description;
  std::size_t window_depth = 1;
  std::function<bool(std::span<const Draw> window, double xi)> test;

  static EventPredicate always();
  static EventPredicate never();
  static EventPredicate xi_at_most(double c);
  static EventPredicate increment_above(double c);
};

struct TheoremReport {
  std::string name;
  double estimate = 0.0;
  double theory = 0.0;
  double std_error = 0.0;
  std::size_t n_reps = 0;
  bool pass = false;

  static TheoremReport make(std::string name, double estimate, double theory, double se,
                            std::size_t reps);
};

struct Theorem1Result {
  TheoremReport report;
  double p_event = 0.0;  // P^[W_0 in B] from the independent stationary sample
  double se_p_event = 0.0;
  double mixture_cdf_y = 0.0;
  double count_mean = 0.0;
  double count_se = 0.0;
  std::size_t horizon = 0;
};

/// Expected number of n <= horizon with W_n in B, zeta_n <= y, a < Z_n <= a + b,
/// against (b / mu) P[W_0 in B] L(y).
Theorem1Result theorem1_experiment(const PerturbedWalkModel& model, const EventPredicate& b_event,
                                   double y, double a, double b, std::size_t reps,
                                   const RngStream& stream, const Parallelism& par = {});

struct DistanceCheck {
  std::string name;
  double distance = 0.0;     // lower value for bounded KS
  double upper = 0.0;        // equals distance unless bounded
  double threshold = 0.0;
  double critical_1pct = 0.0;
  bool pass = false;
};

struct Theorem3Result {
  PassageSummary passages;
  RenewalConstants constants;
  DistanceCheck excess;  // R_a vs F from backward samples
  DistanceCheck zeta;    // zeta_{t_a} vs L
  DistanceCheck xi;      // xi_{t_a} vs G from backward samples
  double corr_zeta_excess = 0.0;
  double corr_zeta_xi = 0.0;
  QuadrantTest quadrant_zeta_excess;
  QuadrantTest quadrant_zeta_xi;
  bool xi_degenerate = false;
  TheoremReport rho_vs_excess_mean;
  TheoremReport nu_vs_xi_mean;
};

Theorem3Result theorem3_experiment(const PerturbedWalkModel& model, double a, std::size_t reps,
                                   const RngStream& stream, const Parallelism& par = {},
                                   std::size_t backward_reps = 0, std::size_t depth = 0,
                                   double zeta_threshold = 0.03);

struct Theorem4Row {
  double a = 0.0;
  double mean_t = 0.0;
  double se_t = 0.0;
  double predicted = 0.0;
  double difference = 0.0;
  double combined_se = 0.0;
  double non_crossing_rate = 0.0;
  bool usable = true;
};

struct Theorem4Result {
  RenewalConstants constants;
  std::vector<Theorem4Row> rows;
  bool final_within = false;     // |difference| <= 3 combined SE at the last a
  bool strictly_shrinking = false;  // |difference| non-increasing along the grid
  bool shrinking_within_noise = false;  // each step decreases or ties at 3 SE
  bool pass = false;  // final_within && strictly_shrinking && consistent && all usable
};

/// Each replication drives one path through every level of a_grid.
Theorem4Result theorem4_experiment(const PerturbedWalkModel& model, std::span<const double> a_grid,
                                   std::size_t reps, const RngStream& stream,
                                   const Parallelism& par = {}, std::size_t backward_reps = 0,
                                   std::size_t depth = 0);

struct Lemma1Row {
  WindowBounds bounds;
  double b = 0.0;
  std::size_t horizon = 0;
  MeanSe delta0;  // sum_{n=1}^m P[Z_n > a]
  MeanSe delta1;  // sum_{n=M+1}^{horizon} P[Z_n <= a + b]
  MeanSe tail;    // sum_{n=M}^{horizon} P[t_a > n]
  double drift_tail_bound = 0.0;  // Chebyshev bound on P[S_horizon <= a + b]
};

/// Trend over a grid: each consecutive pair decreases or ties at 3 SE.
bool nonincreasing_within_noise(std::span<const MeanSe> values);

std::vector<Lemma1Row> lemma1_diagnostic(const PerturbedWalkModel& model, double q,
                                         std::span<const double> a_grid, std::size_t reps,
                                         const RngStream& stream, const Parallelism& par = {});

struct Lemma3Row {
  WindowBounds bounds;
  double epsilon = 0.0;
  MeanSe count;  // sum_{n=m+1}^M P[|zeta_n - zeta~_{m,n}| >= eps]
  std::vector<double> per_index_rate;  // n = m+1 .. M
};

std::vector<Lemma3Row> lemma3_diagnostic(const PerturbedWalkModel& model, double q, double epsilon,
                                         std::span<const double> a_grid, std::size_t reps,
                                         const RngStream& stream, const Parallelism& par = {});

}  // namespace nlrt
