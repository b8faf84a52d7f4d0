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
#include "nlrt/parallel.hpp"
#include "nlrt/rng.hpp"

namespace nlrt {

/// g and its partial derivatives at one point.
struct GDerivatives {
  double g = 0.0;
  double g10 = 0.0;
  double g01 = 0.0;
  double g20 = 0.0;
  double g11 = 0.0;
  double g02 = 0.0;
};

/// Statistic Z_n = n g(K_n / n, T*_n / n).
class GStatistic {
 public:
  enum class Kind { fixed_width_ci, repeated_lrt, custom };

  static GStatistic fixed_width_ci();  // g(x, y) = y^2 / x^2
  static GStatistic repeated_lrt();    // g(x, y) = x log(x / y) + y - x
  /// Derivatives default to central finite differences when not supplied.
  static GStatistic custom(std::function<double(double, double)> g,
                           std::function<GDerivatives(double theta)> derivatives = {});

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  double operator()(double x, double y) const { return g_(x, y); }
  /// Values at (1, 1/theta).
  GDerivatives derivatives_at(double theta) const;
  /// Central finite differences of g at (1, 1/theta).
  GDerivatives numeric_derivatives_at(double theta, double step = 1e-5) const;

 private:
  Kind kind_ = Kind::custom;
  std::function<double(double, double)> g_;
  std::function<GDerivatives(double)> d_;
};

std::string to_string(GStatistic::Kind k);
GStatistic g_statistic_from_string(const std::string& name);

struct StaggeredExponentialModel {
  double arrival_rate = 1.0;
  double theta = 1.0;
  GStatistic g = GStatistic::fixed_width_ci();
  /// No stopping before n0 patients; with only a few deaths the plug-in
  /// statistic is far from its asymptotic regime.
  std::int64_t n0 = 10;
  std::size_t xi_truncation = 200;
  double horizon_factor = 10.0;

  void validate() const;
  /// Drift g(1, 1/theta) of S_n.
  double drift() const { return g.derivatives_at(theta).g; }
};

/// Data at calendar time tau_n. Patient k enters at tau_{k-1} with lifetime L_k.
struct TrialState {
  std::vector<double> tau;        // tau_0 = 0, ..., tau_n
  std::vector<double> lifetimes;  // L_1..L_n
  std::vector<double> gaps;       // eta_k = tau_k - tau_{k-1}, k = 1..n
  /// Stationary extension into the past: L_0, L_{-1}, ... and eta_0, eta_{-1}, ...
  std::vector<double> pre_lifetimes;
  std::vector<double> pre_gaps;
  std::size_t deaths = 0;   // K_n
  double total_time = 0.0;  // T*_n

  std::size_t n() const noexcept { return lifetimes.size(); }

  /// Builds a state from injected arrival times and lifetimes; tau.size() == L.size() + 1.
  static TrialState observe(std::vector<double> tau, std::vector<double> lifetimes);
};

std::size_t count_deaths(const TrialState& s);
double total_time_on_test(const TrialState& s);

/// Poisson arrivals at arrival_rate, exponential(theta) lifetimes. The first
/// xi_truncation draws of the stream form the pre-trial extension.
TrialState simulate_trial(const StaggeredExponentialModel& model, std::size_t n_patients,
                          const RngStream& stream);

/// Z_n; empty when K_n = 0 (the statistic is not yet defined).
std::optional<double> statistic_Z(const TrialState& state, const GStatistic& g);

/// W_n, W_{n-1}, ... newest first: real patients, then the pre-trial extension.
std::vector<Draw> trial_window(const TrialState& state);

/// xi^o_n = sum_{k=1}^n [L_{n-k+1} - (tau_n - tau_{n-k})]_+ over enrolled patients.
double xi_staggered_residual(const TrialState& state);

struct Decomposition {
  double z = 0.0;
  double s = 0.0;
  double xi = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta3 = 0.0;
  double xi_residual = 0.0;   // xi^o_n
  double zeta_quad = 0.0;     // g02 T_n^2 / (2n), T_n = sum (L_k - 1/theta)
  double zeta1_rest = 0.0;    // zeta1 - zeta_quad
  bool b_event = false;       // |theta T*_n / n - 1| <= 1/2 and K_n >= n / 2
  double cubic_scale = 0.0;   // n (|T*_n/n - 1/theta|^3 + |K_n/n - 1|^3)
};

/// Requires K_n >= 1. xi and zeta2 are truncated at xi_truncation terms, with
/// indices <= 0 read from the pre-trial extension.
Decomposition decompose(const TrialState& state, const GStatistic& g, double theta,
                        std::size_t xi_truncation);

/// Incremental K_n and T*_n as patients enter.
class TrialTracker {
 public:
  /// Patient n+1 enters at the current time; then time advances by gap to tau_{n+1}.
  void admit(double lifetime, double gap);
  std::size_t n() const noexcept { return n_; }
  std::size_t deaths() const noexcept { return deaths_; }
  double total_time() const;
  double now() const noexcept { return now_; }

 private:
  struct Pending {
    double death_time;
    double entry;
    double lifetime;
    bool operator>(const Pending& o) const { return death_time > o.death_time; }
  };
  std::vector<Pending> heap_;
  std::size_t n_ = 0;
  std::size_t deaths_ = 0;
  double now_ = 0.0;
  double dead_sum_ = 0.0;
  double alive_entry_sum_ = 0.0;
};

/// The equivalent perturbed walk: X = g + g01 (L - 1/theta), Y = X - mu,
/// Q = g02 / (2 g01^2), xi the staggered form with weights (g10, g01).
PerturbedWalkModel to_perturbed_model(const StaggeredExponentialModel& model);

struct TrialOutcome {
  std::int64_t t = 0;
  bool crossed = false;
  std::size_t deaths = 0;
  double total_time = 0.0;
  double z = 0.0;
  bool covered = false;  // Example 1 only
};

struct Example1Summary {
  double h = 0.0;
  double c = 0.0;
  double a = 0.0;
  std::size_t reps = 0;
  double non_crossing_rate = 0.0;
  double mean_t = 0.0;
  double se_t = 0.0;
  double coverage = 0.0;
  double se_coverage = 0.0;
  RenewalConstants constants;
  double predicted_Et = 0.0;
  double difference = 0.0;
  double combined_se = 0.0;
  std::vector<TrialOutcome> outcomes;
};

/// Stops at t_a with a = c^2 / h^2 and checks whether theta lies in K/T* +- h.
Example1Summary example1_run(const StaggeredExponentialModel& model, double h, double c,
                             std::size_t reps, const RngStream& stream,
                             const Parallelism& par = {}, std::size_t backward_reps = 0);

struct Example2Summary {
  double a = 0.0;
  std::size_t horizon = 0;
  std::size_t reps = 0;
  double rejection_rate = 0.0;
  double se_rejection = 0.0;
  double mean_t = 0.0;  // over rejecting replications
  double se_t = 0.0;
  std::vector<TrialOutcome> outcomes;
};

Example2Summary example2_run(const StaggeredExponentialModel& model, double a, std::size_t reps,
                             std::size_t horizon, const RngStream& stream,
                             const Parallelism& par = {});

/// Boundary a with P[max_{n0<=n<=horizon} Z_n > a] ~= alpha under theta = 1,
/// from the (1 - alpha) sample quantile of the running maximum.
double calibrate_rst_boundary(const StaggeredExponentialModel& model, double alpha,
                              std::size_t reps, std::size_t horizon, const RngStream& stream,
                              const Parallelism& par = {});

/// One trial run until Z_n > a or n = horizon.
TrialOutcome run_trial(const StaggeredExponentialModel& model, double a, std::size_t horizon,
                       const RngStream& stream, double lifetime_scale = 1.0);

}  // namespace nlrt
