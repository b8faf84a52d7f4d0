#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlrt/model.hpp"
#include "nlrt/parallel.hpp"
#include "nlrt/rng.hpp"

namespace nlrt {

/// Stream ids separating the independent pieces of one experiment.
namespace streams {
inline constexpr std::uint64_t passage = 1;
inline constexpr std::uint64_t backward = 2;
inline constexpr std::uint64_t stationary_sample = 3;
inline constexpr std::uint64_t trial = 4;
inline constexpr std::uint64_t calibration = 5;
inline constexpr std::uint64_t pilot = 6;
}  // namespace streams

struct FirstPassageSample {
  std::int64_t t_a = 0;  // last index examined when not crossed
  double excess = 0.0;   // R_a = Z_{t_a} - a
  double xi_at_stop = 0.0;
  double zeta_at_stop = 0.0;
  double s_at_stop = 0.0;
  bool crossed = false;
};

/// Observer for per-step values; used by tests to check the strict-crossing invariant.
struct PathTrace {
  std::vector<double> z;  // Z_1, Z_2, ... up to the stopping index
};

/// t_a = inf{n >= n0 : Z_n > a}, examined up to model.horizon(a).
FirstPassageSample simulate_passage(const PerturbedWalkModel& model, double a,
                                    const RngStream& stream, PathTrace* trace = nullptr);

/// Passage samples for several levels from one path (common random numbers):
/// element i equals simulate_passage(model, levels[i], stream).
std::vector<FirstPassageSample> simulate_passages(const PerturbedWalkModel& model,
                                                  std::span<const double> levels,
                                                  const RngStream& stream);

struct PassageSummary {
  double a = 0.0;
  std::size_t reps = 0;
  std::size_t crossed = 0;
  double non_crossing_rate = 0.0;
  bool usable = true;  // false when more than 1% of replications did not cross
  double mean_t = 0.0, se_t = 0.0;
  double mean_excess = 0.0, se_excess = 0.0;
  double mean_xi = 0.0, se_xi = 0.0;
  double mean_zeta = 0.0, se_zeta = 0.0;
  double mean_s = 0.0, se_s = 0.0;
};

PassageSummary summarize(double a, std::span<const FirstPassageSample> samples);

/// Replication r runs on stream.for_replication(r).
std::vector<FirstPassageSample> passage_samples(const PerturbedWalkModel& model, double a,
                                                std::size_t reps, const RngStream& stream,
                                                const Parallelism& par = {});

PassageSummary estimate_Et(const PerturbedWalkModel& model, double a, std::size_t reps,
                           const RngStream& stream, const Parallelism& par = {});

struct BackwardFunctionalSample {
  double inf_value = 0.0;  // inf_{-J <= j <= -1} Z_j*
  double xi0 = 0.0;
  std::int64_t truncation_depth = 0;  // |j| at which the scan stopped
  std::int64_t attained_index = -1;   // j attaining the infimum
};

struct BackwardRun {
  std::vector<BackwardFunctionalSample> samples;
  std::size_t depth_cap = 0;
  std::size_t capped = 0;  // replications that reached the cap without the early exit
  double xi_sd = 0.0;      // pilot estimate used in the early-exit margin
  std::optional<std::string> warning;
};

/// Smallest J with 8 sigma^2 / (mu^2 J) < tol: a Hajek-Renyi bound on the
/// chance that the walk part dips below its start after -J.
std::size_t default_backward_depth(const PerturbedWalkModel& model, double tol = 1e-4);

/// Samples of inf_{j <= -1} Z_j*, Z_j* = X_{j+1} + ... + X_0 + xi_0 - xi_j.
/// depth = 0 selects default_backward_depth.
BackwardRun backward_min_functional(const PerturbedWalkModel& model, std::size_t depth,
                                    std::size_t reps, const RngStream& stream,
                                    const Parallelism& par = {});

struct RenewalConstants {
  double mu = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
  double residual_mean = 0.0;
  double se_rho = 0.0;
  double se_nu = 0.0;
  double se_rho_minus_nu = 0.0;
  double normalization = 0.0;  // E[(inf Z*)_+] / mu, should be 1
  double se_normalization = 0.0;
  bool consistent = true;  // |normalization - 1| <= 5 SE
  std::size_t reps = 0;
  std::string mu_method = "analytic";
  std::string sigma2_method = "analytic";
  std::string rho_method = "backward_second_moment";
  std::string nu_method = "backward_xi_weighted";
  std::string lambda_method = "eigenvalues";
  std::optional<std::string> warning;

  /// (a + rho - nu - lambda - residual_mean) / mu.
  double predicted_Et(double a) const { return (a + rho - nu - lambda - residual_mean) / mu; }
};

/// rho = E[I^2] / (2 mu), nu = E[xi_0 I] / mu with I = (inf_{j<=-1} Z_j*)_+.
RenewalConstants constants_from_backward(const PerturbedWalkModel& model, const BackwardRun& run);

RenewalConstants estimate_rho_nu(const PerturbedWalkModel& model, std::size_t depth,
                                 std::size_t reps, const RngStream& stream,
                                 const Parallelism& par = {});

/// Limit df of R_a, F(r) = E[min(I, r)] / mu, from backward samples.
class ExcessLimitDf {
 public:
  ExcessLimitDf(std::span<const BackwardFunctionalSample> samples, double mu);
  double operator()(double r) const;

 private:
  std::vector<double> sorted_;
  std::vector<double> prefix_;  // prefix_[k] = sum of the k smallest
  double mu_;
};

/// Limit df of xi_{t_a}, G(y) = E[I 1{xi_0 <= y}] / mu.
class XiLimitDf {
 public:
  XiLimitDf(std::span<const BackwardFunctionalSample> samples, double mu);
  double operator()(double y) const;

 private:
  std::vector<double> xi_;       // ascending
  std::vector<double> prefix_;   // cumulative I in xi order
  double total_n_;
  double mu_;
};

}  // namespace nlrt
