#pragma once

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "nlrt/rng.hpp"

namespace nlrt {

enum class Family { exponential, gamma, normal, uniform, deterministic, table };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// One knot of a user quantile table: Q(p) = x, linearly interpolated.
struct QuantilePoint {
  double p = 0.0;
  double x = 0.0;
  friend bool operator==(const QuantilePoint&, const QuantilePoint&) = default;
};

/// Tag that admits the (arithmetic) deterministic law; exact-value tests only.
struct OracleOnly {};

/// Law of the i.i.d. increments X_k. A base variate B is drawn from the
/// family and X = shift + scale * B; the base value is also what the
/// staggered-entry perturbation reads as a lifetime.
class IncrementLaw {
 public:
  IncrementLaw() = default;

  static IncrementLaw exponential(double rate);
  static IncrementLaw gamma(double shape, double rate);
  static IncrementLaw normal(double mean, double sd);
  static IncrementLaw uniform(double lo, double hi);
  static IncrementLaw deterministic(double value, OracleOnly);
  static IncrementLaw table(std::vector<QuantilePoint> knots);

  IncrementLaw affine(double shift, double scale) const;

  Family family() const noexcept { return family_; }
  double param1() const noexcept { return p1_; }
  double param2() const noexcept { return p2_; }
  double shift() const noexcept { return shift_; }
  double scale() const noexcept { return scale_; }
  const std::vector<QuantilePoint>& knots() const noexcept { return knots_; }

  double base_mean() const;
  double base_variance() const;
  double mean() const { return shift_ + scale_ * base_mean(); }
  double variance() const { return scale_ * scale_ * base_variance(); }
  /// E X^2, used by the stationary-excess identity.
  double second_moment() const { return variance() + mean() * mean(); }
  double abs_bound() const;  // sup |X|, +inf when unbounded

  bool is_arithmetic() const;
  bool nonnegative() const;

  /// Throws ConfigError for non-finite or out-of-range parameters, or a
  /// nonpositive mean.
  void validate() const;

  friend bool operator==(const IncrementLaw&, const IncrementLaw&) = default;

  class Sampler {
   public:
    explicit Sampler(const IncrementLaw& law);
    double base(Philox4x32& gen);
    double operator()(Philox4x32& gen) { return transform(base(gen)); }
    double transform(double base_value) const { return shift_ + scale_ * base_value; }

   private:
    double shift_;
    double scale_;
    const std::vector<QuantilePoint>* knots_;
    std::variant<std::exponential_distribution<double>, std::gamma_distribution<double>,
                 std::normal_distribution<double>, std::uniform_real_distribution<double>, double,
                 std::monostate>
        dist_;
  };

  Sampler sampler() const { return Sampler(*this); }

 private:
  Family family_ = Family::exponential;
  double p1_ = 1.0;
  double p2_ = 0.0;
  double shift_ = 0.0;
  double scale_ = 1.0;
  bool oracle_only_ = false;
  std::vector<QuantilePoint> knots_;
};

}  // namespace nlrt
