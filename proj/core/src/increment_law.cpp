#include "nlrt/increment_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlrt/error.hpp"

namespace nlrt {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("increment law: " + msg);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::exponential: return "exponential";
    case Family::gamma: return "gamma";
    case Family::normal: return "normal";
    case Family::uniform: return "uniform";
    case Family::deterministic: return "deterministic";
    case Family::table: return "table";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::exponential, Family::gamma, Family::normal, Family::uniform,
                   Family::deterministic, Family::table})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown increment family '" + name + "'");
}

IncrementLaw IncrementLaw::exponential(double rate) {
  IncrementLaw law;
  law.family_ = Family::exponential;
  law.p1_ = rate;
  law.validate();
  return law;
}

IncrementLaw IncrementLaw::gamma(double shape, double rate) {
  IncrementLaw law;
  law.family_ = Family::gamma;
  law.p1_ = shape;
  law.p2_ = rate;
  law.validate();
  return law;
}

IncrementLaw IncrementLaw::normal(double mean, double sd) {
  IncrementLaw law;
  law.family_ = Family::normal;
  law.p1_ = mean;
  law.p2_ = sd;
  law.validate();
  return law;
}

IncrementLaw IncrementLaw::uniform(double lo, double hi) {
  IncrementLaw law;
  law.family_ = Family::uniform;
  law.p1_ = lo;
  law.p2_ = hi;
  law.validate();
  return law;
}

IncrementLaw IncrementLaw::deterministic(double value, OracleOnly) {
  IncrementLaw law;
  law.family_ = Family::deterministic;
  law.p1_ = value;
  law.oracle_only_ = true;
  law.validate();
  return law;
}

IncrementLaw IncrementLaw::table(std::vector<QuantilePoint> knots) {
  IncrementLaw law;
  law.family_ = Family::table;
  law.p1_ = 0.0;
  law.knots_ = std::move(knots);
  law.validate();
  return law;
}

IncrementLaw IncrementLaw::affine(double shift, double scale) const {
  IncrementLaw law = *this;
  law.shift_ = shift + scale * shift_;
  law.scale_ = scale * scale_;
  law.validate();
  return law;
}

double IncrementLaw::base_mean() const {
  switch (family_) {
    case Family::exponential: return 1.0 / p1_;
    case Family::gamma: return p1_ / p2_;
    case Family::normal: return p1_;
    case Family::uniform: return 0.5 * (p1_ + p2_);
    case Family::deterministic: return p1_;
    case Family::table: {
      double m = 0.0;
      for (std::size_t i = 1; i < knots_.size(); ++i)
        m += (knots_[i].p - knots_[i - 1].p) * 0.5 * (knots_[i].x + knots_[i - 1].x);
      return m;
    }
  }
  return 0.0;
}

double IncrementLaw::base_variance() const {
  switch (family_) {
    case Family::exponential: return 1.0 / (p1_ * p1_);
    case Family::gamma: return p1_ / (p2_ * p2_);
    case Family::normal: return p2_ * p2_;
    case Family::uniform: return (p2_ - p1_) * (p2_ - p1_) / 12.0;
    case Family::deterministic: return 0.0;
    case Family::table: {
      // Q is piecewise linear, so E B^2 integrates a quadratic exactly.
      double m2 = 0.0;
      for (std::size_t i = 1; i < knots_.size(); ++i) {
        const double a = knots_[i - 1].x, b = knots_[i].x;
        m2 += (knots_[i].p - knots_[i - 1].p) * (a * a + a * b + b * b) / 3.0;
      }
      const double m = base_mean();
      return std::max(0.0, m2 - m * m);
    }
  }
  return 0.0;
}

double IncrementLaw::abs_bound() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (family_) {
    case Family::exponential:
    case Family::gamma:
    case Family::normal: return scale_ == 0.0 ? std::abs(shift_) : inf;
    case Family::uniform:
      return std::max(std::abs(shift_ + scale_ * p1_), std::abs(shift_ + scale_ * p2_));
    case Family::deterministic: return std::abs(shift_ + scale_ * p1_);
    case Family::table:
      return std::max(std::abs(shift_ + scale_ * knots_.front().x),
                      std::abs(shift_ + scale_ * knots_.back().x));
  }
  return inf;
}

bool IncrementLaw::is_arithmetic() const {
  if (scale_ == 0.0) return true;
  if (family_ == Family::deterministic) return true;
  if (family_ == Family::table) return knots_.front().x == knots_.back().x;
  return false;
}

bool IncrementLaw::nonnegative() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo = -inf;
  double hi = inf;
  switch (family_) {
    case Family::exponential:
    case Family::gamma: lo = 0.0; break;
    case Family::normal: break;
    case Family::uniform: lo = p1_; hi = p2_; break;
    case Family::deterministic: lo = hi = p1_; break;
    case Family::table: lo = knots_.front().x; hi = knots_.back().x; break;
  }
  if (scale_ == 0.0) return shift_ >= 0.0;
  const double end = scale_ > 0.0 ? lo : hi;
  return std::isfinite(end) && shift_ + scale_ * end >= 0.0;
}

void IncrementLaw::validate() const {
  require(finite(shift_) && finite(scale_), "shift and scale must be finite");
  switch (family_) {
    case Family::exponential:
      require(finite(p1_) && p1_ > 0.0, "exponential rate must be finite and > 0");
      break;
    case Family::gamma:
      require(finite(p1_) && p1_ > 0.0 && finite(p2_) && p2_ > 0.0,
              "gamma shape and rate must be finite and > 0");
      break;
    case Family::normal:
      require(finite(p1_) && finite(p2_) && p2_ > 0.0, "normal sd must be finite and > 0");
      break;
    case Family::uniform:
      require(finite(p1_) && finite(p2_) && p1_ < p2_, "uniform needs finite lo < hi");
      break;
    case Family::deterministic:
      require(oracle_only_, "deterministic law is arithmetic and admitted only for oracle tests");
      require(finite(p1_), "deterministic value must be finite");
      break;
    case Family::table: {
      require(knots_.size() >= 2, "quantile table needs at least two knots");
      require(knots_.front().p == 0.0 && knots_.back().p == 1.0,
              "quantile table must span p = 0 .. 1");
      for (std::size_t i = 0; i < knots_.size(); ++i) {
        require(finite(knots_[i].x), "quantile table values must be finite");
        if (i > 0) {
          require(knots_[i].p > knots_[i - 1].p, "quantile table p must increase strictly");
          require(knots_[i].x >= knots_[i - 1].x, "quantile table x must be nondecreasing");
        }
      }
      break;
    }
  }
  const double m = mean();
  require(finite(m) && m > 0.0, "mean must be finite and > 0");
  require(finite(variance()), "variance must be finite");
}

IncrementLaw::Sampler::Sampler(const IncrementLaw& law)
    : shift_(law.shift_), scale_(law.scale_), knots_(&law.knots_) {
  switch (law.family_) {
    case Family::exponential: dist_ = std::exponential_distribution<double>(law.p1_); break;
    case Family::gamma: dist_ = std::gamma_distribution<double>(law.p1_, 1.0 / law.p2_); break;
    case Family::normal: dist_ = std::normal_distribution<double>(law.p1_, law.p2_); break;
    case Family::uniform:
      dist_ = std::uniform_real_distribution<double>(law.p1_, law.p2_);
      break;
    case Family::deterministic: dist_ = law.p1_; break;
    case Family::table: dist_ = std::monostate{}; break;
  }
}

double IncrementLaw::Sampler::base(Philox4x32& gen) {
  switch (dist_.index()) {
    case 0: return std::get<0>(dist_)(gen);
    case 1: return std::get<1>(dist_)(gen);
    case 2: return std::get<2>(dist_)(gen);
    case 3: return std::get<3>(dist_)(gen);
    case 4: return std::get<4>(dist_);
    default: {
      const auto& k = *knots_;
      const double u = gen.uniform_open();
      auto it = std::upper_bound(k.begin(), k.end(), u,
                                 [](double v, const QuantilePoint& q) { return v < q.p; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      return lo.x + (hi.x - lo.x) * (u - lo.p) / (hi.p - lo.p);
    }
  }
}

}  // namespace nlrt
