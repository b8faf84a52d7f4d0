#include "nlrt_app/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "nlrt/error.hpp"

namespace nlrt::app {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& path, std::set<std::string> allowed) {
  if (!node.IsMap()) fail(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a number");
  const std::string s = n.Scalar();
  if (s == ".inf" || s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-.inf" || s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a number, got '" + s + "'");
  }
}

template <class Int>
Int as_int(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected an integer");
  try {
    return n.as<Int>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a non-negative integer, got '" + n.Scalar() + "'");
  }
}

bool as_bool(const YAML::Node& n, const std::string& path) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    fail(path, "expected true or false");
  }
}

std::string as_string(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a string");
  return n.Scalar();
}

std::vector<double> as_doubles(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) fail(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i)
    out.push_back(as_double(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix as_matrix(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) fail(path, "expected a list of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n.size(); ++i)
    rows.push_back(as_doubles(n[i], path + "[" + std::to_string(i) + "]"));
  try {
    return Matrix::from_rows(rows);
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

/// "auto" or a number.
std::optional<double> auto_or_double(const YAML::Node& n, const std::string& path) {
  if (n.IsScalar() && n.Scalar() == "auto") return std::nullopt;
  return as_double(n, path);
}

template <class F>
void with(const YAML::Node& node, const std::string& key, const std::string& path, F&& f) {
  if (const YAML::Node v = node[key]) f(v, join(path, key));
}

IncrementLaw parse_increment(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"family", "rate", "shape", "mean", "sd", "lo", "hi", "value", "knots",
                       "shift", "scale", "oracle_only"});
  if (!n["family"]) fail(join(path, "family"), "required");
  Family family;
  try {
    family = family_from_string(as_string(n["family"], join(path, "family")));
  } catch (const ConfigError& e) {
    fail(join(path, "family"), e.what());
  }
  auto num = [&](const char* key) {
    if (!n[key]) fail(join(path, key), "required for family " + to_string(family));
    return as_double(n[key], join(path, key));
  };
  IncrementLaw law;
  try {
    switch (family) {
      case Family::exponential: law = IncrementLaw::exponential(num("rate")); break;
      case Family::gamma: law = IncrementLaw::gamma(num("shape"), num("rate")); break;
      case Family::normal: law = IncrementLaw::normal(num("mean"), num("sd")); break;
      case Family::uniform: law = IncrementLaw::uniform(num("lo"), num("hi")); break;
      case Family::deterministic: {
        const bool oracle = n["oracle_only"] && as_bool(n["oracle_only"], join(path, "oracle_only"));
        if (!oracle) fail(join(path, "oracle_only"), "the deterministic law requires oracle_only: true");
        law = IncrementLaw::deterministic(num("value"), OracleOnly{});
        break;
      }
      case Family::table: {
        const std::string kp = join(path, "knots");
        if (!n["knots"] || !n["knots"].IsSequence()) fail(kp, "expected a list of [p, x] pairs");
        std::vector<QuantilePoint> knots;
        for (std::size_t i = 0; i < n["knots"].size(); ++i) {
          const auto pair = as_doubles(n["knots"][i], kp + "[" + std::to_string(i) + "]");
          if (pair.size() != 2) fail(kp + "[" + std::to_string(i) + "]", "expected [p, x]");
          knots.push_back({pair[0], pair[1]});
        }
        law = IncrementLaw::table(std::move(knots));
        break;
      }
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(path, msg);
  }
  double shift = 0.0, scale = 1.0;
  with(n, "shift", path, [&](const YAML::Node& v, const std::string& p) { shift = as_double(v, p); });
  with(n, "scale", path, [&](const YAML::Node& v, const std::string& p) { scale = as_double(v, p); });
  try {
    if (shift != 0.0 || scale != 1.0) law = law.affine(shift, scale);
    law.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return law;
}

VectorLaw parse_vector(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"kind", "covariance"});
  const std::string kind = n["kind"] ? as_string(n["kind"], join(path, "kind")) : "none";
  try {
    switch (vector_kind_from_string(kind)) {
      case VectorKind::none: return VectorLaw::none();
      case VectorKind::centered_increment: return VectorLaw::centered_increment();
      case VectorKind::gaussian:
        if (!n["covariance"]) fail(join(path, "covariance"), "required for kind gaussian");
        return VectorLaw::gaussian(as_matrix(n["covariance"], join(path, "covariance")));
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(path, msg);
  }
  return {};
}

void parse_stationary(const YAML::Node& n, const std::string& path, ModelConfig& m) {
  check_keys(n, path, {"kind", "map", "decay", "depth", "centering", "arrival_rate",
                       "indicator_weight", "excess_weight"});
  StationarySpec s;
  try {
    if (n["kind"]) s.kind = stationary_kind_from_string(as_string(n["kind"], join(path, "kind")));
    if (n["map"]) s.map = wmap_from_string(as_string(n["map"], join(path, "map")));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(path, msg);
  }
  with(n, "decay", path, [&](const YAML::Node& v, const std::string& p) { s.decay = as_double(v, p); });
  with(n, "arrival_rate", path,
       [&](const YAML::Node& v, const std::string& p) { s.arrival_rate = as_double(v, p); });
  with(n, "indicator_weight", path,
       [&](const YAML::Node& v, const std::string& p) { s.indicator_weight = as_double(v, p); });
  with(n, "excess_weight", path,
       [&](const YAML::Node& v, const std::string& p) { s.excess_weight = as_double(v, p); });
  with(n, "depth", path, [&](const YAML::Node& v, const std::string& p) {
    if (v.IsScalar() && v.Scalar() == "auto") {
      m.auto_depth = true;
    } else {
      s.depth = as_int<std::size_t>(v, p);
    }
  });
  with(n, "centering", path, [&](const YAML::Node& v, const std::string& p) {
    const auto c = auto_or_double(v, p);
    m.auto_centering = !c;
    s.centering = c.value_or(0.0);
  });
  m.stationary = s;
}

QuadraticSpec parse_quadratic(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"q", "allow_zero"});
  QuadraticSpec q;
  if (n["q"]) q.q = as_matrix(n["q"], join(path, "q"));
  q.allow_zero = n["allow_zero"] ? as_bool(n["allow_zero"], join(path, "allow_zero")) : q.q.empty();
  return q;
}

void parse_model(const YAML::Node& n, const std::string& path, ModelConfig& m) {
  check_keys(n, path, {"increment", "vector", "stationary", "quadratic", "residual", "n0",
                       "horizon_factor"});
  with(n, "increment", path,
       [&](const YAML::Node& v, const std::string& p) { m.increment = parse_increment(v, p); });
  with(n, "vector", path,
       [&](const YAML::Node& v, const std::string& p) { m.vector = parse_vector(v, p); });
  with(n, "stationary", path,
       [&](const YAML::Node& v, const std::string& p) { parse_stationary(v, p, m); });
  with(n, "quadratic", path,
       [&](const YAML::Node& v, const std::string& p) { m.quadratic = parse_quadratic(v, p); });
  with(n, "residual", path, [&](const YAML::Node& v, const std::string& p) {
    check_keys(v, p, {"kind", "value"});
    const std::string kind = v["kind"] ? as_string(v["kind"], join(p, "kind")) : "zero";
    if (kind == "zero") {
      m.residual_constant.reset();
    } else if (kind == "constant") {
      if (!v["value"]) fail(join(p, "value"), "required for kind constant");
      m.residual_constant = as_double(v["value"], join(p, "value"));
    } else {
      fail(join(p, "kind"), "expected zero or constant");
    }
  });
  with(n, "n0", path, [&](const YAML::Node& v, const std::string& p) { m.n0 = as_int<std::int64_t>(v, p); });
  with(n, "horizon_factor", path,
       [&](const YAML::Node& v, const std::string& p) { m.horizon_factor = as_double(v, p); });
}

void parse_trial(const YAML::Node& n, const std::string& path, TrialConfig& t) {
  check_keys(n, path, {"arrival_rate", "theta", "statistic", "n0", "xi_truncation", "horizon_factor"});
  with(n, "arrival_rate", path,
       [&](const YAML::Node& v, const std::string& p) { t.arrival_rate = as_double(v, p); });
  with(n, "theta", path, [&](const YAML::Node& v, const std::string& p) { t.theta = as_double(v, p); });
  with(n, "statistic", path,
       [&](const YAML::Node& v, const std::string& p) { t.statistic = as_string(v, p); });
  with(n, "n0", path, [&](const YAML::Node& v, const std::string& p) { t.n0 = as_int<std::int64_t>(v, p); });
  with(n, "xi_truncation", path,
       [&](const YAML::Node& v, const std::string& p) { t.xi_truncation = as_int<std::size_t>(v, p); });
  with(n, "horizon_factor", path,
       [&](const YAML::Node& v, const std::string& p) { t.horizon_factor = as_double(v, p); });
}

void parse_experiment(const YAML::Node& n, const std::string& path, ExperimentConfig& c) {
  check_keys(n, path, {"a", "a_grid", "b", "y", "event", "q", "epsilon", "backward_reps", "depth",
                       "zeta_threshold", "eta_n", "h", "c", "alpha", "horizon",
                       "calibration_reps", "boundary", "thetas"});
  auto dbl = [&](const char* key, double& out) {
    with(n, key, path, [&](const YAML::Node& v, const std::string& p) { out = as_double(v, p); });
  };
  auto count = [&](const char* key, std::size_t& out) {
    with(n, key, path, [&](const YAML::Node& v, const std::string& p) { out = as_int<std::size_t>(v, p); });
  };
  dbl("a", c.a);
  dbl("b", c.b);
  dbl("q", c.q);
  dbl("epsilon", c.epsilon);
  dbl("zeta_threshold", c.zeta_threshold);
  dbl("h", c.h);
  dbl("c", c.c);
  dbl("alpha", c.alpha);
  count("backward_reps", c.backward_reps);
  count("depth", c.depth);
  count("eta_n", c.eta_n);
  count("horizon", c.horizon);
  count("calibration_reps", c.calibration_reps);
  with(n, "a_grid", path, [&](const YAML::Node& v, const std::string& p) { c.a_grid = as_doubles(v, p); });
  with(n, "thetas", path, [&](const YAML::Node& v, const std::string& p) { c.thetas = as_doubles(v, p); });
  with(n, "y", path, [&](const YAML::Node& v, const std::string& p) {
    if (v.IsScalar() && v.Scalar() == "median") {
      c.y.reset();
    } else {
      c.y = as_double(v, p);
    }
  });
  with(n, "boundary", path,
       [&](const YAML::Node& v, const std::string& p) { c.boundary = auto_or_double(v, p); });
  with(n, "event", path, [&](const YAML::Node& v, const std::string& p) {
    check_keys(v, p, {"kind", "value"});
    if (v["kind"]) c.event.kind = as_string(v["kind"], join(p, "kind"));
    if (v["value"]) c.event.value = as_double(v["value"], join(p, "value"));
  });
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

}  // namespace

PerturbedWalkModel ModelConfig::build() const {
  PerturbedWalkModel m;
  m.increment = increment;
  m.vector = vector;
  m.quadratic = quadratic;
  m.n0 = n0;
  m.horizon_factor = horizon_factor;
  if (residual_constant) m.residual = ResidualSpec::constant(*residual_constant);
  StationarySpec s = stationary;
  if (auto_depth && (s.kind == StationaryKind::geometric_ma ||
                     s.kind == StationaryKind::staggered_residual)) {
    const double tol = s.kind == StationaryKind::geometric_ma ? 1e-8 : 1e-10;
    for (s.depth = 1; s.depth < 100000; ++s.depth)
      if (truncation_bound(s, increment).value < tol) break;
  }
  if (auto_centering) s = with_auto_centering(s, increment);
  m.stationary = s;
  m.validate();
  return m;
}

StaggeredExponentialModel TrialConfig::build() const {
  StaggeredExponentialModel m;
  m.arrival_rate = arrival_rate;
  m.theta = theta;
  m.g = g_statistic_from_string(statistic);
  m.n0 = n0;
  m.xi_truncation = xi_truncation;
  m.horizon_factor = horizon_factor;
  m.validate();
  return m;
}

EventPredicate EventConfig::build() const {
  if (kind == "always") return EventPredicate::always();
  if (kind == "never") return EventPredicate::never();
  if (kind == "xi_at_most") return EventPredicate::xi_at_most(value);
  if (kind == "increment_above") return EventPredicate::increment_above(value);
  throw ConfigError("experiment.event.kind: expected always, never, xi_at_most or increment_above");
}

void ExperimentConfig::validate() const {
  const auto& kinds = experiment_kinds();
  require(std::find(kinds.begin(), kinds.end(), kind) != kinds.end(), "kind",
          "unknown experiment '" + kind + "'");
  require(reps >= 2, "reps", "must be >= 2");
  require(workers >= 1, "workers", "must be >= 1");
  require(std::isfinite(a) && a > 0.0, "experiment.a", "must be finite and > 0");
  require(!a_grid.empty(), "experiment.a_grid", "must not be empty");
  for (std::size_t i = 0; i < a_grid.size(); ++i)
    require(std::isfinite(a_grid[i]) && a_grid[i] > 0.0,
            "experiment.a_grid[" + std::to_string(i) + "]", "must be finite and > 0");
  require(std::isfinite(b) && b > 0.0, "experiment.b", "must be finite and > 0");
  require(q > 1.0 / 3.0 && q < 0.5, "experiment.q", "must lie in (1/3, 1/2)");
  require(std::isfinite(epsilon) && epsilon > 0.0, "experiment.epsilon", "must be finite and > 0");
  require(zeta_threshold > 0.0 && zeta_threshold < 1.0, "experiment.zeta_threshold", "must lie in (0, 1)");
  require(eta_n >= 1, "experiment.eta_n", "must be >= 1");
  require(std::isfinite(h) && h > 0.0, "experiment.h", "must be finite and > 0");
  require(std::isfinite(c) && c > 0.0, "experiment.c", "must be finite and > 0");
  require(alpha > 0.0 && alpha < 1.0, "experiment.alpha", "must lie in (0, 1)");
  require(horizon >= 1, "experiment.horizon", "must be >= 1");
  if (boundary) require(std::isfinite(*boundary) && *boundary > 0.0, "experiment.boundary", "must be > 0");
  require(!thetas.empty(), "experiment.thetas", "must not be empty");
  for (std::size_t i = 0; i < thetas.size(); ++i)
    require(std::isfinite(thetas[i]) && thetas[i] > 0.0,
            "experiment.thetas[" + std::to_string(i) + "]", "must be finite and > 0");
  event.build();

  const bool trial_kind = kind == "example-fwci" || kind == "example-rst";
  try {
    if (trial_kind) {
      const StaggeredExponentialModel t = trial.build();
      if (kind == "example-fwci")
        require(t.g.kind() == GStatistic::Kind::fixed_width_ci, "trial.statistic",
                "example-fwci needs fixed_width_ci");
      if (kind == "example-rst")
        require(t.g.kind() == GStatistic::Kind::repeated_lrt, "trial.statistic",
                "example-rst needs repeated_lrt");
    } else {
      model.build();
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const std::string prefix = trial_kind ? "trial" : "model";
    if (msg.rfind(prefix, 0) == 0) throw;
    fail(prefix, msg);
  }
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: malformed YAML: ") + e.what());
  }
  ExperimentConfig c;
  if (root.IsNull()) return c;
  check_keys(root, "", {"kind", "seed", "reps", "workers", "output", "model", "trial", "experiment"});
  with(root, "kind", "", [&](const YAML::Node& v, const std::string& p) { c.kind = as_string(v, p); });
  with(root, "seed", "", [&](const YAML::Node& v, const std::string& p) { c.seed = as_int<std::uint64_t>(v, p); });
  with(root, "reps", "", [&](const YAML::Node& v, const std::string& p) { c.reps = as_int<std::size_t>(v, p); });
  with(root, "workers", "", [&](const YAML::Node& v, const std::string& p) { c.workers = as_int<unsigned>(v, p); });
  with(root, "output", "", [&](const YAML::Node& v, const std::string& p) { c.output = as_string(v, p); });
  with(root, "model", "", [&](const YAML::Node& v, const std::string& p) { parse_model(v, p, c.model); });
  with(root, "trial", "", [&](const YAML::Node& v, const std::string& p) { parse_trial(v, p, c.trial); });
  with(root, "experiment", "", [&](const YAML::Node& v, const std::string& p) { parse_experiment(v, p, c); });
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit_matrix(YAML::Emitter& e, const Matrix& m) {
  e << YAML::Flow << YAML::BeginSeq;
  for (const auto& row : m.to_rows()) {
    e << YAML::Flow << YAML::BeginSeq;
    for (double v : row) e << number(v);
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;
}

void emit_list(YAML::Emitter& e, const std::vector<double>& xs) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double v : xs) e << number(v);
  e << YAML::EndSeq;
}

void emit_increment(YAML::Emitter& e, const IncrementLaw& law) {
  e << YAML::BeginMap << YAML::Key << "family" << YAML::Value << to_string(law.family());
  switch (law.family()) {
    case Family::exponential: e << YAML::Key << "rate" << YAML::Value << number(law.param1()); break;
    case Family::gamma:
      e << YAML::Key << "shape" << YAML::Value << number(law.param1());
      e << YAML::Key << "rate" << YAML::Value << number(law.param2());
      break;
    case Family::normal:
      e << YAML::Key << "mean" << YAML::Value << number(law.param1());
      e << YAML::Key << "sd" << YAML::Value << number(law.param2());
      break;
    case Family::uniform:
      e << YAML::Key << "lo" << YAML::Value << number(law.param1());
      e << YAML::Key << "hi" << YAML::Value << number(law.param2());
      break;
    case Family::deterministic:
      e << YAML::Key << "value" << YAML::Value << number(law.param1());
      e << YAML::Key << "oracle_only" << YAML::Value << true;
      break;
    case Family::table:
      e << YAML::Key << "knots" << YAML::Value << YAML::BeginSeq;
      for (const auto& k : law.knots())
        e << YAML::Flow << YAML::BeginSeq << number(k.p) << number(k.x) << YAML::EndSeq;
      e << YAML::EndSeq;
      break;
  }
  e << YAML::Key << "shift" << YAML::Value << number(law.shift());
  e << YAML::Key << "scale" << YAML::Value << number(law.scale());
  e << YAML::EndMap;
}

}  // namespace

std::string to_yaml(const ExperimentConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << c.kind;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "reps" << YAML::Value << c.reps;
  e << YAML::Key << "workers" << YAML::Value << c.workers;
  e << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << c.output;

  const ModelConfig& m = c.model;
  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "increment" << YAML::Value;
  emit_increment(e, m.increment);
  e << YAML::Key << "vector" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << to_string(m.vector.kind());
  if (m.vector.kind() == VectorKind::gaussian) {
    e << YAML::Key << "covariance" << YAML::Value;
    emit_matrix(e, m.vector.gaussian_covariance());
  }
  e << YAML::EndMap;
  const StationarySpec& s = m.stationary;
  e << YAML::Key << "stationary" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << to_string(s.kind);
  e << YAML::Key << "map" << YAML::Value << to_string(s.map);
  e << YAML::Key << "decay" << YAML::Value << number(s.decay);
  e << YAML::Key << "depth" << YAML::Value;
  if (m.auto_depth) {
    e << "auto";
  } else {
    e << s.depth;
  }
  e << YAML::Key << "centering" << YAML::Value << (m.auto_centering ? "auto" : number(s.centering));
  e << YAML::Key << "arrival_rate" << YAML::Value << number(s.arrival_rate);
  e << YAML::Key << "indicator_weight" << YAML::Value << number(s.indicator_weight);
  e << YAML::Key << "excess_weight" << YAML::Value << number(s.excess_weight);
  e << YAML::EndMap;
  e << YAML::Key << "quadratic" << YAML::Value << YAML::BeginMap;
  if (!m.quadratic.q.empty()) {
    e << YAML::Key << "q" << YAML::Value;
    emit_matrix(e, m.quadratic.q);
  }
  e << YAML::Key << "allow_zero" << YAML::Value << m.quadratic.allow_zero;
  e << YAML::EndMap;
  e << YAML::Key << "residual" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << (m.residual_constant ? "constant" : "zero");
  if (m.residual_constant) e << YAML::Key << "value" << YAML::Value << number(*m.residual_constant);
  e << YAML::EndMap;
  e << YAML::Key << "n0" << YAML::Value << m.n0;
  e << YAML::Key << "horizon_factor" << YAML::Value << number(m.horizon_factor);
  e << YAML::EndMap;

  const TrialConfig& t = c.trial;
  e << YAML::Key << "trial" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "arrival_rate" << YAML::Value << number(t.arrival_rate);
  e << YAML::Key << "theta" << YAML::Value << number(t.theta);
  e << YAML::Key << "statistic" << YAML::Value << t.statistic;
  e << YAML::Key << "n0" << YAML::Value << t.n0;
  e << YAML::Key << "xi_truncation" << YAML::Value << t.xi_truncation;
  e << YAML::Key << "horizon_factor" << YAML::Value << number(t.horizon_factor);
  e << YAML::EndMap;

  e << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "a" << YAML::Value << number(c.a);
  e << YAML::Key << "a_grid" << YAML::Value;
  emit_list(e, c.a_grid);
  e << YAML::Key << "b" << YAML::Value << number(c.b);
  e << YAML::Key << "y" << YAML::Value << (c.y ? number(*c.y) : "median");
  e << YAML::Key << "event" << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << c.event.kind;
  e << YAML::Key << "value" << YAML::Value << number(c.event.value);
  e << YAML::EndMap;
  e << YAML::Key << "q" << YAML::Value << number(c.q);
  e << YAML::Key << "epsilon" << YAML::Value << number(c.epsilon);
  e << YAML::Key << "backward_reps" << YAML::Value << c.backward_reps;
  e << YAML::Key << "depth" << YAML::Value << c.depth;
  e << YAML::Key << "zeta_threshold" << YAML::Value << number(c.zeta_threshold);
  e << YAML::Key << "eta_n" << YAML::Value << c.eta_n;
  e << YAML::Key << "h" << YAML::Value << number(c.h);
  e << YAML::Key << "c" << YAML::Value << number(c.c);
  e << YAML::Key << "alpha" << YAML::Value << number(c.alpha);
  e << YAML::Key << "horizon" << YAML::Value << c.horizon;
  e << YAML::Key << "calibration_reps" << YAML::Value << c.calibration_reps;
  e << YAML::Key << "boundary" << YAML::Value << (c.boundary ? number(*c.boundary) : "auto");
  e << YAML::Key << "thetas" << YAML::Value;
  emit_list(e, c.thetas);
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  ExperimentConfig canonical = config;
  canonical.workers = 1;
  canonical.output.clear();
  const std::string text = to_yaml(canonical);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nlrt::app
