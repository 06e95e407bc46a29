#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "fivevec/json_io.hpp"
#include "fivevec/simulate.hpp"
#include "fivevec/verify.hpp"

namespace fivevec::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kToleranceFailure = 3 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::string summary;
  double dt = 1e-3;
  std::uint64_t steps = 1000;
  std::uint64_t seed = 1;
  std::size_t cases = 200;
  std::optional<double> tolerance;
  std::optional<std::string> metric;
  std::optional<double> fd_step;
  double drift_tolerance = 1e-8;
};

/// Values set on the command line; unset fields fall back to the config file,
/// then to the RunConfig defaults.
struct Overrides {
  std::optional<std::string> command, input, out, summary, metric;
  std::optional<double> dt, tolerance, fd_step, drift_tolerance;
  std::optional<std::uint64_t> steps, seed, cases;
};

inline RunConfig resolve(const Overrides& flags, const std::optional<std::string>& config_path) {
  using io::json;
  json file = json::object();
  if (config_path) {
    file = io::parse_file(*config_path);
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
  }
  auto pick = [&](const auto& flag, const char* key, auto def) {
    using T = decltype(def);
    if (flag) return static_cast<T>(*flag);
    if (file.contains(key)) {
      try {
        return file.at(key).template get<T>();
      } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
      }
    }
    return def;
  };
  RunConfig c;
  c.command = pick(flags.command, "command", std::string());
  c.input = pick(flags.input, "input", std::string());
  c.out = pick(flags.out, "out", std::string());
  c.summary = pick(flags.summary, "summary", std::string());
  c.dt = pick(flags.dt, "dt", c.dt);
  c.steps = pick(flags.steps, "steps", c.steps);
  c.seed = pick(flags.seed, "seed", c.seed);
  c.cases = static_cast<std::size_t>(pick(flags.cases, "cases", static_cast<std::uint64_t>(c.cases)));
  c.drift_tolerance = pick(flags.drift_tolerance, "drift_tolerance", c.drift_tolerance);
  if (flags.tolerance) c.tolerance = flags.tolerance;
  else if (file.contains("tolerance")) c.tolerance = pick(std::optional<double>(), "tolerance", 0.0);
  if (flags.metric) c.metric = flags.metric;
  else if (file.contains("metric")) c.metric = pick(std::optional<std::string>(), "metric", std::string());
  if (flags.fd_step) c.fd_step = flags.fd_step;
  else if (file.contains("fd_step")) c.fd_step = pick(std::optional<double>(), "fd_step", 0.0);

  if (c.command.empty()) throw ConfigError("no command given (simulate, verify, derive or transform)");
  if (c.command != "simulate" && c.command != "verify" && c.command != "derive" && c.command != "transform") {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be positive");
  if (c.tolerance && !(*c.tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
  if (c.cases == 0) throw ConfigError("cases must be positive");
  return c;
}

inline std::optional<Metric> metric_of(const RunConfig& c) {
  if (!c.metric) return std::nullopt;
  try {
    return Metric::from_name(*c.metric);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

inline void write_json(const io::json& j, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << j.dump(2) << '\n';
}

inline io::json require_input(const RunConfig& c) {
  if (c.input.empty()) throw ConfigError(c.command + " needs --input");
  return io::parse_file(c.input);
}

// --- simulate ----------------------------------------------------------------

inline void write_csv_header(std::ostream& os, std::size_t particles) {
  os << "t";
  for (std::size_t k = 0; k < particles; ++k)
    for (const char* q : {"x", "y", "z", "vx", "vy", "vz"}) os << ",p" << k << '_' << q;
  os << ",P_x,P_y,P_z,M_x,M_y,M_z,E_kin\n";
}

inline void write_csv_row(std::ostream& os, double t, const Body& b, const Vec3& o) {
  os << t;
  for (const auto& p : b.particles) os << ',' << p.x.x() << ',' << p.x.y() << ',' << p.x.z() << ',' << p.v.x() << ','
                                        << p.v.y() << ',' << p.v.z();
  const auto [pp, mm] = momentum_pair(momentum_tensor(b, o));
  os << ',' << pp.x() << ',' << pp.y() << ',' << pp.z() << ',' << mm.x() << ',' << mm.y() << ',' << mm.z() << ','
     << kinetic_energy_of(b) << '\n';
}

inline constexpr double kDefaultResidualTolerance = 1e-6;

/// Trajectory CSV to --out (default trajectory.csv), JSON summary to stdout
/// or --summary.
inline int run_simulate(const RunConfig& c, std::ostream& out) {
  const io::BodyDocument doc = io::read_body(require_input(c));
  const std::string csv_path = c.out.empty() ? "trajectory.csv" : c.out;
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write '" + csv_path + "'");
  csv << std::setprecision(17);
  write_csv_header(csv, doc.body.particles.size());
  const SimulationSummary s =
      simulate(doc.body, doc.forces, c.dt, static_cast<std::size_t>(c.steps), doc.origin,
               [&](double t, const Body& b) { write_csv_row(csv, t, b, doc.origin); });
  const double tol = c.tolerance.value_or(kDefaultResidualTolerance);
  const bool residual_ok = s.balance_max_residual <= tol;
  const bool drift_ok = !s.conserves_momentum || s.momentum_drift <= c.drift_tolerance;
  io::json j{{"dt", s.dt},
             {"steps", s.steps},
             {"trajectory", csv_path},
             {"energy_drift", s.energy_drift},
             {"momentum_drift", s.momentum_drift},
             {"momentum_conserved", s.conserves_momentum},
             {"momentum_balance_max_residual", s.balance_max_residual},
             {"residual_tolerance", tol},
             {"drift_tolerance", c.drift_tolerance},
             {"pass", residual_ok && drift_ok}};
  write_json(j, c.summary, out);
  return residual_ok && drift_ok ? kOk : kToleranceFailure;
}

// --- verify -----------------------------------------------------------------

inline int run_verify(const RunConfig& c, std::ostream& out) {
  const auto results = verify::run(c.seed, c.cases, c.tolerance, metric_of(c));
  const io::json j = verify::report(results, c.seed, c.cases);
  write_json(j, c.out, out);
  return j.at("all_pass").get<bool>() ? kOk : kToleranceFailure;
}

// --- derive -----------------------------------------------------------------

inline constexpr double kDefaultPartialTolerance = 1e-7;

/// Input {"metric", "field", optional "bivector", "point", "fd_step"}.
inline int run_derive(const RunConfig& c, std::ostream& out) {
  const io::json in = require_input(c);
  const std::optional<Metric> flag_metric = metric_of(c);
  const Metric g = in.contains("metric") ? io::read_metric(in.at("metric"))
                   : flag_metric         ? *flag_metric
                                         : throw ConfigError("derive needs a metric");
  const PolyField field = io::read_field(io::detail::need(in, "field"), g.dim());
  const DerivativeForm form = d_form(g, field);
  const int d = g.ext_dim();
  io::json comps = io::json::array();
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      comps.push_back({{"A", a}, {"B", b}, {"field", io::write_field(form.comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])}});
  io::json j{{"metric", io::write_metric(g)}, {"form", comps}};
  if (in.contains("bivector")) {
    const ExtTensor arg = io::read_tensor(in.at("bivector"), g);
    j["contracted"] = io::write_field(form.contract(arg));
  }
  if (in.contains("point")) {
    const VectorXd x = io::read_vector(in.at("point"), "point");
    if (x.size() != g.dim()) throw ConfigError("point has the wrong dimension");
    io::json values = io::json::array();
    for (const auto& v : form.at(x)) values.push_back(io::write_tensor(v));
    j["at"] = {{"point", io::write_vector(x)}, {"values", values}};
  }
  std::optional<double> h = c.fd_step;
  if (!h && in.contains("fd_step")) h = io::detail::number(in.at("fd_step"), "fd_step");
  bool ok = true;
  if (h) {
    const double tol = c.tolerance.value_or(kDefaultPartialTolerance);
    io::json rows = io::json::array();
    double worst = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        double r;
        try {
          r = r_partial_check(g, field, a, b, *h);
        } catch (const ValidationError& e) {
          throw ConfigError(e.what());
        }
        worst = std::max(worst, r);
        rows.push_back({{"A", a}, {"B", b}, {"residual", r}});
      }
    ok = worst <= tol;
    j["fd_check"] = {{"h", *h}, {"residuals", rows}, {"max_residual", worst}, {"tolerance", tol}, {"pass", ok}};
  }
  write_json(j, c.out, out);
  return ok ? kOk : kToleranceFailure;
}

// --- transform ----------------------------------------------------------------

/// Input {"metric", "motion": {L, a}, and "tensor" or "field"}. Vectors and
/// 1-forms go through apply_motion, other ranks (or "mode": "push_forward")
/// through push_forward; fields are replaced by their active image.
inline int run_transform(const RunConfig& c, std::ostream& out) {
  const io::json in = require_input(c);
  const std::optional<Metric> flag_metric = metric_of(c);
  const Metric g = in.contains("metric") ? io::read_metric(in.at("metric"))
                   : flag_metric         ? *flag_metric
                                         : throw ConfigError("transform needs a metric");
  const MotionParams p = io::read_motion(io::detail::need(in, "motion"));
  if (p.a.size() != g.dim()) throw ConfigError("motion dimension does not match the metric");
  MotionTensor t = [&] {
    try {
      return t_from_params(p, g);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  }();
  io::json j{{"metric", io::write_metric(g)}, {"motion", io::write_motion(p)}};
  if (in.contains("tensor")) {
    const ExtTensor x = io::read_tensor(in.at("tensor"), g);
    if (!(x.metric() == g)) throw ConfigError("tensor metric differs from the transform metric");
    const bool pointwise = x.frame().kind != BasisKind::p_basis;
    const ExtTensor px = to_p_basis(x);
    const std::string mode = in.contains("mode") ? in.at("mode").get<std::string>() : "apply";
    if (mode != "apply" && mode != "push_forward") throw ConfigError("mode must be 'apply' or 'push_forward'");
    const bool rank_one = x.order() == 1;
    ExtTensor moved = (mode == "apply" && rank_one) ? apply_motion(t, px) : push_forward(t, px);
    if (pointwise) moved = to_o_basis(moved, x.frame().anchor);
    j["tensor"] = io::write_tensor(moved);
  } else if (in.contains("field")) {
    j["field"] = io::write_field(pull_back(io::read_field(in.at("field"), g.dim()), t));
  } else {
    throw ConfigError("transform needs a 'tensor' or a 'field'");
  }
  write_json(j, c.out, out);
  return kOk;
}

inline int dispatch(const RunConfig& c, std::ostream& out) {
  if (c.command == "simulate") return run_simulate(c, out);
  if (c.command == "verify") return run_verify(c, out);
  if (c.command == "derive") return run_derive(c, out);
  return run_transform(c, out);
}

/// Runs a resolved command, mapping input problems to exit 2.
inline int run_guarded(const Overrides& flags, const std::optional<std::string>& config, std::ostream& out,
                       std::ostream& err) {
  try {
    const RunConfig c = resolve(flags, config);
    const int code = dispatch(c, out);
    if (code == kToleranceFailure) err << "fivevec " << c.command << ": tolerance exceeded, see the report for residuals\n";
    return code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const ShapeError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedDimension& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const io::json::exception& e) {
    err << "error: schema violation: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace fivevec::cli
