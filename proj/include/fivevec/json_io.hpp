#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fivevec/bivector_derivative.hpp"
#include "fivevec/lagrange.hpp"

namespace fivevec::io {

using nlohmann::json;

// Schema errors are reported as ConfigError so the CLI can map them to one
// exit code.

namespace detail {
inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ConfigError(std::string(what) + " must be an integer");
  return j.get<int>();
}
}  // namespace detail

inline VectorXd read_vector(const json& j, const char* what = "vector") {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = detail::number(j[k], what);
  return v;
}

inline MatrixXd read_matrix(const json& j, const char* what = "matrix") {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(std::string(what) + " rows must have equal length");
    m.row(static_cast<Eigen::Index>(r)) = read_vector(j[r], what).transpose();
  }
  return m;
}

inline json write_vector(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

inline json write_matrix(const MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(write_vector(m.row(r).transpose()));
  return out;
}

/// A preset name, or {"g": [[...]], "xi": 1.0, "name": "..."}.
inline Metric read_metric(const json& j) {
  if (j.is_string()) {
    try {
      return Metric::from_name(j.get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  const MatrixXd g = read_matrix(detail::need(j, "g"), "metric g");
  const double xi = j.contains("xi") ? detail::number(j.at("xi"), "xi") : 1.0;
  const std::string name = j.contains("name") ? j.at("name").get<std::string>() : "custom";
  return Metric(g, xi, name);
}

inline json write_metric(const Metric& g) {
  if (g.name() == "euclidean3" || g.name() == "minkowski4") return g.name();
  return json{{"g", write_matrix(g.g())}, {"xi", g.xi()}, {"name", g.name()}};
}

inline Frame read_frame(const Metric& g, const json& j) {
  const BasisKind kind = j.contains("kind") ? basis_kind_from_string(j.at("kind").get<std::string>()) : BasisKind::o_basis;
  const VectorXd anchor = j.contains("anchor") ? read_vector(j.at("anchor"), "anchor") : VectorXd::Zero(g.dim());
  if (anchor.size() != g.dim()) throw ConfigError("frame anchor has the wrong dimension");
  return Frame(g, anchor, kind);
}

inline json write_frame(const Frame& f) {
  return json{{"anchor", write_vector(f.anchor)}, {"kind", std::string(to_string(f.kind))}};
}

/// {metric, frame: {anchor, kind}, rank: [p, q], comps: [...] row-major}.
/// `fallback` supplies the metric when the document omits it.
inline ExtTensor read_tensor(const json& j, const std::optional<Metric>& fallback = std::nullopt) {
  Metric g = j.contains("metric") ? read_metric(j.at("metric"))
             : fallback             ? *fallback
                                    : throw ConfigError("tensor has no metric");
  const Frame f = j.contains("frame") ? read_frame(g, j.at("frame")) : Frame::o_basis(g);
  const json& rank = detail::need(j, "rank");
  if (!rank.is_array() || rank.size() != 2) throw ConfigError("rank must be [contravariant, covariant]");
  const int p = detail::integer(rank[0], "rank");
  const int q = detail::integer(rank[1], "rank");
  if (p < 0 || q < 0 || p + q > 6) throw ConfigError("rank out of supported range");
  const json& comps = detail::need(j, "comps");
  if (!comps.is_array()) throw ConfigError("comps must be an array");
  std::vector<double> c;
  for (const auto& x : comps) c.push_back(detail::number(x, "comps"));
  try {
    return ExtTensor(f, p, q, std::move(c));
  } catch (const ShapeError& e) {
    throw ConfigError(e.what());
  }
}

inline json write_tensor(const ExtTensor& t) {
  json comps = json::array();
  for (double c : t.comps()) comps.push_back(c);
  return json{{"metric", write_metric(t.metric())},
              {"frame", write_frame(t.frame())},
              {"rank", {t.contravariant_rank(), t.covariant_rank()}},
              {"comps", comps}};
}

inline MotionParams read_motion(const json& j) {
  MotionParams p{read_matrix(detail::need(j, "L"), "L"), read_vector(detail::need(j, "a"), "a")};
  if (p.L.rows() != p.L.cols() || p.L.rows() != p.a.size()) throw ConfigError("motion L and a have inconsistent sizes");
  return p;
}

inline json write_motion(const MotionParams& p) { return json{{"L", write_matrix(p.L)}, {"a", write_vector(p.a)}}; }

inline InfinitesimalMotion read_infinitesimal(const json& j) {
  return {read_matrix(detail::need(j, "omega"), "omega"), read_vector(detail::need(j, "a"), "a")};
}

// --- polynomial fields -------------------------------------------------------

inline Polynomial read_terms(const json& j, int nvars) {
  if (!j.is_array()) throw ConfigError("terms must be an array");
  Polynomial p(nvars);
  for (const auto& t : j) {
    const json& e = detail::need(t, "exps");
    if (!e.is_array() || static_cast<int>(e.size()) != nvars) throw ConfigError("exps has the wrong length");
    Polynomial::Exponents exps;
    for (const auto& k : e) {
      const int v = detail::integer(k, "exps");
      if (v < 0) throw ConfigError("exps must be non-negative");
      exps.push_back(v);
    }
    p.add_term(exps, detail::number(detail::need(t, "coef"), "coef"));
  }
  return p;
}

inline json write_terms(const Polynomial& p) {
  json out = json::array();
  for (const auto& [e, c] : p.terms()) out.push_back(json{{"exps", e}, {"coef", c}});
  return out;
}

/// Scalar: {"kind":"scalar","terms":[...]}. Vector: {"kind":"vector",
/// "components":[[terms of U^0], [terms of U^1], ...]}.
inline PolyField read_field(const json& j, int nvars) {
  const std::string kind = detail::need(j, "kind").get<std::string>();
  const std::string chart = j.contains("chart") ? j.at("chart").get<std::string>() : "lorentz";
  if (kind == "scalar") return PolyField::scalar(read_terms(detail::need(j, "terms"), nvars), chart);
  if (kind == "vector") {
    const json& comps = detail::need(j, "components");
    if (!comps.is_array() || static_cast<int>(comps.size()) != nvars) {
      throw ConfigError("vector field needs one term list per coordinate");
    }
    std::vector<Polynomial> u;
    for (const auto& c : comps) u.push_back(read_terms(c, nvars));
    return PolyField::vector(std::move(u), chart);
  }
  throw ConfigError("field kind must be 'scalar' or 'vector'");
}

inline json write_field(const PolyField& f) {
  if (f.kind == FieldKind::scalar) return json{{"kind", "scalar"}, {"chart", f.chart}, {"terms", write_terms(f.comps[0])}};
  json comps = json::array();
  for (const auto& c : f.comps) comps.push_back(write_terms(c));
  return json{{"kind", "vector"}, {"chart", f.chart}, {"components", comps}};
}

// --- bodies and force presets --------------------------------------------------

inline ForceTerm read_force_term(const json& j) {
  const std::string type = j.is_string() ? j.get<std::string>() : detail::need(j, "type").get<std::string>();
  auto param = [&](const char* key, double def) {
    return (j.is_object() && j.contains(key)) ? detail::number(j.at(key), key) : def;
  };
  if (type == "uniform_gravity") return UniformGravity{param("g", 9.81)};
  if (type == "pairwise_spring") return PairwiseSpring{param("k", 1.0), param("rest", 0.0)};
  if (type == "inverse_square") {
    InverseSquare inv{param("k", 1.0), std::nullopt};
    if (j.is_object() && j.contains("center")) {
      const VectorXd c = read_vector(j.at("center"), "center");
      if (c.size() != 3) throw ConfigError("center must have three components");
      inv.center = Vec3(c);
    }
    return inv;
  }
  throw ConfigError("unknown force preset '" + type + "'");
}

/// "none", a single preset (name or {"type": ..., params}), or a list of them.
inline ForceSpec read_force_spec(const json& j) {
  ForceSpec spec;
  if (j.is_null() || (j.is_string() && (j.get<std::string>() == "none" || j.get<std::string>() == "free"))) return spec;
  if (j.is_array()) {
    for (const auto& t : j) spec.terms.push_back(read_force_term(t));
    return spec;
  }
  spec.terms.push_back(read_force_term(j));
  return spec;
}

inline Vec3 read_vec3(const json& j, const char* what) {
  const VectorXd v = read_vector(j, what);
  if (v.size() != 3) throw ConfigError(std::string(what) + " must have three components");
  return Vec3(v);
}

struct BodyDocument {
  Body body;
  ForceSpec forces;
  Vec3 origin = Vec3::Zero();
};

/// {"particles":[{"m":..,"x":[..],"v":[..]}], "force": ..., "origin": [..]}.
inline BodyDocument read_body(const json& j) {
  BodyDocument doc;
  const json& ps = detail::need(j, "particles");
  if (!ps.is_array() || ps.empty()) throw ConfigError("particles must be a non-empty array");
  for (const auto& p : ps) {
    Particle q{detail::number(detail::need(p, "m"), "m"), read_vec3(detail::need(p, "x"), "x"),
               p.contains("v") ? read_vec3(p.at("v"), "v") : Vec3::Zero()};
    doc.body.particles.push_back(q);
  }
  doc.forces = read_force_spec(j.contains("force") ? j.at("force") : json());
  doc.body.external_force = make_force_model(doc.forces);
  if (j.contains("origin")) doc.origin = read_vec3(j.at("origin"), "origin");
  try {
    validate(doc.body);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return doc;
}

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace fivevec::io
