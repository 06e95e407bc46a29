#pragma once

#include <string>
#include <string_view>

#include "fivevec/metric.hpp"

namespace fivevec {

/// O_BASIS: the standard basis e_A(x) of a chart, evaluated at the anchor.
/// It is not self-parallel. ACTIVE_REGULAR is the same field viewed as the
/// basis used for active transformations and transports identically.
/// P_BASIS: the self-parallel basis p_A of a chart; components in it are
/// the same at every point, and coincide with O-basis components at the
/// chart origin.
enum class BasisKind { o_basis, p_basis, active_regular };

inline std::string_view to_string(BasisKind k) {
  switch (k) {
    case BasisKind::o_basis: return "O_BASIS";
    case BasisKind::p_basis: return "P_BASIS";
    case BasisKind::active_regular: return "ACTIVE_REGULAR";
  }
  return "O_BASIS";
}

inline BasisKind basis_kind_from_string(std::string_view s) {
  if (s == "O_BASIS") return BasisKind::o_basis;
  if (s == "P_BASIS") return BasisKind::p_basis;
  if (s == "ACTIVE_REGULAR") return BasisKind::active_regular;
  throw ConfigError("unknown basis kind '" + std::string(s) + "'");
}

inline bool is_pointwise(BasisKind k) { return k != BasisKind::p_basis; }

struct Frame {
  Metric metric;
  VectorXd anchor;
  BasisKind kind = BasisKind::o_basis;

  Frame(Metric m, VectorXd at, BasisKind k) : metric(std::move(m)), anchor(std::move(at)), kind(k) {
    if (anchor.size() != metric.dim()) throw ShapeError("frame anchor has wrong dimension");
    if (!anchor.allFinite()) throw ValidationError("frame anchor must be finite");
  }

  static Frame o_basis(Metric m, VectorXd at) { return Frame(std::move(m), std::move(at), BasisKind::o_basis); }
  static Frame o_basis(Metric m) {
    const int n = m.dim();
    return Frame(std::move(m), VectorXd::Zero(n), BasisKind::o_basis);
  }
  static Frame p_basis(Metric m) {
    const int n = m.dim();
    return Frame(std::move(m), VectorXd::Zero(n), BasisKind::p_basis);
  }

  int dim() const { return metric.dim(); }
  int ext_dim() const { return metric.ext_dim(); }

  /// Same basis field at the same point. P-bases ignore the anchor.
  friend bool same_basis(const Frame& a, const Frame& b) {
    if (!(a.metric == b.metric)) return false;
    const bool pa = a.kind == BasisKind::p_basis;
    const bool pb = b.kind == BasisKind::p_basis;
    if (pa != pb) return false;
    return pa || a.anchor == b.anchor;
  }
};

}  // namespace fivevec
