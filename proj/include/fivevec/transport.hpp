#pragma once

#include "fivevec/ext_tensor.hpp"

namespace fivevec {

/// Matrix of parallel transport of contravariant components between the
/// O-bases at `from` and `to`:
///   v^α(to) = v^α(from),   v^5(to) = v^5(from) + (to − from)_α v^α,
/// with the displacement lowered by g. Transporting e_α from the origin to
/// x therefore gives e_α(x) + x_α e_5(x), and e_5 is transport-invariant.
inline MatrixXd transport_matrix(const Metric& metric, const VectorXd& from, const VectorXd& to) {
  const int n = metric.dim();
  if (from.size() != n || to.size() != n) throw ShapeError("transport endpoints have wrong dimension");
  if (!from.allFinite() || !to.allFinite()) throw ValidationError("transport endpoints must be finite");
  MatrixXd m = MatrixXd::Identity(n + 1, n + 1);
  m.row(n).head(n) = metric.lower(to - from).transpose();
  return m;
}

/// Exact inverse of transport_matrix(from, to), i.e. transport_matrix(to, from).
inline MatrixXd transport_matrix_inverse(const Metric& metric, const VectorXd& from, const VectorXd& to) {
  return transport_matrix(metric, to, from);
}

namespace detail {
inline void require_o_basis(const Frame& f) {
  if (!is_pointwise(f.kind)) throw ContractViolation("transport needs components in an O-basis, got a P-basis");
}
}  // namespace detail

/// Transports a tensor of any rank from its anchor to `to`: contravariant
/// slots with the transport matrix, covariant slots with its inverse.
inline ExtTensor transport_tensor(const ExtTensor& t, const VectorXd& to) {
  detail::require_o_basis(t.frame());
  const Metric& g = t.metric();
  const VectorXd& from = t.frame().anchor;
  return transform_slots(t, transport_matrix(g, from, to), transport_matrix_inverse(g, from, to),
                         Frame(g, to, t.frame().kind));
}

/// Explicit-source form: `from` must equal the anchor of `t`.
inline ExtTensor transport_tensor(const ExtTensor& t, const VectorXd& from, const VectorXd& to) {
  detail::require_o_basis(t.frame());
  if (from.size() != t.frame().anchor.size() || from != t.frame().anchor) {
    throw ContractViolation("tensor is not anchored at the transport source point");
  }
  return transport_tensor(t, to);
}

inline ExtTensor transport_vector(const ExtTensor& v, const VectorXd& to) {
  if (v.contravariant_rank() != 1 || v.covariant_rank() != 0) throw ShapeError("transport_vector needs a vector");
  return transport_tensor(v, to);
}

inline ExtTensor transport_vector(const ExtTensor& v, const VectorXd& from, const VectorXd& to) {
  if (v.contravariant_rank() != 1 || v.covariant_rank() != 0) throw ShapeError("transport_vector needs a vector");
  return transport_tensor(v, from, to);
}

/// P-basis components of a covariantly constant field given its O-basis
/// value at the frame anchor.
inline ExtTensor to_p_basis(const ExtTensor& t) {
  if (t.frame().kind == BasisKind::p_basis) return t;
  const int n = t.metric().dim();
  return transport_tensor(t, VectorXd::Zero(n)).relabel(Frame::p_basis(t.metric()));
}

/// O-basis value at `at` of a covariantly constant field with the given
/// P-basis components.
inline ExtTensor to_o_basis(const ExtTensor& t, const VectorXd& at) {
  if (t.frame().kind != BasisKind::p_basis) return transport_tensor(t, at);
  const int n = t.metric().dim();
  return transport_tensor(t.relabel(Frame::o_basis(t.metric(), VectorXd::Zero(n))), at);
}

/// theta_g: vector -> 1-form with base components g_{βα} v^α and zero fifth
/// component. Its kernel is exactly span(e_5).
inline ExtTensor theta_g(const ExtTensor& v) {
  if (v.contravariant_rank() != 1 || v.covariant_rank() != 0) throw ShapeError("theta_g needs a vector");
  const Metric& g = v.metric();
  const int n = g.dim();
  const VectorXd comps = v.as_vector();
  VectorXd w = VectorXd::Zero(n + 1);
  w.head(n) = g.lower(comps.head(n));
  return ExtTensor::covector(v.frame(), w);
}

}  // namespace fivevec
