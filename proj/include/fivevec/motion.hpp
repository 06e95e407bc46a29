#pragma once

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "fivevec/bivector.hpp"
#include "fivevec/transport.hpp"

namespace fivevec {

inline constexpr double kIsometryTolerance = 1e-10;

/// Parameters of the coordinate change x'^α = L^α_β x^β + a^α from an
/// initial chart to the final chart of an active motion.
struct MotionParams {
  MatrixXd L;
  VectorXd a;

  static MotionParams identity(int n) { return {MatrixXd::Identity(n, n), VectorXd::Zero(n)}; }
  static MotionParams translation(const VectorXd& a) {
    return {MatrixXd::Identity(a.size(), a.size()), a};
  }
};

/// Residual max |Lᵀ g L − g| scaled by max(1, |L|²).
inline double isometry_defect(const Metric& g, const MatrixXd& L) {
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff() * L.cwiseAbs().maxCoeff());
  return (L.transpose() * g.g() * L - g.g()).cwiseAbs().maxCoeff() / scale;
}

inline void validate(const MotionParams& p, const Metric& g) {
  const int n = g.dim();
  if (p.L.rows() != n || p.L.cols() != n || p.a.size() != n) throw ShapeError("motion parameters have wrong extent");
  if (!p.L.allFinite() || !p.a.allFinite()) throw ValidationError("motion parameters must be finite");
  const double defect = isometry_defect(g, p.L);
  if (defect > kIsometryTolerance) {
    throw ValidationError("L is not an isometry of the base metric (defect " + std::to_string(defect) + ")");
  }
}

/// Affine point map x ↦ linear·x + offset.
struct AffineMap {
  MatrixXd linear;
  VectorXd offset;

  VectorXd operator()(const VectorXd& x) const { return linear * x + offset; }
  AffineMap inverse() const {
    MatrixXd inv = linear.inverse();
    return {inv, -inv * offset};
  }
};

/// Rank-(1,1) covariantly constant motion tensor with components T^A_B in a
/// P-basis. Column B holds the image of p_B.
class MotionTensor {
 public:
  MotionTensor(Frame frame, MatrixXd comps) : frame_(std::move(frame)), comps_(std::move(comps)) {
    if (frame_.kind != BasisKind::p_basis) throw ContractViolation("motion tensors are stored in a P-basis");
    const int n = frame_.dim();
    if (comps_.rows() != n + 1 || comps_.cols() != n + 1) throw ShapeError("motion tensor has wrong extent");
    if (!comps_.allFinite()) throw ValidationError("motion tensor has non-finite components");
    if (comps_.col(n).head(n).cwiseAbs().maxCoeff() != 0.0 || comps_(n, n) != 1.0) {
      throw ValidationError("motion tensor must have T^α_5 = 0 and T^5_5 = 1");
    }
    const MatrixXd lambda = comps_.topLeftCorner(n, n);
    if (isometry_defect(frame_.metric, lambda) > kIsometryTolerance) {
      throw ValidationError("motion tensor base block is not an isometry");
    }
  }

  const Frame& frame() const { return frame_; }
  const Metric& metric() const { return frame_.metric; }
  const MatrixXd& comps() const { return comps_; }
  int dim() const { return frame_.dim(); }

  /// Λ = L^{-1}.
  MatrixXd lambda() const { return comps_.topLeftCorner(dim(), dim()); }
  /// a_β, the translation lowered with g.
  VectorXd a_lower() const { return comps_.row(dim()).head(dim()).transpose(); }

  /// Recovered coordinate-change parameters (L, a).
  MotionParams params() const {
    MatrixXd L = lambda().inverse();
    return {L, metric().raise(a_lower())};
  }

  /// Components of T^{-1}: base block L, fifth row −a_γ L^γ_β.
  MatrixXd inverse_comps() const {
    const int n = dim();
    const MatrixXd L = lambda().inverse();
    MatrixXd inv = MatrixXd::Identity(n + 1, n + 1);
    inv.topLeftCorner(n, n) = L;
    inv.row(n).head(n) = -(a_lower().transpose() * L);
    return inv;
  }

  MotionTensor inverse() const { return MotionTensor(frame_, inverse_comps()); }

  ExtTensor as_tensor() const { return ExtTensor::from_matrix(frame_, comps_, 1, 1); }

  /// Where the motion carries a point: x ↦ Λ (x − a).
  AffineMap point_map() const {
    const MatrixXd lam = lambda();
    return {lam, -lam * metric().raise(a_lower())};
  }

 private:
  Frame frame_;
  MatrixXd comps_;
};

/// Builds T from (L, a): T^α_β = (L^{-1})^α_β, T^α_5 = 0, T^5_β = a_β, T^5_5 = 1.
inline MotionTensor t_from_params(const MotionParams& p, const Frame& frame) {
  validate(p, frame.metric);
  const int n = frame.dim();
  MatrixXd t = MatrixXd::Identity(n + 1, n + 1);
  t.topLeftCorner(n, n) = p.L.inverse();
  t.row(n).head(n) = frame.metric.lower(p.a).transpose();
  return MotionTensor(frame, t);
}

inline MotionTensor t_from_params(const MotionParams& p, const Metric& g) {
  return t_from_params(p, Frame::p_basis(g));
}

inline MotionTensor identity_motion(const Metric& g) {
  return t_from_params(MotionParams::identity(g.dim()), g);
}

/// compose(t1, t2) = t1·t2. For t_i = t_from_params(L_i, a_i) this is
/// t_from_params(L₂L₁, L₂a₁ + a₂), the motion whose coordinate change is
/// (L₁, a₁) followed by (L₂, a₂).
inline MotionTensor compose(const MotionTensor& t1, const MotionTensor& t2) {
  if (!same_basis(t1.frame(), t2.frame())) throw ContractViolation("composing motions from different frames");
  return MotionTensor(t1.frame(), t1.comps() * t2.comps());
}

/// Vectors map forward, v ↦ T v. A 1-form w is mapped to w·T (w_A ↦ w_B T^B_A),
/// so the primed dual basis q̃'^A is carried back to q̃^A.
inline ExtTensor apply_motion(const MotionTensor& t, const ExtTensor& v) {
  if (!same_basis(t.frame(), v.frame())) {
    throw ContractViolation("operand is not in the motion tensor's P-basis; transport it first");
  }
  if (v.contravariant_rank() == 1 && v.covariant_rank() == 0) {
    return ExtTensor::vector(v.frame(), t.comps() * v.as_vector());
  }
  if (v.contravariant_rank() == 0 && v.covariant_rank() == 1) {
    return ExtTensor::covector(v.frame(), (v.as_vector().transpose() * t.comps()).transpose());
  }
  throw ShapeError("apply_motion takes a vector or a 1-form");
}

/// Active image of an arbitrary covariantly constant tensor: contravariant
/// slots by T, covariant slots by T^{-1}.
inline ExtTensor push_forward(const MotionTensor& t, const ExtTensor& x) {
  if (!same_basis(t.frame(), x.frame())) throw ContractViolation("operand is not in the motion tensor's P-basis");
  return transform_slots(x, t.comps(), t.inverse_comps(), x.frame());
}

// --- infinitesimal motions ----------------------------------------------

/// Infinitesimal motion (ω, a) with ω stored in lower-index form,
/// ω_{αβ} = −ω_{βα}.
struct InfinitesimalMotion {
  MatrixXd omega;
  VectorXd a;

  static InfinitesimalMotion zero(int n) { return {MatrixXd::Zero(n, n), VectorXd::Zero(n)}; }
};

inline void validate(const InfinitesimalMotion& m, const Metric& g) {
  const int n = g.dim();
  if (m.omega.rows() != n || m.omega.cols() != n || m.a.size() != n) {
    throw ShapeError("infinitesimal motion has wrong extent");
  }
  if (!m.omega.allFinite() || !m.a.allFinite()) throw ValidationError("infinitesimal motion must be finite");
  if ((m.omega + m.omega.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw ValidationError("omega_{ab} must be exactly antisymmetric");
  }
}

/// R^{αβ} = ω^{αβ} (both indices raised with g), R^{α5} = −R^{5α} = a^α, R^{55} = 0.
inline ExtTensor r_from_infinitesimal(const InfinitesimalMotion& m, const Frame& frame) {
  validate(m, frame.metric);
  const Metric& g = frame.metric;
  const int n = g.dim();
  const MatrixXd upper = g.g_inv() * m.omega * g.g_inv();
  MatrixXd r = MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      r(i, j) = upper(i, j);
      r(j, i) = -upper(i, j);
    }
    r(i, n) = m.a(i);
    r(n, i) = -m.a(i);
  }
  return ExtTensor::from_matrix(frame, r, 2, 0);
}

inline ExtTensor r_from_infinitesimal(const InfinitesimalMotion& m, const Metric& g) {
  return r_from_infinitesimal(m, Frame::p_basis(g));
}

/// Inverse of r_from_infinitesimal.
inline InfinitesimalMotion infinitesimal_from_r(const ExtTensor& r) {
  const BivectorSplit s = bivector_split(r);
  const Metric& g = r.metric();
  MatrixXd omega = g.g() * s.z_part * g.g();
  omega = 0.5 * (omega - omega.transpose()).eval();
  return {omega, s.e_part};
}

/// (M_KL)^A_B = δ^A_L ĝ_KB − δ^A_K ĝ_LB with ĝ = block-diag(g, 0).
inline MatrixXd generator(const Metric& g, int k, int l) {
  const int d = g.ext_dim();
  const MatrixXd gh = g.g_degenerate();
  MatrixXd m = MatrixXd::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    m(l, b) += gh(k, b);
    m(k, b) -= gh(l, b);
  }
  return m;
}

/// S^A_B = −½ R^{KL} (M_KL)^A_B.
inline ExtTensor s_from_r(const ExtTensor& r) {
  if (r.contravariant_rank() != 2 || r.covariant_rank() != 0) throw ShapeError("s_from_r needs rank (2,0)");
  require_antisymmetric(r);
  const Metric& g = r.metric();
  const int d = g.ext_dim();
  MatrixXd s = MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const double rkl = r(k, l);
      if (rkl == 0.0) continue;
      s -= 0.5 * rkl * generator(g, k, l);
    }
  }
  return ExtTensor::from_matrix(r.frame(), s, 1, 1);
}

inline constexpr double kExpOverflowGuard = 600.0;

/// Finite motion generated by constant rates over time t: expm(−S t).
/// Pure translations use the closed form 1 − S t (S is nilpotent then).
inline MotionTensor exp_motion(const InfinitesimalMotion& m, const Metric& g, double t) {
  validate(m, g);
  if (!std::isfinite(t)) throw ValidationError("exp_motion time must be finite");
  const Frame frame = Frame::p_basis(g);
  const MatrixXd s = s_from_r(r_from_infinitesimal(m, frame)).as_matrix();
  const int n = g.dim();
  MatrixXd gen = -s * t;
  MatrixXd out;
  if (m.omega.cwiseAbs().maxCoeff() == 0.0) {
    out = MatrixXd::Identity(n + 1, n + 1) + gen;
  } else {
    const double norm = (g.g_inv() * m.omega).cwiseAbs().rowwise().sum().maxCoeff() * std::abs(t);
    if (norm > kExpOverflowGuard) throw std::overflow_error("exp_motion: |omega| t too large");
    out = gen.exp();
  }
  out.col(n).head(n).setZero();
  out(n, n) = 1.0;
  return MotionTensor(frame, out);
}

// --- charts and alternative representations --------------------------------

/// Change of P-basis for the chart y = Q x + b (Q an isometry): the new
/// basis is p'_A = p_B C^B_A, with C the motion-tensor matrix of (Q, b).
inline MatrixXd chart_change_matrix(const MotionParams& chart, const Metric& g) {
  return t_from_params(chart, g).comps();
}

/// Components of a P-basis tensor re-expressed in the P-basis of the chart
/// y = Q x + b.
inline ExtTensor to_chart(const ExtTensor& t, const MotionParams& chart) {
  if (t.frame().kind != BasisKind::p_basis) throw ContractViolation("to_chart needs P-basis components");
  const MatrixXd c = chart_change_matrix(chart, t.metric());
  return transform_slots(t, c.inverse(), c, t.frame());
}

/// Parameters, relative to chart y = Q x + b, of the motion with parameters
/// `motion` relative to chart x: L' = Q L Q^{-1}, a' = Q a + b − L' b.
inline MotionParams reexpress_params(const MotionParams& motion, const MotionParams& chart) {
  const MatrixXd qinv = chart.L.inverse();
  MatrixXd L2 = chart.L * motion.L * qinv;
  VectorXd a2 = chart.L * motion.a + chart.a - L2 * chart.a;
  return {L2, a2};
}

/// Components of T in the contravariant P-basis p^A = g^{AB}-raised p_B,
/// i.e. C^{-1} T C with C = block-diag(g^{-1}, 1). For an isometric L its
/// transpose is the homogeneous matrix [[L, a], [0, 1]].
inline MatrixXd contravariant_components(const MotionTensor& t) {
  const ContravariantFrame cf = contravariant_frame(t.frame());
  return cf.dual_forms * t.comps() * cf.in_own_basis;
}

inline MatrixXd homogeneous_matrix(const MotionParams& p) {
  const int n = static_cast<int>(p.a.size());
  MatrixXd h = MatrixXd::Identity(n + 1, n + 1);
  h.topLeftCorner(n, n) = p.L;
  h.col(n).head(n) = p.a;
  return h;
}

/// O-basis components at x of the motion tensor field.
inline MatrixXd o_basis_components(const MotionTensor& t, const VectorXd& x) {
  return to_o_basis(t.as_tensor(), x).as_matrix();
}

}  // namespace fivevec
