#pragma once

#include <sstream>

#include "fivevec/ext_tensor.hpp"

namespace fivevec {

/// Decomposition of an antisymmetric rank-(2,0) extended tensor into its
/// Z-component (base bivector, z_part^{αβ} = b^{αβ}) and its E-component
/// (translation vector, e_part^α = b^{α5}).
struct BivectorSplit {
  MatrixXd z_part;
  VectorXd e_part;
  Frame frame;
};

inline constexpr double kAntisymmetryTolerance = 1e-12;

inline void require_antisymmetric(const ExtTensor& b, double tol = kAntisymmetryTolerance) {
  if (b.contravariant_rank() + b.covariant_rank() != 2) throw ShapeError("expected a rank-2 tensor");
  const double asym = asymmetry(b);
  if (asym > tol) {
    std::ostringstream os;
    os << "tensor is not antisymmetric (max |b^AB + b^BA| = " << asym << ")";
    throw ValidationError(os.str());
  }
}

/// Splits an antisymmetric bivector. The E-part components equal b^{α5}
/// for every positive xi: the bivector inner product carries the 1/xi
/// factor that cancels it.
inline BivectorSplit bivector_split(const ExtTensor& b) {
  if (b.contravariant_rank() != 2 || b.covariant_rank() != 0) throw ShapeError("bivector_split needs rank (2,0)");
  require_antisymmetric(b);
  const int n = b.metric().dim();
  const MatrixXd m = b.as_matrix();
  MatrixXd z = m.topLeftCorner(n, n);
  // exact antisymmetry of the stored part
  z = 0.5 * (z - z.transpose()).eval();
  VectorXd e = 0.5 * (m.col(n).head(n) - m.row(n).head(n).transpose());
  return {std::move(z), std::move(e), b.frame()};
}

inline ExtTensor reassemble(const BivectorSplit& s) {
  const int n = s.frame.dim();
  MatrixXd m = MatrixXd::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = s.z_part;
  m.col(n).head(n) = s.e_part;
  m.row(n).head(n) = -s.e_part.transpose();
  return ExtTensor::from_matrix(s.frame, m, 2, 0);
}

/// Antisymmetric rank-(2,0) tensor with only the (a,b)/(b,a) entries ±1,
/// i.e. e_a ∧ e_b.
inline ExtTensor unit_bivector(const Frame& f, int a, int b) {
  ExtTensor t(f, 2, 0);
  if (a == b) return t;
  t(a, b) = 1.0;
  t(b, a) = -1.0;
  return t;
}

/// Index pairs (A < B) of an extended space of dimension d, in the order
/// (0,1), (0,2), ..., (d-2,d-1).
inline std::vector<std::pair<int, int>> bivector_pairs(int d) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) out.emplace_back(a, b);
  return out;
}

// --- three-dimensional duality -------------------------------------------

inline double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((i - j) * (j - k) * (k - i)) / 2 > 0 ? 1.0 : -1.0;
}

/// Ω^k = ½ ε^{kij} b_{ij} for an antisymmetric 3×3 array.
inline Eigen::Vector3d dual3(const Eigen::Matrix3d& b) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out(k) += 0.5 * levi_civita(k, i, j) * b(i, j);
  return out;
}

/// b^{ij} = ε^{ij}_k Ω^k.
inline Eigen::Matrix3d dual3_inverse(const Eigen::Vector3d& omega) {
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) b(i, j) += levi_civita(i, j, k) * omega(k);
  return b;
}

namespace detail {
inline void require_euclidean3(const Metric& g, const char* what) {
  if (g.dim() != 3) throw UnsupportedDimension(std::string(what) + " is only defined in three dimensions");
  if (g.g() != MatrixXd::Identity(3, 3)) {
    throw UnsupportedDimension(std::string(what) + " needs the euclidean3 metric");
  }
}
}  // namespace detail

inline Eigen::Vector3d dual3(const Metric& g, const MatrixXd& b) {
  detail::require_euclidean3(g, "dual3");
  if (b.rows() != 3 || b.cols() != 3) throw ShapeError("dual3 needs a 3x3 array");
  return dual3(Eigen::Matrix3d(b));
}

inline Eigen::Matrix3d dual3_inverse(const Metric& g, const Eigen::Vector3d& omega) {
  detail::require_euclidean3(g, "dual3_inverse");
  return dual3_inverse(omega);
}

// --- contravariant bases ---------------------------------------------------

/// Contravariant companion of a standard basis: e^α = g^{αβ} e_β, e^5 = e_5.
struct ContravariantFrame {
  /// Columns: e^A expressed in the original basis e_B.
  MatrixXd in_own_basis;
  /// Rows: the dual forms õ_A expressed in the original dual forms õ^B
  /// (õ_α = õ^β g_{βα}, õ_5 = õ^5).
  MatrixXd dual_forms;
  /// Only for P-bases: columns p^A expressed in the O-basis e_B at the
  /// frame anchor, p^α = e^α + x^α e^5, p^5 = e^5.
  MatrixXd in_o_basis;
};

inline ContravariantFrame contravariant_frame(const Frame& f) {
  const Metric& g = f.metric;
  const int n = g.dim();
  ContravariantFrame out;
  out.in_own_basis = MatrixXd::Identity(n + 1, n + 1);
  out.in_own_basis.topLeftCorner(n, n) = g.g_inv();
  out.dual_forms = MatrixXd::Identity(n + 1, n + 1);
  out.dual_forms.topLeftCorner(n, n) = g.g();
  if (f.kind == BasisKind::p_basis) {
    out.in_o_basis = out.in_own_basis;
    out.in_o_basis.row(n).head(n) = f.anchor.transpose();
  }
  return out;
}

}  // namespace fivevec
