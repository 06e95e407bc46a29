#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fivevec/errors.hpp"

namespace fivevec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Flat base metric g of an n-dimensional space (n = 3 or 4) together with
/// the data needed by the extended (n+1)-dimensional algebra.
///
/// The extended index "5" is stored at array position n everywhere in this
/// library.
class Metric {
 public:
  static constexpr double kInverseTolerance = 1e-12;

  Metric(MatrixXd g, double xi = 1.0, std::string name = "custom")
      : g_(std::move(g)), xi_(xi), name_(std::move(name)) {
    if (g_.rows() != g_.cols() || (g_.rows() != 3 && g_.rows() != 4)) {
      throw ConfigError("metric must be a 3x3 or 4x4 matrix");
    }
    if (!g_.allFinite()) throw ConfigError("metric has non-finite entries");
    if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() != 0.0) {
      throw ConfigError("metric must be symmetric");
    }
    if (!(xi_ > 0.0) || !std::isfinite(xi_)) throw ConfigError("xi must be positive");
    Eigen::FullPivLU<MatrixXd> lu(g_);
    if (!lu.isInvertible()) throw ConfigError("metric is singular");
    g_inv_ = lu.inverse();
    const MatrixXd id = MatrixXd::Identity(dim(), dim());
    if ((g_ * g_inv_ - id).cwiseAbs().maxCoeff() > kInverseTolerance) {
      throw ConfigError("metric is too ill-conditioned to invert");
    }
  }

  static Metric euclidean3() { return Metric(MatrixXd::Identity(3, 3), 1.0, "euclidean3"); }

  /// Signature (+,-,-,-).
  static Metric minkowski4() {
    VectorXd d(4);
    d << 1.0, -1.0, -1.0, -1.0;
    return Metric(d.asDiagonal(), 1.0, "minkowski4");
  }

  static Metric from_name(std::string_view name) {
    if (name == "euclidean3") return euclidean3();
    if (name == "minkowski4") return minkowski4();
    throw ConfigError("unknown metric preset '" + std::string(name) + "'");
  }

  int dim() const { return static_cast<int>(g_.rows()); }
  int ext_dim() const { return dim() + 1; }
  /// Array position of the extended "5" slot.
  int fifth() const { return dim(); }

  const MatrixXd& g() const { return g_; }
  const MatrixXd& g_inv() const { return g_inv_; }
  double xi() const { return xi_; }
  const std::string& name() const { return name_; }

  /// block-diag(g, xi). Documentation only; nothing in the algebra uses it.
  MatrixXd h_ext() const {
    MatrixXd h = MatrixXd::Zero(ext_dim(), ext_dim());
    h.topLeftCorner(dim(), dim()) = g_;
    h(dim(), dim()) = xi_;
    return h;
  }

  /// block-diag(g, 0): the degenerate extension used by theta_g and by the
  /// motion generators.
  MatrixXd g_degenerate() const {
    MatrixXd h = MatrixXd::Zero(ext_dim(), ext_dim());
    h.topLeftCorner(dim(), dim()) = g_;
    return h;
  }

  VectorXd lower(const VectorXd& v) const { return g_ * v; }
  VectorXd raise(const VectorXd& v) const { return g_inv_ * v; }

  friend bool operator==(const Metric& a, const Metric& b) {
    return a.g_.rows() == b.g_.rows() && a.g_ == b.g_ && a.xi_ == b.xi_;
  }

 private:
  MatrixXd g_;
  MatrixXd g_inv_;
  double xi_;
  std::string name_;
};

}  // namespace fivevec
