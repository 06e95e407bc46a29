#pragma once

#include <array>

#include "fivevec/motion.hpp"
#include "fivevec/polynomial.hpp"

namespace fivevec {

// Bivector derivative D on polynomial fields of a flat chart with metric g.
// Generators, in the P-basis of the chart (index n is "5"):
//   D_{μ5} f = ∂_μ f,   D_{μν} f = x_ν ∂_μ f − x_μ ∂_ν f   (x_ν = g_νβ x^β),
// and on vector fields additionally (M_μν)^α_β U^β with
//   (M_μν)^α_β = δ^α_ν g_μβ − δ^α_μ g_νβ.
// D_{AB} = −D_{BA}; a general argument acts as Σ_{A<B} arg^{AB} D_{AB}.

using PolyMatrix = std::vector<std::vector<Polynomial>>;

namespace detail {
inline void require_chart_dim(const Metric& g, const PolyField& f) {
  if (f.nvars() != g.dim()) throw ShapeError("field variables do not match the metric dimension");
  if (f.kind == FieldKind::vector && f.size() != g.dim()) throw ShapeError("vector field has wrong component count");
  if (f.kind == FieldKind::scalar && f.size() != 1) throw ShapeError("scalar field must have one component");
}
inline void require_slot(const Metric& g, int a) {
  if (a < 0 || a > g.dim()) throw ShapeError("bivector slot out of range");
}
}  // namespace detail

/// x_ν as a polynomial.
inline Polynomial lowered_coordinate(const Metric& g, int nu) {
  const int n = g.dim();
  Polynomial out(n);
  for (int b = 0; b < n; ++b) out += Polynomial::coordinate(n, b) * g.g()(nu, b);
  return out;
}

/// (M_μν)^α_β on the base indices.
inline MatrixXd lorentz_generator(const Metric& g, int mu, int nu) {
  const int n = g.dim();
  MatrixXd m = MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    m(nu, b) += g.g()(mu, b);
    m(mu, b) -= g.g()(nu, b);
  }
  return m;
}

/// D_{AB} applied to a scalar polynomial.
inline Polynomial d_generator_scalar(const Metric& g, const Polynomial& f, int a, int b) {
  detail::require_slot(g, a);
  detail::require_slot(g, b);
  const int n = g.dim();
  if (f.nvars() != n) throw ShapeError("polynomial variables do not match the metric dimension");
  if (a == b) return Polynomial(n);
  if (b == n) return f.derivative(a);
  if (a == n) return -f.derivative(b);
  return lowered_coordinate(g, b) * f.derivative(a) - lowered_coordinate(g, a) * f.derivative(b);
}

/// D_{AB} applied to a scalar or vector field.
inline PolyField d_generator(const Metric& g, const PolyField& u, int a, int b) {
  detail::require_chart_dim(g, u);
  PolyField out = u;
  for (std::size_t k = 0; k < u.comps.size(); ++k) out.comps[k] = d_generator_scalar(g, u.comps[k], a, b);
  const int n = g.dim();
  if (u.kind == FieldKind::vector && a != b && a != n && b != n) {
    const MatrixXd m = lorentz_generator(g, a, b);
    for (int al = 0; al < n; ++al)
      for (int be = 0; be < n; ++be)
        if (m(al, be) != 0.0) out.comps[static_cast<std::size_t>(al)] += u.comps[static_cast<std::size_t>(be)] * m(al, be);
  }
  return out;
}

/// Σ_{A<B} arg^{AB} D_{AB} u with polynomial coefficients arg^{AB}(x).
inline PolyField d_weighted(const Metric& g, const PolyField& u, const PolyMatrix& arg) {
  detail::require_chart_dim(g, u);
  const int d = g.ext_dim();
  if (static_cast<int>(arg.size()) != d) throw ShapeError("bivector coefficient table has wrong extent");
  PolyField out = u * 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const Polynomial& c = arg[static_cast<std::size_t>(a)].at(static_cast<std::size_t>(b));
      if (c.is_zero()) continue;
      out += c * d_generator(g, u, a, b);
    }
  return out;
}

/// P-basis components of a bivector argument. A pointwise (O-basis) value is
/// converted at its anchor, so the derivative it yields is meaningful there.
inline ExtTensor bivector_arg_p_components(const ExtTensor& arg) {
  if (arg.contravariant_rank() != 2 || arg.covariant_rank() != 0) throw ShapeError("bivector argument must be rank (2,0)");
  require_antisymmetric(arg);
  return to_p_basis(arg);
}

inline PolyField d_field(const PolyField& u, const ExtTensor& arg) {
  const Metric& g = arg.metric();
  const ExtTensor p = bivector_arg_p_components(arg);
  detail::require_chart_dim(g, u);
  PolyField out = u * 0.0;
  const int d = g.ext_dim();
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const double c = p(a, b);
      if (c != 0.0) out += c * d_generator(g, u, a, b);
    }
  return out;
}

inline PolyField d_scalar(const PolyField& f, const ExtTensor& arg) {
  if (f.kind != FieldKind::scalar) throw ShapeError("d_scalar needs a scalar field");
  return d_field(f, arg);
}

inline PolyField d_vector(const PolyField& u, const ExtTensor& arg) {
  if (u.kind != FieldKind::vector) throw ShapeError("d_vector needs a vector field");
  return d_field(u, arg);
}

// --- the derivative as an extended 2-form ------------------------------------

/// comps[A][B] = D_{AB} of the field, P-basis of the chart.
struct DerivativeForm {
  Metric metric;
  FieldKind kind;
  std::vector<std::vector<PolyField>> comps;

  /// ⟨D𝒢, arg⟩ = Σ_{A<B} arg^{AB} D_{AB}𝒢.
  PolyField contract(const ExtTensor& arg) const {
    const ExtTensor p = bivector_arg_p_components(arg);
    const int d = metric.ext_dim();
    PolyField out = comps[0][0];
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        const double c = p(a, b);
        if (c != 0.0) out += c * comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      }
    return out;
  }

  /// Numerical 2-form per field component at x.
  std::vector<ExtTensor> at(const VectorXd& x) const {
    const int d = metric.ext_dim();
    const int ncomp = comps[0][0].size();
    std::vector<ExtTensor> out(static_cast<std::size_t>(ncomp), ExtTensor(Frame::p_basis(metric), 0, 2));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const VectorXd v = comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)](x);
        for (int k = 0; k < ncomp; ++k) out[static_cast<std::size_t>(k)](a, b) = v(k);
      }
    return out;
  }
};

inline DerivativeForm d_form(const Metric& g, const PolyField& u) {
  detail::require_chart_dim(g, u);
  const int d = g.ext_dim();
  DerivativeForm f{g, u.kind, {}};
  f.comps.assign(static_cast<std::size_t>(d), std::vector<PolyField>(static_cast<std::size_t>(d), u * 0.0));
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      PolyField v = d_generator(g, u, a, b);
      f.comps[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v * -1.0;
      f.comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = std::move(v);
    }
  return f;
}

/// The field in the chart y = Q x + b: f'(y) = f(x), U'(y) = Q U(x).
inline PolyField field_in_chart(const PolyField& u, const MotionParams& chart) {
  const MatrixXd qinv = chart.L.inverse();
  PolyField out = u;
  for (auto& c : out.comps) c = c.compose_affine(qinv, -qinv * chart.a);
  if (u.kind == FieldKind::vector) {
    const int n = u.size();
    PolyField mixed = out * 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (chart.L(a, b) != 0.0) mixed.comps[static_cast<std::size_t>(a)] += out.comps[static_cast<std::size_t>(b)] * chart.L(a, b);
    out = std::move(mixed);
  }
  return out;
}

/// Values of the derivative form re-expressed in the chart y = Q x + b:
/// F'_{AB} = F_{ST} C^S_A C^T_B, and vector values also mapped by Q.
inline std::vector<ExtTensor> form_values_in_chart(const std::vector<ExtTensor>& values, const MotionParams& chart) {
  if (values.empty()) return values;
  const Metric& g = values.front().metric();
  const MatrixXd c = chart_change_matrix(chart, g);
  std::vector<MatrixXd> mats;
  for (const auto& v : values) mats.push_back(c.transpose() * v.as_matrix() * c);
  std::vector<ExtTensor> out;
  if (values.size() == 1) {
    out.push_back(ExtTensor::from_matrix(Frame::p_basis(g), mats[0], 0, 2));
    return out;
  }
  const int n = static_cast<int>(values.size());
  for (int a = 0; a < n; ++a) {
    MatrixXd m = MatrixXd::Zero(mats[0].rows(), mats[0].cols());
    for (int b = 0; b < n; ++b) m += chart.L(a, b) * mats[static_cast<std::size_t>(b)];
    out.push_back(ExtTensor::from_matrix(Frame::p_basis(g), m, 0, 2));
  }
  return out;
}

/// Active image of a field under a motion: Π{f}(x) = f(φ⁻¹x) and
/// Π{U}(x) = Λ U(φ⁻¹x), φ the point map of T.
inline PolyField pull_back(const PolyField& u, const MotionTensor& t) {
  detail::require_chart_dim(t.metric(), u);
  const AffineMap inv = t.point_map().inverse();
  PolyField moved = u;
  for (auto& c : moved.comps) c = c.compose_affine(inv.linear, inv.offset);
  if (u.kind == FieldKind::scalar) return moved;
  const MatrixXd lam = t.lambda();
  PolyField out = moved * 0.0;
  const int n = u.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (lam(a, b) != 0.0) out.comps[static_cast<std::size_t>(a)] += moved.comps[static_cast<std::size_t>(b)] * lam(a, b);
  return out;
}

// --- finite-difference characterization -------------------------------------

inline constexpr double kMinPartialStep = 1e-6;

/// The 3^n lattice {−2, 0, 2}^n.
inline std::vector<VectorXd> sample_grid(int n) {
  std::vector<VectorXd> pts;
  int total = 1;
  for (int k = 0; k < n; ++k) total *= 3;
  for (int idx = 0; idx < total; ++idx) {
    VectorXd x(n);
    int r = idx;
    for (int k = 0; k < n; ++k) {
      x(k) = -2.0 + 2.0 * (r % 3);
      r /= 3;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

/// max over the grid of |(Π_{+h} − Π_{−h})/(2h) − D_{AB}𝒢|, where Π_{±h} is
/// the active image under the finite motion generated by R^{AB} = −R^{BA} = ±h.
inline double r_partial_check(const Metric& g, const PolyField& u, int a, int b, double h) {
  detail::require_chart_dim(g, u);
  detail::require_slot(g, a);
  detail::require_slot(g, b);
  if (a == b) throw ValidationError("r_partial_check needs two distinct slots");
  if (!(h >= kMinPartialStep) || !std::isfinite(h)) throw ValidationError("finite-difference step must be at least 1e-6");
  const Frame p = Frame::p_basis(g);
  const InfinitesimalMotion unit = infinitesimal_from_r(unit_bivector(p, a, b));
  const PolyField plus = pull_back(u, exp_motion(unit, g, h));
  const PolyField minus = pull_back(u, exp_motion(unit, g, -h));
  const PolyField exact = d_generator(g, u, a, b);
  double worst = 0.0;
  for (const auto& x : sample_grid(g.dim())) {
    const VectorXd fd = (plus(x) - minus(x)) / (2.0 * h);
    worst = std::max(worst, (fd - exact(x)).cwiseAbs().maxCoeff());
  }
  return worst;
}

// --- connection coefficients ------------------------------------------------

/// Γ^μ_{νAB} with D_{F_A∧F_B} E_ν = E_μ Γ^μ_{νAB}.
class ConnectionTable {
 public:
  explicit ConnectionTable(int n) : n_(n), data_(static_cast<std::size_t>(n * n * (n + 1) * (n + 1)), 0.0) {}

  int dim() const { return n_; }
  double& operator()(int mu, int nu, int a, int b) { return data_[index(mu, nu, a, b)]; }
  double operator()(int mu, int nu, int a, int b) const { return data_[index(mu, nu, a, b)]; }
  const std::vector<double>& data() const { return data_; }

  friend double max_abs_diff(const ConnectionTable& x, const ConnectionTable& y) {
    if (x.n_ != y.n_) throw ShapeError("connection tables of different dimension");
    double m = 0.0;
    for (std::size_t k = 0; k < x.data_.size(); ++k) m = std::max(m, std::abs(x.data_[k] - y.data_[k]));
    return m;
  }

 private:
  std::size_t index(int mu, int nu, int a, int b) const {
    const int d = n_ + 1;
    if (mu < 0 || mu >= n_ || nu < 0 || nu >= n_ || a < 0 || a >= d || b < 0 || b >= d) {
      throw ShapeError("connection index out of range");
    }
    return static_cast<std::size_t>(((mu * n_ + nu) * d + a) * d + b);
  }

  int n_;
  std::vector<double> data_;
};

inline PolyMatrix constant_poly_matrix(int nvars, const MatrixXd& m) {
  PolyMatrix out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(Polynomial::constant(nvars, m(r, c)));
  return out;
}

inline MatrixXd evaluate(const PolyMatrix& m, const VectorXd& x) {
  MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.front().size()));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[r].size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c](x);
  return out;
}

inline PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b) {
  const int nv = a.front().front().nvars();
  PolyMatrix out(a.size(), std::vector<Polynomial>(b.front().size(), Polynomial(nv)));
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < b.front().size(); ++c)
      for (std::size_t k = 0; k < b.size(); ++k) out[r][c] += a[r][k] * b[k][c];
  return out;
}

enum class FiveBasisKind { standard_associated, active_regular };

/// Columns: the five-basis vectors F_A in P-basis components. The
/// standard-associated basis is the P-basis itself; the active-regular one is
/// the O-basis at each point, e_α = p_α − x_α p_5, e_5 = p_5.
inline PolyMatrix five_basis_matrix(const Metric& g, FiveBasisKind kind) {
  const int n = g.dim();
  PolyMatrix k = constant_poly_matrix(n, MatrixXd::Identity(n + 1, n + 1));
  if (kind == FiveBasisKind::active_regular) {
    for (int a = 0; a < n; ++a) k[static_cast<std::size_t>(n)][static_cast<std::size_t>(a)] = -lowered_coordinate(g, a);
  }
  return k;
}

/// Polynomial bivector coefficients of F_A ∧ F_B.
inline PolyMatrix wedge_coefficients(const PolyMatrix& five, int a, int b) {
  const std::size_t d = five.size();
  const int nv = five.front().front().nvars();
  PolyMatrix arg(d, std::vector<Polynomial>(d, Polynomial(nv)));
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t e = 0; e < d; ++e)
      arg[c][e] = five[c][static_cast<std::size_t>(a)] * five[e][static_cast<std::size_t>(b)] -
                  five[e][static_cast<std::size_t>(a)] * five[c][static_cast<std::size_t>(b)];
  return arg;
}

/// Direct route: apply D_{F_A∧F_B} to each basis field E_ν = e_μ Λ^μ_ν(x)
/// and expand the result in the E_μ at x.
inline ConnectionTable connection_coeffs(const Metric& g, const PolyMatrix& four_basis, const PolyMatrix& five_basis,
                                         const VectorXd& x) {
  const int n = g.dim();
  const MatrixXd lam = evaluate(four_basis, x);
  Eigen::FullPivLU<MatrixXd> lu(lam);
  if (!lu.isInvertible()) throw ValidationError("four-basis is singular at the evaluation point");
  const MatrixXd lam_inv = lu.inverse();
  std::vector<PolyField> fields;
  for (int nu = 0; nu < n; ++nu) {
    std::vector<Polynomial> col;
    for (int mu = 0; mu < n; ++mu) col.push_back(four_basis[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)]);
    fields.push_back(PolyField::vector(std::move(col)));
  }
  ConnectionTable out(n);
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      const PolyMatrix arg = wedge_coefficients(five_basis, a, b);
      for (int nu = 0; nu < n; ++nu) {
        const VectorXd gamma = lam_inv * d_weighted(g, fields[static_cast<std::size_t>(nu)], arg)(x);
        for (int mu = 0; mu < n; ++mu) {
          out(mu, nu, a, b) = gamma(mu);
          out(mu, nu, b, a) = -gamma(mu);
        }
      }
    }
  return out;
}

/// Transformation law for a change of bases E'_ν = E_μ Λ^μ_ν(x),
/// F'_A = F_S L^S_A(x):
///   Γ'^ρ_{νAB} = (Λ⁻¹)^ρ_κ [Γ^κ_{μST} Λ^μ_ν + D_{ST} Λ^κ_ν] L^S_A L^T_B,
/// where D_{ST} differentiates along the old five-basis `old_five`.
inline ConnectionTable transform_connection(const Metric& g, const ConnectionTable& old, const PolyMatrix& old_five,
                                            const PolyMatrix& lambda, const PolyMatrix& five_change, const VectorXd& x) {
  const int n = g.dim();
  const int d = n + 1;
  const MatrixXd lam = evaluate(lambda, x);
  Eigen::FullPivLU<MatrixXd> lu(lam);
  if (!lu.isInvertible()) throw ValidationError("four-basis change is singular at the evaluation point");
  const MatrixXd lam_inv = lu.inverse();
  const MatrixXd l5 = evaluate(five_change, x);

  // D_{ST} Λ^κ_ν at x for every old five-basis pair.
  std::vector<MatrixXd> dlam(static_cast<std::size_t>(d * d), MatrixXd::Zero(n, n));
  for (int s = 0; s < d; ++s)
    for (int t = s + 1; t < d; ++t) {
      const PolyMatrix arg = wedge_coefficients(old_five, s, t);
      MatrixXd m(n, n);
      for (int k = 0; k < n; ++k)
        for (int nu = 0; nu < n; ++nu) {
          const PolyField comp = PolyField::scalar(lambda[static_cast<std::size_t>(k)][static_cast<std::size_t>(nu)]);
          m(k, nu) = d_weighted(g, comp, arg)(x)(0);
        }
      dlam[static_cast<std::size_t>(s * d + t)] = m;
      dlam[static_cast<std::size_t>(t * d + s)] = -m;
    }

  ConnectionTable out(n);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      MatrixXd acc = MatrixXd::Zero(n, n);
      for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t) {
          const double w = l5(s, a) * l5(t, b);
          if (w == 0.0 || s == t) continue;
          MatrixXd gam(n, n);
          for (int k = 0; k < n; ++k)
            for (int mu = 0; mu < n; ++mu) gam(k, mu) = old(k, mu, s, t);
          acc += w * (gam * lam + dlam[static_cast<std::size_t>(s * d + t)]);
        }
      const MatrixXd res = lam_inv * acc;
      for (int r = 0; r < n; ++r)
        for (int nu = 0; nu < n; ++nu) out(r, nu, a, b) = res(r, nu);
    }
  return out;
}

/// Γ of the (Lorentz, standard-associated) pair: Γ^μ_{να5} = 0,
/// Γ^μ_{ναβ} = (M_αβ)^μ_ν.
inline ConnectionTable lorentz_connection(const Metric& g) {
  const int n = g.dim();
  ConnectionTable out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const MatrixXd m = lorentz_generator(g, a, b);
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) out(mu, nu, a, b) = m(mu, nu);
    }
  return out;
}

}  // namespace fivevec
