#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fivevec/errors.hpp"
#include "fivevec/metric.hpp"

namespace fivevec {

/// Multivariate polynomial in n coordinates, sparse map exponent → coefficient.
/// Zero coefficients are never stored, so equality is exact term comparison.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int nvars = 0) : n_(nvars) {
    if (nvars < 0) throw ShapeError("negative variable count");
  }

  static Polynomial constant(int nvars, double c) {
    Polynomial p(nvars);
    p.add_term(Exponents(static_cast<std::size_t>(nvars), 0), c);
    return p;
  }

  /// The coordinate function x^i.
  static Polynomial coordinate(int nvars, int i) {
    Polynomial p(nvars);
    Exponents e(static_cast<std::size_t>(nvars), 0);
    e.at(static_cast<std::size_t>(i)) = 1;
    p.add_term(e, 1.0);
    return p;
  }

  static Polynomial monomial(const Exponents& e, double c = 1.0) {
    Polynomial p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
  }

  int nvars() const { return n_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  void add_term(const Exponents& e, double c) {
    if (static_cast<int>(e.size()) != n_) throw ShapeError("exponent vector has wrong length");
    for (int k : e)
      if (k < 0) throw ValidationError("negative exponent");
    if (!std::isfinite(c)) throw ValidationError("polynomial coefficient must be finite");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
  }

  Polynomial derivative(int i) const {
    if (i < 0 || i >= n_) throw ShapeError("derivative variable out of range");
    Polynomial out(n_);
    for (const auto& [e, c] : terms_) {
      const int k = e[static_cast<std::size_t>(i)];
      if (k == 0) continue;
      Exponents d = e;
      d[static_cast<std::size_t>(i)] = k - 1;
      out.add_term(d, c * k);
    }
    return out;
  }

  double operator()(const VectorXd& x) const {
    if (x.size() != n_) throw ShapeError("evaluation point has wrong dimension");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
      double term = c;
      for (int k = 0; k < n_; ++k) term *= std::pow(x(k), e[static_cast<std::size_t>(k)]);
      sum += term;
    }
    return sum;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same(b);
    Polynomial out(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea.size());
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

  /// Largest coefficient difference; 0 exactly when the polynomials are equal.
  friend double max_coeff_diff(const Polynomial& a, const Polynomial& b) {
    const Polynomial d = a - b;
    double m = 0.0;
    for (const auto& [e, c] : d.terms_) m = std::max(m, std::abs(c));
    return m;
  }

  /// p(M x + b).
  Polynomial compose_affine(const MatrixXd& m, const VectorXd& b) const {
    if (m.rows() != n_ || m.cols() != n_ || b.size() != n_) throw ShapeError("affine substitution has wrong shape");
    std::vector<Polynomial> sub;
    for (int i = 0; i < n_; ++i) {
      Polynomial s = constant(n_, b(i));
      for (int j = 0; j < n_; ++j) s += coordinate(n_, j) * m(i, j);
      sub.push_back(std::move(s));
    }
    Polynomial out(n_);
    for (const auto& [e, c] : terms_) {
      Polynomial term = constant(n_, c);
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) term = term * sub[static_cast<std::size_t>(i)];
      out += term;
    }
    return out;
  }

 private:
  void require_same(const Polynomial& o) const {
    if (o.n_ != n_) throw ShapeError("polynomials in different numbers of variables");
  }

  int n_;
  std::map<Exponents, double> terms_;
};

enum class FieldKind { scalar, vector };

/// Scalar field (one component) or vector field (n components in the
/// Lorentz/Cartesian basis of its chart) with polynomial components.
struct PolyField {
  FieldKind kind = FieldKind::scalar;
  std::vector<Polynomial> comps;
  std::string chart = "lorentz";

  static PolyField scalar(Polynomial p, std::string chart = "lorentz") {
    return {FieldKind::scalar, {std::move(p)}, std::move(chart)};
  }
  static PolyField vector(std::vector<Polynomial> u, std::string chart = "lorentz") {
    if (u.empty()) throw ShapeError("vector field needs components");
    const int n = u.front().nvars();
    if (static_cast<int>(u.size()) != n) throw ShapeError("vector field needs one component per coordinate");
    for (const auto& c : u)
      if (c.nvars() != n) throw ShapeError("vector field components in different numbers of variables");
    return {FieldKind::vector, std::move(u), std::move(chart)};
  }
  /// Constant Lorentz basis field E_α.
  static PolyField basis_field(int n, int alpha) {
    std::vector<Polynomial> u;
    for (int k = 0; k < n; ++k) u.push_back(Polynomial::constant(n, k == alpha ? 1.0 : 0.0));
    return vector(std::move(u));
  }

  int nvars() const { return comps.empty() ? 0 : comps.front().nvars(); }
  int size() const { return static_cast<int>(comps.size()); }

  VectorXd operator()(const VectorXd& x) const {
    VectorXd out(size());
    for (int k = 0; k < size(); ++k) out(k) = comps[static_cast<std::size_t>(k)](x);
    return out;
  }

  PolyField& operator+=(const PolyField& o) {
    require_compatible(o);
    for (std::size_t k = 0; k < comps.size(); ++k) comps[k] += o.comps[k];
    return *this;
  }
  friend PolyField operator+(PolyField a, const PolyField& b) { return a += b; }
  friend PolyField operator*(PolyField a, double s) {
    for (auto& c : a.comps) c *= s;
    return a;
  }
  friend PolyField operator*(double s, PolyField a) { return std::move(a) * s; }
  friend PolyField operator-(const PolyField& a, const PolyField& b) { return a + b * -1.0; }

  /// Scalar times field.
  friend PolyField operator*(const Polynomial& f, PolyField a) {
    for (auto& c : a.comps) c = f * c;
    return a;
  }

  friend bool operator==(const PolyField& a, const PolyField& b) { return a.kind == b.kind && a.comps == b.comps; }

  friend double max_coeff_diff(const PolyField& a, const PolyField& b) {
    a.require_compatible(b);
    double m = 0.0;
    for (std::size_t k = 0; k < a.comps.size(); ++k) m = std::max(m, max_coeff_diff(a.comps[k], b.comps[k]));
    return m;
  }

  void require_compatible(const PolyField& o) const {
    if (kind != o.kind || comps.size() != o.comps.size() || nvars() != o.nvars()) {
      throw ShapeError("incompatible polynomial fields");
    }
  }
};

}  // namespace fivevec
