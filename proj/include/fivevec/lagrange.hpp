#pragma once

#include <functional>
#include <optional>

#include "fivevec/rigid_body.hpp"

namespace fivevec {

/// Positions (m) and velocities (m/s) of N particles at time t (s).
struct StateOfMotion {
  std::vector<Vec3> x;
  std::vector<Vec3> v;
  double t = 0.0;

  std::size_t size() const { return x.size(); }
};

inline void validate(const StateOfMotion& s) {
  if (s.x.size() != s.v.size()) throw ShapeError("state has mismatched position and velocity counts");
  for (std::size_t k = 0; k < s.x.size(); ++k)
    if (!s.x[k].allFinite() || !s.v[k].allFinite()) throw ValidationError("state must be finite");
  if (!std::isfinite(s.t)) throw ValidationError("state time must be finite");
}

inline StateOfMotion state_of(const Body& b, double t = 0.0) {
  StateOfMotion s;
  s.t = t;
  for (const auto& p : b.particles) {
    s.x.push_back(p.x);
    s.v.push_back(p.v);
  }
  return s;
}

/// Lagrange function with an optional analytic position gradient ∂L/∂x_ℓ.
struct LagrangianFn {
  std::function<double(const StateOfMotion&)> evaluate;
  std::function<std::vector<Vec3>(const StateOfMotion&)> gradient;

  double operator()(const StateOfMotion& s) const { return evaluate(s); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// L = Σ ½ m v² − U for a conservative force specification.
inline LagrangianFn lagrangian_preset(const ForceSpec& spec, std::vector<double> masses) {
  for (double m : masses)
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("particle mass must be positive");
  auto check = [n = masses.size()](const StateOfMotion& s) {
    if (s.size() != n) throw ShapeError("state particle count does not match the Lagrangian");
  };
  LagrangianFn out;
  out.evaluate = [spec, masses, check](const StateOfMotion& s) {
    check(s);
    double t = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) t += 0.5 * masses[k] * s.v[k].squaredNorm();
    return t - potential_energy(spec, masses, s.x);
  };
  out.gradient = [spec, masses, check](const StateOfMotion& s) {
    check(s);
    return conservative_forces(spec, masses, s.x);
  };
  return out;
}

inline LagrangianFn without_gradient(LagrangianFn l) {
  l.gradient = nullptr;
  return l;
}

inline constexpr double kRelativeGradientStep = 1e-5;

/// Central differences with step 1e-5·max(1, |x|) per coordinate.
inline std::vector<Vec3> numeric_gradient(const LagrangianFn& l, const StateOfMotion& s) {
  std::vector<Vec3> grad(s.size(), Vec3::Zero());
  StateOfMotion probe = s;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double h = kRelativeGradientStep * std::max(1.0, s.x[k].norm());
    for (int i = 0; i < 3; ++i) {
      const double keep = probe.x[k](i);
      probe.x[k](i) = keep + h;
      const double up = l(probe);
      probe.x[k](i) = keep - h;
      const double down = l(probe);
      probe.x[k](i) = keep;
      grad[k](i) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

inline std::vector<Vec3> position_gradient(const LagrangianFn& l, const StateOfMotion& s) {
  return l.has_gradient() ? l.gradient(s) : numeric_gradient(l, s);
}

/// Image of a state under a Euclidean motion: x ↦ L x + a, v ↦ L v.
inline StateOfMotion transform_state(const StateOfMotion& s, const MotionParams& motion) {
  validate(motion, Metric::euclidean3());
  validate(s);
  const Eigen::Matrix3d l = motion.L;
  const Vec3 a = motion.a;
  StateOfMotion out = s;
  for (std::size_t k = 0; k < s.size(); ++k) {
    out.x[k] = l * s.x[k] + a;
    out.v[k] = l * s.v[k];
  }
  return out;
}

inline constexpr double kDefaultFamilyStep = 1e-5;

/// Derivative of L along the family of motions generated by `family`:
/// d/ds L(Π_s⁻¹{𝒞}) at s = 0, Π_s the finite motion of the family at
/// parameter s. Central difference with step h.
inline double dh_L(const LagrangianFn& l, const StateOfMotion& s, const InfinitesimalMotion& family,
                   double h = kDefaultFamilyStep) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("family step must be positive");
  const Metric g = Metric::euclidean3();
  auto pulled = [&](double param) {
    const AffineMap phi = exp_motion(family, g, -param).point_map();
    return l(transform_state(s, MotionParams{phi.linear, phi.offset}));
  };
  return (pulled(h) - pulled(-h)) / (2.0 * h);
}

/// D L in the P-basis of the chart y = Q x + b:
///   (D L)_{i5} = Σ_ℓ ∂L/∂y^i_ℓ,  (D L)_{ij} = Σ_ℓ (y_j ∂L/∂y^i − y_i ∂L/∂y^j)_ℓ.
/// Only position gradients enter.
inline ExtTensor dl_form(const LagrangianFn& l, const StateOfMotion& s,
                         const MotionParams& chart = MotionParams::identity(3)) {
  validate(s);
  validate(chart, Metric::euclidean3());
  const std::vector<Vec3> grad = position_gradient(l, s);
  if (grad.size() != s.size()) throw ContractViolation("gradient has the wrong particle count");
  const Eigen::Matrix3d q = chart.L;
  // ∂L/∂y = Q^{-T} ∂L/∂x
  const Eigen::Matrix3d qinv_t = q.inverse().transpose();
  ExtTensor out(Frame::p_basis(Metric::euclidean3()), 0, 2);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Vec3 y = q * s.x[k] + Vec3(chart.a);
    const Vec3 gy = qinv_t * grad[k];
    for (int i = 0; i < 3; ++i) {
      out(i, 3) += gy(i);
      out(3, i) -= gy(i);
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        out(i, j) += y(j) * gy(i) - y(i) * gy(j);
      }
    }
  }
  return out;
}

/// ⟨D L, 𝓐⟩ = Σ_{A<B} (D L)_{AB} 𝓐^{AB}.
inline double pair_contract(const ExtTensor& form, const ExtTensor& bivector) {
  const int d = form.ext_dim();
  double sum = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) sum += form(a, b) * bivector(a, b);
  return sum;
}

/// max |D L + K^tot| with both sides in the O-basis at o.
inline double k_identity_check(const LagrangianFn& l, const Body& b, const StateOfMotion& s, const Vec3& o) {
  if (b.particles.size() != s.size()) throw ShapeError("body and state have different particle counts");
  const ExtTensor dl = to_o_basis(dl_form(l, s), to_vectorxd(o));
  return (dl + force_tensor(b, o)).max_abs();
}

}  // namespace fivevec
