#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fivevec/errors.hpp"

namespace fivevec {

using Vec3 = Eigen::Vector3d;

/// Point particle: mass (kg), position (m), velocity (m/s).
struct Particle {
  double m = 1.0;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

inline void validate(const Particle& p) {
  if (!(p.m > 0.0) || !std::isfinite(p.m)) throw ValidationError("particle mass must be positive");
  if (!p.x.allFinite() || !p.v.allFinite()) throw ValidationError("particle state must be finite");
}

/// Force on every particle given the whole particle set. Must be pure.
using ForceModel = std::function<std::vector<Vec3>(std::span<const Particle>)>;

// Conservative force laws. Each knows its potential energy and the exact
// force, so the same description drives both the dynamics and the
// Lagrangian layer.

/// F = −m g ẑ, U = m g z.
struct UniformGravity {
  double g = 9.81;
};

/// Hooke spring between every pair: U = ½ k (|x_i − x_j| − rest)².
struct PairwiseSpring {
  double k = 1.0;
  double rest = 0.0;
};

/// Attraction with U = −k m_i m_j / r between every pair, or, when a centre
/// is given, U = −k m_i / |x_i − c| towards a fixed external centre.
struct InverseSquare {
  double k = 1.0;
  std::optional<Vec3> center;
};

using ForceTerm = std::variant<UniformGravity, PairwiseSpring, InverseSquare>;

/// Superposition of force terms; empty means free particles.
struct ForceSpec {
  std::vector<ForceTerm> terms;

  bool is_free() const { return terms.empty(); }
  /// True if every term is internal (sums to zero force and torque).
  bool is_internal() const {
    for (const auto& t : terms) {
      if (std::holds_alternative<UniformGravity>(t)) return false;
      if (const auto* inv = std::get_if<InverseSquare>(&t); inv && inv->center) return false;
    }
    return true;
  }
};

namespace detail {
inline void check_separation(double r) {
  if (!(r > 0.0)) throw ValidationError("coincident particles in a pairwise force law");
}
}  // namespace detail

inline double potential_energy(const ForceSpec& spec, std::span<const double> masses, std::span<const Vec3> x) {
  double u = 0.0;
  const std::size_t n = x.size();
  for (const auto& term : spec.terms) {
    if (const auto* grav = std::get_if<UniformGravity>(&term)) {
      for (std::size_t i = 0; i < n; ++i) u += masses[i] * grav->g * x[i].z();
    } else if (const auto* spring = std::get_if<PairwiseSpring>(&term)) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double stretch = (x[i] - x[j]).norm() - spring->rest;
          u += 0.5 * spring->k * stretch * stretch;
        }
    } else if (const auto* inv = std::get_if<InverseSquare>(&term)) {
      if (inv->center) {
        for (std::size_t i = 0; i < n; ++i) {
          const double r = (x[i] - *inv->center).norm();
          detail::check_separation(r);
          u -= inv->k * masses[i] / r;
        }
      } else {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) {
            const double r = (x[i] - x[j]).norm();
            detail::check_separation(r);
            u -= inv->k * masses[i] * masses[j] / r;
          }
      }
    }
  }
  return u;
}

/// Exact forces −∂U/∂x_i.
inline std::vector<Vec3> conservative_forces(const ForceSpec& spec, std::span<const double> masses,
                                             std::span<const Vec3> x) {
  const std::size_t n = x.size();
  std::vector<Vec3> f(n, Vec3::Zero());
  for (const auto& term : spec.terms) {
    if (const auto* grav = std::get_if<UniformGravity>(&term)) {
      for (std::size_t i = 0; i < n; ++i) f[i].z() -= masses[i] * grav->g;
    } else if (const auto* spring = std::get_if<PairwiseSpring>(&term)) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const Vec3 d = x[i] - x[j];
          const double r = d.norm();
          detail::check_separation(r);
          const Vec3 fij = -spring->k * (r - spring->rest) * d / r;
          f[i] += fij;
          f[j] -= fij;
        }
    } else if (const auto* inv = std::get_if<InverseSquare>(&term)) {
      if (inv->center) {
        for (std::size_t i = 0; i < n; ++i) {
          const Vec3 d = x[i] - *inv->center;
          const double r = d.norm();
          detail::check_separation(r);
          f[i] -= inv->k * masses[i] * d / (r * r * r);
        }
      } else {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3 d = x[i] - x[j];
            const double r = d.norm();
            detail::check_separation(r);
            const Vec3 fij = -inv->k * masses[i] * masses[j] * d / (r * r * r);
            f[i] += fij;
            f[j] -= fij;
          }
      }
    }
  }
  return f;
}

inline ForceModel make_force_model(ForceSpec spec) {
  return [spec = std::move(spec)](std::span<const Particle> ps) {
    std::vector<double> m;
    std::vector<Vec3> x;
    m.reserve(ps.size());
    x.reserve(ps.size());
    for (const auto& p : ps) {
      m.push_back(p.m);
      x.push_back(p.x);
    }
    return conservative_forces(spec, m, x);
  };
}

}  // namespace fivevec
