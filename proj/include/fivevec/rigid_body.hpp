#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fivevec/forces.hpp"
#include "fivevec/motion.hpp"

namespace fivevec {

// Rigid-body mechanics over euclidean3 in the (3+1)-tensor language.
// Extended index 3 plays the role of "5". Units are SI by convention.

struct Body {
  std::vector<Particle> particles;
  ForceModel external_force;

  std::vector<Vec3> forces() const {
    if (!external_force) return std::vector<Vec3>(particles.size(), Vec3::Zero());
    auto f = external_force(particles);
    if (f.size() != particles.size()) throw ContractViolation("force model returned the wrong number of forces");
    return f;
  }

  double total_mass() const {
    double m = 0.0;
    for (const auto& p : particles) m += p.m;
    return m;
  }
};

inline void validate(const Body& b) {
  if (b.particles.empty()) throw ValidationError("body has no particles");
  for (const auto& p : b.particles) validate(p);
}

inline VectorXd to_vectorxd(const Vec3& v) { return VectorXd(v); }

inline Frame o_frame_at(const Vec3& at) { return Frame::o_basis(Metric::euclidean3(), to_vectorxd(at)); }

inline Vec3 anchor3(const ExtTensor& t) { return Vec3(t.frame().anchor); }

// --- velocity bivector ---------------------------------------------------

/// W^{5i} = −W^{i5} = V^i,  W^{ij} = ε^{ij}_k Ω^k, in the O-basis at `at`.
inline ExtTensor w_from_frame_motion(const Vec3& velocity, const Vec3& omega, const Vec3& at) {
  ExtTensor w(o_frame_at(at), 2, 0);
  const Eigen::Matrix3d rot = dual3_inverse(omega);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) w(i, j) = rot(i, j);
    w(3, i) = velocity(i);
    w(i, 3) = -velocity(i);
  }
  return w;
}

inline ExtTensor w_from_frame_motion(const Metric& g, const Vec3& velocity, const Vec3& omega, const Vec3& at) {
  detail::require_euclidean3(g, "velocity bivector");
  return w_from_frame_motion(velocity, omega, at);
}

/// (V, Ω) of a velocity bivector at its anchor.
inline std::pair<Vec3, Vec3> frame_motion(const ExtTensor& w) {
  detail::require_euclidean3(w.metric(), "velocity bivector");
  if (w.contravariant_rank() != 2 || w.covariant_rank() != 0) throw ShapeError("velocity bivector is rank (2,0)");
  require_antisymmetric(w);
  const MatrixXd m = w.as_matrix();
  Vec3 v;
  for (int i = 0; i < 3; ++i) v(i) = m(3, i);
  return {v, dual3(Eigen::Matrix3d(m.topLeftCorner(3, 3)))};
}

/// (V', Ω') of the same rigid motion seen from `to`, obtained by parallel
/// transport of W and unpacking.
inline std::pair<Vec3, Vec3> transfer_velocity(const ExtTensor& w, const Vec3& to) {
  return frame_motion(transport_tensor(w, to_vectorxd(to)));
}

/// Rates (ω, a) of the covariantly constant bivector W, in the P-basis.
inline InfinitesimalMotion rates_of(const ExtTensor& w) { return infinitesimal_from_r(to_p_basis(w)); }

// --- inertia -------------------------------------------------------------

/// Rank-(0,4) inertia tensor with I_{ΓΔΘΣ} = I_{ΘΣΓΔ} = −I_{ΔΓΘΣ} = −I_{ΓΔΣΘ}.
/// Stored as a symmetric matrix over index pairs (Γ < Δ), so the symmetry
/// relations hold by construction.
class InertiaExtTensor {
 public:
  explicit InertiaExtTensor(Frame frame)
      : frame_(std::move(frame)), pairs_(bivector_pairs(frame_.ext_dim())) {
    pair_matrix_ = MatrixXd::Zero(static_cast<Eigen::Index>(pairs_.size()), static_cast<Eigen::Index>(pairs_.size()));
  }

  const Frame& frame() const { return frame_; }
  const MatrixXd& pair_matrix() const { return pair_matrix_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  /// Pair index and sign of (a, b); sign 0 when a == b.
  std::pair<int, int> pair_of(int a, int b) const {
    if (a == b) return {0, 0};
    const int lo = std::min(a, b), hi = std::max(a, b);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      if (pairs_[k].first == lo && pairs_[k].second == hi) return {static_cast<int>(k), a < b ? 1 : -1};
    }
    throw ShapeError("index pair out of range");
  }

  double operator()(int g, int d, int t, int s) const {
    const auto [p1, s1] = pair_of(g, d);
    const auto [p2, s2] = pair_of(t, s);
    if (s1 == 0 || s2 == 0) return 0.0;
    return s1 * s2 * pair_matrix_(p1, p2);
  }

  /// Sets I_{ΓΔΘΣ} and every component related to it by the symmetries.
  void set(int g, int d, int t, int s, double value) {
    const auto [p1, s1] = pair_of(g, d);
    const auto [p2, s2] = pair_of(t, s);
    if (s1 == 0 || s2 == 0) throw ValidationError("diagonal index pair of an antisymmetric slot");
    pair_matrix_(p1, p2) = s1 * s2 * value;
    pair_matrix_(p2, p1) = s1 * s2 * value;
  }

  ExtTensor full() const {
    ExtTensor t(frame_, 0, 4);
    const int d = frame_.ext_dim();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) t(a, b, c, e) = (*this)(a, b, c, e);
    return t;
  }

  /// Packs a rank-(0,4) tensor, reading only the (Γ<Δ, Θ<Σ, pair ≤ pair) slots.
  static InertiaExtTensor from_full(const ExtTensor& t) {
    if (t.contravariant_rank() != 0 || t.covariant_rank() != 4) throw ShapeError("inertia tensor is rank (0,4)");
    InertiaExtTensor out(t.frame());
    const auto& pr = out.pairs_;
    for (std::size_t p = 0; p < pr.size(); ++p)
      for (std::size_t q = p; q < pr.size(); ++q) {
        const double v = t(pr[p].first, pr[p].second, pr[q].first, pr[q].second);
        out.pair_matrix_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
        out.pair_matrix_(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = v;
      }
    return out;
  }

  InertiaExtTensor& operator+=(const InertiaExtTensor& o) {
    if (!same_basis(frame_, o.frame_)) throw ContractViolation("adding inertia tensors at different points");
    pair_matrix_ += o.pair_matrix_;
    return *this;
  }

  /// Bivector components W^{ΓΔ}, Γ < Δ, in pair order.
  VectorXd pair_components(const ExtTensor& w) const {
    VectorXd out(static_cast<Eigen::Index>(pairs_.size()));
    for (std::size_t k = 0; k < pairs_.size(); ++k) out(static_cast<Eigen::Index>(k)) = w(pairs_[k].first, pairs_[k].second);
    return out;
  }

 private:
  Frame frame_;
  std::vector<std::pair<int, int>> pairs_;
  MatrixXd pair_matrix_;
};

inline InertiaExtTensor transport_inertia(const InertiaExtTensor& inertia, const Vec3& to) {
  return InertiaExtTensor::from_full(transport_tensor(inertia.full(), to_vectorxd(to)));
}

/// Single particle at its own location: I_{5i5j} = −I_{i55j} = −I_{5ij5} = I_{i5j5} = m δ_ij,
/// everything else zero.
inline InertiaExtTensor particle_inertia(const Particle& p) {
  validate(p);
  InertiaExtTensor out(o_frame_at(p.x));
  for (int i = 0; i < 3; ++i) out.set(3, i, 3, i, p.m);
  return out;
}

/// Σ of particle inertias transported to o.
inline InertiaExtTensor body_inertia_at(const Body& b, const Vec3& o) {
  validate(b);
  InertiaExtTensor total(o_frame_at(o));
  for (const auto& p : b.particles) total += transport_inertia(particle_inertia(p), o);
  return total;
}

/// Inertia matrix about the anchor: I_mn = I_{ijkl} ε^{|ij|}_m ε^{|kl|}_n.
inline Eigen::Matrix3d dualized_inertia(const InertiaExtTensor& inertia) {
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = k + 1; l < 3; ++l)
              out(m, n) += inertia(i, j, k, l) * levi_civita(i, j, m) * levi_civita(k, l, n);
  return out;
}

/// Mixed block C_il = I_{5ijk} ε^{|jk|}_l, equal to Σ m ε_il^j x_j.
inline Eigen::Matrix3d dualized_cross_block(const InertiaExtTensor& inertia) {
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l)
      for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k) out(i, l) += inertia(3, i, j, k) * levi_civita(j, k, l);
  return out;
}

/// E = ½ I_{ΓΔΘΣ} W^{|ΓΔ|} W^{|ΘΣ|}.
inline double kinetic_energy(const InertiaExtTensor& inertia, const ExtTensor& w) {
  if (!same_basis(inertia.frame(), w.frame())) throw ContractViolation("inertia and velocity bivector at different points");
  require_antisymmetric(w);
  const VectorXd wp = inertia.pair_components(w);
  return 0.5 * wp.dot(inertia.pair_matrix() * wp);
}

/// M_{ΓΔ} = I_{ΓΔΘΞ} W^{|ΘΞ|}.
inline ExtTensor contract_inertia(const InertiaExtTensor& inertia, const ExtTensor& w) {
  if (!same_basis(inertia.frame(), w.frame())) throw ContractViolation("inertia and velocity bivector at different points");
  const VectorXd mp = inertia.pair_matrix() * inertia.pair_components(w);
  ExtTensor out(inertia.frame(), 0, 2);
  const auto& pr = inertia.pairs();
  for (std::size_t k = 0; k < pr.size(); ++k) {
    out(pr[k].first, pr[k].second) = mp(static_cast<Eigen::Index>(k));
    out(pr[k].second, pr[k].first) = -mp(static_cast<Eigen::Index>(k));
  }
  return out;
}

// --- momentum and force tensors --------------------------------------------

/// Antisymmetric 2-form with X_{5i} = −X_{i5} = c_i, X_{ij} = 0 at `at`.
inline ExtTensor local_translation_form(const Vec3& c, const Vec3& at) {
  ExtTensor out(o_frame_at(at), 0, 2);
  for (int i = 0; i < 3; ++i) {
    out(3, i) = c(i);
    out(i, 3) = -c(i);
  }
  return out;
}

/// M_{5i} = m v_i, M_{ij} = 0 at the particle.
inline ExtTensor particle_momentum(const Particle& p) { return local_translation_form(p.m * p.v, p.x); }

/// Per-particle momentum tensors transported to o and summed.
inline ExtTensor momentum_tensor(const Body& b, const Vec3& o) {
  validate(b);
  ExtTensor total(o_frame_at(o), 0, 2);
  for (const auto& p : b.particles) total += transport_tensor(particle_momentum(p), to_vectorxd(o));
  return total;
}

/// (P, M) with P^i = M_{5i} and M^i = ½ ε^{ijk} M_{jk}; the tensor itself
/// corresponds to the pair (−P, M).
inline std::pair<Vec3, Vec3> momentum_pair(const ExtTensor& m) {
  detail::require_euclidean3(m.metric(), "momentum pair");
  if (m.contravariant_rank() != 0 || m.covariant_rank() != 2) throw ShapeError("expected a rank-(0,2) tensor");
  Vec3 p;
  Eigen::Matrix3d block;
  for (int i = 0; i < 3; ++i) {
    p(i) = m(3, i);
    for (int j = 0; j < 3; ++j) block(i, j) = m(i, j);
  }
  return {p, dual3(block)};
}

inline constexpr double kRigidityTolerance = 1e-9;

/// Largest relative rate of change of a pairwise distance.
inline double rigidity_defect(const Body& b) {
  double vscale = 0.0;
  for (const auto& p : b.particles) vscale = std::max(vscale, p.v.norm());
  vscale = std::max(vscale, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.particles.size(); ++i)
    for (std::size_t j = i + 1; j < b.particles.size(); ++j) {
      const Vec3 dx = b.particles[i].x - b.particles[j].x;
      const double r = dx.norm();
      if (r == 0.0) continue;
      const double rate = dx.dot(b.particles[i].v - b.particles[j].v) / r;
      worst = std::max(worst, std::abs(rate) / vscale);
    }
  return worst;
}

/// Least-squares (V, Ω) at o with v_p = V + Ω × (x_p − o). Minimum-norm Ω
/// when the particles are collinear.
inline std::pair<Vec3, Vec3> fit_rigid_motion(const Body& b, const Vec3& o) {
  const auto n = static_cast<Eigen::Index>(b.particles.size());
  MatrixXd a = MatrixXd::Zero(3 * n, 6);
  VectorXd rhs(3 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Particle& p = b.particles[static_cast<std::size_t>(k)];
    const Vec3 r = p.x - o;
    a.block(3 * k, 0, 3, 3) = Eigen::Matrix3d::Identity();
    // Ω × r = −[r]× Ω
    Eigen::Matrix3d rx;
    rx << 0, -r.z(), r.y(), r.z(), 0, -r.x(), -r.y(), r.x(), 0;
    a.block(3 * k, 3, 3, 3) = -rx;
    rhs.segment(3 * k, 3) = p.v;
  }
  const VectorXd sol = a.completeOrthogonalDecomposition().solve(rhs);
  return {sol.head<3>(), sol.tail<3>()};
}

/// Momentum tensor of a rigid state from body_inertia_at(o) contracted with
/// the velocity bivector at o.
inline ExtTensor momentum_tensor_rigid(const Body& b, const Vec3& o) {
  validate(b);
  const double defect = rigidity_defect(b);
  if (defect > kRigidityTolerance) {
    throw ContractViolation("state is not rigid (pairwise distance rate " + std::to_string(defect) + ")");
  }
  const auto [vel, omega] = fit_rigid_motion(b, o);
  return contract_inertia(body_inertia_at(b, o), w_from_frame_motion(vel, omega, o));
}

/// Per-particle K (K_{5i} = F_i, K_{ij} = 0 locally) transported to o and summed.
inline ExtTensor force_tensor(const Body& b, const Vec3& o) {
  validate(b);
  const auto f = b.forces();
  ExtTensor total(o_frame_at(o), 0, 2);
  for (std::size_t k = 0; k < b.particles.size(); ++k) {
    total += transport_tensor(local_translation_form(f[k], b.particles[k].x), to_vectorxd(o));
  }
  return total;
}

inline double kinetic_energy_of(const Body& b) {
  double e = 0.0;
  for (const auto& p : b.particles) e += 0.5 * p.m * p.v.squaredNorm();
  return e;
}

// --- dynamics --------------------------------------------------------------

/// One classical RK4 step of the Newtonian per-particle equations.
inline Body step_dynamics(const Body& b, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive");
  validate(b);
  const std::size_t n = b.particles.size();
  struct Deriv {
    std::vector<Vec3> dx, dv;
  };
  auto eval = [&](const Body& s) {
    Deriv d;
    const auto f = s.forces();
    d.dx.resize(n);
    d.dv.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      d.dx[i] = s.particles[i].v;
      d.dv[i] = f[i] / s.particles[i].m;
    }
    return d;
  };
  auto advance = [&](const Deriv& d, double h) {
    Body s = b;
    for (std::size_t i = 0; i < n; ++i) {
      s.particles[i].x += h * d.dx[i];
      s.particles[i].v += h * d.dv[i];
    }
    return s;
  };
  const Deriv k1 = eval(b);
  const Deriv k2 = eval(advance(k1, 0.5 * dt));
  const Deriv k3 = eval(advance(k2, 0.5 * dt));
  const Deriv k4 = eval(advance(k3, dt));
  Body out = b;
  for (std::size_t i = 0; i < n; ++i) {
    out.particles[i].x += dt / 6.0 * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
    out.particles[i].v += dt / 6.0 * (k1.dv[i] + 2.0 * k2.dv[i] + 2.0 * k3.dv[i] + k4.dv[i]);
  }
  return out;
}

/// Discrete check of dM/dt = K over one step: max |(M(t+dt) − M(t))/dt − K(t + dt/2)|,
/// with the midpoint state from an RK4 half step.
inline double momentum_balance_residual(const Body& before, const Body& after, double dt, const Vec3& o) {
  const ExtTensor rate = (momentum_tensor(after, o) - momentum_tensor(before, o)) * (1.0 / dt);
  const ExtTensor k_mid = force_tensor(step_dynamics(before, 0.5 * dt), o);
  return max_abs_diff(rate, k_mid);
}

}  // namespace fivevec
