#pragma once

#include <algorithm>
#include <functional>

#include "fivevec/rigid_body.hpp"

namespace fivevec {

/// Kinetic plus potential energy of a body under a conservative force spec.
inline double total_energy(const Body& b, const ForceSpec& spec) {
  std::vector<double> m;
  std::vector<Vec3> x;
  for (const auto& p : b.particles) {
    m.push_back(p.m);
    x.push_back(p.x);
  }
  return kinetic_energy_of(b) + potential_energy(spec, m, x);
}

struct SimulationSummary {
  double dt = 0.0;
  std::size_t steps = 0;
  /// max |E(t) − E(0)| / max(1, |E(0)|)
  double energy_drift = 0.0;
  /// max |M(t) − M(0)| / max(1, |M(0)|), componentwise max over the 2-form
  double momentum_drift = 0.0;
  /// max over steps of |ΔM/dt − K(midpoint)|
  double balance_max_residual = 0.0;
  /// True when the forces are internal, so M must be conserved.
  bool conserves_momentum = false;
};

using StepObserver = std::function<void(double t, const Body& b)>;

/// RK4 trajectory with the momentum-balance check at every step. The
/// observer sees the initial state and every subsequent step.
inline SimulationSummary simulate(Body b, const ForceSpec& spec, double dt, std::size_t steps, const Vec3& o,
                                  const StepObserver& observer = nullptr) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive");
  validate(b);
  SimulationSummary s;
  s.dt = dt;
  s.steps = steps;
  s.conserves_momentum = spec.is_internal();
  const double e0 = total_energy(b, spec);
  const ExtTensor m0 = momentum_tensor(b, o);
  const double escale = std::max(1.0, std::abs(e0));
  const double mscale = std::max(1.0, m0.max_abs());
  ExtTensor m_prev = m0;
  double t = 0.0;
  if (observer) observer(t, b);
  for (std::size_t k = 0; k < steps; ++k) {
    const Body next = step_dynamics(b, dt);
    const ExtTensor m_next = momentum_tensor(next, o);
    const ExtTensor rate = (m_next - m_prev) * (1.0 / dt);
    const ExtTensor k_mid = force_tensor(step_dynamics(b, 0.5 * dt), o);
    s.balance_max_residual = std::max(s.balance_max_residual, max_abs_diff(rate, k_mid));
    b = next;
    m_prev = m_next;
    t = static_cast<double>(k + 1) * dt;
    s.energy_drift = std::max(s.energy_drift, std::abs(total_energy(b, spec) - e0) / escale);
    s.momentum_drift = std::max(s.momentum_drift, max_abs_diff(m_next, m0) / mscale);
    if (observer) observer(t, b);
  }
  return s;
}

struct OrderStudy {
  std::vector<double> dts;
  std::vector<double> residuals;
  /// residual / dt²
  std::vector<double> constants;
  /// smallest log-log slope between consecutive step sizes
  double observed_order = 0.0;
  /// max C / min C
  double constant_spread = 0.0;
};

/// Momentum-balance residual max |ΔM/dt − K(mid)| over a fixed horizon for several dt.
inline OrderStudy momentum_balance_order(const Body& b, const ForceSpec& spec, const Vec3& o, double horizon,
                                         const std::vector<double>& dts) {
  if (dts.size() < 2) throw ValidationError("order study needs at least two step sizes");
  OrderStudy out;
  for (double dt : dts) {
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    const SimulationSummary s = simulate(b, spec, dt, steps, o);
    out.dts.push_back(dt);
    out.residuals.push_back(s.balance_max_residual);
    out.constants.push_back(s.balance_max_residual / (dt * dt));
  }
  out.observed_order = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < dts.size(); ++k) {
    const double slope = std::log(out.residuals[k - 1] / out.residuals[k]) / std::log(dts[k - 1] / dts[k]);
    out.observed_order = std::min(out.observed_order, slope);
  }
  const auto [lo, hi] = std::minmax_element(out.constants.begin(), out.constants.end());
  out.constant_spread = *hi / *lo;
  return out;
}

}  // namespace fivevec
