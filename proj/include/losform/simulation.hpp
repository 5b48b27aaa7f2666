/**
 * @file simulation.hpp
 * @brief Fixed-step propagation of the multi-craft closed loop: classical
 *        4th-order integration with control re-evaluated at every stage,
 *        per-step attitude renormalization, and telemetry capture.
 */
#pragma once

#include <string>
#include <vector>

#include "losform/certificates.hpp"
#include "losform/scenario.hpp"

namespace losform {

struct StateDerivative {
  std::vector<Mat3> attitude_dot;
  std::vector<Vec3> omega_dot;
};

namespace detail {

inline std::vector<SpacecraftState> advance(const std::vector<SpacecraftState>& states,
                                            const StateDerivative& k, double scale) {
  std::vector<SpacecraftState> out = states;
  for (size_t i = 0; i < states.size(); ++i) {
    out[i].attitude += scale * k.attitude_dot[i];
    out[i].omega += scale * k.omega_dot[i];
  }
  return out;
}

}  // namespace detail

/// One classical RK4 step of (R_i, Omega_i) for all crafts simultaneously.
/// The derivative callable f(t, states) -> StateDerivative is re-evaluated at
/// each stage from the stage states. Attitudes are renormalized once after
/// the full step (not per stage) when renormalize is set.
template <class F>
std::vector<SpacecraftState> rk4_step(F&& deriv, double t, double h,
                                      const std::vector<SpacecraftState>& states,
                                      bool renormalize = true) {
  const StateDerivative k1 = deriv(t, states);
  const StateDerivative k2 = deriv(t + 0.5 * h, detail::advance(states, k1, 0.5 * h));
  const StateDerivative k3 = deriv(t + 0.5 * h, detail::advance(states, k2, 0.5 * h));
  const StateDerivative k4 = deriv(t + h, detail::advance(states, k3, h));

  std::vector<SpacecraftState> out = states;
  for (size_t i = 0; i < states.size(); ++i) {
    out[i].attitude += (h / 6.0) * (k1.attitude_dot[i] + 2.0 * k2.attitude_dot[i] +
                                    2.0 * k3.attitude_dot[i] + k4.attitude_dot[i]);
    out[i].omega += (h / 6.0) * (k1.omega_dot[i] + 2.0 * k2.omega_dot[i] +
                                 2.0 * k3.omega_dot[i] + k4.omega_dot[i]);
    // A diverging attitude is left as-is for the caller's health check.
    if (renormalize && out[i].attitude.allFinite() &&
        rotation_drift(out[i].attitude) <= kProjectionDriftLimit) {
      out[i].attitude = reorthonormalize(out[i].attitude).matrix();
    }
  }
  return out;
}

/// Rigid-body derivative under the given moments:
/// dR/dt = R hat(Omega), J dOmega/dt = u - Omega x J Omega.
StateDerivative rigid_body_derivative(const std::vector<SpacecraftState>& states,
                                      const std::vector<Mat3>& inertia_inverse,
                                      const std::vector<Vec3>& moments);

struct TelemetryRecord {
  double t = 0.0;
  std::vector<double> psi;             // per chain edge
  std::vector<Vec3> attitude_error;    // e_Q per chain edge
  std::vector<double> e_norm;          // per chain edge
  std::vector<Vec3> rate_error;        // per craft
  std::vector<Vec3> moment;            // per craft
  double energy = 0.0;                 // U
  double lyapunov = 0.0;               // V
  double rotation_drift_max = 0.0;     // max_i ||R_i^T R_i - I||_F
};

struct RunSummary {
  std::string status = "ok";  // "ok" | "diverged"
  double final_time = 0.0;
  long steps = 0;
  long records = 0;
  std::map<std::string, double> final_psi;  // per chain edge, keyed "12", "23", ...
  double max_rotation_drift = 0.0;
  long energy_violation_count = 0;          // steps where U rose above tolerance
  double energy_step_tolerance = 1e-6;
  double coupling_used = 0.0;               // cross-term constant for the V column
  bool certificate_feasible = false;
  double rate_bound = 0.0;
  double scale_audit_max = 0.0;             // worst live-vs-cached coplanarity scale gap
};

struct RunResult {
  std::vector<TelemetryRecord> records;
  RunSummary summary;
};

/// Relative attitude error vector 0.5 * (Qd^T Q - Q^T Qd)^vee.
Vec3 attitude_error_vector(const Mat3& q, const Mat3& qd);

class ClosedLoopSimulation {
 public:
  /// Builds the full setup; throws std::invalid_argument on invalid scenarios.
  explicit ClosedLoopSimulation(const Scenario& scenario);

  const SimulationSetup& setup() const { return setup_; }
  const Scenario& scenario() const { return scenario_; }

  /// One closed-loop step from (t, states).
  std::vector<SpacecraftState> step(double t, double h,
                                    const std::vector<SpacecraftState>& states) const;

  /// Telemetry values at (t, states) without advancing.
  TelemetryRecord observe(double t, const std::vector<SpacecraftState>& states) const;

  /// Full deterministic run per the scenario's step, horizon, and decimation.
  /// Non-finite states abort with status "diverged", keeping the last good
  /// record.
  RunResult run() const;

  double coupling() const { return coupling_; }
  bool certificate_feasible() const { return certificate_feasible_; }

 private:
  StateDerivative closed_loop_derivative(double t,
                                         const std::vector<SpacecraftState>& states) const;

  Scenario scenario_;
  SimulationSetup setup_;
  std::vector<Mat3> inertia_inverse_;
  std::vector<Mat3> inertias_;
  double coupling_ = 0.0;
  bool certificate_feasible_ = false;
};

}  // namespace losform
