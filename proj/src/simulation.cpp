#include "losform/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace losform {

namespace {

// Healthy means finite and still on (or renormalizable to) the rotation
// manifold; rk4_step leaves attitudes unprojected when they have drifted past
// the projection precondition.
bool healthy(const std::vector<SpacecraftState>& states) {
  for (const auto& s : states) {
    if (!s.attitude.allFinite() || !s.omega.allFinite()) return false;
    if (rotation_drift(s.attitude) > kProjectionDriftLimit) return false;
  }
  return true;
}

std::string edge_key(int i, int j) { return std::to_string(i + 1) + std::to_string(j + 1); }

}  // namespace

StateDerivative rigid_body_derivative(const std::vector<SpacecraftState>& states,
                                      const std::vector<Mat3>& inertia_inverse,
                                      const std::vector<Vec3>& moments) {
  StateDerivative d;
  d.attitude_dot.resize(states.size());
  d.omega_dot.resize(states.size());
  for (size_t i = 0; i < states.size(); ++i) {
    const Vec3& w = states[i].omega;
    d.attitude_dot[i] = states[i].attitude * hat(w);
    d.omega_dot[i] = inertia_inverse[i] * (moments[i] - w.cross(states[i].inertia * w));
  }
  return d;
}

Vec3 attitude_error_vector(const Mat3& q, const Mat3& qd) {
  return 0.5 * vee(qd.transpose() * q - q.transpose() * qd);
}

ClosedLoopSimulation::ClosedLoopSimulation(const Scenario& scenario)
    : scenario_(scenario), setup_(build_setup(scenario)) {
  inertias_.reserve(setup_.initial_states.size());
  inertia_inverse_.reserve(setup_.initial_states.size());
  for (const auto& s : setup_.initial_states) {
    inertias_.push_back(s.inertia);
    inertia_inverse_.push_back(s.inertia.inverse());
  }
  const auto feasible = find_feasible_coupling(*setup_.spec, setup_.controller->gains(),
                                               inertias_, setup_.rate_bound, setup_.psi_cap);
  certificate_feasible_ = feasible.has_value();
  coupling_ = feasible.value_or(0.0);
}

StateDerivative ClosedLoopSimulation::closed_loop_derivative(
    double t, const std::vector<SpacecraftState>& states) const {
  const ControlSnapshot snap = setup_.controller->evaluate(t, states);
  return rigid_body_derivative(states, inertia_inverse_, snap.moment);
}

std::vector<SpacecraftState> ClosedLoopSimulation::step(
    double t, double h, const std::vector<SpacecraftState>& states) const {
  return rk4_step(
      [this](double tt, const std::vector<SpacecraftState>& ss) {
        return closed_loop_derivative(tt, ss);
      },
      t, h, states);
}

TelemetryRecord ClosedLoopSimulation::observe(double t,
                                              const std::vector<SpacecraftState>& states) const {
  const auto& chain = setup_.spec->chain();
  const int edges = static_cast<int>(chain.size()) - 1;
  const ControlSnapshot snap = setup_.controller->evaluate(t, states);

  TelemetryRecord rec;
  rec.t = t;
  rec.psi.resize(edges);
  rec.attitude_error.resize(edges);
  rec.e_norm.resize(edges);
  std::vector<double> psi(edges);
  std::vector<Vec3> e_fwd(edges), e_bwd(edges);
  for (int m = 0; m < edges; ++m) {
    const int i = chain[m], j = chain[m + 1];
    rec.psi[m] = snap.forward[m].psi;
    const Mat3 q = relative_attitude(states[i], states[j]);
    rec.attitude_error[m] = attitude_error_vector(q, snap.commanded[m]);
    rec.e_norm[m] = snap.forward[m].e.norm();
    psi[m] = snap.forward[m].psi;
    e_fwd[m] = snap.forward[m].e;
    e_bwd[m] = snap.backward_e[m];
  }
  rec.rate_error = snap.rate_error;
  rec.moment = snap.moment;

  const EnergySample energy =
      lyapunov_values(psi, e_fwd, e_bwd, snap.rate_error, inertias_, chain, coupling_);
  rec.energy = energy.energy;
  rec.lyapunov = energy.lyapunov;

  rec.rotation_drift_max = 0.0;
  for (const auto& s : states) {
    rec.rotation_drift_max = std::max(rec.rotation_drift_max, rotation_drift(s.attitude));
  }
  return rec;
}

RunResult ClosedLoopSimulation::run() const {
  const double h = scenario_.time_step;
  const long total_steps = std::lround(scenario_.horizon / h);
  if (total_steps < 1) {
    throw std::invalid_argument("run: horizon shorter than one step");
  }
  const long decimate = scenario_.output_decimation;

  RunResult result;
  result.summary.rate_bound = setup_.rate_bound;
  result.summary.coupling_used = coupling_;
  result.summary.certificate_feasible = certificate_feasible_;

  std::vector<SpacecraftState> states = setup_.initial_states;
  TelemetryRecord rec = observe(0.0, states);
  result.records.push_back(rec);
  double previous_energy = rec.energy;
  result.summary.max_rotation_drift = rec.rotation_drift_max;

  const auto& chain = setup_.spec->chain();
  const int edges = static_cast<int>(chain.size()) - 1;

  for (long k = 0; k < total_steps; ++k) {
    const double t = h * static_cast<double>(k);
    states = step(t, h, states);
    const double t_next = h * static_cast<double>(k + 1);

    if (!healthy(states)) {
      result.summary.status = "diverged";
      result.summary.final_time = t;
      break;
    }

    // Per-step audits run on every step even when the record is decimated
    // away: energy monotonicity and the cached-scale comparison.
    rec = observe(t_next, states);
    if (rec.energy > previous_energy + result.summary.energy_step_tolerance) {
      ++result.summary.energy_violation_count;
    }
    previous_energy = rec.energy;
    result.summary.max_rotation_drift =
        std::max(result.summary.max_rotation_drift, rec.rotation_drift_max);
    for (int m = 0; m < edges; ++m) {
      const double cached = setup_.controller->edge_scales()[m];
      const double gap = std::abs(setup_.controller->live_scale(m, states) - cached);
      result.summary.scale_audit_max = std::max(result.summary.scale_audit_max, gap);
      if (gap > 1e-9 * std::max(1.0, cached)) {
        throw std::logic_error("coplanarity scale drifted from its cached value");
      }
    }

    if ((k + 1) % decimate == 0 || k + 1 == total_steps) {
      result.records.push_back(rec);
    }
    result.summary.final_time = t_next;
    result.summary.steps = k + 1;
  }

  const TelemetryRecord& last = result.records.back();
  for (int m = 0; m < edges; ++m) {
    result.summary.final_psi[edge_key(chain[m], chain[m + 1])] = last.psi[m];
  }
  result.summary.records = static_cast<long>(result.records.size());
  return result;
}

}  // namespace losform
