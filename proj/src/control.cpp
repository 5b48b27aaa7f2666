#include "losform/control.hpp"

#include <stdexcept>

namespace losform {

void validate_control_gains(const ControlGains& gains, int edge_count, int node_count) {
  if (static_cast<int>(gains.edge.size()) != edge_count) {
    throw std::invalid_argument("ControlGains: per-edge gain count mismatch");
  }
  if (static_cast<int>(gains.k_rate.size()) != node_count) {
    throw std::invalid_argument("ControlGains: per-craft gain count mismatch");
  }
  for (const auto& g : gains.edge) validate_gains(g);
  for (double k : gains.k_rate) {
    if (!(k > 0.0)) {
      throw std::invalid_argument("ControlGains: rate gains must be positive");
    }
  }
}

Vec3 control_moment(const Vec3& error_sum, double k_rate, const Vec3& rate_error,
                    const Mat3& inertia, const CraftRateCommand& desired) {
  return -error_sum - k_rate * rate_error +
         hat(desired.rate) * (inertia * (rate_error + desired.rate)) +
         inertia * desired.rate_dot;
}

FormationController::FormationController(std::shared_ptr<const FormationSpec> spec,
                                         std::shared_ptr<const FormationCommands> commands,
                                         std::shared_ptr<const DesiredRates> rates,
                                         ControlGains gains)
    : spec_(std::move(spec)),
      commands_(std::move(commands)),
      rates_(std::move(rates)),
      gains_(std::make_shared<ControlGains>(std::move(gains))) {
  const auto& chain = commands_->chain();
  if (chain != spec_->chain()) {
    throw std::invalid_argument("FormationController: command chain does not match spec");
  }
  const int edges = static_cast<int>(chain.size()) - 1;
  validate_control_gains(*gains_, edges, spec_->node_count());

  edge_scales_.resize(edges);
  edge_reference_.resize(edges);
  s_forward_.resize(edges);
  s_forward_ref_.resize(edges);
  s_backward_.resize(edges);
  s_backward_ref_.resize(edges);
  for (int m = 0; m < edges; ++m) {
    const int i = chain[m], j = chain[m + 1];
    const int k = spec_->reference_of(i, j);
    edge_reference_[m] = k;
    s_forward_[m] = spec_->direction(i, j).vec();
    s_forward_ref_[m] = spec_->direction(i, k).vec();
    s_backward_[m] = spec_->direction(j, i).vec();
    s_backward_ref_[m] = spec_->direction(j, k).vec();
    edge_scales_[m] = s_forward_[m].cross(s_forward_ref_[m]).norm() *
                      s_backward_[m].cross(s_backward_ref_[m]).norm();
    if (!(edge_scales_[m] > kCollinearityTol)) {
      throw std::invalid_argument("FormationController: collinear triple on a chain edge");
    }
  }
}

double FormationController::live_scale(int m, std::span<const SpacecraftState> states) const {
  const auto& chain = commands_->chain();
  const int i = chain[m], j = chain[m + 1];
  const Mat3 ri_t = states[i].attitude.transpose();
  const Mat3 rj_t = states[j].attitude.transpose();
  const Vec3 b_ij = ri_t * s_forward_[m];
  const Vec3 b_ik = ri_t * s_forward_ref_[m];
  const Vec3 b_ji = rj_t * s_backward_[m];
  const Vec3 b_jk = rj_t * s_backward_ref_[m];
  return b_ij.cross(b_ik).norm() * b_ji.cross(b_jk).norm();
}

ControlSnapshot FormationController::evaluate(double t,
                                              std::span<const SpacecraftState> states) const {
  const auto& chain = commands_->chain();
  const int n = spec_->node_count();
  const int edges = static_cast<int>(chain.size()) - 1;
  if (states.size() != static_cast<size_t>(n)) {
    throw std::invalid_argument("FormationController: state count mismatch");
  }

  ControlSnapshot snap;
  snap.moment.assign(n, Vec3::Zero());
  snap.rate_error.assign(n, Vec3::Zero());
  snap.forward.resize(edges);
  snap.backward_e.resize(edges);
  snap.commanded.resize(edges);

  for (int m = 0; m < edges; ++m) {
    const int i = chain[m], j = chain[m + 1];
    // Exactly the four labels available on this edge: i's own two
    // measurements and the two communicated by j.
    const Mat3 ri_t = states[i].attitude.transpose();
    const Mat3 rj_t = states[j].attitude.transpose();
    EdgeView view;
    view.own_to_partner = ri_t * s_forward_[m];
    view.own_to_reference = ri_t * s_forward_ref_[m];
    view.partner_to_self = rj_t * s_backward_[m];
    view.partner_to_reference = rj_t * s_backward_ref_[m];

    const RelativeAttitudeCommand cmd = commands_->edge_command(m, t);
    snap.commanded[m] = cmd.attitude;
    snap.forward[m] = edge_errors(view, cmd.attitude, gains_->edge[m], edge_scales_[m]);
    snap.backward_e[m] =
        edge_errors(mirrored(view), cmd.attitude.transpose(), gains_->edge[m], edge_scales_[m]).e;
  }

  const std::vector<CraftRateCommand> desired = rates_->eval(t);
  for (int pos = 0; pos < static_cast<int>(chain.size()); ++pos) {
    const int node = chain[pos];
    Vec3 error_sum = Vec3::Zero();
    if (pos == 0) {
      error_sum = snap.forward[0].e;
    } else if (pos == static_cast<int>(chain.size()) - 1) {
      error_sum = snap.backward_e[edges - 1];
    } else {
      error_sum = 0.5 * (snap.backward_e[pos - 1] + snap.forward[pos].e);
    }
    snap.rate_error[node] = states[node].omega - desired[node].rate;
    snap.moment[node] = control_moment(error_sum, gains_->k_rate[node], snap.rate_error[node],
                                       states[node].inertia, desired[node]);
  }
  return snap;
}

}  // namespace losform
