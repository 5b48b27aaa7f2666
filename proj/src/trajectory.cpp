#include "losform/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace losform {

AngleFunction AngleFunction::constant(double value) {
  return AngleFunction(Kind::Constant, 0.0, 0.0, value);
}

AngleFunction AngleFunction::sine(double amplitude, double frequency, double offset) {
  return AngleFunction(Kind::Sin, amplitude, frequency, offset);
}

AngleFunction AngleFunction::cosine(double amplitude, double frequency, double offset) {
  return AngleFunction(Kind::Cos, amplitude, frequency, offset);
}

double AngleFunction::value(double t) const {
  switch (kind_) {
    case Kind::Constant: return offset_;
    case Kind::Sin: return offset_ + amplitude_ * std::sin(frequency_ * t);
    case Kind::Cos: return offset_ + amplitude_ * std::cos(frequency_ * t);
  }
  return offset_;
}

double AngleFunction::rate(double t) const {
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Sin: return amplitude_ * frequency_ * std::cos(frequency_ * t);
    case Kind::Cos: return -amplitude_ * frequency_ * std::sin(frequency_ * t);
  }
  return 0.0;
}

double AngleFunction::accel(double t) const {
  const double w2 = frequency_ * frequency_;
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Sin: return -amplitude_ * w2 * std::sin(frequency_ * t);
    case Kind::Cos: return -amplitude_ * w2 * std::cos(frequency_ * t);
  }
  return 0.0;
}

double AngleFunction::max_abs_value() const {
  if (kind_ == Kind::Constant) return std::abs(offset_);
  return std::abs(offset_) + std::abs(amplitude_);
}

RelativeAttitudeCommand reversed(const RelativeAttitudeCommand& cmd) {
  RelativeAttitudeCommand out;
  out.attitude = cmd.attitude.transpose();
  out.rate = -(cmd.attitude * cmd.rate);
  out.rate_dot = -(cmd.attitude * cmd.rate_dot);
  return out;
}

EulerAngleCommand::EulerAngleCommand(AngleFunction yaw, AngleFunction pitch, AngleFunction roll)
    : yaw_(yaw), pitch_(pitch), roll_(roll) {}

RelativeAttitudeCommand EulerAngleCommand::eval(double t) const {
  const Mat3 gen_z = hat(Vec3::UnitZ());
  const Mat3 gen_y = hat(Vec3::UnitY());
  const Mat3 gen_x = hat(Vec3::UnitX());

  const double y = yaw_.value(t), yd = yaw_.rate(t), ydd = yaw_.accel(t);
  const double p = pitch_.value(t), pd = pitch_.rate(t), pdd = pitch_.accel(t);
  const double r = roll_.value(t), rd = roll_.rate(t), rdd = roll_.accel(t);

  const Mat3 a = rot_z(y), b = rot_y(p), c = rot_x(r);
  const Mat3 a1 = yd * a * gen_z;
  const Mat3 b1 = pd * b * gen_y;
  const Mat3 c1 = rd * c * gen_x;
  const Mat3 a2 = ydd * a * gen_z + yd * yd * a * gen_z * gen_z;
  const Mat3 b2 = pdd * b * gen_y + pd * pd * b * gen_y * gen_y;
  const Mat3 c2 = rdd * c * gen_x + rd * rd * c * gen_x * gen_x;

  RelativeAttitudeCommand out;
  out.attitude = a * b * c;
  const Mat3 q1 = a1 * b * c + a * b1 * c + a * b * c1;
  const Mat3 q2 = a2 * b * c + a * b2 * c + a * b * c2 +
                  2.0 * (a1 * b1 * c + a1 * b * c1 + a * b1 * c1);
  const Mat3 rate_hat = out.attitude.transpose() * q1;
  out.rate = vee(rate_hat);
  out.rate_dot = vee(out.attitude.transpose() * q2 - rate_hat * rate_hat);
  return out;
}

FormationCommands::FormationCommands(std::vector<int> chain, std::vector<Entry> entries)
    : chain_(std::move(chain)), entries_(std::move(entries)) {
  if (chain_.size() < 2 || entries_.size() != chain_.size() - 1) {
    throw std::invalid_argument("FormationCommands: entry count must match chain edges");
  }
  // Aliases must resolve to concrete commands in one hop.
  for (const auto& entry : entries_) {
    if (entry.alias_of >= 0) {
      if (entry.alias_of >= static_cast<int>(entries_.size())) {
        throw std::invalid_argument("FormationCommands: alias out of range");
      }
      if (entries_[entry.alias_of].alias_of >= 0) {
        throw std::invalid_argument("FormationCommands: chained aliases are not supported");
      }
    }
  }
  const int max_node = *std::max_element(chain_.begin(), chain_.end());
  edge_index_of_node_.assign(max_node + 1, -1);
  for (size_t pos = 0; pos < chain_.size(); ++pos) {
    edge_index_of_node_[chain_[pos]] = static_cast<int>(pos);
  }
}

RelativeAttitudeCommand FormationCommands::edge_command(int m, double t) const {
  const Entry& entry = entries_.at(m);
  if (entry.alias_of >= 0) {
    RelativeAttitudeCommand cmd = edge_command(entry.alias_of, t);
    return entry.forward ? cmd : reversed(cmd);
  }
  RelativeAttitudeCommand cmd;
  if (entry.euler) cmd = entry.euler->eval(t);
  if (!entry.forward) cmd = reversed(cmd);
  return cmd;
}

RelativeAttitudeCommand FormationCommands::directed_command(int i, int j, double t) const {
  const int pi = edge_index_of_node_.at(i);
  const int pj = edge_index_of_node_.at(j);
  if (pi < 0 || pj < 0 || std::abs(pi - pj) != 1) {
    throw std::invalid_argument("FormationCommands: not a chain edge");
  }
  const int m = std::min(pi, pj);
  RelativeAttitudeCommand cmd = edge_command(m, t);
  return pi < pj ? cmd : reversed(cmd);
}

DesiredRates::DesiredRates(std::shared_ptr<const FormationCommands> commands, int node_count,
                           int anchor, Mode mode)
    : commands_(std::move(commands)), node_count_(node_count), anchor_(anchor), mode_(mode) {
  const auto& chain = commands_->chain();
  if (mode_ == Mode::SymmetricPair && chain.size() != 2) {
    throw std::invalid_argument("DesiredRates: symmetric split requires a single edge");
  }
  if (mode_ == Mode::Anchor &&
      std::find(chain.begin(), chain.end(), anchor_) == chain.end()) {
    throw std::invalid_argument("DesiredRates: anchor must be a chain node");
  }
}

std::vector<CraftRateCommand> DesiredRates::eval(double t) const {
  std::vector<CraftRateCommand> out(node_count_);
  const auto& chain = commands_->chain();

  if (mode_ == Mode::SymmetricPair) {
    const RelativeAttitudeCommand cmd = commands_->edge_command(0, t);
    out[chain[0]].rate = 0.5 * cmd.rate;
    out[chain[0]].rate_dot = 0.5 * cmd.rate_dot;
    out[chain[1]].rate = -0.5 * (cmd.attitude * cmd.rate);
    out[chain[1]].rate_dot = -0.5 * (cmd.attitude * cmd.rate_dot);
    return out;
  }

  const auto anchor_pos =
      std::find(chain.begin(), chain.end(), anchor_) - chain.begin();

  // Walk outward from the anchor; for edge (i, j) with j already known,
  // Wd_i = Wd_ij + Qd_ji Wd_j and the derivative follows the product rule
  // with d/dt Qd_ji = Qd_ji hat(Wd_ji).
  auto propagate = [&](int i, int j) {
    const RelativeAttitudeCommand rel = commands_->directed_command(i, j, t);
    const Mat3 qd_ji = rel.attitude.transpose();
    const Vec3 rate_ji = -(rel.attitude * rel.rate);
    out[i].rate = rel.rate + qd_ji * out[j].rate;
    out[i].rate_dot = rel.rate_dot + qd_ji * (hat(rate_ji) * out[j].rate) +
                      qd_ji * out[j].rate_dot;
  };
  for (auto pos = anchor_pos; pos-- > 0;) {
    propagate(chain[pos], chain[pos + 1]);
  }
  for (auto pos = anchor_pos + 1; pos < static_cast<long>(chain.size()); ++pos) {
    propagate(chain[pos], chain[pos - 1]);
  }
  return out;
}

double DesiredRates::rate_bound(double horizon, int samples) const {
  double peak = 0.0;
  for (int s = 0; s <= samples; ++s) {
    const double t = horizon * static_cast<double>(s) / static_cast<double>(samples);
    for (const auto& cmd : eval(t)) {
      peak = std::max(peak, cmd.rate.norm());
    }
  }
  return 1.1 * peak;
}

}  // namespace losform
