#include "losform/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace losform {

namespace {

std::string node_label(int i) { return std::to_string(i + 1); }

struct InertiaRange {
  double min_eig;
  double max_eig;
};

InertiaRange inertia_range(const Mat3& inertia) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

}  // namespace

PsiBounds psi_quadratic_bounds(const EdgeGains& gains, double cap) {
  validate_gains(gains);
  const double ka = gains.k_align, kb = gains.k_coplanar;
  const double kmin = std::min(ka, kb);
  if (!(cap > 0.0) || !(cap < 2.0 * kmin)) {
    throw std::invalid_argument("psi_quadratic_bounds: cap must lie in (0, 2*min(gains))");
  }
  PsiBounds out;
  out.cap = cap;
  const double spread = std::max({ka * ka, kb * kb, (ka - kb) * (ka - kb)});
  out.lower = kmin / (2.0 * spread + 2.0 * (ka + kb) * (ka + kb));
  out.upper = kmin * (ka + kb) / (std::min(ka * ka, kb * kb) * (2.0 * kmin - cap));
  return out;
}

DiagErrorBound diagonal_error_bound(double f1, double f2, double f3) {
  DiagErrorBound b{};
  const double p12 = f1 + f2, p23 = f2 + f3, p31 = f3 + f1;
  const double d12 = f1 - f2, d23 = f2 - f3, d31 = f3 - f1;
  b.h1 = std::min({p12, p23, p31});
  b.h2 = std::max({d12 * d12, d23 * d23, d31 * d31});
  b.h3 = std::max({p12 * p12, p23 * p23, p31 * p31});
  b.h4 = std::max({p12, p23, p31});
  b.h5 = std::min({p12 * p12, p23 * p23, p31 * p31});
  return b;
}

double min_eigenvalue_sym2(const Eigen::Matrix2d& m) {
  const double a = m(0, 0), d = m(1, 1), b = 0.5 * (m(0, 1) + m(1, 0));
  const double mean = 0.5 * (a + d);
  const double radius = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return mean - radius;
}

Certificate build_certificate(const FormationSpec& spec, const ControlGains& gains,
                              const std::vector<Mat3>& inertias, double rate_bound,
                              double coupling, double cap) {
  const auto& chain = spec.chain();
  if (chain.size() < 2) {
    throw std::invalid_argument("build_certificate: formation has no chain");
  }
  const int edges = static_cast<int>(chain.size()) - 1;
  validate_control_gains(gains, edges, spec.node_count());

  Certificate cert;
  cert.coupling = coupling;
  cert.rate_bound = rate_bound;
  cert.cap = cap;
  cert.heuristic = chain.size() > 3;

  std::vector<InertiaRange> ranges;
  ranges.reserve(inertias.size());
  for (const auto& inertia : inertias) ranges.push_back(inertia_range(inertia));

  const double c = coupling;
  auto push = [&cert](std::string name, const Eigen::Matrix2d& value) {
    cert.matrices.push_back({std::move(name), value, min_eigenvalue_sym2(value)});
  };

  // Sandwich bounds per directed edge.
  for (int m = 0; m < edges; ++m) {
    cert.edge_bounds.push_back(psi_quadratic_bounds(gains.edge[m], cap));
    const PsiBounds& pb = cert.edge_bounds.back();
    const int fwd[2] = {chain[m], chain[m + 1]};
    for (int side = 0; side < 2; ++side) {
      const int i = fwd[side], j = fwd[1 - side];
      const auto& range = ranges[i];
      Eigen::Matrix2d lower, upper;
      lower << pb.lower, -c, -c, range.min_eig;
      upper << pb.upper, c, c, range.max_eig;
      push("Mlower_" + node_label(i) + node_label(j), 0.5 * lower);
      push("Mupper_" + node_label(i) + node_label(j), 0.5 * upper);
    }
  }

  auto k_bar = [&gains](int m) { return gains.edge[m].sum(); };

  // Decay matrices: endpoints follow the single-edge pattern, interior crafts
  // the averaged-error pattern with both edge gains summed.
  auto endpoint_matrix = [&](int node, int m_edge, int partner) {
    const auto& range = ranges[node];
    const double lam_sum = range.max_eig + range.min_eig;
    const double off = -(c / range.min_eig) * (lam_sum * rate_bound + gains.k_rate[node]);
    Eigen::Matrix2d w;
    w << c / range.max_eig, off, off,
        gains.k_rate[node] - c * k_bar(m_edge) * (1.0 + range.max_eig / range.min_eig);
    push("W_" + node_label(node) + node_label(partner), 0.5 * w);
  };

  auto interior_diag = [&](int pos) {
    const int node = chain[pos];
    const auto& range = ranges[node];
    return 2.0 * gains.k_rate[node] -
           c * (k_bar(pos - 1) + k_bar(pos)) * (2.0 + range.max_eig / range.min_eig);
  };

  if (chain.size() == 2) {
    endpoint_matrix(chain[0], 0, chain[1]);
    endpoint_matrix(chain[1], 0, chain[0]);
    const double kb = k_bar(0);
    const auto& r1 = ranges[chain[0]];
    const auto& r2 = ranges[chain[1]];
    Eigen::Matrix2d y;
    y << gains.k_rate[chain[0]] - c * kb * (1.0 + r1.max_eig / r1.min_eig), -2.0 * c * kb,
        -2.0 * c * kb, gains.k_rate[chain[1]] - c * kb * (1.0 + r2.max_eig / r2.min_eig);
    push("Y_" + node_label(chain[0]) + node_label(chain[1]), 0.5 * y);
    cert.feasible = std::all_of(cert.matrices.begin(), cert.matrices.end(), [](const auto& m) {
      return m.min_eigenvalue > kPositiveDefiniteTol;
    });
    return cert;
  }

  endpoint_matrix(chain.front(), 0, chain[1]);
  endpoint_matrix(chain.back(), edges - 1, chain[chain.size() - 2]);

  for (int pos = 1; pos + 1 < static_cast<int>(chain.size()); ++pos) {
    const int node = chain[pos];
    const auto& range = ranges[node];
    const double lam_sum = range.max_eig + range.min_eig;
    const double off = -(c / range.min_eig) * (lam_sum * rate_bound + gains.k_rate[node]);
    Eigen::Matrix2d w;
    w << c / range.max_eig, off, off, interior_diag(pos);
    push("W_" + node_label(chain[pos - 1]) + node_label(node) + node_label(chain[pos + 1]),
         0.5 * w);

    // Velocity cross-coupling with each neighbor.
    for (int dir = -1; dir <= 1; dir += 2) {
      const int nb_pos = pos + dir;
      const int nb = chain[nb_pos];
      const int shared_edge = dir < 0 ? pos - 1 : pos;
      const int other_edge = dir < 0 ? pos : pos - 1;
      const double off_z = -c * (6.0 * k_bar(shared_edge) + 2.0 * k_bar(other_edge));
      double nb_diag;
      if (nb_pos == 0 || nb_pos == static_cast<int>(chain.size()) - 1) {
        const auto& nb_range = ranges[nb];
        nb_diag = gains.k_rate[nb] -
                  c * k_bar(shared_edge) * (1.0 + nb_range.max_eig / nb_range.min_eig);
      } else {
        nb_diag = interior_diag(nb_pos);
      }
      Eigen::Matrix2d z;
      z << interior_diag(pos), off_z, off_z, nb_diag;
      push("Z_" + node_label(node) + node_label(nb), 0.25 * z);
    }
  }

  cert.feasible = std::all_of(cert.matrices.begin(), cert.matrices.end(), [](const auto& m) {
    return m.min_eigenvalue > kPositiveDefiniteTol;
  });
  return cert;
}

std::optional<double> find_feasible_coupling(const FormationSpec& spec,
                                             const ControlGains& gains,
                                             const std::vector<Mat3>& inertias,
                                             double rate_bound, double cap) {
  auto feasible = [&](double c) {
    return build_certificate(spec, gains, inertias, rate_bound, c, cap).feasible;
  };

  constexpr int kGridPoints = 200;
  constexpr double kLogLow = -8.0, kLogHigh = 0.0;
  int best = -1;
  for (int g = 0; g < kGridPoints; ++g) {
    const double c = std::pow(10.0, kLogLow + (kLogHigh - kLogLow) * g / (kGridPoints - 1));
    if (feasible(c)) best = g;
  }
  if (best < 0) return std::nullopt;

  double lo = std::pow(10.0, kLogLow + (kLogHigh - kLogLow) * best / (kGridPoints - 1));
  if (best == kGridPoints - 1) return lo;
  double hi = std::pow(10.0, kLogLow + (kLogHigh - kLogLow) * (best + 1) / (kGridPoints - 1));
  // Bisect to 3 significant digits; lo stays feasible.
  while ((hi - lo) > 5e-4 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

RoaReport check_roa(const std::vector<double>& psi0_per_edge,
                    const std::vector<Vec3>& rate_error0, const std::vector<Mat3>& inertias,
                    const std::vector<int>& chain, double cap) {
  RoaReport report;
  report.cap = cap;
  for (double psi : psi0_per_edge) report.psi_total += psi;
  report.psi_margin = cap - report.psi_total;

  for (size_t pos = 0; pos < chain.size(); ++pos) {
    const int node = chain[pos];
    const double weight = (pos == 0 || pos + 1 == chain.size()) ? 1.0 : 2.0;
    const double lam_max = inertia_range(inertias[node]).max_eig;
    report.velocity_lhs += weight * lam_max * rate_error0[node].squaredNorm();
  }
  report.velocity_rhs = 2.0 * (cap - report.psi_total);
  report.velocity_margin = report.velocity_rhs - report.velocity_lhs;
  report.member = report.psi_total <= cap && report.velocity_lhs <= report.velocity_rhs;
  return report;
}

EnergySample lyapunov_values(const std::vector<double>& psi_per_edge,
                             const std::vector<Vec3>& e_forward,
                             const std::vector<Vec3>& e_backward,
                             const std::vector<Vec3>& rate_error,
                             const std::vector<Mat3>& inertias, const std::vector<int>& chain,
                             double coupling) {
  EnergySample out;
  for (double psi : psi_per_edge) out.energy += psi;

  double cross = 0.0;
  for (size_t pos = 0; pos < chain.size(); ++pos) {
    const int node = chain[pos];
    const double weight = (pos == 0 || pos + 1 == chain.size()) ? 1.0 : 2.0;
    out.energy += 0.5 * weight * rate_error[node].dot(inertias[node] * rate_error[node]);

    Vec3 own_errors = Vec3::Zero();
    if (pos > 0) own_errors += e_backward[pos - 1];
    if (pos + 1 < chain.size()) own_errors += e_forward[pos];
    cross += rate_error[node].dot(own_errors);
  }
  out.lyapunov = out.energy + coupling * cross;
  return out;
}

}  // namespace losform
