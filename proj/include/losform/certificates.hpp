/**
 * @file certificates.hpp
 * @brief Quadratic bounds on the configuration error functions, the 2x2
 *        certificate matrices whose positive definiteness establishes
 *        exponential convergence, the feasible-coupling search, and
 *        region-of-attraction membership checks.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "losform/control.hpp"
#include "losform/error_geometry.hpp"

namespace losform {

/// Constants of the two-sided quadratic bound
///   lower * ||e||^2 <= Psi <= upper * ||e||^2, valid while Psi <= cap.
struct PsiBounds {
  double lower = 0.0;
  double upper = 0.0;
  double cap = 0.0;
};

/// Closed-form bound constants for one edge. Requires 0 < cap < 2*min(gains)
/// and distinct gains; throws std::invalid_argument otherwise.
PsiBounds psi_quadratic_bounds(const EdgeGains& gains, double cap);

/// General bound machinery for error functions of the form
/// 0.5*tr[F(I - P)] with F = diag(f1, f2, f3) >= 0: the coefficients below
/// reproduce psi_quadratic_bounds when f = (2*k_align, 2*k_coplanar, 0).
struct DiagErrorBound {
  double h1, h2, h3, h4, h5;
  double lower_coefficient() const { return h1 / (h2 + h3); }
  double upper_coefficient(double phi) const { return h1 * h4 / (h5 * (h1 - phi)); }
};
DiagErrorBound diagonal_error_bound(double f1, double f2, double f3);

struct CertMatrix {
  std::string name;
  Eigen::Matrix2d value;
  double min_eigenvalue = 0.0;
};

struct Certificate {
  double coupling = 0.0;    // the cross-term constant the matrices were built at
  double rate_bound = 0.0;  // bound on the desired angular velocities
  double cap = 0.0;
  bool feasible = false;    // all matrices positive definite at `coupling`
  bool heuristic = false;   // true for chains longer than three crafts
  std::vector<PsiBounds> edge_bounds;  // per chain edge
  std::vector<CertMatrix> matrices;
};

/// Minimum eigenvalue of a symmetric 2x2 matrix, closed form.
double min_eigenvalue_sym2(const Eigen::Matrix2d& m);

inline constexpr double kPositiveDefiniteTol = 1e-12;

/// Assembles every certificate matrix for the chain at a given coupling
/// constant: the sandwich bounds per directed edge, the decay matrices per
/// craft, and the velocity cross-coupling matrices. For chains of four or
/// more crafts the pattern extends the three-craft construction and the
/// result is marked heuristic.
Certificate build_certificate(const FormationSpec& spec, const ControlGains& gains,
                              const std::vector<Mat3>& inertias, double rate_bound,
                              double coupling, double cap);

/// Largest coupling constant on a logarithmic grid (1e-8..1, 200 points,
/// bisection-refined to 3 significant digits) at which every certificate
/// matrix is positive definite. Empty if none.
std::optional<double> find_feasible_coupling(const FormationSpec& spec,
                                             const ControlGains& gains,
                                             const std::vector<Mat3>& inertias,
                                             double rate_bound, double cap);

struct RoaReport {
  bool member = false;
  double cap = 0.0;
  double psi_total = 0.0;      // sum of Psi over chain edges at t = 0
  double psi_margin = 0.0;     // cap - psi_total
  double velocity_lhs = 0.0;   // weighted sum of lambda_max ||rate error||^2
  double velocity_rhs = 0.0;   // 2 * (cap - psi_total)
  double velocity_margin = 0.0;
};

/// Conservative region-of-attraction membership: the configuration error sum
/// must sit below the cap and the weighted initial kinetic errors must fit in
/// the remaining budget (interior crafts weigh double).
RoaReport check_roa(const std::vector<double>& psi0_per_edge,
                    const std::vector<Vec3>& rate_error0, const std::vector<Mat3>& inertias,
                    const std::vector<int>& chain, double cap);

struct EnergySample {
  double energy = 0.0;    // kinetic rate errors plus configuration errors
  double lyapunov = 0.0;  // energy plus the coupling cross terms
};

/// energy = sum_i w_i/2 * e_rate_i . J_i e_rate_i + sum_edges Psi, with
/// w = 1 at chain endpoints and 2 at interior crafts;
/// lyapunov adds coupling * sum_i e_rate_i . (sum of the craft's own edge
/// error vectors).
EnergySample lyapunov_values(const std::vector<double>& psi_per_edge,
                             const std::vector<Vec3>& e_forward,
                             const std::vector<Vec3>& e_backward,
                             const std::vector<Vec3>& rate_error,
                             const std::vector<Mat3>& inertias, const std::vector<int>& chain,
                             double coupling);

}  // namespace losform
