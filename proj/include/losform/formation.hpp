/**
 * @file formation.hpp
 * @brief Formation topology: nodes, undirected edges, the reference
 *        assignment for each edge, fixed inertial positions, and the derived
 *        measurement and communication sets.
 *
 * Node indices are 0-based internally; file formats and printed labels use
 * 1-based ids.
 */
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "losform/so3.hpp"

namespace losform {

/// (observer, target, reference): the observer controls its relative
/// attitude toward the target, using the reference craft's line of sight to
/// resolve the rotation about the target direction.
struct AssignmentTriple {
  int observer;
  int target;
  int reference;
  bool operator==(const AssignmentTriple&) const = default;
};

struct ValidationIssue {
  std::string code;     // short machine-readable tag
  std::string message;  // human-readable description
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return errors.empty(); }
};

/// Per node: sorted list of target node indices whose line of sight the node
/// measures.
struct MeasurementSet {
  std::map<int, std::vector<int>> targets;
};

/// Per directed pair (from, to): LOS labels transferred, each label being the
/// directed pair (observer, observed) of the measurement.
struct CommunicationSet {
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> labels;
};

class FormationSpec {
 public:
  /// Edges may be given in either or both directions; they are canonicalized
  /// internally. The assignment map is keyed by canonical (min,max) pairs.
  FormationSpec(int node_count,
                std::vector<std::pair<int, int>> edges,
                std::map<std::pair<int, int>, int> assignment,
                std::vector<Vec3> positions);

  int node_count() const { return node_count_; }

  /// Canonical undirected edges, each as (min, max), sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  bool has_edge(int i, int j) const;

  /// rho(i, j); throws std::invalid_argument if the edge has no assignment.
  int reference_of(int i, int j) const;

  const std::vector<Vec3>& positions() const { return positions_; }

  /// Unit vector from node i toward node j in the inertial frame.
  /// Throws for coincident positions.
  UnitVector direction(int i, int j) const;

  /// s_ij x s_ik
  Vec3 direction_cross(int i, int j, int k) const;

  /// One triple per directed edge, ordered by (observer, target).
  /// Throws std::invalid_argument if any edge lacks an assignment.
  std::vector<AssignmentTriple> assignment_set() const;

  /// Nodes with at least one edge, in path order. Empty if the edge-covered
  /// subgraph is not a simple path. Deterministic: starts at the smaller
  /// endpoint id.
  const std::vector<int>& chain() const { return chain_; }

  bool is_chain_node(int i) const;
  bool is_chain_interior(int i) const;

  /// Checks, in order: edge sanity, assignment completeness and symmetry,
  /// the serial-pairing requirement on edge-covered nodes, and
  /// non-collinearity of every assigned triple. Report-based; never throws.
  ValidationReport validate() const;

 private:
  int node_count_ = 0;
  std::vector<std::pair<int, int>> edges_;            // canonical (min,max), sorted
  std::map<std::pair<int, int>, int> assignment_;     // canonical key -> reference
  std::vector<Vec3> positions_;
  std::vector<int> chain_;                            // empty if not a path
  std::vector<int> degree_;

  void detect_chain();
};

/// Measurement and communication sets implied by the assignment set.
std::pair<MeasurementSet, CommunicationSet> derive_sets(const FormationSpec& spec);

}  // namespace losform
