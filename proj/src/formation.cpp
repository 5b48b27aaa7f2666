#include "losform/formation.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace losform {

namespace {

std::pair<int, int> canonical(int i, int j) { return {std::min(i, j), std::max(i, j)}; }

std::string node_label(int i) { return std::to_string(i + 1); }

std::string edge_label(int i, int j) { return node_label(i) + "," + node_label(j); }

}  // namespace

FormationSpec::FormationSpec(int node_count,
                             std::vector<std::pair<int, int>> edges,
                             std::map<std::pair<int, int>, int> assignment,
                             std::vector<Vec3> positions)
    : node_count_(node_count), positions_(std::move(positions)) {
  if (node_count_ <= 0) {
    throw std::invalid_argument("FormationSpec: node count must be positive");
  }
  std::set<std::pair<int, int>> canon;
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= node_count_ || j >= node_count_) {
      throw std::invalid_argument("FormationSpec: edge endpoint out of range");
    }
    if (i == j) {
      throw std::invalid_argument("FormationSpec: self-loop edge");
    }
    canon.insert(canonical(i, j));
  }
  edges_.assign(canon.begin(), canon.end());
  for (const auto& [key, ref] : assignment) {
    assignment_[canonical(key.first, key.second)] = ref;
  }
  degree_.assign(node_count_, 0);
  for (const auto& [i, j] : edges_) {
    ++degree_[i];
    ++degree_[j];
  }
  detect_chain();
}

bool FormationSpec::has_edge(int i, int j) const {
  return std::binary_search(edges_.begin(), edges_.end(), canonical(i, j));
}

int FormationSpec::reference_of(int i, int j) const {
  auto it = assignment_.find(canonical(i, j));
  if (it == assignment_.end()) {
    throw std::invalid_argument("FormationSpec: edge (" + edge_label(i, j) +
                                ") has no assigned reference");
  }
  return it->second;
}

UnitVector FormationSpec::direction(int i, int j) const {
  return UnitVector::normalized(positions_.at(j) - positions_.at(i));
}

Vec3 FormationSpec::direction_cross(int i, int j, int k) const {
  return direction(i, j).vec().cross(direction(i, k).vec());
}

std::vector<AssignmentTriple> FormationSpec::assignment_set() const {
  std::vector<AssignmentTriple> triples;
  triples.reserve(2 * edges_.size());
  for (const auto& [i, j] : edges_) {
    const int k = reference_of(i, j);
    triples.push_back({i, j, k});
    triples.push_back({j, i, k});
  }
  std::sort(triples.begin(), triples.end(), [](const auto& a, const auto& b) {
    return std::tie(a.observer, a.target) < std::tie(b.observer, b.target);
  });
  return triples;
}

void FormationSpec::detect_chain() {
  chain_.clear();
  std::vector<int> covered;
  for (int i = 0; i < node_count_; ++i) {
    if (degree_[i] > 0) covered.push_back(i);
  }
  if (covered.empty()) return;

  // A simple path has exactly two degree-1 endpoints and all other covered
  // nodes of degree 2.
  std::vector<int> endpoints;
  for (int i : covered) {
    if (degree_[i] == 1) {
      endpoints.push_back(i);
    } else if (degree_[i] != 2) {
      return;
    }
  }
  if (endpoints.size() != 2) return;

  std::map<int, std::vector<int>> adj;
  for (const auto& [i, j] : edges_) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  int start = std::min(endpoints[0], endpoints[1]);
  std::vector<int> path{start};
  int prev = -1, cur = start;
  while (true) {
    int next = -1;
    for (int nb : adj[cur]) {
      if (nb != prev) {
        next = nb;
        break;
      }
    }
    if (next < 0) break;
    path.push_back(next);
    prev = cur;
    cur = next;
  }
  // Disconnected edge components leave the walk short of the covered count.
  if (path.size() != covered.size()) return;
  chain_ = std::move(path);
}

bool FormationSpec::is_chain_node(int i) const {
  return std::find(chain_.begin(), chain_.end(), i) != chain_.end();
}

bool FormationSpec::is_chain_interior(int i) const {
  if (chain_.size() < 3 || !is_chain_node(i)) return false;
  return i != chain_.front() && i != chain_.back();
}

ValidationReport FormationSpec::validate() const {
  ValidationReport report;
  auto error = [&report](std::string code, std::string msg) {
    report.errors.push_back({std::move(code), std::move(msg)});
  };

  if (edges_.empty()) {
    error("no-edges", "formation has no controlled edges");
  }

  if (static_cast<int>(positions_.size()) != node_count_) {
    error("positions", "position count does not match node count");
    return report;
  }

  for (const auto& [i, j] : edges_) {
    if (!assignment_.count({i, j})) {
      error("assignment-missing", "edge (" + edge_label(i, j) + ") has no assigned reference");
      continue;
    }
    const int k = assignment_.at({i, j});
    if (k < 0 || k >= node_count_) {
      error("assignment-range", "reference for edge (" + edge_label(i, j) + ") out of range");
    } else if (k == i || k == j) {
      error("assignment-degenerate",
            "reference for edge (" + edge_label(i, j) + ") coincides with an endpoint");
    }
  }

  if (!edges_.empty() && chain_.empty()) {
    error("not-a-chain", "controlled edges do not form a serial chain");
  }

  // Distinct positions, then the non-collinearity requirement per triple.
  for (int i = 0; i < node_count_; ++i) {
    for (int j = i + 1; j < node_count_; ++j) {
      if ((positions_[i] - positions_[j]).norm() < 1e-9) {
        error("coincident-positions",
              "nodes " + node_label(i) + " and " + node_label(j) + " share a position");
      }
    }
  }
  if (!report.errors.empty()) return report;

  for (const auto& [key, k] : assignment_) {
    const auto [i, j] = key;
    if (!has_edge(i, j)) continue;
    const Vec3 cross = direction(i, k).vec().cross(direction(j, k).vec());
    if (cross.norm() <= kCollinearityTol) {
      error("collinear-triple", "reference " + node_label(k) + " is collinear with edge (" +
                                    edge_label(i, j) + ")");
    }
  }
  return report;
}

std::pair<MeasurementSet, CommunicationSet> derive_sets(const FormationSpec& spec) {
  MeasurementSet meas;
  CommunicationSet comm;
  for (const auto& triple : spec.assignment_set()) {
    auto& targets = meas.targets[triple.observer];
    targets.push_back(triple.target);
    targets.push_back(triple.reference);
  }
  for (auto& [node, targets] : meas.targets) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  }
  for (const auto& [i, j] : spec.edges()) {
    const int k = spec.reference_of(i, j);
    comm.labels[{i, j}] = {{i, j}, {i, k}};
    comm.labels[{j, i}] = {{j, i}, {j, k}};
  }
  return {std::move(meas), std::move(comm)};
}

}  // namespace losform
