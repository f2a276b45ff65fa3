#pragma once

#include <array>
#include <string>
#include <vector>

#include "swarmevo/evaluate.hpp"
#include "swarmevo/torus_world.hpp"

namespace swarmevo {

enum class PatternClass {
  Lines,
  Pairs,
  Squares,
  TriangularLattice,
  RandomDispersion,
  Aggregation,
  Clustering,
  LooseGrouping,
  Swirls,
  Unclassified,
};

const char* pattern_name(PatternClass c);
bool pattern_from_name(const std::string& name, PatternClass& out);

inline bool is_grouping(PatternClass c) {
  return c == PatternClass::Aggregation || c == PatternClass::Clustering ||
         c == PatternClass::LooseGrouping;
}
inline bool is_dispersion(PatternClass c) {
  return c == PatternClass::RandomDispersion || c == PatternClass::Squares ||
         c == PatternClass::TriangularLattice;
}

/// Dominant pattern of a final configuration plus the fraction of agents
/// assembled into structures of that pattern.
struct BehaviorLabel {
  PatternClass pattern = PatternClass::Unclassified;
  double quality = 0.0;
};

/// A detected structure: the member agent indices, sorted.
using AgentSet = std::vector<int>;

/// Maximal straight runs of >= 3 contiguous agents whose heading axes lie
/// along the run, with inward-pointing end agents (waived for full-circle
/// runs) and sparse flanks: per side at most half the run length of
/// neighbors, none of them on adjacent cells.
std::vector<AgentSet> detect_lines(const TorusWorld& world);

/// Same rules with exactly two agents, both pointing at each other.
std::vector<AgentSet> detect_pairs(const TorusWorld& world);

/// Connected sets (>= 3) of agents with empty Moore neighborhoods spaced
/// exactly two cells apart along the axes.
std::vector<AgentSet> detect_squares(const TorusWorld& world);

/// Connected diagonal components (>= 3) of agents without von Neumann
/// neighbors whose lattice neighbors sit at (+-1, +-1).
std::vector<AgentSet> detect_triangular_lattices(const TorusWorld& world);

/// Agents with no von Neumann neighbor or at most one Moore neighbor.
AgentSet detect_random_dispersion(const TorusWorld& world);

/// 2x2 blocks of four agents, each pointing at a block neighbor whose
/// heading differs by a quarter turn.
std::vector<AgentSet> detect_swirls(const TorusWorld& world);

/// Grouping detectors. A core agent has >= 6 Moore and >= 3 von Neumann
/// neighbors; a cluster is a core plus its Moore neighbors. Components are
/// taken over Moore adjacency of cluster members:
///   - aggregation: the single cluster component, its cores all mutually
///     Moore-connected;
///   - clustering: all components when two or more exist;
///   - loose grouping: components whose cores split into >= 2 groups that
///     are bridged only by non-core members.
std::vector<AgentSet> detect_aggregation(const TorusWorld& world);
std::vector<AgentSet> detect_clustering(const TorusWorld& world);
std::vector<AgentSet> detect_loose_grouping(const TorusWorld& world);

/// Number of distinct agents covered by structures of one pattern.
int pattern_coverage(const TorusWorld& world, PatternClass pattern);

/// Runs every detector, picks the pattern covering the most agents (ties
/// resolved specific-first: lines, swirls, squares, triangular lattice,
/// pairs, aggregation, clustering, loose grouping, random dispersion) and
/// reports its coverage fraction. A world no detector matches is
/// Unclassified with quality 0.
BehaviorLabel classify(const TorusWorld& world);

/// coverage(pattern) / N for the current world.
double solution_quality(const TorusWorld& world, PatternClass pattern);

/// Fraction of poses in `repair` that exactly match some pose in `initial`
/// (cell and heading, identity-free), over the initial swarm size.
double similarity(const std::vector<Pose>& repair, const std::vector<Pose>& initial, int n);

/// Element-wise mean prediction over all steps and agents of a traced run.
/// Throws std::invalid_argument when the record has no per-step trace.
std::array<double, kSensorCount> mean_predictions(const RunRecord& record);

}  // namespace swarmevo
