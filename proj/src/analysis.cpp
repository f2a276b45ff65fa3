#include "swarmevo/analysis.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace swarmevo {

namespace {

struct NeighborCounts {
  std::vector<int> moore;
  std::vector<int> von_neumann;
};

NeighborCounts neighbor_counts(const TorusWorld& world) {
  NeighborCounts counts;
  const int n = world.agent_count();
  counts.moore.assign(static_cast<std::size_t>(n), 0);
  counts.von_neumann.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const Pose& p = world.pose(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (!world.occupied(p.x + dx, p.y + dy)) continue;
        ++counts.moore[static_cast<std::size_t>(i)];
        if (dx == 0 || dy == 0) ++counts.von_neumann[static_cast<std::size_t>(i)];
      }
    }
  }
  return counts;
}

bool heading_on_axis(Heading h, bool vertical) {
  const bool ns = h == Heading::North || h == Heading::South;
  return vertical ? ns : !ns;
}

// Shared line/pair scan. A structure is a maximal circular run, along one
// column or row, of agents whose heading axis matches the run axis.
struct StraightRun {
  std::vector<int> agents;  // in run order
  bool vertical;
  bool full_circle;
  int fixed;   // the column (vertical) or row (horizontal)
  int start;   // first coordinate along the axis
};

std::vector<StraightRun> straight_runs(const TorusWorld& world, bool vertical) {
  const int side = world.side_length();
  std::vector<StraightRun> runs;
  for (int fixed = 0; fixed < side; ++fixed) {
    // Agent index per position along the axis, -1 where no axis-aligned agent.
    std::vector<int> member(static_cast<std::size_t>(side), -1);
    int member_count = 0;
    for (int along = 0; along < side; ++along) {
      const int x = vertical ? fixed : along;
      const int y = vertical ? along : fixed;
      const int who = world.occupant(x, y);
      if (who >= 0 && heading_on_axis(world.pose(who).heading, vertical)) {
        member[static_cast<std::size_t>(along)] = who;
        ++member_count;
      }
    }
    if (member_count == 0) continue;
    if (member_count == side) {
      StraightRun run;
      run.vertical = vertical;
      run.full_circle = true;
      run.fixed = fixed;
      run.start = 0;
      for (int along = 0; along < side; ++along) {
        run.agents.push_back(member[static_cast<std::size_t>(along)]);
      }
      runs.push_back(std::move(run));
      continue;
    }
    // Rotate the scan to begin just after a gap, then collect linear runs.
    int first_gap = 0;
    while (member[static_cast<std::size_t>(first_gap)] >= 0) ++first_gap;
    int along = first_gap;
    for (int step = 0; step < side;) {
      const int pos = (first_gap + step) % side;
      if (member[static_cast<std::size_t>(pos)] < 0) {
        ++step;
        continue;
      }
      StraightRun run;
      run.vertical = vertical;
      run.full_circle = false;
      run.fixed = fixed;
      run.start = pos;
      while (step < side && member[static_cast<std::size_t>((first_gap + step) % side)] >= 0) {
        run.agents.push_back(member[static_cast<std::size_t>((first_gap + step) % side)]);
        ++step;
      }
      runs.push_back(std::move(run));
    }
    (void)along;
  }
  return runs;
}

// End agents must point into the run so every intended forward move inside
// the structure stays blocked; a run around the whole torus has no ends.
bool ends_point_inward(const TorusWorld& world, const StraightRun& run) {
  if (run.full_circle) return true;
  const Heading first_want = run.vertical ? Heading::South : Heading::East;
  const Heading last_want = run.vertical ? Heading::North : Heading::West;
  const Pose& first = world.pose(run.agents.front());
  const Pose& last = world.pose(run.agents.back());
  if (run.agents.size() == 1) return false;
  return first.heading == first_want && last.heading == last_want;
}

// Per side at most half the run length of flank neighbors, and no two of
// them on adjacent cells.
bool flanks_sparse(const TorusWorld& world, const StraightRun& run) {
  const int len = static_cast<int>(run.agents.size());
  const int side_len = world.side_length();
  for (int lateral : {-1, 1}) {
    int count = 0;
    std::vector<bool> occ(static_cast<std::size_t>(len), false);
    for (int k = 0; k < len; ++k) {
      const int along = (run.start + k) % side_len;
      const int x = run.vertical ? run.fixed + lateral : along;
      const int y = run.vertical ? along : run.fixed + lateral;
      if (world.occupied(x, y)) {
        occ[static_cast<std::size_t>(k)] = true;
        ++count;
      }
    }
    if (count * 2 > len) return false;
    for (int k = 0; k + 1 < len; ++k) {
      if (occ[static_cast<std::size_t>(k)] && occ[static_cast<std::size_t>(k + 1)]) return false;
    }
    if (run.full_circle && len > 1 && occ.front() && occ.back()) return false;
  }
  return true;
}

std::vector<AgentSet> line_like_structures(const TorusWorld& world, bool pairs) {
  std::vector<AgentSet> found;
  for (bool vertical : {true, false}) {
    for (const StraightRun& run : straight_runs(world, vertical)) {
      const std::size_t want_min = pairs ? 2 : 3;
      if (pairs ? run.agents.size() != 2 : run.agents.size() < want_min) continue;
      if (!ends_point_inward(world, run)) continue;
      if (!flanks_sparse(world, run)) continue;
      AgentSet agents = run.agents;
      std::sort(agents.begin(), agents.end());
      found.push_back(std::move(agents));
    }
  }
  return found;
}

// Union-find over agent indices.
struct DisjointSets {
  std::vector<int> parent;

  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(b)] = a;
  }
};

std::vector<AgentSet> components_of(const std::vector<int>& members, DisjointSets& sets,
                                    std::size_t min_size) {
  std::vector<std::pair<int, int>> root_and_agent;
  root_and_agent.reserve(members.size());
  for (int agent : members) root_and_agent.emplace_back(sets.find(agent), agent);
  std::sort(root_and_agent.begin(), root_and_agent.end());
  std::vector<AgentSet> components;
  for (std::size_t i = 0; i < root_and_agent.size();) {
    std::size_t j = i;
    AgentSet component;
    while (j < root_and_agent.size() && root_and_agent[j].first == root_and_agent[i].first) {
      component.push_back(root_and_agent[j].second);
      ++j;
    }
    if (component.size() >= min_size) {
      std::sort(component.begin(), component.end());
      components.push_back(std::move(component));
    }
    i = j;
  }
  return components;
}

// Grouping analysis shared by aggregation, clustering, and loose grouping.
struct GroupingInfo {
  std::vector<AgentSet> components;      // cluster components (>= 1 core each)
  std::vector<int> core_groups;          // per component: Moore-connected core groups
};

GroupingInfo grouping_info(const TorusWorld& world) {
  const int n = world.agent_count();
  const NeighborCounts counts = neighbor_counts(world);
  std::vector<bool> core(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    core[static_cast<std::size_t>(i)] = counts.moore[static_cast<std::size_t>(i)] >= 6 &&
                                        counts.von_neumann[static_cast<std::size_t>(i)] >= 3;
  }
  // Member = core or Moore neighbor of a core.
  std::vector<bool> member(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)]) continue;
    member[static_cast<std::size_t>(i)] = true;
    const Pose& p = world.pose(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int who = world.occupant(p.x + dx, p.y + dy);
        if (who >= 0) member[static_cast<std::size_t>(who)] = true;
      }
    }
  }

  DisjointSets all(n);
  DisjointSets cores_only(n);
  for (int i = 0; i < n; ++i) {
    if (!member[static_cast<std::size_t>(i)]) continue;
    const Pose& p = world.pose(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int who = world.occupant(p.x + dx, p.y + dy);
        if (who < 0 || !member[static_cast<std::size_t>(who)]) continue;
        all.unite(i, who);
        if (core[static_cast<std::size_t>(i)] && core[static_cast<std::size_t>(who)]) {
          cores_only.unite(i, who);
        }
      }
    }
  }

  std::vector<int> member_list;
  for (int i = 0; i < n; ++i) {
    if (member[static_cast<std::size_t>(i)]) member_list.push_back(i);
  }

  GroupingInfo info;
  for (AgentSet& component : components_of(member_list, all, 1)) {
    bool has_core = false;
    std::set<int> groups;
    for (int agent : component) {
      if (core[static_cast<std::size_t>(agent)]) {
        has_core = true;
        groups.insert(cores_only.find(agent));
      }
    }
    if (!has_core) continue;
    info.core_groups.push_back(static_cast<int>(groups.size()));
    info.components.push_back(std::move(component));
  }
  return info;
}

int coverage_of(const std::vector<AgentSet>& structures) {
  std::set<int> covered;
  for (const AgentSet& s : structures) covered.insert(s.begin(), s.end());
  return static_cast<int>(covered.size());
}

}  // namespace

const char* pattern_name(PatternClass c) {
  switch (c) {
    case PatternClass::Lines: return "lines";
    case PatternClass::Pairs: return "pairs";
    case PatternClass::Squares: return "squares";
    case PatternClass::TriangularLattice: return "triangular_lattice";
    case PatternClass::RandomDispersion: return "random_dispersion";
    case PatternClass::Aggregation: return "aggregation";
    case PatternClass::Clustering: return "clustering";
    case PatternClass::LooseGrouping: return "loose_grouping";
    case PatternClass::Swirls: return "swirls";
    case PatternClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

bool pattern_from_name(const std::string& name, PatternClass& out) {
  for (PatternClass c :
       {PatternClass::Lines, PatternClass::Pairs, PatternClass::Squares,
        PatternClass::TriangularLattice, PatternClass::RandomDispersion, PatternClass::Aggregation,
        PatternClass::Clustering, PatternClass::LooseGrouping, PatternClass::Swirls,
        PatternClass::Unclassified}) {
    if (name == pattern_name(c)) {
      out = c;
      return true;
    }
  }
  return false;
}

std::vector<AgentSet> detect_lines(const TorusWorld& world) {
  return line_like_structures(world, /*pairs=*/false);
}

std::vector<AgentSet> detect_pairs(const TorusWorld& world) {
  return line_like_structures(world, /*pairs=*/true);
}

std::vector<AgentSet> detect_squares(const TorusWorld& world) {
  const int n = world.agent_count();
  const NeighborCounts counts = neighbor_counts(world);
  std::vector<bool> isolated(static_cast<std::size_t>(n), false);
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    if (counts.moore[static_cast<std::size_t>(i)] == 0) {
      isolated[static_cast<std::size_t>(i)] = true;
      candidates.push_back(i);
    }
  }
  DisjointSets sets(n);
  for (int i : candidates) {
    const Pose& p = world.pose(i);
    for (auto [dx, dy] : {std::pair{2, 0}, std::pair{-2, 0}, std::pair{0, 2}, std::pair{0, -2}}) {
      const int who = world.occupant(p.x + dx, p.y + dy);
      if (who >= 0 && isolated[static_cast<std::size_t>(who)]) sets.unite(i, who);
    }
  }
  return components_of(candidates, sets, 3);
}

std::vector<AgentSet> detect_triangular_lattices(const TorusWorld& world) {
  const int n = world.agent_count();
  const NeighborCounts counts = neighbor_counts(world);
  std::vector<bool> eligible(static_cast<std::size_t>(n), false);
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    if (counts.von_neumann[static_cast<std::size_t>(i)] == 0) {
      eligible[static_cast<std::size_t>(i)] = true;
      candidates.push_back(i);
    }
  }
  DisjointSets sets(n);
  for (int i : candidates) {
    const Pose& p = world.pose(i);
    for (auto [dx, dy] : {std::pair{1, 1}, std::pair{1, -1}, std::pair{-1, 1}, std::pair{-1, -1}}) {
      const int who = world.occupant(p.x + dx, p.y + dy);
      if (who >= 0 && eligible[static_cast<std::size_t>(who)]) sets.unite(i, who);
    }
  }
  return components_of(candidates, sets, 3);
}

AgentSet detect_random_dispersion(const TorusWorld& world) {
  const NeighborCounts counts = neighbor_counts(world);
  AgentSet members;
  for (int i = 0; i < world.agent_count(); ++i) {
    if (counts.von_neumann[static_cast<std::size_t>(i)] == 0 ||
        counts.moore[static_cast<std::size_t>(i)] <= 1) {
      members.push_back(i);
    }
  }
  return members;
}

std::vector<AgentSet> detect_swirls(const TorusWorld& world) {
  const int side = world.side_length();
  std::vector<AgentSet> found;
  std::set<AgentSet> seen;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      std::array<int, 4> block{};  // (x,y) (x+1,y) (x,y+1) (x+1,y+1)
      block[0] = world.occupant(x, y);
      block[1] = world.occupant(x + 1, y);
      block[2] = world.occupant(x, y + 1);
      block[3] = world.occupant(x + 1, y + 1);
      if (block[0] < 0 || block[1] < 0 || block[2] < 0 || block[3] < 0) continue;
      bool ok = true;
      for (int agent : block) {
        const Pose& p = world.pose(agent);
        const auto [dx, dy] = rotate_offset({1, 0}, p.heading);
        const int target = world.occupant(p.x + dx, p.y + dy);
        const bool target_in_block = std::find(block.begin(), block.end(), target) != block.end();
        if (target < 0 || !target_in_block || target == agent) {
          ok = false;
          break;
        }
        const int diff = (static_cast<int>(world.pose(target).heading) -
                          static_cast<int>(p.heading) + 4) % 4;
        if (diff != 1 && diff != 3) {  // quarter turn either way
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      AgentSet agents(block.begin(), block.end());
      std::sort(agents.begin(), agents.end());
      if (seen.insert(agents).second) found.push_back(std::move(agents));
    }
  }
  return found;
}

std::vector<AgentSet> detect_aggregation(const TorusWorld& world) {
  const GroupingInfo info = grouping_info(world);
  if (info.components.size() == 1 && info.core_groups[0] == 1) return {info.components[0]};
  return {};
}

std::vector<AgentSet> detect_clustering(const TorusWorld& world) {
  const GroupingInfo info = grouping_info(world);
  if (info.components.size() >= 2) return info.components;
  return {};
}

std::vector<AgentSet> detect_loose_grouping(const TorusWorld& world) {
  const GroupingInfo info = grouping_info(world);
  std::vector<AgentSet> out;
  for (std::size_t i = 0; i < info.components.size(); ++i) {
    if (info.core_groups[i] >= 2) out.push_back(info.components[i]);
  }
  return out;
}

int pattern_coverage(const TorusWorld& world, PatternClass pattern) {
  switch (pattern) {
    case PatternClass::Lines: return coverage_of(detect_lines(world));
    case PatternClass::Pairs: return coverage_of(detect_pairs(world));
    case PatternClass::Squares: return coverage_of(detect_squares(world));
    case PatternClass::TriangularLattice: return coverage_of(detect_triangular_lattices(world));
    case PatternClass::RandomDispersion:
      return static_cast<int>(detect_random_dispersion(world).size());
    case PatternClass::Aggregation: return coverage_of(detect_aggregation(world));
    case PatternClass::Clustering: return coverage_of(detect_clustering(world));
    case PatternClass::LooseGrouping: return coverage_of(detect_loose_grouping(world));
    case PatternClass::Swirls: return coverage_of(detect_swirls(world));
    case PatternClass::Unclassified: return 0;
  }
  return 0;
}

BehaviorLabel classify(const TorusWorld& world) {
  // Tie-break order: specific geometric patterns before the generic ones.
  static constexpr PatternClass kPrecedence[] = {
      PatternClass::Lines,       PatternClass::Swirls,     PatternClass::Squares,
      PatternClass::TriangularLattice, PatternClass::Pairs, PatternClass::Aggregation,
      PatternClass::Clustering,  PatternClass::LooseGrouping, PatternClass::RandomDispersion,
  };
  BehaviorLabel label;
  if (world.agent_count() == 0) return label;
  int best_coverage = 0;
  for (PatternClass c : kPrecedence) {
    const int coverage = pattern_coverage(world, c);
    if (coverage > best_coverage) {
      best_coverage = coverage;
      label.pattern = c;
    }
  }
  if (best_coverage == 0) return label;  // unclassified
  label.quality = static_cast<double>(best_coverage) / world.agent_count();
  return label;
}

double solution_quality(const TorusWorld& world, PatternClass pattern) {
  if (world.agent_count() == 0) return 0.0;
  return static_cast<double>(pattern_coverage(world, pattern)) / world.agent_count();
}

double similarity(const std::vector<Pose>& repair, const std::vector<Pose>& initial, int n) {
  if (n <= 0) throw std::invalid_argument("similarity needs a positive initial swarm size");
  std::set<std::tuple<int, int, int>> initial_poses;
  for (const Pose& p : initial) {
    initial_poses.emplace(p.x, p.y, static_cast<int>(p.heading));
  }
  int matches = 0;
  for (const Pose& p : repair) {
    if (initial_poses.count({p.x, p.y, static_cast<int>(p.heading)}) > 0) ++matches;
  }
  return static_cast<double>(matches) / n;
}

std::array<double, kSensorCount> mean_predictions(const RunRecord& record) {
  if (!record.trace || record.trace->predictions.empty()) {
    throw std::invalid_argument("record carries no per-step predictions");
  }
  std::array<double, kSensorCount> sum{};
  std::size_t count = 0;
  for (const auto& step : record.trace->predictions) {
    for (const auto& agent : step) {
      for (int r = 0; r < kSensorCount; ++r) sum[static_cast<std::size_t>(r)] += agent[static_cast<std::size_t>(r)];
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("record carries no per-step predictions");
  for (double& v : sum) v /= static_cast<double>(count);
  return sum;
}

}  // namespace swarmevo
