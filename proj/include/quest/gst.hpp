#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quest/graph.hpp"

namespace quest {

struct TerminalGroups {
  std::vector<std::vector<int>> groups;  // node ids, one set per question term
  std::vector<std::string> labels;       // the matched term per group

  std::size_t size() const { return groups.size(); }
};

struct SteinerTree {
  std::vector<int> nodes;  // sorted, ascending
  std::vector<int> edges;  // sorted, ascending
  double cost = 0.0;
  std::vector<int> covered_groups;
  std::vector<std::string> docs;  // union of edge provenance
  // Candidate-pool extension from 1-hop augmentation; never affects cost.
  std::vector<int> extra_candidate_nodes;

  bool contains_node(int id) const;
};

struct SolverConfig {
  int k = 50;
  std::uint64_t max_queue = 10'000'000;
};

// Exact top-k group Steiner trees by grow/merge dynamic programming over
// states (root, covered-group subset), ascending cost. The first tree is a
// minimum-cost GST; trees are pairwise distinct as (node set, edge set).
// Returns an empty list when no component touches every group. Throws
// ResourceExhausted past cfg.max_queue queued states.
std::vector<SteinerTree> solve_gst_k(const QuasiGraph& graph,
                                     const TerminalGroups& groups,
                                     const SolverConfig& cfg);

// Exhaustive oracle: minimum spanning tree over every covering connected
// vertex subset. Refuses graphs with more than 15 nodes.
SteinerTree brute_force_gst(const QuasiGraph& graph,
                            const TerminalGroups& groups);

// Extends each tree's candidate pool with the graph neighbors of its
// terminal nodes. Tree costs and edges are unchanged.
std::vector<SteinerTree> augment_one_hop(std::vector<SteinerTree> trees,
                                         const QuasiGraph& graph,
                                         const TerminalGroups& groups);

std::string tree_to_json(const SteinerTree& tree, const QuasiGraph& graph);
SteinerTree tree_from_json(const std::string& json_text,
                           const QuasiGraph& graph);
std::string tree_to_dot(const SteinerTree& tree, const QuasiGraph& graph,
                        const std::vector<int>& cornerstones = {});

}  // namespace quest
