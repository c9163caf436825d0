#pragma once

#include <string>
#include <vector>

#include "quest/graph.hpp"
#include "quest/gst.hpp"

namespace quest {

// Higher score = better, both baselines.
struct BaselineCandidate {
  int node = 0;
  double score = 0.0;
  std::vector<std::string> docs;
};

// Unweighted breadth-first iterators from every terminal advanced in
// round-robin; a node reached by at least one iterator per group is a
// meeting node. Meeting nodes are ranked by ascending total weighted path
// cost back to their cornerstones (score = 1 / (1 + cost)).
std::vector<BaselineCandidate> bfs_baseline(const QuasiGraph& graph,
                                            const TerminalGroups& groups);

// One minimum-cost path per cross-group terminal pair under a fixed
// tie-break; every non-terminal on any such path scores the number of
// paths through it, ranked descending.
std::vector<BaselineCandidate> shortest_paths_baseline(
    const QuasiGraph& graph, const TerminalGroups& groups);

// Deterministic single-source minimum-cost path; returns edge ids from
// `from` to `to`, empty when unreachable (or from == to).
std::vector<int> min_cost_path(const QuasiGraph& graph, int from, int to);

}  // namespace quest
