#include "quest/baselines.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "quest/errors.hpp"

namespace quest {

namespace {

struct BfsIterator {
  int terminal = 0;
  int group = 0;
  std::deque<int> frontier;
  std::vector<int> parent_edge;  // edge used to reach each node, -1 unset
};

std::vector<std::string> path_docs(const QuasiGraph& graph,
                                   const std::set<int>& edges) {
  std::set<std::string> docs;
  for (int e : edges)
    for (const auto& p : graph.edges[static_cast<std::size_t>(e)].provenance)
      docs.insert(p.doc_id);
  return {docs.begin(), docs.end()};
}

}  // namespace

std::vector<BaselineCandidate> bfs_baseline(const QuasiGraph& graph,
                                            const TerminalGroups& groups) {
  const int n = static_cast<int>(graph.node_count());
  const std::size_t l = groups.size();

  std::vector<BfsIterator> iterators;
  for (std::size_t g = 0; g < l; ++g) {
    for (int t : groups.groups[g]) {
      BfsIterator it;
      it.terminal = t;
      it.group = static_cast<int>(g);
      it.frontier.push_back(t);
      it.parent_edge.assign(static_cast<std::size_t>(n), -1);
      it.parent_edge[static_cast<std::size_t>(t)] = -2;  // visited, no parent
      iterators.push_back(std::move(it));
    }
  }

  // reached[node] -> iterator index per group that reached it first
  std::vector<std::vector<int>> reached(static_cast<std::size_t>(n),
                                        std::vector<int>(l, -1));
  std::vector<int> meeting_order;

  bool any_active = true;
  while (any_active) {
    any_active = false;
    for (std::size_t it_idx = 0; it_idx < iterators.size(); ++it_idx) {
      BfsIterator& it = iterators[it_idx];
      if (it.frontier.empty()) continue;
      any_active = true;
      int node = it.frontier.front();
      it.frontier.pop_front();

      auto& slots = reached[static_cast<std::size_t>(node)];
      bool was_full =
          std::none_of(slots.begin(), slots.end(), [](int s) { return s < 0; });
      if (slots[static_cast<std::size_t>(it.group)] < 0)
        slots[static_cast<std::size_t>(it.group)] = static_cast<int>(it_idx);
      bool is_full =
          std::none_of(slots.begin(), slots.end(), [](int s) { return s < 0; });
      if (!was_full && is_full) meeting_order.push_back(node);

      for (int e : graph.incident(node)) {
        int u = graph.other_end(e, node);
        if (it.parent_edge[static_cast<std::size_t>(u)] != -1) continue;
        it.parent_edge[static_cast<std::size_t>(u)] = e;
        it.frontier.push_back(u);
      }
    }
  }

  std::vector<BaselineCandidate> out;
  for (int node : meeting_order) {
    double total_cost = 0.0;
    std::set<int> path_edges;
    for (std::size_t g = 0; g < l; ++g) {
      const BfsIterator& it = iterators[static_cast<std::size_t>(
          reached[static_cast<std::size_t>(node)][g])];
      int cur = node;
      while (cur != it.terminal) {
        int e = it.parent_edge[static_cast<std::size_t>(cur)];
        total_cost += graph.edges[static_cast<std::size_t>(e)].cost;
        path_edges.insert(e);
        cur = graph.other_end(e, cur);
      }
    }
    BaselineCandidate cand;
    cand.node = node;
    cand.score = 1.0 / (1.0 + total_cost);
    cand.docs = path_docs(graph, path_edges);
    out.push_back(std::move(cand));
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const BaselineCandidate& a, const BaselineCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.node < b.node;
                   });
  return out;
}

std::vector<int> min_cost_path(const QuasiGraph& graph, int from, int to) {
  const int n = static_cast<int>(graph.node_count());
  std::vector<double> dist(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  using State = std::pair<double, int>;
  std::priority_queue<State, std::vector<State>, std::greater<State>> pq;
  dist[static_cast<std::size_t>(from)] = 0.0;
  pq.push({0.0, from});
  while (!pq.empty()) {
    auto [d, node] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(node)]) continue;
    if (node == to) break;
    for (int e : graph.incident(node)) {
      int u = graph.other_end(e, node);
      double nd = d + graph.edges[static_cast<std::size_t>(e)].cost;
      if (nd < dist[static_cast<std::size_t>(u)]) {
        dist[static_cast<std::size_t>(u)] = nd;
        parent[static_cast<std::size_t>(u)] = e;
        pq.push({nd, u});
      }
    }
  }
  if (from == to || parent[static_cast<std::size_t>(to)] == -1) return {};
  std::vector<int> path;
  int cur = to;
  while (cur != from) {
    int e = parent[static_cast<std::size_t>(cur)];
    path.push_back(e);
    cur = graph.other_end(e, cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<BaselineCandidate> shortest_paths_baseline(
    const QuasiGraph& graph, const TerminalGroups& groups) {
  std::set<int> terminals;
  for (const auto& g : groups.groups) terminals.insert(g.begin(), g.end());

  // Cross-group terminal pairs, deduplicated.
  std::set<std::pair<int, int>> pairs;
  for (std::size_t ga = 0; ga < groups.size(); ++ga)
    for (std::size_t gb = ga + 1; gb < groups.size(); ++gb)
      for (int a : groups.groups[ga])
        for (int b : groups.groups[gb])
          if (a != b) pairs.insert({std::min(a, b), std::max(a, b)});

  std::map<int, int> counts;
  std::map<int, std::set<int>> node_edges;
  for (const auto& [a, b] : pairs) {
    std::vector<int> path = min_cost_path(graph, a, b);
    if (path.empty()) continue;
    int cur = a;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      cur = graph.other_end(path[i], cur);
      if (terminals.count(cur)) continue;
      counts[cur] += 1;
      for (int e : path) node_edges[cur].insert(e);
    }
  }

  std::vector<BaselineCandidate> out;
  for (const auto& [node, count] : counts) {
    BaselineCandidate cand;
    cand.node = node;
    cand.score = static_cast<double>(count);
    cand.docs = path_docs(graph, node_edges[node]);
    out.push_back(std::move(cand));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BaselineCandidate& a, const BaselineCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.node < b.node;
                   });
  return out;
}

}  // namespace quest
