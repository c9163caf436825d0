#include "quest/gst.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

#include "quest/errors.hpp"

namespace quest {

using nlohmann::json;

bool SteinerTree::contains_node(int id) const {
  return std::binary_search(nodes.begin(), nodes.end(), id);
}

namespace {

void validate_groups(const QuasiGraph& graph, const TerminalGroups& groups) {
  if (groups.groups.empty())
    throw Error(ErrorKind::InvariantViolation, "no terminal groups");
  if (groups.groups.size() > 30)
    throw Error(ErrorKind::ResourceExhausted,
                "more than 30 terminal groups");
  for (const auto& g : groups.groups) {
    if (g.empty())
      throw Error(ErrorKind::InvariantViolation, "empty terminal group");
    for (int id : g)
      if (id < 0 || id >= static_cast<int>(graph.node_count()))
        throw Error(ErrorKind::InvariantViolation,
                    "terminal " + std::to_string(id) + " not in graph");
  }
}

// Canonical tree cost: edge costs summed in ascending edge-id order, so
// that identical edge sets always produce bit-identical sums.
double canonical_cost(const QuasiGraph& graph, const std::vector<int>& edges) {
  double cost = 0.0;
  for (int e : edges) cost += graph.edges[static_cast<std::size_t>(e)].cost;
  return cost;
}

std::vector<int> nodes_of(const std::vector<int>& edges, int root,
                          const QuasiGraph& graph) {
  std::vector<int> nodes;
  nodes.push_back(root);
  for (int e : edges) {
    nodes.push_back(graph.edges[static_cast<std::size_t>(e)].u);
    nodes.push_back(graph.edges[static_cast<std::size_t>(e)].v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

std::vector<std::string> docs_of(const QuasiGraph& graph,
                                 const std::vector<int>& edges) {
  std::set<std::string> docs;
  for (int e : edges)
    for (const auto& p : graph.edges[static_cast<std::size_t>(e)].provenance)
      docs.insert(p.doc_id);
  return {docs.begin(), docs.end()};
}

std::vector<int> covered_of(const TerminalGroups& groups,
                            const std::vector<int>& nodes) {
  std::vector<int> covered;
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    bool hit = false;
    for (int t : groups.groups[g])
      if (std::binary_search(nodes.begin(), nodes.end(), t)) {
        hit = true;
        break;
      }
    if (hit) covered.push_back(static_cast<int>(g));
  }
  return covered;
}

struct Item {
  double cost = 0.0;
  int root = 0;
  std::uint32_t mask = 0;
  std::vector<int> edges;  // sorted
};

// Min-heap order: cost, then sorted edge-id sequence, then root, then mask.
struct ItemGreater {
  bool operator()(const Item& a, const Item& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.edges != b.edges) return a.edges > b.edges;
    if (a.root != b.root) return a.root > b.root;
    return a.mask > b.mask;
  }
};

struct Entry {
  double cost = 0.0;
  std::uint32_t mask = 0;
  std::vector<int> edges;
  std::vector<int> nodes;  // sorted, includes the root
};

// True when the node sets intersect exactly in {root}.
bool disjoint_except_root(const std::vector<int>& a, const std::vector<int>& b,
                          int root) {
  std::size_t i = 0, j = 0;
  int shared = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (a[i] > b[j]) ++j;
    else {
      if (a[i] != root) return false;
      ++shared;
      ++i;
      ++j;
    }
  }
  return shared == 1;
}

std::vector<int> sorted_union(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> with_edge(const std::vector<int>& edges, int e) {
  std::vector<int> out;
  out.reserve(edges.size() + 1);
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  out.insert(out.end(), edges.begin(), it);
  out.push_back(e);
  out.insert(out.end(), it, edges.end());
  return out;
}

}  // namespace

std::vector<SteinerTree> solve_gst_k(const QuasiGraph& graph,
                                     const TerminalGroups& groups,
                                     const SolverConfig& cfg) {
  validate_groups(graph, groups);
  if (cfg.k < 1)
    throw Error(ErrorKind::ConfigError, "solver k must be >= 1");

  const std::uint32_t full =
      groups.size() >= 32 ? ~0u : ((1u << groups.size()) - 1);
  const std::size_t per_state = static_cast<std::size_t>(cfg.k);

  std::priority_queue<Item, std::vector<Item>, ItemGreater> queue;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int t : groups.groups[g])
      queue.push({0.0, t, 1u << g, {}});

  // Accepted entries, addressed by (root, mask); by_root speeds up the
  // merge scan.
  std::vector<Entry> entries;
  std::map<std::pair<int, std::uint32_t>, std::vector<std::size_t>> states;
  std::vector<std::vector<std::size_t>> by_root(graph.node_count());

  std::vector<SteinerTree> results;
  std::set<std::pair<std::vector<int>, std::vector<int>>> emitted;

  while (!queue.empty() &&
         results.size() < static_cast<std::size_t>(cfg.k)) {
    Item item = queue.top();
    queue.pop();

    auto& state = states[{item.root, item.mask}];
    if (state.size() >= per_state) continue;
    bool duplicate = false;
    for (std::size_t idx : state)
      if (entries[idx].edges == item.edges) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;

    Entry entry;
    entry.cost = item.cost;
    entry.mask = item.mask;
    entry.edges = std::move(item.edges);
    entry.nodes = nodes_of(entry.edges, item.root, graph);
    const std::size_t entry_idx = entries.size();

    if (item.mask == full) {
      auto key = std::make_pair(entry.nodes, entry.edges);
      if (emitted.insert(key).second) {
        SteinerTree tree;
        tree.nodes = entry.nodes;
        tree.edges = entry.edges;
        tree.cost = canonical_cost(graph, tree.edges);
        tree.covered_groups = covered_of(groups, tree.nodes);
        tree.docs = docs_of(graph, tree.edges);
        results.push_back(std::move(tree));
        if (results.size() >= static_cast<std::size_t>(cfg.k)) break;
      }
    }

    // Grow: extend by one incident edge of the root.
    for (int e : graph.incident(item.root)) {
      const QuasiEdge& edge = graph.edges[static_cast<std::size_t>(e)];
      int u = graph.other_end(e, item.root);
      if (std::binary_search(entry.nodes.begin(), entry.nodes.end(), u))
        continue;
      queue.push({entry.cost + edge.cost, u, entry.mask,
                  with_edge(entry.edges, e)});
    }

    // Merge with previously accepted trees at the same root covering a
    // disjoint group set and sharing no other node.
    for (std::size_t idx : by_root[static_cast<std::size_t>(item.root)]) {
      const Entry& other = entries[idx];
      if ((other.mask & entry.mask) != 0) continue;
      if (!disjoint_except_root(entry.nodes, other.nodes, item.root))
        continue;
      std::vector<int> merged_edges;
      merged_edges.reserve(entry.edges.size() + other.edges.size());
      std::merge(entry.edges.begin(), entry.edges.end(), other.edges.begin(),
                 other.edges.end(), std::back_inserter(merged_edges));
      queue.push({entry.cost + other.cost, item.root,
                  entry.mask | other.mask, std::move(merged_edges)});
    }

    state.push_back(entry_idx);
    by_root[static_cast<std::size_t>(item.root)].push_back(entry_idx);
    entries.push_back(std::move(entry));

    if (queue.size() > cfg.max_queue)
      throw Error(ErrorKind::ResourceExhausted,
                  "solver queue exceeded " + std::to_string(cfg.max_queue));
  }

  return results;
}

SteinerTree brute_force_gst(const QuasiGraph& graph,
                            const TerminalGroups& groups) {
  validate_groups(graph, groups);
  const int n = static_cast<int>(graph.node_count());
  if (n > 15)
    throw Error(ErrorKind::RefusedSize,
                "oracle refuses graphs with more than 15 nodes");

  std::vector<std::uint32_t> group_bits(groups.size(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int t : groups.groups[g]) group_bits[g] |= 1u << t;

  // Edges sorted by (cost, id) once; Kruskal per subset.
  std::vector<int> order(graph.edge_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ca = graph.edges[static_cast<std::size_t>(a)].cost;
    double cb = graph.edges[static_cast<std::size_t>(b)].cost;
    if (ca != cb) return ca < cb;
    return a < b;
  });

  bool found = false;
  double best_cost = 0.0;
  std::vector<int> best_edges;
  int best_root = -1;

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    bool covers = true;
    for (std::uint32_t bits : group_bits)
      if ((subset & bits) == 0) {
        covers = false;
        break;
      }
    if (!covers) continue;

    const int size = __builtin_popcount(subset);
    for (int v = 0; v < n; ++v) parent[static_cast<std::size_t>(v)] = v;
    std::vector<int> chosen;
    int components = size;
    for (int e : order) {
      if (components == 1) break;
      const QuasiEdge& edge = graph.edges[static_cast<std::size_t>(e)];
      if (!(subset & (1u << edge.u)) || !(subset & (1u << edge.v))) continue;
      int ru = find(edge.u), rv = find(edge.v);
      if (ru == rv) continue;
      parent[static_cast<std::size_t>(ru)] = rv;
      chosen.push_back(e);
      --components;
    }
    if (components != 1) continue;  // induced subgraph disconnected

    std::sort(chosen.begin(), chosen.end());
    double cost = canonical_cost(graph, chosen);
    if (!found || cost < best_cost ||
        (cost == best_cost && chosen < best_edges)) {
      found = true;
      best_cost = cost;
      best_edges = chosen;
      best_root = __builtin_ctz(subset);
    }
  }

  if (!found)
    throw Error(ErrorKind::NotFound, "no covering tree exists");

  SteinerTree tree;
  tree.edges = best_edges;
  tree.nodes = nodes_of(best_edges, best_root, graph);
  tree.cost = best_cost;
  tree.covered_groups = covered_of(groups, tree.nodes);
  tree.docs = docs_of(graph, tree.edges);
  return tree;
}

std::vector<SteinerTree> augment_one_hop(std::vector<SteinerTree> trees,
                                         const QuasiGraph& graph,
                                         const TerminalGroups& groups) {
  std::set<int> terminals;
  for (const auto& g : groups.groups) terminals.insert(g.begin(), g.end());

  for (auto& tree : trees) {
    std::set<int> extras;
    for (int node : tree.nodes) {
      if (!terminals.count(node)) continue;
      for (int e : graph.incident(node)) {
        int u = graph.other_end(e, node);
        if (!tree.contains_node(u)) extras.insert(u);
      }
    }
    tree.extra_candidate_nodes.assign(extras.begin(), extras.end());
  }
  return trees;
}

std::string tree_to_json(const SteinerTree& tree, const QuasiGraph& graph) {
  json j;
  j["cost"] = tree.cost;
  j["covered_groups"] = tree.covered_groups;
  j["docs"] = tree.docs;
  j["nodes"] = json::array();
  for (int id : tree.nodes) {
    const QuasiNode& n = graph.nodes[static_cast<std::size_t>(id)];
    j["nodes"].push_back(
        {{"id", n.id}, {"label", n.label}, {"kind", to_string(n.kind)}});
  }
  j["edges"] = json::array();
  for (int id : tree.edges) {
    const QuasiEdge& e = graph.edges[static_cast<std::size_t>(id)];
    j["edges"].push_back({{"id", e.id},
                          {"u", e.u},
                          {"v", e.v},
                          {"kind", to_string(e.kind)},
                          {"cost", e.cost}});
  }
  return j.dump(2);
}

SteinerTree tree_from_json(const std::string& json_text,
                           const QuasiGraph& graph) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("tree json: ") + e.what());
  }
  SteinerTree tree;
  try {
    for (const auto& jn : j.at("nodes")) tree.nodes.push_back(jn.at("id"));
    for (const auto& je : j.at("edges")) tree.edges.push_back(je.at("id"));
    tree.cost = j.at("cost").get<double>();
    if (j.contains("covered_groups"))
      tree.covered_groups = j.at("covered_groups").get<std::vector<int>>();
    if (j.contains("docs"))
      tree.docs = j.at("docs").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("tree json: ") + e.what());
  }
  std::sort(tree.nodes.begin(), tree.nodes.end());
  std::sort(tree.edges.begin(), tree.edges.end());
  // Recompute the canonical cost so round-trips stay exact.
  tree.cost = canonical_cost(graph, tree.edges);
  return tree;
}

std::string tree_to_dot(const SteinerTree& tree, const QuasiGraph& graph,
                        const std::vector<int>& cornerstones) {
  std::set<int> corner(cornerstones.begin(), cornerstones.end());
  std::ostringstream os;
  os << "graph steiner_tree {\n";
  for (int id : tree.nodes) {
    const QuasiNode& n = graph.nodes[static_cast<std::size_t>(id)];
    os << "  n" << n.id << " [label=\"";
    for (char c : n.label) {
      if (c == '"' || c == '\\') os << '\\';
      os << c;
    }
    os << "\\n(" << to_string(n.kind) << ")\"";
    switch (n.kind) {
      case NodeKind::Entity: os << ", shape=box"; break;
      case NodeKind::Relation: os << ", shape=box, style=rounded"; break;
      case NodeKind::Type: os << ", shape=diamond"; break;
    }
    if (corner.count(n.id)) os << ", penwidth=3";
    os << "];\n";
  }
  os.setf(std::ios::fixed);
  os.precision(3);
  for (int id : tree.edges) {
    const QuasiEdge& e = graph.edges[static_cast<std::size_t>(id)];
    os << "  n" << e.u << " -- n" << e.v << " [label=\"" << e.cost << "\"";
    if (e.kind == EdgeKind::EntityAlign || e.kind == EdgeKind::RelationAlign)
      os << ", style=dashed";
    os << "];\n";
  }
  if (!tree.docs.empty()) {
    os << "  label=\"docs:";
    for (const auto& d : tree.docs) os << " " << d;
    os << "\";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace quest
