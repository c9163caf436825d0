#include "quest/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "quest/errors.hpp"
#include "quest/text.hpp"

namespace quest {

using nlohmann::json;

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Entity: return "entity";
    case NodeKind::Relation: return "relation";
    case NodeKind::Type: return "type";
  }
  return "?";
}

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::TripleSP: return "triple_sp";
    case EdgeKind::TriplePO: return "triple_po";
    case EdgeKind::TypeEdge: return "type";
    case EdgeKind::EntityAlign: return "entity_align";
    case EdgeKind::RelationAlign: return "relation_align";
  }
  return "?";
}

namespace {

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "entity") return NodeKind::Entity;
  if (s == "relation") return NodeKind::Relation;
  if (s == "type") return NodeKind::Type;
  throw Error(ErrorKind::ParseError, "unknown node kind '" + s + "'");
}

EdgeKind edge_kind_from_string(const std::string& s) {
  if (s == "triple_sp") return EdgeKind::TripleSP;
  if (s == "triple_po") return EdgeKind::TriplePO;
  if (s == "type") return EdgeKind::TypeEdge;
  if (s == "entity_align") return EdgeKind::EntityAlign;
  if (s == "relation_align") return EdgeKind::RelationAlign;
  throw Error(ErrorKind::ParseError, "unknown edge kind '" + s + "'");
}

}  // namespace

int QuasiGraph::add_node(std::string label, NodeKind kind) {
  QuasiNode node;
  node.id = static_cast<int>(nodes.size());
  node.label = std::move(label);
  node.kind = kind;
  nodes.push_back(std::move(node));
  adjacency_.clear();
  return nodes.back().id;
}

int QuasiGraph::add_edge(int u, int v, EdgeKind kind, double score,
                         std::vector<Provenance> provenance) {
  if (u == v)
    throw Error(ErrorKind::InvariantViolation, "self-loop on node " +
                                                   std::to_string(u));
  QuasiEdge edge;
  edge.id = static_cast<int>(edges.size());
  edge.u = u;
  edge.v = v;
  edge.kind = kind;
  edge.score = score;
  edge.cost = 1.0 - score;
  edge.provenance = std::move(provenance);
  edges.push_back(std::move(edge));
  adjacency_.clear();
  return edges.back().id;
}

void QuasiGraph::rebuild_adjacency() const {
  adjacency_.assign(nodes.size(), {});
  for (const auto& e : edges) {
    adjacency_[static_cast<std::size_t>(e.u)].push_back(e.id);
    adjacency_[static_cast<std::size_t>(e.v)].push_back(e.id);
  }
}

const std::vector<int>& QuasiGraph::incident(int node_id) const {
  if (adjacency_.size() != nodes.size()) rebuild_adjacency();
  return adjacency_[static_cast<std::size_t>(node_id)];
}

int QuasiGraph::other_end(int edge_id, int node_id) const {
  const QuasiEdge& e = edges[static_cast<std::size_t>(edge_id)];
  return e.u == node_id ? e.v : e.u;
}

int QuasiGraph::find_node(const std::string& normalized_label,
                          NodeKind kind) const {
  for (const auto& n : nodes)
    if (n.kind == kind && text::normalize(n.label) == normalized_label)
      return n.id;
  return -1;
}

QuasiGraph build_graph(const std::vector<Triple>& triples,
                       const std::vector<TypeAssertion>& types,
                       const MentionDictionary& dict,
                       const EmbeddingStore& emb,
                       const GraphThresholds& thresholds) {
  if (triples.empty())
    throw Error(ErrorKind::EmptyGraph, "no triples extracted");

  QuasiGraph graph;
  std::map<std::string, int> entity_ids;
  auto entity_node = [&](const std::string& surface,
                         const std::vector<Provenance>& prov) {
    std::string key = text::normalize(surface);
    auto it = entity_ids.find(key);
    if (it == entity_ids.end()) {
      int id = graph.add_node(surface, NodeKind::Entity);
      it = entity_ids.emplace(std::move(key), id).first;
    }
    auto& node_prov = graph.nodes[static_cast<std::size_t>(it->second)].provenance;
    node_prov.insert(node_prov.end(), prov.begin(), prov.end());
    return it->second;
  };

  auto clamp_score = [](double x) { return std::min(x, 1.0); };

  for (const auto& t : triples) {
    int s_id = entity_node(t.s, t.provenance);
    int o_id = entity_node(t.o, t.provenance);
    int p_id = graph.add_node(t.p, NodeKind::Relation);
    graph.nodes[static_cast<std::size_t>(p_id)].provenance = t.provenance;
    graph.add_edge(s_id, p_id, EdgeKind::TripleSP, clamp_score(t.sp_score),
                   t.provenance);
    graph.add_edge(p_id, o_id, EdgeKind::TriplePO, clamp_score(t.po_score),
                   t.provenance);
  }

  // Type assertions whose entity never appeared as S/O still get a node.
  std::map<std::string, int> type_ids;
  std::set<std::pair<int, int>> type_edges_seen;
  for (const auto& ta : types) {
    int e_id = entity_node(ta.entity, {ta.provenance});
    std::string key = text::normalize(ta.type_phrase);
    auto it = type_ids.find(key);
    if (it == type_ids.end()) {
      int id = graph.add_node(ta.type_phrase, NodeKind::Type);
      it = type_ids.emplace(std::move(key), id).first;
    }
    if (type_edges_seen.insert({e_id, it->second}).second)
      graph.add_edge(e_id, it->second, EdgeKind::TypeEdge, 1.0,
                     {ta.provenance});
  }

  add_alignment_edges(graph, dict, emb, thresholds.alignment);
  weights_to_costs(graph);
  return graph;
}

void add_alignment_edges(QuasiGraph& graph, const MentionDictionary& dict,
                         const EmbeddingStore& emb, double threshold) {
  std::vector<int> entities, relations;
  for (const auto& n : graph.nodes) {
    if (n.kind == NodeKind::Entity) entities.push_back(n.id);
    if (n.kind == NodeKind::Relation) relations.push_back(n.id);
  }

  // Candidate filter: entity pairs must share a surface token or a
  // dictionary entity; keeps alignment quadratic only within buckets.
  auto entity_keys = [&](int id) {
    std::set<std::string> keys;
    const std::string norm = text::normalize(graph.nodes[static_cast<std::size_t>(id)].label);
    for (const auto& w : text::split_words(norm)) keys.insert("t:" + w);
    if (const auto* ents = dict.lookup(norm))
      for (const auto& e : *ents) keys.insert("e:" + e);
    return keys;
  };

  std::map<std::string, std::vector<int>> buckets;
  for (int id : entities)
    for (const auto& key : entity_keys(id)) buckets[key].push_back(id);

  std::set<std::pair<int, int>> candidates;
  for (const auto& [key, ids] : buckets)
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        candidates.insert({std::min(ids[i], ids[j]), std::max(ids[i], ids[j])});

  for (const auto& [a, b] : candidates) {
    double sim = entity_similarity(graph.nodes[static_cast<std::size_t>(a)].label,
                                   graph.nodes[static_cast<std::size_t>(b)].label, dict);
    if (sim >= threshold)
      graph.add_edge(a, b, EdgeKind::EntityAlign, clamp01(sim));
  }

  for (std::size_t i = 0; i < relations.size(); ++i) {
    for (std::size_t j = i + 1; j < relations.size(); ++j) {
      const std::string& la =
          graph.nodes[static_cast<std::size_t>(relations[i])].label;
      const std::string& lb =
          graph.nodes[static_cast<std::size_t>(relations[j])].label;
      double sim = text::normalize(la) == text::normalize(lb)
                       ? 1.0
                       : phrase_weight(la, lb, emb);
      if (sim >= threshold)
        graph.add_edge(relations[i], relations[j], EdgeKind::RelationAlign,
                       sim);
    }
  }
  weights_to_costs(graph);
}

void weights_to_costs(QuasiGraph& graph) {
  for (auto& e : graph.edges) {
    if (e.score < 0.0 || e.score > 1.0)
      throw Error(ErrorKind::InvariantViolation,
                  "edge " + std::to_string(e.id) + " score " +
                      std::to_string(e.score) + " outside [0,1]");
    e.cost = 1.0 - e.score;
  }
}

QuasiGraph ablate(const QuasiGraph& graph, const AblationFlags& flags) {
  QuasiGraph out;
  std::vector<int> node_map(graph.nodes.size(), -1);
  for (const auto& n : graph.nodes) {
    if (flags.drop_types && n.kind == NodeKind::Type) continue;
    int id = out.add_node(n.label, n.kind);
    out.nodes[static_cast<std::size_t>(id)].weight = n.weight;
    out.nodes[static_cast<std::size_t>(id)].provenance = n.provenance;
    node_map[static_cast<std::size_t>(n.id)] = id;
  }
  for (const auto& e : graph.edges) {
    if (flags.drop_types && e.kind == EdgeKind::TypeEdge) continue;
    if (flags.drop_entity_align && e.kind == EdgeKind::EntityAlign) continue;
    if (flags.drop_relation_align && e.kind == EdgeKind::RelationAlign)
      continue;
    int u = node_map[static_cast<std::size_t>(e.u)];
    int v = node_map[static_cast<std::size_t>(e.v)];
    if (u < 0 || v < 0) continue;
    double score = flags.degenerate_edge_weights ? 0.5 : e.score;
    out.add_edge(u, v, e.kind, score, e.provenance);
  }
  weights_to_costs(out);
  return out;
}

std::string graph_to_json(const QuasiGraph& graph) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : graph.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["label"] = n.label;
    jn["kind"] = to_string(n.kind);
    jn["weight"] = n.weight;
    j["nodes"].push_back(std::move(jn));
  }
  j["edges"] = json::array();
  for (const auto& e : graph.edges) {
    json je;
    je["u"] = e.u;
    je["v"] = e.v;
    je["kind"] = to_string(e.kind);
    je["score"] = e.score;
    je["cost"] = e.cost;
    std::set<std::string> docs;
    for (const auto& p : e.provenance) docs.insert(p.doc_id);
    je["docs"] = docs;
    j["edges"].push_back(std::move(je));
  }
  return j.dump(2);
}

QuasiGraph graph_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("graph json: ") + e.what());
  }
  QuasiGraph graph;
  try {
    for (const auto& jn : j.at("nodes")) {
      int id = graph.add_node(jn.at("label").get<std::string>(),
                              node_kind_from_string(jn.at("kind")));
      graph.nodes[static_cast<std::size_t>(id)].weight = jn.value("weight", 0.0);
    }
    for (const auto& je : j.at("edges")) {
      std::vector<Provenance> prov;
      if (je.contains("docs"))
        for (const auto& d : je.at("docs")) prov.push_back({d, 0});
      graph.add_edge(je.at("u").get<int>(), je.at("v").get<int>(),
                     edge_kind_from_string(je.at("kind")),
                     je.at("score").get<double>(), std::move(prov));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("graph json: ") + e.what());
  }
  weights_to_costs(graph);
  return graph;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string graph_to_dot(const QuasiGraph& graph,
                         const std::vector<int>& highlight) {
  std::set<int> bold(highlight.begin(), highlight.end());
  std::ostringstream os;
  os << "graph quasi_kg {\n";
  os << "  node [fontsize=10];\n";
  for (const auto& n : graph.nodes) {
    os << "  n" << n.id << " [label=\"" << dot_escape(n.label) << "\"";
    switch (n.kind) {
      case NodeKind::Entity: os << ", shape=box"; break;
      case NodeKind::Relation: os << ", shape=box, style=rounded"; break;
      case NodeKind::Type: os << ", shape=diamond"; break;
    }
    if (bold.count(n.id)) os << ", penwidth=3";
    os << "];\n";
  }
  os.setf(std::ios::fixed);
  os.precision(3);
  for (const auto& e : graph.edges) {
    os << "  n" << e.u << " -- n" << e.v << " [label=\"" << e.cost << "\"";
    if (e.kind == EdgeKind::EntityAlign || e.kind == EdgeKind::RelationAlign)
      os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace quest
