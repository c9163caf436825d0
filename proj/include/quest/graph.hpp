#pragma once

#include <string>
#include <vector>

#include "quest/extraction.hpp"
#include "quest/similarity.hpp"

namespace quest {

enum class NodeKind { Entity, Relation, Type };
enum class EdgeKind { TripleSP, TriplePO, TypeEdge, EntityAlign, RelationAlign };

const char* to_string(NodeKind kind);
const char* to_string(EdgeKind kind);

struct QuasiNode {
  int id = 0;
  std::string label;
  NodeKind kind = NodeKind::Entity;
  double weight = 0.0;  // question similarity, set during cornerstone scoring
  std::vector<Provenance> provenance;
};

struct QuasiEdge {
  int id = 0;
  int u = 0;
  int v = 0;
  EdgeKind kind = EdgeKind::TripleSP;
  double score = 0.0;
  double cost = 1.0;
  std::vector<Provenance> provenance;
};

class QuasiGraph {
 public:
  std::vector<QuasiNode> nodes;
  std::vector<QuasiEdge> edges;

  int add_node(std::string label, NodeKind kind);
  int add_edge(int u, int v, EdgeKind kind, double score,
               std::vector<Provenance> provenance = {});

  // Edge ids incident to a node, ascending.
  const std::vector<int>& incident(int node_id) const;
  int other_end(int edge_id, int node_id) const;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  int find_node(const std::string& normalized_label, NodeKind kind) const;

 private:
  mutable std::vector<std::vector<int>> adjacency_;
  void rebuild_adjacency() const;
};

struct GraphThresholds {
  double alignment = 0.5;
};

struct AblationFlags {
  bool drop_types = false;
  bool drop_entity_align = false;
  bool drop_relation_align = false;
  bool degenerate_edge_weights = false;
};

// One entity node per distinct normalized S/O surface, one relation node
// per merged triple, one type node per distinct normalized type phrase.
// Triple-edge scores are the proximity sums clamped to [0,1]; type edges
// score exactly 1. Alignment edges are added per add_alignment_edges.
// Throws EmptyGraph when `triples` is empty.
QuasiGraph build_graph(const std::vector<Triple>& triples,
                       const std::vector<TypeAssertion>& types,
                       const MentionDictionary& dict,
                       const EmbeddingStore& emb,
                       const GraphThresholds& thresholds);

// Entity pairs at entity_similarity >= threshold and relation pairs at
// phrase similarity >= threshold get alignment edges weighted by the
// similarity. Entity candidates are limited to pairs sharing a token or a
// dictionary entity.
void add_alignment_edges(QuasiGraph& graph, const MentionDictionary& dict,
                         const EmbeddingStore& emb, double threshold);

// cost = 1 - score on every edge; idempotent. Throws InvariantViolation
// when a score is outside [0,1].
void weights_to_costs(QuasiGraph& graph);

// Returns a rebuilt graph with the requested parts removed (node ids are
// reassigned contiguously). Degenerate weights force every cost to 0.5.
QuasiGraph ablate(const QuasiGraph& graph, const AblationFlags& flags);

std::string graph_to_json(const QuasiGraph& graph);
QuasiGraph graph_from_json(const std::string& json_text);

// DOT rendering: rectangles for entities, rounded for relations, diamonds
// for types; alignment edges dashed. `highlight` nodes get bold borders.
std::string graph_to_dot(const QuasiGraph& graph,
                         const std::vector<int>& highlight = {});

}  // namespace quest
