#include "quest/answering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "quest/errors.hpp"
#include "quest/text.hpp"

namespace quest {

namespace {

constexpr double kEpsilon = 1e-6;

std::vector<std::string> word_tokens(const std::string& raw) {
  std::vector<std::string> tokens;
  for (const auto& chunk : text::split_words(raw)) {
    std::string t = chunk;
    while (!t.empty() && text::is_punctuation(std::string(1, t.back())))
      t.pop_back();
    while (!t.empty() && text::is_punctuation(std::string(1, t.front())))
      t.erase(t.begin());
    if (!t.empty()) tokens.push_back(t);
  }
  return tokens;
}

}  // namespace

Question parse_question(const std::string& raw) {
  Question q;
  q.raw = raw;
  q.tokens = word_tokens(raw);
  std::vector<std::string> run;
  for (const auto& tok : q.tokens) {
    if (text::is_stopword(tok) || text::is_question_word(tok)) {
      if (!run.empty()) q.content_runs.push_back(std::move(run));
      run.clear();
    } else {
      run.push_back(tok);
    }
  }
  if (!run.empty()) q.content_runs.push_back(std::move(run));
  q.expected_answer_type = infer_answer_type(raw);
  return q;
}

std::optional<std::string> infer_answer_type(const std::string& raw) {
  const std::vector<std::string> tokens = word_tokens(raw);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string w = text::to_lower(tokens[i]);
    if (w == "who" || w == "whom") return "person";
    if (w == "where") return "place";
    if (w == "when") return "date";
    if (w == "which" || w == "what") {
      // Head noun phrase: the non-stopword run immediately after.
      std::vector<std::string> np;
      for (std::size_t j = i + 1; j < tokens.size(); ++j) {
        if (text::is_stopword(tokens[j]) || text::is_question_word(tokens[j]))
          break;
        np.push_back(tokens[j]);
      }
      if (np.empty()) return std::nullopt;
      std::string joined = np[0];
      for (std::size_t j = 1; j < np.size(); ++j) joined += " " + np[j];
      return joined;
    }
  }
  return std::nullopt;
}

TerminalGroups select_cornerstones(QuasiGraph& graph, const Question& question,
                                   const MentionDictionary& dict,
                                   const EmbeddingStore& emb,
                                   const CornerstoneThresholds& thresholds) {
  TerminalGroups out;

  auto match_term = [&](const std::string& term) {
    std::vector<std::pair<int, double>> matched;
    for (const auto& node : graph.nodes) {
      double sim = 0.0;
      double threshold = 1.1;
      switch (node.kind) {
        case NodeKind::Entity:
          sim = entity_similarity(term, node.label, dict);
          threshold = thresholds.entity;
          break;
        case NodeKind::Relation:
          sim = phrase_weight(term, node.label, emb);
          threshold = thresholds.relation;
          break;
        case NodeKind::Type:
          sim = phrase_weight(term, node.label, emb);
          threshold = thresholds.type;
          break;
      }
      if (sim >= threshold) matched.push_back({node.id, sim});
    }
    return matched;
  };

  for (const auto& run : question.content_runs) {
    std::size_t pos = 0;
    while (pos < run.size()) {
      bool consumed = false;
      std::size_t max_len = std::min<std::size_t>(4, run.size() - pos);
      for (std::size_t len = max_len; len >= 1; --len) {
        std::string term = run[pos];
        for (std::size_t i = 1; i < len; ++i) term += " " + run[pos + i];
        auto matched = match_term(term);
        if (matched.empty()) continue;
        std::vector<int> ids;
        for (auto& [id, sim] : matched) {
          ids.push_back(id);
          auto& node = graph.nodes[static_cast<std::size_t>(id)];
          node.weight = std::max(node.weight, sim);
        }
        out.groups.push_back(std::move(ids));
        out.labels.push_back(term);
        pos += len;
        consumed = true;
        break;
      }
      if (!consumed) ++pos;
    }
  }

  if (out.groups.empty())
    throw Error(ErrorKind::NoCornerstones,
                "no graph node matches any question term");
  return out;
}

namespace {

std::set<int> terminal_set(const TerminalGroups& groups) {
  std::set<int> terminals;
  for (const auto& g : groups.groups) terminals.insert(g.begin(), g.end());
  return terminals;
}

std::vector<std::string> type_labels_of(const QuasiGraph& graph, int node_id) {
  std::vector<std::string> labels;
  for (int e : graph.incident(node_id)) {
    const QuasiEdge& edge = graph.edges[static_cast<std::size_t>(e)];
    if (edge.kind != EdgeKind::TypeEdge) continue;
    labels.push_back(
        graph.nodes[static_cast<std::size_t>(graph.other_end(e, node_id))].label);
  }
  std::sort(labels.begin(), labels.end());
  return labels;
}

}  // namespace

std::vector<Candidate> extract_candidates(const std::vector<SteinerTree>& trees,
                                          const QuasiGraph& graph,
                                          const TerminalGroups& groups) {
  const std::set<int> terminals = terminal_set(groups);
  std::map<int, Candidate> by_node;

  for (std::size_t r = 0; r < trees.size(); ++r) {
    const SteinerTree& tree = trees[r];
    std::vector<int> pool = tree.nodes;
    pool.insert(pool.end(), tree.extra_candidate_nodes.begin(),
                tree.extra_candidate_nodes.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    for (int id : pool) {
      if (terminals.count(id)) continue;
      if (graph.nodes[static_cast<std::size_t>(id)].kind != NodeKind::Entity)
        continue;
      Candidate& cand = by_node[id];
      if (cand.trees.empty()) {
        cand.node_id = id;
        cand.label = graph.nodes[static_cast<std::size_t>(id)].label;
        cand.type_labels = type_labels_of(graph, id);
      }
      cand.trees.push_back({static_cast<int>(r) + 1, tree.cost});
      for (const auto& d : tree.docs) cand.docs.push_back(d);
    }
  }

  std::vector<Candidate> out;
  for (auto& [id, cand] : by_node) {
    std::sort(cand.docs.begin(), cand.docs.end());
    cand.docs.erase(std::unique(cand.docs.begin(), cand.docs.end()),
                    cand.docs.end());
    out.push_back(std::move(cand));
  }
  return out;
}

std::vector<Candidate> candidates_from_baseline(
    const std::vector<BaselineCandidate>& ranked, const QuasiGraph& graph,
    const TerminalGroups& groups) {
  const std::set<int> terminals = terminal_set(groups);
  std::vector<Candidate> out;
  for (const auto& bc : ranked) {
    if (terminals.count(bc.node)) continue;
    if (graph.nodes[static_cast<std::size_t>(bc.node)].kind != NodeKind::Entity)
      continue;
    Candidate cand;
    cand.node_id = bc.node;
    cand.label = graph.nodes[static_cast<std::size_t>(bc.node)].label;
    cand.type_labels = type_labels_of(graph, bc.node);
    cand.docs = bc.docs;
    cand.baseline_score = bc.score;
    out.push_back(std::move(cand));
  }
  return out;
}

std::vector<Candidate> filter_by_type(std::vector<Candidate> candidates,
                                      const std::optional<std::string>& expected,
                                      const EmbeddingStore& emb,
                                      double threshold, bool strict_filter) {
  if (!expected) return candidates;
  std::vector<Candidate> out;
  for (auto& cand : candidates) {
    if (cand.type_labels.empty()) {
      if (!strict_filter) out.push_back(std::move(cand));
      continue;
    }
    bool keep = false;
    for (const auto& label : cand.type_labels)
      if (phrase_weight(label, *expected, emb) >= threshold) {
        keep = true;
        break;
      }
    if (keep) out.push_back(std::move(cand));
  }
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<AnswerGroup> aggregate(const std::vector<Candidate>& candidates,
                                   const QuasiGraph& graph) {
  // Candidates in node-id order so grouping is input-order independent.
  std::vector<Candidate> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.node_id < b.node_id;
            });

  std::map<int, std::size_t> by_node;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    by_node[sorted[i].node_id] = i;

  std::vector<std::vector<std::string>> token_seqs;
  token_seqs.reserve(sorted.size());
  for (const auto& c : sorted)
    token_seqs.push_back(text::normalized_words(c.label));

  UnionFind uf(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (text::is_subsequence(token_seqs[i], token_seqs[j]) ||
          text::is_subsequence(token_seqs[j], token_seqs[i]))
        uf.unite(i, j);
    }
  }
  for (const auto& e : graph.edges) {
    if (e.kind != EdgeKind::EntityAlign) continue;
    auto iu = by_node.find(e.u);
    auto iv = by_node.find(e.v);
    if (iu != by_node.end() && iv != by_node.end())
      uf.unite(iu->second, iv->second);
  }

  std::map<std::size_t, AnswerGroup> groups;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    AnswerGroup& g = groups[uf.find(i)];
    g.members.push_back(sorted[i]);
  }

  std::vector<AnswerGroup> out;
  for (auto& [root, g] : groups) {
    // Canonical label: longest member label, ties lexicographic.
    for (const auto& m : g.members) {
      if (g.label.empty() || m.label.size() > g.label.size() ||
          (m.label.size() == g.label.size() && m.label < g.label))
        g.label = m.label;
    }
    std::map<int, double> tree_by_rank;
    std::set<std::string> docs;
    for (const auto& m : g.members) {
      for (const auto& [rank, cost] : m.trees) tree_by_rank[rank] = cost;
      docs.insert(m.docs.begin(), m.docs.end());
    }
    for (const auto& [rank, cost] : tree_by_rank) g.trees.push_back({rank, cost});
    g.docs.assign(docs.begin(), docs.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(),
            [](const AnswerGroup& a, const AnswerGroup& b) {
              return a.label < b.label;
            });
  return out;
}

RankStrategy rank_strategy_from_string(const std::string& name) {
  if (name == "inv-cost-sum") return RankStrategy::InvCostSum;
  if (name == "gst-count") return RankStrategy::GstCount;
  if (name == "node-weight-sum") return RankStrategy::NodeWeightSum;
  if (name == "weighted-distance") return RankStrategy::WeightedDistance;
  if (name == "unweighted-distance") return RankStrategy::UnweightedDistance;
  if (name == "baseline-score") return RankStrategy::BaselineScore;
  throw Error(ErrorKind::ConfigError, "unknown ranking strategy '" + name + "'");
}

const char* to_string(RankStrategy strategy) {
  switch (strategy) {
    case RankStrategy::InvCostSum: return "inv-cost-sum";
    case RankStrategy::GstCount: return "gst-count";
    case RankStrategy::NodeWeightSum: return "node-weight-sum";
    case RankStrategy::WeightedDistance: return "weighted-distance";
    case RankStrategy::UnweightedDistance: return "unweighted-distance";
    case RankStrategy::BaselineScore: return "baseline-score";
  }
  throw Error(ErrorKind::ConfigError, "unknown ranking strategy");
}

namespace {

// Path costs inside a tree from `from` to every tree node, weighted by edge
// cost or by hop count.
std::map<int, double> tree_distances(const SteinerTree& tree,
                                     const QuasiGraph& graph, int from,
                                     bool weighted) {
  std::map<int, std::vector<std::pair<int, double>>> adj;
  for (int e : tree.edges) {
    const QuasiEdge& edge = graph.edges[static_cast<std::size_t>(e)];
    double w = weighted ? edge.cost : 1.0;
    adj[edge.u].push_back({edge.v, w});
    adj[edge.v].push_back({edge.u, w});
  }
  std::map<int, double> dist;
  dist[from] = 0.0;
  // Tree paths are unique; plain traversal suffices.
  std::queue<int> frontier;
  frontier.push(from);
  while (!frontier.empty()) {
    int node = frontier.front();
    frontier.pop();
    for (const auto& [u, w] : adj[node]) {
      if (dist.count(u)) continue;
      dist[u] = dist[node] + w;
      frontier.push(u);
    }
  }
  return dist;
}

double distance_score(const AnswerGroup& group,
                      const std::vector<SteinerTree>& trees,
                      const QuasiGraph& graph,
                      const TerminalGroups& terminal_groups, bool weighted) {
  const std::set<int> terminals = terminal_set(terminal_groups);
  double best_mean = std::numeric_limits<double>::infinity();
  for (const auto& member : group.members) {
    for (const auto& [rank, cost] : member.trees) {
      const SteinerTree& tree = trees[static_cast<std::size_t>(rank - 1)];
      if (!tree.contains_node(member.node_id)) continue;
      auto dist = tree_distances(tree, graph, member.node_id, weighted);
      double sum = 0.0;
      int count = 0;
      for (int node : tree.nodes) {
        if (!terminals.count(node)) continue;
        auto it = dist.find(node);
        if (it == dist.end()) continue;
        sum += it->second;
        ++count;
      }
      if (count == 0) continue;
      best_mean = std::min(best_mean, sum / count);
    }
  }
  if (!std::isfinite(best_mean)) return 0.0;
  return 1.0 / (best_mean + kEpsilon);
}

double node_weight_sum(const AnswerGroup& group,
                       const std::vector<SteinerTree>& trees,
                       const QuasiGraph& graph) {
  double total = 0.0;
  for (const auto& [rank, cost] : group.trees) {
    const SteinerTree& tree = trees[static_cast<std::size_t>(rank - 1)];
    for (int node : tree.nodes)
      total += graph.nodes[static_cast<std::size_t>(node)].weight;
  }
  return total;
}

}  // namespace

std::vector<AnswerGroup> rank(std::vector<AnswerGroup> groups,
                              RankStrategy strategy,
                              const std::vector<SteinerTree>& trees,
                              const QuasiGraph& graph,
                              const TerminalGroups& terminal_groups) {
  for (auto& g : groups) {
    switch (strategy) {
      case RankStrategy::InvCostSum: {
        double score = 0.0;
        for (const auto& [rank, cost] : g.trees) score += 1.0 / (cost + kEpsilon);
        g.score = score;
        break;
      }
      case RankStrategy::GstCount:
        g.score = static_cast<double>(g.trees.size());
        break;
      case RankStrategy::NodeWeightSum:
        g.score = node_weight_sum(g, trees, graph);
        break;
      case RankStrategy::WeightedDistance:
        g.score = distance_score(g, trees, graph, terminal_groups, true);
        break;
      case RankStrategy::UnweightedDistance:
        g.score = distance_score(g, trees, graph, terminal_groups, false);
        break;
      case RankStrategy::BaselineScore: {
        double score = 0.0;
        for (const auto& m : g.members)
          score = std::max(score, m.baseline_score);
        g.score = score;
        break;
      }
    }
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const AnswerGroup& a, const AnswerGroup& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.label < b.label;
                   });
  for (std::size_t i = 0; i < groups.size(); ++i)
    groups[i].rank = static_cast<int>(i) + 1;
  return groups;
}

}  // namespace quest
