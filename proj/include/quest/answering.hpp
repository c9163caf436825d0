#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quest/baselines.hpp"
#include "quest/graph.hpp"
#include "quest/gst.hpp"
#include "quest/similarity.hpp"

namespace quest {

struct Question {
  std::string raw;
  std::vector<std::string> tokens;  // word tokens, punctuation dropped
  // Maximal runs of consecutive non-stopword, non-question-word tokens;
  // cornerstone terms are longest-match n-grams (n <= 4) within a run.
  std::vector<std::vector<std::string>> content_runs;
  std::optional<std::string> expected_answer_type;
};

Question parse_question(const std::string& raw);

// who/whom -> person, where -> place, when -> date, which/what <NP> -> the
// noun phrase; otherwise nothing.
std::optional<std::string> infer_answer_type(const std::string& raw);

struct CornerstoneThresholds {
  double entity = 0.5;
  double relation = 0.5;
  double type = 0.5;
};

// One terminal group per content term with at least one node matching at
// or above the per-kind threshold; matched nodes receive the similarity as
// node weight. Terms are matched longest-n-gram first; matched tokens are
// consumed. Throws NoCornerstones when nothing matches.
TerminalGroups select_cornerstones(QuasiGraph& graph, const Question& question,
                                   const MentionDictionary& dict,
                                   const EmbeddingStore& emb,
                                   const CornerstoneThresholds& thresholds);

struct Candidate {
  int node_id = 0;
  std::string label;
  std::vector<std::pair<int, double>> trees;  // (1-based tree rank, cost)
  std::vector<std::string> type_labels;
  std::vector<std::string> docs;
  double baseline_score = 0.0;  // only set for baseline-derived candidates
};

// Entity nodes appearing in any tree (or its 1-hop candidate pool) that
// belong to no terminal group. Relation and type nodes never qualify.
std::vector<Candidate> extract_candidates(const std::vector<SteinerTree>& trees,
                                          const QuasiGraph& graph,
                                          const TerminalGroups& groups);

// Baseline meeting nodes under the same terminal/kind rules.
std::vector<Candidate> candidates_from_baseline(
    const std::vector<BaselineCandidate>& ranked, const QuasiGraph& graph,
    const TerminalGroups& groups);

// With an expected type: keep candidates having a type label within
// `threshold` phrase similarity; untyped candidates survive unless
// strict_filter. Without an expected type this is the identity.
std::vector<Candidate> filter_by_type(std::vector<Candidate> candidates,
                                      const std::optional<std::string>& expected,
                                      const EmbeddingStore& emb,
                                      double threshold, bool strict_filter);

struct AnswerGroup {
  std::string label;  // longest member label
  std::vector<Candidate> members;
  std::vector<std::pair<int, double>> trees;  // distinct by rank
  std::vector<std::string> docs;
  double score = 0.0;
  int rank = 0;
};

// Union-find merge: token-sequence subsequence either way, or an entity
// alignment edge between the member nodes.
std::vector<AnswerGroup> aggregate(const std::vector<Candidate>& candidates,
                                   const QuasiGraph& graph);

enum class RankStrategy {
  InvCostSum,
  GstCount,
  NodeWeightSum,
  WeightedDistance,
  UnweightedDistance,
  BaselineScore,
};

RankStrategy rank_strategy_from_string(const std::string& name);
const char* to_string(RankStrategy strategy);

// Scores and orders groups (descending, ties by label) and assigns ranks.
std::vector<AnswerGroup> rank(std::vector<AnswerGroup> groups,
                              RankStrategy strategy,
                              const std::vector<SteinerTree>& trees,
                              const QuasiGraph& graph,
                              const TerminalGroups& terminal_groups);

}  // namespace quest
