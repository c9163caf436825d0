#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "quest/answering.hpp"
#include "quest/corpus.hpp"
#include "quest/evaluation.hpp"
#include "quest/extraction.hpp"
#include "quest/graph.hpp"
#include "quest/gst.hpp"

namespace quest {

enum class SolverChoice { Gst, Bfs, ShortestPaths };
SolverChoice solver_from_string(const std::string& name);

enum class OneHopMode { Auto, On, Off };  // Auto: on for <= 2 groups

struct PipelineConfig {
  int k = 50;
  CornerstoneThresholds cornerstones;
  double alignment_threshold = 0.5;
  double type_filter_threshold = 0.5;
  RankStrategy strategy = RankStrategy::InvCostSum;
  bool strict_type_filter = false;
  AblationFlags ablation;
  SolverChoice solver = SolverChoice::Gst;
  OneHopMode one_hop = OneHopMode::Auto;
  std::uint64_t rng_seed = 0;
  std::uint64_t max_queue = 10'000'000;
  std::string embeddings_path;
  std::string mentions_path;
  std::optional<StrataConfig> strata;  // off by default: use the whole pool
};

PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::string& source_name);

struct Resources {
  MentionDictionary dict;
  EmbeddingStore emb;
};

Resources load_resources(const PipelineConfig& config);

struct StageTimings {
  double load_ms = 0.0;
  double extract_ms = 0.0;
  double graph_ms = 0.0;
  double cornerstones_ms = 0.0;
  double gst_ms = 0.0;
  double answer_ms = 0.0;
};

struct QuestionResult {
  Question question;
  DocumentSet corpus;
  QuasiGraph graph;
  TerminalGroups groups;
  std::vector<SteinerTree> trees;
  std::vector<Candidate> candidates;  // after type filtering
  std::vector<AnswerGroup> answers;
  StageTimings timings;
};

// Re-running a sweep keeps corpora and extractions; graphs are rebuilt only
// when the alignment threshold or ablation changes. Thread-safe; entries
// are never replaced once stored, so returned pointers stay valid.
class PipelineCache {
 public:
  struct Prepared {
    DocumentSet docs;
    std::vector<Triple> triples;
    std::vector<TypeAssertion> types;
  };

  const Prepared* find(const std::string& question_id) const;
  const Prepared* store(const std::string& question_id, Prepared prepared);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Prepared> prepared_;
};

// Full pipeline for one question: load/sample -> merge+coref -> extract ->
// graph -> cornerstones -> solve -> filter/aggregate/rank.
QuestionResult run_question(const std::string& question_text,
                            const std::string& question_id,
                            const std::string& corpus_root,
                            const PipelineConfig& config,
                            const Resources& resources,
                            PipelineCache* cache = nullptr);

// {"question":..., "answers":[{"label","score","rank","trees","docs"}]}
std::string answers_to_json(const std::string& question_text,
                            const std::vector<AnswerGroup>& answers);

std::string error_to_json(const std::string& kind, const std::string& message);

void log_timings(const std::string& question_id, const StageTimings& timings);

}  // namespace quest
