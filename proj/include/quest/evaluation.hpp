#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quest/answering.hpp"
#include "quest/corpus.hpp"
#include "quest/graph.hpp"
#include "quest/gst.hpp"

namespace quest {

struct BenchmarkEntry {
  std::string question_id;
  std::string text;
  // One alias set per distinct correct answer; any alias of any set counts.
  std::vector<std::vector<std::string>> gold;
};

struct Benchmark {
  std::vector<BenchmarkEntry> questions;
};

Benchmark load_benchmark(const std::string& path);
Benchmark parse_benchmark_json(const std::string& json_text,
                               const std::string& source_name);

struct Metrics {
  double mrr = 0.0;
  double p_at_1 = 0.0;
  double hit_at_5 = 0.0;
  std::vector<std::pair<std::string, double>> reciprocal_ranks;

  // MRR with ranks beyond the cutoff counted as zero.
  double mrr_at(int cutoff) const;
};

// Gold matching is normalized-string equality against any alias.
bool answer_matches_gold(const std::string& answer,
                         const BenchmarkEntry& entry);

// Rank of the first correct answer (1-based); nullopt when absent.
std::optional<int> first_correct_rank(const std::vector<AnswerGroup>& answers,
                                      const BenchmarkEntry& entry);

// Throws ConfigError when `results` contains a question id that the
// benchmark does not. Benchmark questions missing from `results` count as
// unanswered.
Metrics compute_metrics(
    const std::map<std::string, std::vector<AnswerGroup>>& results,
    const Benchmark& benchmark);

enum class ErrorStage {
  AnswerNotInCorpus,
  InCorpusNotInGraph,
  InGraphNotInTopKTrees,
  InTreesNotInCandidates,
  InCandidatesNotInTop5,
  Answered,
};

const char* to_string(ErrorStage stage);

struct PipelineArtifacts {
  DocumentSet corpus;
  const QuasiGraph* graph = nullptr;
  const std::vector<SteinerTree>* trees = nullptr;
  const std::vector<Candidate>* candidates = nullptr;  // post type filter
  const std::vector<AnswerGroup>* ranked = nullptr;
};

// First pipeline stage at which every gold alias is lost. Returns Answered
// when some gold answer sits in the top 5.
ErrorStage diagnose_failure(const PipelineArtifacts& artifacts,
                            const BenchmarkEntry& entry);

struct GstDocStats {
  // Mean distinct contributing documents per tree, by tree-rank bin
  // (1-10, 11-20, ...).
  std::vector<std::pair<std::string, double>> docs_per_rank_bin;
  // Tree count and mean rank by distinct-document count.
  std::vector<std::tuple<int, int, double>> trees_per_doc_count;
};

GstDocStats gst_document_stats(const std::vector<SteinerTree>& trees);

std::string metrics_to_json(const Metrics& metrics);
std::string metrics_table(const Metrics& metrics);

}  // namespace quest
