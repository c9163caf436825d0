#include "quest/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "quest/errors.hpp"
#include "quest/text.hpp"

namespace quest {

using nlohmann::json;

Benchmark parse_benchmark_json(const std::string& json_text,
                               const std::string& source_name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, source_name + ": " + e.what());
  }
  Benchmark bench;
  try {
    for (const auto& jq : j.at("questions")) {
      BenchmarkEntry entry;
      entry.question_id = jq.at("id").get<std::string>();
      entry.text = jq.at("text").get<std::string>();
      for (const auto& jset : jq.at("gold")) {
        std::vector<std::string> aliases;
        for (const auto& alias : jset) aliases.push_back(alias);
        if (aliases.empty())
          throw Error(ErrorKind::ParseError,
                      source_name + ": empty alias set for " +
                          entry.question_id);
        entry.gold.push_back(std::move(aliases));
      }
      if (entry.gold.empty())
        throw Error(ErrorKind::ParseError,
                    source_name + ": no gold answers for " + entry.question_id);
      bench.questions.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, source_name + ": " + e.what());
  }
  return bench;
}

Benchmark load_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_benchmark_json(buffer.str(), path);
}

bool answer_matches_gold(const std::string& answer,
                         const BenchmarkEntry& entry) {
  const std::string norm = text::normalize(answer);
  for (const auto& aliases : entry.gold)
    for (const auto& alias : aliases)
      if (text::normalize(alias) == norm) return true;
  return false;
}

std::optional<int> first_correct_rank(const std::vector<AnswerGroup>& answers,
                                      const BenchmarkEntry& entry) {
  for (const auto& group : answers) {
    bool hit = answer_matches_gold(group.label, entry);
    for (auto it = group.members.begin(); !hit && it != group.members.end();
         ++it)
      hit = answer_matches_gold(it->label, entry);
    if (hit) return group.rank;
  }
  return std::nullopt;
}

double Metrics::mrr_at(int cutoff) const {
  if (reciprocal_ranks.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [id, rr] : reciprocal_ranks) {
    if (rr > 0.0 && rr >= 1.0 / cutoff) sum += rr;
  }
  return sum / static_cast<double>(reciprocal_ranks.size());
}

Metrics compute_metrics(
    const std::map<std::string, std::vector<AnswerGroup>>& results,
    const Benchmark& benchmark) {
  std::set<std::string> known;
  for (const auto& q : benchmark.questions) known.insert(q.question_id);
  for (const auto& [id, answers] : results)
    if (!known.count(id))
      throw Error(ErrorKind::ConfigError,
                  "results contain unknown question '" + id + "'");

  Metrics metrics;
  int p1 = 0, hit5 = 0;
  double rr_sum = 0.0;
  for (const auto& entry : benchmark.questions) {
    double rr = 0.0;
    auto it = results.find(entry.question_id);
    if (it != results.end()) {
      if (auto rank = first_correct_rank(it->second, entry)) {
        rr = 1.0 / *rank;
        if (*rank == 1) ++p1;
        if (*rank <= 5) ++hit5;
      }
    }
    metrics.reciprocal_ranks.push_back({entry.question_id, rr});
    rr_sum += rr;
  }
  const double n = static_cast<double>(benchmark.questions.size());
  if (n > 0) {
    metrics.mrr = rr_sum / n;
    metrics.p_at_1 = p1 / n;
    metrics.hit_at_5 = hit5 / n;
  }
  return metrics;
}

const char* to_string(ErrorStage stage) {
  switch (stage) {
    case ErrorStage::AnswerNotInCorpus: return "answer_not_in_corpus";
    case ErrorStage::InCorpusNotInGraph: return "in_corpus_not_in_graph";
    case ErrorStage::InGraphNotInTopKTrees: return "in_graph_not_in_top_k_trees";
    case ErrorStage::InTreesNotInCandidates: return "in_trees_not_in_candidates";
    case ErrorStage::InCandidatesNotInTop5: return "in_candidates_not_in_top_5";
    case ErrorStage::Answered: return "answered";
  }
  return "?";
}

namespace {

std::vector<std::string> all_aliases(const BenchmarkEntry& entry) {
  std::vector<std::string> aliases;
  for (const auto& set : entry.gold)
    for (const auto& alias : set) aliases.push_back(alias);
  return aliases;
}

bool alias_in_corpus(const DocumentSet& corpus, const std::string& alias) {
  const auto needle = text::normalized_words(alias);
  if (needle.empty()) return false;
  for (const auto& doc : corpus.documents) {
    std::vector<std::string> stream;
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent)
        for (const auto& w : text::normalized_words(tok.text))
          stream.push_back(w);
    if (text::is_subsequence(needle, stream)) return true;
  }
  return false;
}

}  // namespace

ErrorStage diagnose_failure(const PipelineArtifacts& artifacts,
                            const BenchmarkEntry& entry) {
  const auto aliases = all_aliases(entry);

  if (artifacts.ranked) {
    for (const auto& group : *artifacts.ranked) {
      if (group.rank <= 5 &&
          (answer_matches_gold(group.label, entry) ||
           std::any_of(group.members.begin(), group.members.end(),
                       [&](const Candidate& m) {
                         return answer_matches_gold(m.label, entry);
                       })))
        return ErrorStage::Answered;
    }
  }

  bool in_corpus = std::any_of(aliases.begin(), aliases.end(),
                               [&](const std::string& alias) {
                                 return alias_in_corpus(artifacts.corpus, alias);
                               });
  if (!in_corpus) return ErrorStage::AnswerNotInCorpus;

  std::vector<int> gold_nodes;
  if (artifacts.graph) {
    for (const auto& node : artifacts.graph->nodes) {
      if (node.kind != NodeKind::Entity) continue;
      if (answer_matches_gold(node.label, entry)) gold_nodes.push_back(node.id);
    }
  }
  if (gold_nodes.empty()) return ErrorStage::InCorpusNotInGraph;

  bool in_tree = false;
  if (artifacts.trees) {
    for (const auto& tree : *artifacts.trees) {
      for (int id : gold_nodes)
        if (tree.contains_node(id) ||
            std::binary_search(tree.extra_candidate_nodes.begin(),
                               tree.extra_candidate_nodes.end(), id)) {
          in_tree = true;
          break;
        }
      if (in_tree) break;
    }
  }
  if (!in_tree) return ErrorStage::InGraphNotInTopKTrees;

  bool in_candidates = false;
  if (artifacts.candidates) {
    for (const auto& cand : *artifacts.candidates)
      if (answer_matches_gold(cand.label, entry)) {
        in_candidates = true;
        break;
      }
  }
  if (!in_candidates) return ErrorStage::InTreesNotInCandidates;

  return ErrorStage::InCandidatesNotInTop5;
}

GstDocStats gst_document_stats(const std::vector<SteinerTree>& trees) {
  GstDocStats stats;
  for (std::size_t lo = 0; lo < trees.size(); lo += 10) {
    std::size_t hi = std::min(lo + 10, trees.size());
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      sum += static_cast<double>(trees[i].docs.size());
    std::ostringstream label;
    label << (lo + 1) << "-" << hi;
    stats.docs_per_rank_bin.push_back(
        {label.str(), sum / static_cast<double>(hi - lo)});
  }
  std::map<int, std::pair<int, double>> by_count;  // count -> (n, rank sum)
  for (std::size_t i = 0; i < trees.size(); ++i) {
    auto& slot = by_count[static_cast<int>(trees[i].docs.size())];
    slot.first += 1;
    slot.second += static_cast<double>(i + 1);
  }
  for (const auto& [docs, slot] : by_count)
    stats.trees_per_doc_count.push_back(
        {docs, slot.first, slot.second / slot.first});
  return stats;
}

std::string metrics_to_json(const Metrics& metrics) {
  json j;
  j["mrr"] = metrics.mrr;
  j["p_at_1"] = metrics.p_at_1;
  j["hit_at_5"] = metrics.hit_at_5;
  json per_question = json::array();
  for (const auto& [id, rr] : metrics.reciprocal_ranks)
    per_question.push_back({{"id", id}, {"reciprocal_rank", rr}});
  j["questions"] = std::move(per_question);
  return j.dump(2);
}

std::string metrics_table(const Metrics& metrics) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "metric   value\n";
  os << "MRR      " << metrics.mrr << "\n";
  os << "P@1      " << metrics.p_at_1 << "\n";
  os << "Hit@5    " << metrics.hit_at_5 << "\n";
  return os.str();
}

}  // namespace quest
