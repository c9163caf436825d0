#include "quest/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "quest/baselines.hpp"
#include "quest/errors.hpp"

namespace quest {

using nlohmann::json;

SolverChoice solver_from_string(const std::string& name) {
  if (name == "gst") return SolverChoice::Gst;
  if (name == "bfs") return SolverChoice::Bfs;
  if (name == "shortest-paths") return SolverChoice::ShortestPaths;
  throw Error(ErrorKind::ConfigError, "unknown solver '" + name + "'");
}

namespace {

OneHopMode one_hop_from_string(const std::string& name) {
  if (name == "auto") return OneHopMode::Auto;
  if (name == "on") return OneHopMode::On;
  if (name == "off") return OneHopMode::Off;
  throw Error(ErrorKind::ConfigError, "unknown one_hop mode '" + name + "'");
}

double checked_threshold(const json& j, const char* key, double fallback) {
  double v = j.value(key, fallback);
  if (v < 0.0 || v > 1.0)
    throw Error(ErrorKind::ConfigError,
                std::string(key) + " must lie in [0,1]");
  return v;
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::string& source_name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, source_name + ": " + e.what());
  }
  PipelineConfig cfg;
  cfg.k = j.value("k", 50);
  if (cfg.k < 1) throw Error(ErrorKind::ConfigError, "k must be >= 1");
  cfg.cornerstones.entity =
      checked_threshold(j, "cornerstone_threshold_entity", 0.5);
  cfg.cornerstones.relation =
      checked_threshold(j, "cornerstone_threshold_relation", 0.5);
  cfg.cornerstones.type = checked_threshold(j, "cornerstone_threshold_type", 0.5);
  cfg.alignment_threshold = checked_threshold(j, "alignment_threshold", 0.5);
  cfg.type_filter_threshold =
      checked_threshold(j, "type_filter_threshold", 0.5);
  cfg.strategy =
      rank_strategy_from_string(j.value("ranking_strategy", "inv-cost-sum"));
  cfg.strict_type_filter = j.value("strict_type_filter", false);
  cfg.ablation.drop_types = j.value("drop_types", false);
  cfg.ablation.drop_entity_align = j.value("drop_entity_align", false);
  cfg.ablation.drop_relation_align = j.value("drop_relation_align", false);
  cfg.ablation.degenerate_edge_weights =
      j.value("degenerate_edge_weights", false);
  cfg.solver = solver_from_string(j.value("solver", "gst"));
  cfg.one_hop = one_hop_from_string(j.value("one_hop", "auto"));
  cfg.rng_seed = j.value("rng_seed", 0ull);
  cfg.max_queue = j.value("max_queue", 10'000'000ull);
  cfg.embeddings_path = j.value("embeddings_path", "");
  cfg.mentions_path = j.value("mentions_path", "");
  if (j.contains("strata")) {
    const auto& js = j.at("strata");
    StrataConfig strata;
    strata.x1 = js.value("x1", 60);
    strata.x2 = js.value("x2", 30);
    strata.x3 = js.value("x3", 10);
    strata.pool_size = js.value("pool_size", 10);
    strata.rng_seed = js.value("rng_seed", cfg.rng_seed);
    cfg.strata = strata;
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_pipeline_config(buffer.str(), path);
}

Resources load_resources(const PipelineConfig& config) {
  Resources res;
  if (!config.mentions_path.empty())
    res.dict = load_mention_dictionary(config.mentions_path);
  if (!config.embeddings_path.empty())
    res.emb = load_embeddings(config.embeddings_path);
  return res;
}

const PipelineCache::Prepared* PipelineCache::find(
    const std::string& question_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = prepared_.find(question_id);
  return it == prepared_.end() ? nullptr : &it->second;
}

const PipelineCache::Prepared* PipelineCache::store(
    const std::string& question_id, Prepared prepared) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = prepared_.try_emplace(question_id, std::move(prepared));
  return &it->second;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

PipelineCache::Prepared prepare_corpus(const std::string& question_id,
                                       const std::string& corpus_root,
                                       const PipelineConfig& config,
                                       StageTimings& timings) {
  auto t0 = Clock::now();
  DocumentSet set = load_corpus(question_id, corpus_root);
  if (config.strata) {
    DocumentSet sampled = sample_strata(set.documents, *config.strata);
    sampled.question_id = set.question_id;
    set = std::move(sampled);
  }
  for (auto& doc : set.documents)
    doc = resolve_pronouns(merge_entity_tokens(doc));
  timings.load_ms = ms_since(t0);

  auto t1 = Clock::now();
  PipelineCache::Prepared prepared;
  std::vector<Triple> all_triples;
  for (const auto& doc : set.documents) {
    auto triples = extract_triples(doc);
    all_triples.insert(all_triples.end(), triples.begin(), triples.end());
    auto types = extract_types(doc);
    prepared.types.insert(prepared.types.end(), types.begin(), types.end());
  }
  prepared.triples = merge_triples(all_triples);
  prepared.docs = std::move(set);
  timings.extract_ms = ms_since(t1);
  return prepared;
}

}  // namespace

QuestionResult run_question(const std::string& question_text,
                            const std::string& question_id,
                            const std::string& corpus_root,
                            const PipelineConfig& config,
                            const Resources& resources, PipelineCache* cache) {
  QuestionResult result;

  const PipelineCache::Prepared* prepared = nullptr;
  PipelineCache::Prepared local;
  if (cache) prepared = cache->find(question_id);
  if (!prepared) {
    local = prepare_corpus(question_id, corpus_root, config, result.timings);
    prepared = cache ? cache->store(question_id, std::move(local)) : &local;
  }
  result.corpus = prepared->docs;

  auto t_graph = Clock::now();
  result.graph = build_graph(prepared->triples, prepared->types, resources.dict,
                             resources.emb, {config.alignment_threshold});
  if (config.ablation.drop_types || config.ablation.drop_entity_align ||
      config.ablation.drop_relation_align ||
      config.ablation.degenerate_edge_weights)
    result.graph = ablate(result.graph, config.ablation);
  result.timings.graph_ms = ms_since(t_graph);

  auto t_corner = Clock::now();
  result.question = parse_question(question_text);
  result.groups = select_cornerstones(result.graph, result.question,
                                      resources.dict, resources.emb,
                                      config.cornerstones);
  result.timings.cornerstones_ms = ms_since(t_corner);

  auto t_solve = Clock::now();
  std::vector<Candidate> raw_candidates;
  RankStrategy strategy = config.strategy;
  switch (config.solver) {
    case SolverChoice::Gst: {
      SolverConfig solver_cfg;
      solver_cfg.k = config.k;
      solver_cfg.max_queue = config.max_queue;
      result.trees = solve_gst_k(result.graph, result.groups, solver_cfg);
      bool one_hop = config.one_hop == OneHopMode::On ||
                     (config.one_hop == OneHopMode::Auto &&
                      result.groups.size() <= 2);
      if (one_hop)
        result.trees =
            augment_one_hop(std::move(result.trees), result.graph, result.groups);
      result.timings.gst_ms = ms_since(t_solve);
      raw_candidates =
          extract_candidates(result.trees, result.graph, result.groups);
      break;
    }
    case SolverChoice::Bfs: {
      auto ranked = bfs_baseline(result.graph, result.groups);
      result.timings.gst_ms = ms_since(t_solve);
      raw_candidates =
          candidates_from_baseline(ranked, result.graph, result.groups);
      strategy = RankStrategy::BaselineScore;
      break;
    }
    case SolverChoice::ShortestPaths: {
      auto ranked = shortest_paths_baseline(result.graph, result.groups);
      result.timings.gst_ms = ms_since(t_solve);
      raw_candidates =
          candidates_from_baseline(ranked, result.graph, result.groups);
      strategy = RankStrategy::BaselineScore;
      break;
    }
  }

  auto t_answer = Clock::now();
  result.candidates = filter_by_type(
      std::move(raw_candidates), result.question.expected_answer_type,
      resources.emb, config.type_filter_threshold, config.strict_type_filter);
  auto groups = aggregate(result.candidates, result.graph);
  result.answers =
      rank(std::move(groups), strategy, result.trees, result.graph, result.groups);
  result.timings.answer_ms = ms_since(t_answer);
  return result;
}

std::string answers_to_json(const std::string& question_text,
                            const std::vector<AnswerGroup>& answers) {
  json j;
  j["question"] = question_text;
  json items = json::array();
  for (const auto& group : answers) {
    json item;
    item["label"] = group.label;
    item["score"] = group.score;
    item["rank"] = group.rank;
    json trees = json::array();
    for (const auto& [rank, cost] : group.trees) trees.push_back(rank);
    item["trees"] = std::move(trees);
    item["docs"] = group.docs;
    items.push_back(std::move(item));
  }
  j["answers"] = std::move(items);
  return j.dump(2);
}

std::string error_to_json(const std::string& kind, const std::string& message) {
  json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j.dump(2);
}

void log_timings(const std::string& question_id, const StageTimings& t) {
  std::cerr.setf(std::ios::fixed);
  std::cerr.precision(1);
  std::cerr << "[quest] " << question_id << " timings(ms)"
            << " load=" << t.load_ms << " extract=" << t.extract_ms
            << " graph=" << t.graph_ms
            << " cornerstones=" << t.cornerstones_ms << " gst=" << t.gst_ms
            << " answer=" << t.answer_ms << "\n";
}

}  // namespace quest
