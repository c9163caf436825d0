#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "quest/baselines.hpp"
#include "quest/errors.hpp"
#include "quest/evaluation.hpp"
#include "quest/pipeline.hpp"

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string config_path;
  std::string corpus_root;
  std::string output;
  std::optional<int> k;
  std::optional<std::string> solver;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
};

quest::PipelineConfig effective_config(const CommonOptions& opts) {
  quest::PipelineConfig cfg;
  if (!opts.config_path.empty())
    cfg = quest::load_pipeline_config(opts.config_path);
  if (opts.k) cfg.k = *opts.k;
  if (opts.solver) cfg.solver = quest::solver_from_string(*opts.solver);
  if (opts.strategy)
    cfg.strategy = quest::rank_strategy_from_string(*opts.strategy);
  if (opts.seed) cfg.rng_seed = *opts.seed;
  if (cfg.k < 1) throw quest::Error(quest::ErrorKind::ConfigError, "k must be >= 1");
  return cfg;
}

void write_output(const std::string& output, const std::string& content) {
  if (output.empty() || output == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(output);
  if (!out)
    throw quest::Error(quest::ErrorKind::NotFound, "cannot write " + output);
  out << content;
}

struct EvalRow {
  std::string id;
  std::optional<quest::QuestionResult> result;
  std::string error;
};

std::vector<EvalRow> run_benchmark(const quest::Benchmark& benchmark,
                                   const std::string& corpus_root,
                                   const quest::PipelineConfig& cfg,
                                   const quest::Resources& resources,
                                   quest::PipelineCache* cache, int jobs) {
  std::vector<EvalRow> rows(benchmark.questions.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= benchmark.questions.size()) break;
      const auto& entry = benchmark.questions[i];
      rows[i].id = entry.question_id;
      try {
        auto result = quest::run_question(entry.text, entry.question_id,
                                          corpus_root, cfg, resources, cache);
        {
          std::lock_guard<std::mutex> lock(log_mutex);
          quest::log_timings(entry.question_id, result.timings);
        }
        rows[i].result = std::move(result);
      } catch (const quest::Error& e) {
        rows[i].error = e.what();
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "[quest] " << entry.question_id << " error: " << e.what()
                  << "\n";
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return rows;
}

json eval_report(const quest::Benchmark& benchmark,
                 const std::vector<EvalRow>& rows,
                 const quest::PipelineConfig& cfg) {
  std::map<std::string, std::vector<quest::AnswerGroup>> results;
  for (const auto& row : rows)
    if (row.result) results[row.id] = row.result->answers;
  quest::Metrics metrics = quest::compute_metrics(results, benchmark);

  std::map<std::string, int> failure_histogram;
  std::map<std::string, int> pipeline_errors;
  std::map<std::string, std::pair<double, int>> rank_bins;
  std::map<int, std::pair<int, double>> doc_count_bins;

  json questions = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& entry = benchmark.questions[i];
    const auto& row = rows[i];
    json jq;
    jq["id"] = entry.question_id;
    if (!row.error.empty()) {
      jq["error"] = row.error;
      std::string kind = row.error.substr(0, row.error.find(':'));
      pipeline_errors[kind] += 1;
      questions.push_back(std::move(jq));
      continue;
    }
    const auto& result = *row.result;
    auto rank = quest::first_correct_rank(result.answers, entry);
    if (rank) jq["rank"] = *rank;
    jq["reciprocal_rank"] = rank ? 1.0 / *rank : 0.0;

    if ((!rank || *rank > 5) && cfg.solver == quest::SolverChoice::Gst) {
      quest::PipelineArtifacts artifacts;
      artifacts.corpus = result.corpus;
      artifacts.graph = &result.graph;
      artifacts.trees = &result.trees;
      artifacts.candidates = &result.candidates;
      artifacts.ranked = &result.answers;
      auto stage = quest::diagnose_failure(artifacts, entry);
      jq["error_stage"] = quest::to_string(stage);
      failure_histogram[quest::to_string(stage)] += 1;
    }

    auto stats = quest::gst_document_stats(result.trees);
    for (const auto& [bin, mean] : stats.docs_per_rank_bin) {
      auto& slot = rank_bins[bin];
      slot.first += mean;
      slot.second += 1;
    }
    for (const auto& [docs, count, mean_rank] : stats.trees_per_doc_count) {
      auto& slot = doc_count_bins[docs];
      slot.first += count;
      slot.second += mean_rank * count;
    }
    questions.push_back(std::move(jq));
  }

  json j;
  j["metrics"] = {{"mrr", metrics.mrr},
                  {"p_at_1", metrics.p_at_1},
                  {"hit_at_5", metrics.hit_at_5},
                  {"mrr_at_1", metrics.mrr_at(1)},
                  {"mrr_at_3", metrics.mrr_at(3)},
                  {"mrr_at_5", metrics.mrr_at(5)}};
  j["failure_stages"] = failure_histogram;
  j["pipeline_errors"] = pipeline_errors;
  json bins = json::array();
  for (const auto& [bin, slot] : rank_bins)
    bins.push_back({{"ranks", bin},
                    {"mean_docs", slot.second ? slot.first / slot.second : 0.0}});
  j["gst_docs_per_rank_bin"] = std::move(bins);
  json by_docs = json::array();
  for (const auto& [docs, slot] : doc_count_bins)
    by_docs.push_back(
        {{"docs", docs},
         {"trees", slot.first},
         {"mean_rank", slot.first ? slot.second / slot.first : 0.0}});
  j["gst_trees_per_doc_count"] = std::move(by_docs);
  j["questions"] = std::move(questions);
  return j;
}

std::string eval_report_table(const json& report) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  const auto& m = report.at("metrics");
  os << "metric    value\n";
  os << "MRR       " << m.at("mrr").get<double>() << "\n";
  os << "P@1       " << m.at("p_at_1").get<double>() << "\n";
  os << "Hit@5     " << m.at("hit_at_5").get<double>() << "\n";
  os << "\nfailure stages (Hit@5 = 0):\n";
  for (const auto& [stage, count] : report.at("failure_stages").items())
    os << "  " << stage << "  " << count.get<int>() << "\n";
  if (!report.at("pipeline_errors").empty()) {
    os << "\npipeline errors:\n";
    for (const auto& [kind, count] : report.at("pipeline_errors").items())
      os << "  " << kind << "  " << count.get<int>() << "\n";
  }
  os << "\nmean distinct docs per GST, by rank bin:\n";
  for (const auto& bin : report.at("gst_docs_per_rank_bin"))
    os << "  " << bin.at("ranks").get<std::string>() << "  "
       << bin.at("mean_docs").get<double>() << "\n";
  os << "\ntrees by distinct-doc count:\n";
  for (const auto& row : report.at("gst_trees_per_doc_count"))
    os << "  docs=" << row.at("docs").get<int>() << "  trees="
       << row.at("trees").get<int>() << "  mean_rank="
       << row.at("mean_rank").get<double>() << "\n";
  return os.str();
}

int cmd_answer(const CommonOptions& opts, const std::string& question,
               const std::string& question_id) {
  auto cfg = effective_config(opts);
  auto resources = quest::load_resources(cfg);
  auto result = quest::run_question(question, question_id, opts.corpus_root,
                                    cfg, resources);
  quest::log_timings(question_id, result.timings);
  write_output(opts.output, quest::answers_to_json(question, result.answers));
  return 0;
}

int cmd_eval(const CommonOptions& opts, const std::string& benchmark_path,
             int jobs, const std::string& format) {
  auto cfg = effective_config(opts);
  auto resources = quest::load_resources(cfg);
  auto benchmark = quest::load_benchmark(benchmark_path);
  auto rows =
      run_benchmark(benchmark, opts.corpus_root, cfg, resources, nullptr, jobs);
  json report = eval_report(benchmark, rows, cfg);
  if (format == "table")
    write_output(opts.output, eval_report_table(report));
  else
    write_output(opts.output, report.dump(2));
  return 0;
}

int cmd_explain(const CommonOptions& opts, const std::string& question,
                const std::string& question_id, int tree_rank,
                const std::string& format) {
  auto cfg = effective_config(opts);
  auto resources = quest::load_resources(cfg);
  auto result = quest::run_question(question, question_id, opts.corpus_root,
                                    cfg, resources);
  if (tree_rank < 1 || tree_rank > static_cast<int>(result.trees.size()))
    throw quest::Error(quest::ErrorKind::ConfigError,
                       "tree rank " + std::to_string(tree_rank) +
                           " out of range (found " +
                           std::to_string(result.trees.size()) + " trees)");
  const auto& tree = result.trees[static_cast<std::size_t>(tree_rank - 1)];
  std::vector<int> cornerstones;
  for (const auto& g : result.groups.groups)
    cornerstones.insert(cornerstones.end(), g.begin(), g.end());
  if (format == "dot")
    write_output(opts.output,
                 quest::tree_to_dot(tree, result.graph, cornerstones));
  else
    write_output(opts.output, quest::tree_to_json(tree, result.graph));
  return 0;
}

int cmd_sweep(const CommonOptions& opts, const std::string& benchmark_path,
              const std::string& param, const std::vector<double>& values,
              int jobs) {
  auto base_cfg = effective_config(opts);
  auto resources = quest::load_resources(base_cfg);
  auto benchmark = quest::load_benchmark(benchmark_path);
  quest::PipelineCache cache;

  std::ostringstream csv;
  csv << "value,mrr_at_1,mrr_at_3,mrr_at_5\n";
  for (double value : values) {
    quest::PipelineConfig cfg = base_cfg;
    if (param == "k") {
      cfg.k = static_cast<int>(value);
      if (cfg.k < 1)
        throw quest::Error(quest::ErrorKind::ConfigError, "k must be >= 1");
    } else if (param == "alignment-threshold") {
      cfg.alignment_threshold = value;
    } else if (param == "cornerstone-thresholds") {
      cfg.cornerstones.entity = value;
      cfg.cornerstones.relation = value;
      cfg.cornerstones.type = value;
    } else if (param == "type-threshold") {
      cfg.type_filter_threshold = value;
    } else {
      throw quest::Error(quest::ErrorKind::ConfigError,
                         "unknown sweep parameter '" + param + "'");
    }
    auto rows = run_benchmark(benchmark, opts.corpus_root, cfg, resources,
                              &cache, jobs);
    std::map<std::string, std::vector<quest::AnswerGroup>> results;
    for (const auto& row : rows)
      if (row.result) results[row.id] = row.result->answers;
    auto metrics = quest::compute_metrics(results, benchmark);
    csv << value << "," << metrics.mrr_at(1) << "," << metrics.mrr_at(3)
        << "," << metrics.mrr_at(5) << "\n";
  }
  write_output(opts.output, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"question answering over quasi knowledge graphs"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string question, question_id = "q", benchmark_path, format = "json";
  std::string param;
  std::vector<double> values;
  int jobs = 1, tree_rank = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "pipeline config JSON");
    cmd->add_option("--corpus-root", opts.corpus_root,
                    "directory of per-question corpora")
        ->required();
    cmd->add_option("--output", opts.output, "output file (default stdout)");
    cmd->add_option("--k", opts.k, "number of trees");
    cmd->add_option("--solver", opts.solver, "gst | bfs | shortest-paths");
    cmd->add_option("--strategy", opts.strategy, "answer ranking strategy");
    cmd->add_option("--seed", opts.seed, "rng seed");
  };

  auto* answer = app.add_subcommand("answer", "answer a single question");
  add_common(answer);
  answer->add_option("--question", question, "question text")->required();
  answer->add_option("--question-id", question_id,
                     "corpus subdirectory (default 'q')");

  auto* eval = app.add_subcommand("eval", "evaluate a benchmark");
  add_common(eval);
  eval->add_option("--benchmark", benchmark_path, "benchmark JSON")->required();
  eval->add_option("--jobs", jobs, "parallel questions");
  eval->add_option("--format", format, "json | table");

  auto* explain = app.add_subcommand("explain", "export one Steiner tree");
  add_common(explain);
  explain->add_option("--question", question, "question text")->required();
  explain->add_option("--question-id", question_id, "corpus subdirectory");
  explain->add_option("--tree-rank", tree_rank, "1-based tree rank");
  explain->add_option("--format", format, "dot | json");

  auto* sweep = app.add_subcommand("sweep", "metric curve over one parameter");
  add_common(sweep);
  sweep->add_option("--benchmark", benchmark_path, "benchmark JSON")->required();
  sweep->add_option("--param", param,
                    "k | alignment-threshold | cornerstone-thresholds | "
                    "type-threshold")
      ->required();
  sweep->add_option("--values", values, "parameter values")->required();
  sweep->add_option("--jobs", jobs, "parallel questions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(answer))
      return cmd_answer(opts, question, question_id);
    if (app.got_subcommand(eval))
      return cmd_eval(opts, benchmark_path, jobs, format);
    if (app.got_subcommand(explain))
      return cmd_explain(opts, question, question_id, tree_rank,
                         format == "json" ? "json" : "dot");
    if (app.got_subcommand(sweep))
      return cmd_sweep(opts, benchmark_path, param, values, jobs);
  } catch (const quest::Error& e) {
    std::cout << quest::error_to_json(quest::to_string(e.kind()), e.what())
              << std::endl;
    return e.is_io() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cout << quest::error_to_json("Internal", e.what()) << std::endl;
    return 1;
  }
  return 0;
}
