#include "quest/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "quest/errors.hpp"
#include "quest/text.hpp"

namespace quest {

namespace fs = std::filesystem;
using nlohmann::json;

bool operator==(const Token& a, const Token& b) {
  return a.text == b.text && a.pos == b.pos && a.ne_tag == b.ne_tag &&
         a.index == b.index;
}

bool operator==(const AnnotatedDocument& a, const AnnotatedDocument& b) {
  return a.doc_id == b.doc_id && a.rank == b.rank &&
         a.sentences == b.sentences && a.entity_mentions == b.entity_mentions;
}

bool operator==(const DocumentSet& a, const DocumentSet& b) {
  return a.question_id == b.question_id && a.documents == b.documents;
}

namespace {

// Maximal runs of tokens sharing the same non-empty NE tag form a mention.
std::vector<EntityMention> derive_mentions(
    const std::vector<Sentence>& sentences) {
  std::vector<EntityMention> mentions;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence& sent = sentences[s];
    std::size_t i = 0;
    while (i < sent.size()) {
      if (sent[i].ne_tag.empty()) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < sent.size() && sent[j].ne_tag == sent[i].ne_tag) ++j;
      std::string surface = sent[i].text;
      for (std::size_t k = i + 1; k < j; ++k) surface += " " + sent[k].text;
      mentions.push_back({static_cast<int>(s), static_cast<int>(i),
                          static_cast<int>(j), surface});
      i = j;
    }
  }
  return mentions;
}

void reindex(Sentence& sent) {
  for (std::size_t i = 0; i < sent.size(); ++i)
    sent[i].index = static_cast<int>(i);
}

}  // namespace

AnnotatedDocument parse_document_json(const std::string& json_text,
                                      const std::string& source_name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError,
                source_name + " at byte " + std::to_string(e.byte) + ": " +
                    e.what());
  }
  if (!j.is_object() || !j.contains("doc_id") || !j.contains("sentences")) {
    throw Error(ErrorKind::ParseError,
                source_name + ": expected object with doc_id and sentences");
  }
  AnnotatedDocument doc;
  try {
    doc.doc_id = j.at("doc_id").get<std::string>();
    if (j.contains("rank") && !j.at("rank").is_null())
      doc.rank = j.at("rank").get<int>();
    for (const auto& jsent : j.at("sentences")) {
      Sentence sent;
      for (const auto& jtok : jsent) {
        Token tok;
        tok.text = jtok.at("text").get<std::string>();
        tok.pos = jtok.value("pos", std::string("NN"));
        tok.ne_tag = jtok.value("ne", std::string());
        if (tok.text.empty())
          throw Error(ErrorKind::ParseError,
                      source_name + ": empty token text");
        sent.push_back(std::move(tok));
      }
      reindex(sent);
      doc.sentences.push_back(std::move(sent));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, source_name + ": " + e.what());
  }
  doc.entity_mentions = derive_mentions(doc.sentences);
  return doc;
}

std::string document_to_json(const AnnotatedDocument& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  if (doc.rank) j["rank"] = *doc.rank;
  json sentences = json::array();
  for (const auto& sent : doc.sentences) {
    json jsent = json::array();
    for (const auto& tok : sent) {
      json jtok;
      jtok["text"] = tok.text;
      jtok["pos"] = tok.pos;
      if (!tok.ne_tag.empty()) jtok["ne"] = tok.ne_tag;
      jsent.push_back(std::move(jtok));
    }
    sentences.push_back(std::move(jsent));
  }
  j["sentences"] = std::move(sentences);
  return j.dump(2);
}

DocumentSet load_corpus(const std::string& question_id,
                        const std::string& corpus_root) {
  fs::path dir = fs::path(corpus_root) / question_id;
  if (!fs::is_directory(dir))
    throw Error(ErrorKind::NotFound, "no corpus directory " + dir.string());

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw Error(ErrorKind::NotFound,
                "no document files in " + dir.string());

  DocumentSet set;
  set.question_id = question_id;
  std::vector<std::pair<std::string, AnnotatedDocument>> parsed;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::NotFound, "cannot open " + file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    parsed.emplace_back(fs::path(file).filename().string(),
                        parse_document_json(buffer.str(), file));
  }
  std::stable_sort(parsed.begin(), parsed.end(),
                   [](const auto& a, const auto& b) {
                     int ra = a.second.rank.value_or(
                         std::numeric_limits<int>::max());
                     int rb = b.second.rank.value_or(
                         std::numeric_limits<int>::max());
                     if (ra != rb) return ra < rb;
                     return a.first < b.first;
                   });
  for (auto& [_, doc] : parsed) set.documents.push_back(std::move(doc));
  return set;
}

DocumentSet sample_strata(const std::vector<AnnotatedDocument>& ranked_docs,
                          const StrataConfig& cfg) {
  if (cfg.x1 + cfg.x2 + cfg.x3 != 100)
    throw Error(ErrorKind::ConfigError, "strata percentages must sum to 100");
  if (!(cfg.x1 >= cfg.x2 && cfg.x2 >= cfg.x3))
    throw Error(ErrorKind::ConfigError, "strata must satisfy x1 >= x2 >= x3");
  if (cfg.pool_size < 1)
    throw Error(ErrorKind::ConfigError, "pool_size must be >= 1");

  // Effective rank: the rank field when present, else 1-based list position.
  auto rank_of = [&](std::size_t idx) {
    return ranked_docs[idx].rank.value_or(static_cast<int>(idx) + 1);
  };

  const int n1 = cfg.x1 * cfg.pool_size / 100;
  const int n2 = cfg.x2 * cfg.pool_size / 100;
  const int n3 = cfg.pool_size - n1 - n2;

  std::vector<bool> taken(ranked_docs.size(), false);
  std::vector<std::size_t> pool;

  // Stratum 1: rank-ordered prefix.
  int short_fall = 0;
  {
    int want = n1;
    for (std::size_t i = 0; i < ranked_docs.size() && want > 0; ++i, --want) {
      taken[i] = true;
      pool.push_back(i);
    }
    short_fall = want;
  }

  std::mt19937_64 rng(cfg.rng_seed);
  auto sample_range = [&](int lo, int hi, int want) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < ranked_docs.size(); ++i) {
      int r = rank_of(i);
      if (!taken[i] && r >= lo && r <= hi) candidates.push_back(i);
    }
    while (want > 0 && !candidates.empty()) {
      std::uniform_int_distribution<std::size_t> dist(0, candidates.size() - 1);
      std::size_t pick = dist(rng);
      std::size_t idx = candidates[pick];
      candidates.erase(candidates.begin() + static_cast<long>(pick));
      taken[idx] = true;
      pool.push_back(idx);
      --want;
    }
    return want;
  };

  const int stratum2_lo = cfg.x1 / 10 + 1;
  short_fall = sample_range(stratum2_lo, 25, n2 + short_fall);
  short_fall = sample_range(26, 50, n3 + short_fall);
  if (short_fall > 0) {
    std::cerr << "[quest] warning: strata exhausted, pool has "
              << pool.size() << " of " << cfg.pool_size << " documents\n";
  }

  std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
    if (rank_of(a) != rank_of(b)) return rank_of(a) < rank_of(b);
    return ranked_docs[a].doc_id < ranked_docs[b].doc_id;
  });

  DocumentSet out;
  for (std::size_t idx : pool) out.documents.push_back(ranked_docs[idx]);
  return out;
}

AnnotatedDocument merge_entity_tokens(const AnnotatedDocument& doc) {
  AnnotatedDocument out;
  out.doc_id = doc.doc_id;
  out.rank = doc.rank;
  out.sentences.resize(doc.sentences.size());

  std::map<std::pair<int, int>, const EntityMention*> starts;
  for (const auto& m : doc.entity_mentions) starts[{m.sentence, m.begin}] = &m;

  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const Sentence& sent = doc.sentences[s];
    Sentence merged;
    std::size_t i = 0;
    while (i < sent.size()) {
      auto it = starts.find({static_cast<int>(s), static_cast<int>(i)});
      if (it != starts.end()) {
        const EntityMention& m = *it->second;
        Token tok;
        tok.text = m.surface;
        tok.pos = "NNP";
        tok.ne_tag = sent[m.begin].ne_tag;
        merged.push_back(std::move(tok));
        i = static_cast<std::size_t>(m.end);
      } else {
        merged.push_back(sent[i]);
        ++i;
      }
    }
    reindex(merged);
    out.sentences[s] = std::move(merged);
  }
  out.entity_mentions = derive_mentions(out.sentences);
  return out;
}

namespace {

bool is_pronoun(const std::string& word) {
  static const std::unordered_set<std::string> kPronouns = {
      "he", "she", "him", "her", "his", "hers"};
  return kPronouns.count(text::to_lower(word)) > 0;
}

}  // namespace

AnnotatedDocument resolve_pronouns(const AnnotatedDocument& doc) {
  AnnotatedDocument out = doc;

  // Mentions ordered by position; merged and unmerged inputs both work.
  std::vector<EntityMention> mentions = out.entity_mentions;
  std::sort(mentions.begin(), mentions.end(),
            [](const EntityMention& a, const EntityMention& b) {
              return std::tie(a.sentence, a.begin) < std::tie(b.sentence, b.begin);
            });

  std::vector<std::vector<bool>> in_mention(out.sentences.size());
  for (std::size_t s = 0; s < out.sentences.size(); ++s)
    in_mention[s].assign(out.sentences[s].size(), false);
  for (const auto& m : mentions)
    for (int i = m.begin; i < m.end; ++i)
      in_mention[static_cast<std::size_t>(m.sentence)][static_cast<std::size_t>(i)] = true;

  std::size_t next_mention = 0;
  const EntityMention* antecedent = nullptr;
  bool changed = false;

  for (std::size_t s = 0; s < out.sentences.size(); ++s) {
    Sentence& sent = out.sentences[s];
    for (std::size_t i = 0; i < sent.size(); ++i) {
      // Advance past every mention that ends at or before this position.
      while (next_mention < mentions.size() &&
             (mentions[next_mention].sentence < static_cast<int>(s) ||
              (mentions[next_mention].sentence == static_cast<int>(s) &&
               mentions[next_mention].end <= static_cast<int>(i)))) {
        antecedent = &mentions[next_mention];
        ++next_mention;
      }
      if (in_mention[s][i] || !is_pronoun(sent[i].text)) continue;
      if (antecedent == nullptr) continue;
      const Sentence& src =
          out.sentences[static_cast<std::size_t>(antecedent->sentence)];
      sent[i].text = antecedent->surface;
      sent[i].pos = "NNP";
      sent[i].ne_tag = src[static_cast<std::size_t>(antecedent->begin)].ne_tag;
      out.entity_mentions.push_back({static_cast<int>(s), static_cast<int>(i),
                                     static_cast<int>(i) + 1,
                                     antecedent->surface});
      changed = true;
    }
  }

  if (changed) {
    std::sort(out.entity_mentions.begin(), out.entity_mentions.end(),
              [](const EntityMention& a, const EntityMention& b) {
                return std::tie(a.sentence, a.begin) <
                       std::tie(b.sentence, b.begin);
              });
  }
  return out;
}

namespace {

const std::map<std::string, std::string>& pos_lexicon() {
  static const std::map<std::string, std::string> kLexicon = {
      {"the", "DT"},    {"a", "DT"},       {"an", "DT"},     {"this", "DT"},
      {"that", "DT"},   {"these", "DT"},   {"those", "DT"},  {"some", "DT"},
      {"of", "IN"},     {"in", "IN"},      {"on", "IN"},     {"at", "IN"},
      {"by", "IN"},     {"for", "IN"},     {"with", "IN"},   {"from", "IN"},
      {"as", "IN"},     {"into", "IN"},    {"over", "IN"},   {"under", "IN"},
      {"after", "IN"},  {"before", "IN"},  {"between", "IN"},{"through", "IN"},
      {"against", "IN"},{"during", "IN"},  {"about", "IN"},  {"near", "IN"},
      {"without", "IN"},{"to", "TO"},
      {"and", "CC"},    {"or", "CC"},      {"but", "CC"},    {"nor", "CC"},
      {"is", "VBZ"},    {"are", "VBP"},    {"was", "VBD"},   {"were", "VBD"},
      {"be", "VB"},     {"been", "VBN"},   {"being", "VBG"}, {"am", "VBP"},
      {"can", "MD"},    {"could", "MD"},   {"may", "MD"},    {"might", "MD"},
      {"shall", "MD"},  {"should", "MD"},  {"will", "MD"},   {"would", "MD"},
      {"must", "MD"},   {"do", "VBP"},     {"does", "VBZ"},  {"did", "VBD"},
      {"has", "VBZ"},   {"have", "VBP"},   {"had", "VBD"},
      {"he", "PRP"},    {"she", "PRP"},    {"him", "PRP"},   {"her", "PRP$"},
      {"his", "PRP$"},  {"hers", "PRP$"},  {"it", "PRP"},    {"its", "PRP$"},
      {"they", "PRP"},  {"them", "PRP"},   {"i", "PRP"},     {"you", "PRP"},
      {"we", "PRP"},    {"us", "PRP"},
      {"who", "WP"},    {"whom", "WP"},    {"whose", "WP$"}, {"what", "WP"},
      {"which", "WDT"}, {"where", "WRB"},  {"when", "WRB"},  {"why", "WRB"},
      {"how", "WRB"},   {"not", "RB"},     {"also", "RB"},   {"other", "JJ"},
      {"such", "JJ"},   {"including", "VBG"}, {"especially", "RB"},
  };
  return kLexicon;
}

const std::unordered_set<std::string>& verb_stems() {
  static const std::unordered_set<std::string> kVerbs = {
      "play",   "score",  "win",     "meet",    "marry",   "sign",
      "star",   "live",   "train",   "feature", "celebrate", "defeat",
      "join",   "work",   "flow",    "direct",  "date",    "split",
      "engage", "bear",   "appear",  "coach",   "captain", "found",
      "lead",   "run",    "record",  "release", "write",   "sing",
      "act",    "say",    "name",    "visit",   "open",    "close",
  };
  return kVerbs;
}

bool is_all_digits(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

bool starts_upper(const std::string& w) {
  return !w.empty() && std::isupper(static_cast<unsigned char>(w[0])) != 0;
}

std::string tag_token(const std::string& word, bool sentence_initial) {
  if (text::is_punctuation(word)) return word;
  const std::string lower = text::to_lower(word);
  if (auto it = pos_lexicon().find(lower); it != pos_lexicon().end())
    return it->second;
  if (is_all_digits(word)) return "CD";

  const auto& verbs = verb_stems();
  auto stem_in = [&](const std::string& s) { return verbs.count(s) > 0; };
  if (lower.size() > 4 && lower.ends_with("ing")) {
    std::string s = lower.substr(0, lower.size() - 3);
    if (stem_in(s) || stem_in(s + "e")) return "VBG";
  }
  if (lower.size() > 3 && lower.ends_with("ed")) {
    std::string s1 = lower.substr(0, lower.size() - 1);
    std::string s2 = lower.substr(0, lower.size() - 2);
    if (stem_in(s1) || stem_in(s2)) return "VBD";
  }
  if (lower.size() > 2 && lower.ends_with("s")) {
    if (stem_in(lower.substr(0, lower.size() - 1))) return "VBZ";
  }
  if (stem_in(lower)) return "VBP";
  if (lower == "born") return "VBN";

  if (starts_upper(word) && !sentence_initial) return "NNP";
  if (lower.size() > 3 && lower.ends_with("ly")) return "RB";
  if (lower.size() > 3 && lower.ends_with("s")) return "NNS";
  if (starts_upper(word)) return "NNP";
  return "NN";
}

}  // namespace

AnnotatedDocument fallback_annotate(const std::string& raw_text,
                                    const std::string& doc_id) {
  AnnotatedDocument doc;
  doc.doc_id = doc_id;

  // Sentence split: runs of [.!?] followed by whitespace (or end of input).
  std::vector<std::string> raw_sentences;
  std::string current;
  for (std::size_t i = 0; i < raw_text.size(); ++i) {
    char c = raw_text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j + 1 < raw_text.size() &&
             (raw_text[j + 1] == '.' || raw_text[j + 1] == '!' ||
              raw_text[j + 1] == '?'))
        ++j;
      bool boundary = j + 1 >= raw_text.size() ||
                      std::isspace(static_cast<unsigned char>(raw_text[j + 1]));
      if (boundary) {
        if (!current.empty()) raw_sentences.push_back(current);
        current.clear();
        i = j;
        continue;
      }
    }
    current.push_back(c);
  }
  if (current.find_first_not_of(" \t\n\r") != std::string::npos)
    raw_sentences.push_back(current);

  for (const auto& raw_sent : raw_sentences) {
    Sentence sent;
    for (const auto& chunk : text::split_words(raw_sent)) {
      // Peel leading and trailing punctuation into separate tokens.
      std::size_t begin = 0, end = chunk.size();
      std::vector<std::string> lead, trail;
      while (begin < end &&
             std::ispunct(static_cast<unsigned char>(chunk[begin])) &&
             chunk[begin] != '\'') {
        lead.push_back(std::string(1, chunk[begin]));
        ++begin;
      }
      while (end > begin &&
             std::ispunct(static_cast<unsigned char>(chunk[end - 1])) &&
             chunk[end - 1] != '-') {
        trail.push_back(std::string(1, chunk[end - 1]));
        --end;
      }
      std::reverse(trail.begin(), trail.end());
      for (auto& p : lead) sent.push_back({p, p, "", 0});
      if (end > begin) sent.push_back({chunk.substr(begin, end - begin), "", "", 0});
      for (auto& p : trail) sent.push_back({p, p, "", 0});
    }
    for (std::size_t i = 0; i < sent.size(); ++i)
      if (sent[i].pos.empty())
        sent[i].pos = tag_token(sent[i].text, i == 0);
    reindex(sent);
    if (!sent.empty()) doc.sentences.push_back(std::move(sent));
  }

  // Capitalized runs become entity mentions. A run may start at sentence
  // position 0 only when its second token is also capitalized; digit tokens
  // may continue a run but never start one.
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    Sentence& sent = doc.sentences[s];
    auto is_cap = [&](std::size_t i) {
      return i < sent.size() && sent[i].pos == "NNP";
    };
    auto continues = [&](std::size_t i) {
      return is_cap(i) || (i < sent.size() && sent[i].pos == "CD");
    };
    std::size_t i = 0;
    while (i < sent.size()) {
      if (!is_cap(i)) {
        ++i;
        continue;
      }
      if (i == 0 && !is_cap(1)) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < sent.size() && continues(j)) ++j;
      while (j > i && sent[j - 1].pos == "CD") --j;  // runs end capitalized
      for (std::size_t k = i; k < j; ++k) sent[k].ne_tag = "MISC";
      i = j;
    }
  }
  doc.entity_mentions = derive_mentions(doc.sentences);
  return doc;
}

}  // namespace quest
