#include "quest/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "quest/errors.hpp"
#include "quest/text.hpp"

namespace quest {

void MentionDictionary::add(const std::string& mention,
                            const std::string& entity_id) {
  entries_[text::normalize(mention)].insert(entity_id);
}

const std::set<std::string>* MentionDictionary::lookup(
    const std::string& mention) const {
  auto it = entries_.find(text::normalize(mention));
  return it == entries_.end() ? nullptr : &it->second;
}

void EmbeddingStore::add(const std::string& word, std::vector<double> vec) {
  if (vec.empty()) return;
  if (dimension_ == 0) dimension_ = static_cast<int>(vec.size());
  vectors_.try_emplace(text::to_lower(word), std::move(vec));
}

const std::vector<double>* EmbeddingStore::lookup(
    const std::string& word) const {
  auto it = vectors_.find(text::to_lower(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

MentionDictionary load_mention_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path);
  MentionDictionary dict;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw Error(ErrorKind::ParseError,
                  path + ":" + std::to_string(line_no) +
                      ": expected exactly 2 tab-separated columns");
    std::string mention = line.substr(0, tab);
    std::string entity = line.substr(tab + 1);
    if (mention.empty() || entity.empty())
      throw Error(ErrorKind::ParseError,
                  path + ":" + std::to_string(line_no) + ": empty column");
    dict.add(mention, entity);
  }
  return dict;
}

EmbeddingStore load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path);
  EmbeddingStore store;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string field;
    while (ss >> field) fields.push_back(field);
    if (first) {
      first = false;
      // Optional "count dim" header.
      if (fields.size() == 2) {
        char* end = nullptr;
        std::strtol(fields[0].c_str(), &end, 10);
        bool n0 = end && *end == '\0';
        std::strtol(fields[1].c_str(), &end, 10);
        bool n1 = end && *end == '\0';
        if (n0 && n1) continue;
      }
    }
    if (fields.size() < 2)
      throw Error(ErrorKind::ParseError,
                  path + ":" + std::to_string(line_no) + ": too few fields");
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        vec.push_back(std::stod(fields[i]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError,
                    path + ":" + std::to_string(line_no) +
                        ": bad vector component '" + fields[i] + "'");
      }
    }
    if (store.dimension() != 0 &&
        static_cast<int>(vec.size()) != store.dimension())
      throw Error(ErrorKind::ParseError,
                  path + ":" + std::to_string(line_no) + ": dimension " +
                      std::to_string(vec.size()) + " != " +
                      std::to_string(store.dimension()));
    store.add(fields[0], std::move(vec));
  }
  return store;
}

namespace {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double entity_similarity(const std::string& m1, const std::string& m2,
                         const MentionDictionary& dict) {
  std::string n1 = text::normalize(m1);
  std::string n2 = text::normalize(m2);
  if (n1 == n2 && !n1.empty()) return 1.0;
  const auto* e1 = dict.lookup(n1);
  const auto* e2 = dict.lookup(n2);
  if (e1 && e2) return jaccard(*e1, *e2);
  // Dictionary miss: fall back to token-set Jaccard of the surfaces.
  auto w1 = text::split_words(n1);
  auto w2 = text::split_words(n2);
  std::set<std::string> s1(w1.begin(), w1.end());
  std::set<std::string> s2(w2.begin(), w2.end());
  return jaccard(s1, s2);
}

namespace {

// Mean of in-vocabulary word vectors; empty when nothing is in vocabulary.
std::vector<double> phrase_vector(const std::string& phrase,
                                  const EmbeddingStore& emb) {
  std::vector<double> mean;
  int hits = 0;
  for (const auto& word : text::normalized_words(phrase)) {
    const auto* v = emb.lookup(word);
    if (!v) continue;
    if (mean.empty()) mean.assign(v->size(), 0.0);
    for (std::size_t i = 0; i < v->size(); ++i) mean[i] += (*v)[i];
    ++hits;
  }
  if (hits > 0)
    for (auto& x : mean) x /= hits;
  return mean;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double phrase_similarity(const std::string& p1, const std::string& p2,
                         const EmbeddingStore& emb) {
  std::string n1 = text::normalize(p1);
  std::string n2 = text::normalize(p2);
  if (n1 == n2 && !n1.empty()) return 1.0;
  std::vector<double> v1 = phrase_vector(n1, emb);
  std::vector<double> v2 = phrase_vector(n2, emb);
  if (v1.empty() || v2.empty()) return 0.0;
  return cosine(v1, v2);
}

double phrase_weight(const std::string& p1, const std::string& p2,
                     const EmbeddingStore& emb) {
  return clamp01(phrase_similarity(p1, p2, emb));
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace quest
