#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace quest {

// Mention -> entity-id sets, keyed by normalized mention string.
class MentionDictionary {
 public:
  MentionDictionary() = default;

  void add(const std::string& mention, const std::string& entity_id);
  const std::set<std::string>* lookup(const std::string& mention) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::set<std::string>> entries_;
};

class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(int dimension) : dimension_(dimension) {}

  // Keeps the first vector seen for a word.
  void add(const std::string& word, std::vector<double> vec);
  const std::vector<double>* lookup(const std::string& word) const;

  int dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  int dimension_ = 0;
  std::map<std::string, std::vector<double>> vectors_;
};

// TSV rows "mention<TAB>entity_id". Throws ParseError on malformed rows.
MentionDictionary load_mention_dictionary(const std::string& path);

// word2vec text format, optional "count dim" header line. Throws ParseError
// (with line number) on arity mismatches.
EmbeddingStore load_embeddings(const std::string& path);

// Jaccard similarity of the entity sets both mentions map to; token-set
// Jaccard of the normalized surfaces when either mention is out of
// dictionary. Equal normalized strings always score 1.
double entity_similarity(const std::string& m1, const std::string& m2,
                         const MentionDictionary& dict);

// Cosine between the mean in-vocabulary word vectors of the two phrases,
// in [-1,1]. With no vocabulary coverage on either side: 1 for equal
// normalized strings, else 0.
double phrase_similarity(const std::string& p1, const std::string& p2,
                         const EmbeddingStore& emb);

// phrase_similarity clamped to [0,1] for use as an edge/node weight.
double phrase_weight(const std::string& p1, const std::string& p2,
                     const EmbeddingStore& emb);

double clamp01(double x);

}  // namespace quest
