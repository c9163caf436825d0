#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace quest {

struct Token {
  std::string text;
  std::string pos;      // Penn-style tag ("NN", "VBZ", "IN", ...)
  std::string ne_tag;   // empty when the token is not part of a named entity
  int index = 0;        // 0-based position within its sentence
};

using Sentence = std::vector<Token>;

// Token span [begin, end) inside one sentence.
struct EntityMention {
  int sentence = 0;
  int begin = 0;
  int end = 0;
  std::string surface;

  bool operator==(const EntityMention&) const = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::optional<int> rank;  // 1-based retrieval rank
  std::vector<Sentence> sentences;
  std::vector<EntityMention> entity_mentions;
};

struct DocumentSet {
  std::string question_id;
  std::vector<AnnotatedDocument> documents;
};

struct StrataConfig {
  int x1 = 60;
  int x2 = 30;
  int x3 = 10;
  int pool_size = 10;
  std::uint64_t rng_seed = 0;
};

// Parses every *.json document under `corpus_root/question_id/`, ordered by
// rank then filename. Throws NotFound when the directory is missing or
// empty, ParseError (naming file and byte offset) on malformed input.
DocumentSet load_corpus(const std::string& question_id,
                        const std::string& corpus_root);

// Single-document variants of the JSON codec used by load_corpus.
AnnotatedDocument parse_document_json(const std::string& json_text,
                                      const std::string& source_name);
std::string document_to_json(const AnnotatedDocument& doc);

// Stratified sampling over a rank-ordered list: the x1% head of the
// ranking, then seeded uniform draws from ranks (0.1*x1 + 1)..25, then from
// ranks 26..50. Exhausted strata roll their shortfall into the next one.
DocumentSet sample_strata(const std::vector<AnnotatedDocument>& ranked_docs,
                          const StrataConfig& cfg);

// Collapses each entity mention into a single token (POS "NNP") so that
// extraction sees named entities as units.
AnnotatedDocument merge_entity_tokens(const AnnotatedDocument& doc);

// Replaces he/she/him/her/his/hers with the surface of the nearest
// preceding entity mention; the replacement becomes a mention itself.
// Pronouns with no antecedent are left alone.
AnnotatedDocument resolve_pronouns(const AnnotatedDocument& doc);

// Heuristic annotator for demos and tests running without external NLP
// output: regex-free sentence split, lexicon+suffix POS tags, capitalized
// runs as entity mentions.
AnnotatedDocument fallback_annotate(const std::string& raw_text,
                                    const std::string& doc_id = "inline");

bool operator==(const Token& a, const Token& b);
bool operator==(const AnnotatedDocument& a, const AnnotatedDocument& b);
bool operator==(const DocumentSet& a, const DocumentSet& b);

}  // namespace quest
