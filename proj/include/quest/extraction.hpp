#pragma once

#include <string>
#include <vector>

#include "quest/corpus.hpp"

namespace quest {

enum class ArgumentKind { NamedEntity, NounPhrase };
enum class PredicateKind { VerbMediated, NounMediated };

struct Provenance {
  std::string doc_id;
  int sentence = 0;

  auto operator<=>(const Provenance&) const = default;
};

struct Triple {
  std::string s, p, o;
  ArgumentKind s_kind = ArgumentKind::NounPhrase;
  ArgumentKind o_kind = ArgumentKind::NounPhrase;
  PredicateKind p_kind = PredicateKind::VerbMediated;
  double sp_score = 0.0;  // sum over sentences of 1/(intruders + 1)
  double po_score = 0.0;
  std::vector<Provenance> provenance;
};

struct TypeAssertion {
  std::string entity;
  std::string type_phrase;
  Provenance provenance;
  int pattern_id = 0;
};

// Proximity-and-ordering based SPO extraction over a document whose named
// entities have been merged into single tokens. Duplicate (s,p,o) surface
// triples within the document are merged with scores summed.
std::vector<Triple> extract_triples(const AnnotatedDocument& doc);

// Sum of 1/(count+1) over co-occurrence sentences. Throws InvariantViolation
// on an empty list (the pair never co-occurred).
double compute_pair_score(const std::vector<int>& intruder_counts);

// Hearst-pattern hypernym extraction ("X such as Y", "such X as Y",
// "Y and other X", "Y or other X", "X, including Y", "X, especially Y").
std::vector<TypeAssertion> extract_types(const AnnotatedDocument& doc);

// Case-insensitive (s,p,o) merge across documents; scores summed,
// provenance concatenated in input order.
std::vector<Triple> merge_triples(const std::vector<Triple>& triples);

// One JSON object per line: {"s":..,"p":..,"o":..,"sp":..,"po":..,"docs":[..]}
std::string triples_to_jsonl(const std::vector<Triple>& triples);
std::vector<Triple> triples_from_jsonl(const std::string& jsonl);

}  // namespace quest
