#include "quest/extraction.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "json.hpp"

#include "quest/errors.hpp"
#include "quest/text.hpp"

namespace quest {

using nlohmann::json;

namespace {

bool is_noun(const Token& t) { return t.pos.rfind("NN", 0) == 0; }
bool is_verb(const Token& t) { return t.pos.rfind("VB", 0) == 0; }
bool is_adjective(const Token& t) { return t.pos.rfind("JJ", 0) == 0; }
bool is_determiner(const Token& t) { return t.pos == "DT"; }
bool is_preposition(const Token& t) { return t.pos == "IN"; }
bool is_word(const Token& t) { return !text::is_punctuation(t.text); }

bool is_auxiliary(const Token& t) {
  static const std::unordered_set<std::string> kAux = {
      "is",   "are",  "was",   "were",  "be",   "been", "being", "can",
      "could", "may", "might", "shall", "should", "will", "would", "must",
      "do",   "does", "did",   "has",   "have", "had"};
  return kAux.count(text::to_lower(t.text)) > 0;
}

// Argument span [begin, end) within a sentence.
struct Span {
  int begin = 0;
  int end = 0;
  std::string surface;
  ArgumentKind kind = ArgumentKind::NounPhrase;
};

std::string join_tokens(const Sentence& sent, int begin, int end) {
  std::string out;
  for (int i = begin; i < end; ++i) {
    if (!out.empty()) out += " ";
    out += sent[static_cast<std::size_t>(i)].text;
  }
  return out;
}

// Maximal {DT, JJ*, NN*} runs, trimmed to end in a noun, leading
// determiners stripped. Merged NE tokens carry POS NNP and participate.
std::vector<Span> argument_spans(const Sentence& sent) {
  std::vector<Span> spans;
  const int n = static_cast<int>(sent.size());
  int i = 0;
  auto in_np = [&](int k) {
    const Token& t = sent[static_cast<std::size_t>(k)];
    return is_determiner(t) || is_adjective(t) || is_noun(t);
  };
  while (i < n) {
    if (!in_np(i)) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && in_np(j)) ++j;
    int end = j;
    while (end > i && !is_noun(sent[static_cast<std::size_t>(end - 1)])) --end;
    int begin = i;
    while (begin < end && is_determiner(sent[static_cast<std::size_t>(begin)]))
      ++begin;
    if (begin < end) {
      Span span;
      span.begin = begin;
      span.end = end;
      span.surface = join_tokens(sent, begin, end);
      span.kind = (end - begin == 1 &&
                   !sent[static_cast<std::size_t>(begin)].ne_tag.empty())
                      ? ArgumentKind::NamedEntity
                      : ArgumentKind::NounPhrase;
      spans.push_back(std::move(span));
    }
    i = j;
  }
  return spans;
}

int words_between(const Sentence& sent, int begin, int end) {
  int count = 0;
  for (int k = begin; k < end; ++k)
    if (is_word(sent[static_cast<std::size_t>(k)])) ++count;
  return count;
}

struct Occurrence {
  std::string s, p, o;
  ArgumentKind s_kind, o_kind;
  PredicateKind p_kind;
  int sp_intruders = 0;
  int po_intruders = 0;
  Provenance prov;
};

// Noun+preposition patterns (maximal NN* run immediately followed by IN)
// fully inside [begin, end).
struct NounPrep {
  int begin = 0;
  int end = 0;  // one past the IN token
};

std::vector<NounPrep> noun_prep_patterns(const Sentence& sent, int begin,
                                         int end) {
  std::vector<NounPrep> out;
  int i = begin;
  while (i < end) {
    if (!is_noun(sent[static_cast<std::size_t>(i)])) {
      ++i;
      continue;
    }
    int j = i;
    while (j < end && is_noun(sent[static_cast<std::size_t>(j)])) ++j;
    if (j < end && is_preposition(sent[static_cast<std::size_t>(j)]) &&
        (i == begin || !is_noun(sent[static_cast<std::size_t>(i - 1)])))
      out.push_back({i, j + 1});
    i = j;
  }
  return out;
}

void extract_from_sentence(const AnnotatedDocument& doc, int sentence_index,
                           std::vector<Occurrence>& out) {
  const Sentence& sent = doc.sentences[static_cast<std::size_t>(sentence_index)];
  const auto spans = argument_spans(sent);
  const int n = static_cast<int>(sent.size());

  for (std::size_t a = 0; a + 1 < spans.size(); ++a) {
    for (std::size_t b = a + 1; b < spans.size(); ++b) {
      const Span& x = spans[a];
      const Span& y = spans[b];
      if (x.end > y.begin) continue;

      // Verb-mediated: exactly one verb strictly between, non-auxiliary.
      std::vector<int> verbs;
      for (int k = x.end; k < y.begin; ++k)
        if (is_verb(sent[static_cast<std::size_t>(k)])) verbs.push_back(k);
      if (verbs.size() == 1 &&
          !is_auxiliary(sent[static_cast<std::size_t>(verbs[0])])) {
        int v = verbs[0];
        int p_end = v + 1;
        if (p_end < y.begin && p_end < n) {
          const Token& next = sent[static_cast<std::size_t>(p_end)];
          if (next.pos == "IN" || next.pos == "TO") ++p_end;
        }
        Occurrence occ;
        occ.s = x.surface;
        occ.o = y.surface;
        occ.p = join_tokens(sent, v, p_end);
        occ.s_kind = x.kind;
        occ.o_kind = y.kind;
        occ.p_kind = PredicateKind::VerbMediated;
        occ.sp_intruders = words_between(sent, x.end, v);
        occ.po_intruders = words_between(sent, p_end, y.begin);
        occ.prov = {doc.doc_id, sentence_index};
        out.push_back(std::move(occ));
      }

      // Noun-mediated: exactly one noun+preposition pattern strictly between.
      auto patterns = noun_prep_patterns(sent, x.end, y.begin);
      if (patterns.size() == 1) {
        const NounPrep& np = patterns[0];
        Occurrence occ;
        occ.s = x.surface;
        occ.o = y.surface;
        occ.p = join_tokens(sent, np.begin, np.end);
        occ.s_kind = x.kind;
        occ.o_kind = y.kind;
        occ.p_kind = PredicateKind::NounMediated;
        occ.sp_intruders = words_between(sent, x.end, np.begin);
        occ.po_intruders = words_between(sent, np.end, y.begin);
        occ.prov = {doc.doc_id, sentence_index};
        out.push_back(std::move(occ));
      }
    }
  }
}

std::string merge_key(const std::string& s, const std::string& p,
                      const std::string& o) {
  return text::to_lower(s) + "\x1f" + text::to_lower(p) + "\x1f" +
         text::to_lower(o);
}

std::vector<Triple> merge_occurrences(const std::vector<Occurrence>& occs) {
  std::vector<Triple> triples;
  std::map<std::string, std::size_t> index;
  for (const auto& occ : occs) {
    std::string key = merge_key(occ.s, occ.p, occ.o);
    auto it = index.find(key);
    if (it == index.end()) {
      Triple t;
      t.s = occ.s;
      t.p = occ.p;
      t.o = occ.o;
      t.s_kind = occ.s_kind;
      t.o_kind = occ.o_kind;
      t.p_kind = occ.p_kind;
      t.sp_score = 0.0;
      t.po_score = 0.0;
      index.emplace(std::move(key), triples.size());
      triples.push_back(std::move(t));
      it = index.find(merge_key(occ.s, occ.p, occ.o));
    }
    Triple& t = triples[it->second];
    t.sp_score += 1.0 / (occ.sp_intruders + 1);
    t.po_score += 1.0 / (occ.po_intruders + 1);
    if (occ.s_kind == ArgumentKind::NamedEntity)
      t.s_kind = ArgumentKind::NamedEntity;
    if (occ.o_kind == ArgumentKind::NamedEntity)
      t.o_kind = ArgumentKind::NamedEntity;
    t.provenance.push_back(occ.prov);
  }
  return triples;
}

}  // namespace

std::vector<Triple> extract_triples(const AnnotatedDocument& doc) {
  std::vector<Occurrence> occs;
  for (int s = 0; s < static_cast<int>(doc.sentences.size()); ++s)
    extract_from_sentence(doc, s, occs);
  return merge_occurrences(occs);
}

double compute_pair_score(const std::vector<int>& intruder_counts) {
  if (intruder_counts.empty())
    throw Error(ErrorKind::InvariantViolation,
                "pair score over an empty occurrence list");
  double score = 0.0;
  for (int c : intruder_counts) {
    if (c < 0)
      throw Error(ErrorKind::InvariantViolation, "negative intruder count");
    score += 1.0 / (c + 1);
  }
  return score;
}

std::vector<Triple> merge_triples(const std::vector<Triple>& triples) {
  std::vector<Triple> merged;
  std::map<std::string, std::size_t> index;
  for (const auto& t : triples) {
    std::string key = merge_key(t.s, t.p, t.o);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), merged.size());
      merged.push_back(t);
      continue;
    }
    Triple& dst = merged[it->second];
    dst.sp_score += t.sp_score;
    dst.po_score += t.po_score;
    if (t.s_kind == ArgumentKind::NamedEntity)
      dst.s_kind = ArgumentKind::NamedEntity;
    if (t.o_kind == ArgumentKind::NamedEntity)
      dst.o_kind = ArgumentKind::NamedEntity;
    dst.provenance.insert(dst.provenance.end(), t.provenance.begin(),
                          t.provenance.end());
  }
  return merged;
}

namespace {

// Parsing helpers shared by the Hearst patterns. Spans indexed by their
// boundaries for O(1) lookup.
struct SpanIndex {
  std::map<int, const Span*> by_begin;
  std::map<int, const Span*> by_end;
};

SpanIndex index_spans(const std::vector<Span>& spans) {
  SpanIndex idx;
  for (const auto& s : spans) {
    idx.by_begin[s.begin] = &s;
    idx.by_end[s.end] = &s;
  }
  return idx;
}

bool token_is(const Sentence& sent, int i, const char* word) {
  if (i < 0 || i >= static_cast<int>(sent.size())) return false;
  return text::to_lower(sent[static_cast<std::size_t>(i)].text) == word;
}

// Forward list "Y1, Y2 and Y3" starting at `pos`; returns surfaces.
std::vector<const Span*> parse_list_forward(const Sentence& sent,
                                            const SpanIndex& idx, int pos) {
  std::vector<const Span*> items;
  int i = pos;
  while (true) {
    // Leading determiner of a span is stripped, so probe a few offsets.
    const Span* span = nullptr;
    for (int off = 0; off <= 1 && !span; ++off) {
      auto it = idx.by_begin.find(i + off);
      if (it != idx.by_begin.end()) span = it->second;
    }
    if (!span) break;
    items.push_back(span);
    i = span->end;
    if (token_is(sent, i, ",")) ++i;
    if (token_is(sent, i, "and") || token_is(sent, i, "or")) ++i;
    if (i >= static_cast<int>(sent.size())) break;
  }
  return items;
}

// Backward list "... Y1, Y2" whose last item ends at `end`.
std::vector<const Span*> parse_list_backward(const Sentence& sent,
                                             const SpanIndex& idx, int end) {
  std::vector<const Span*> items;
  int i = end;
  while (true) {
    auto it = idx.by_end.find(i);
    if (it == idx.by_end.end()) break;
    items.push_back(it->second);
    i = it->second->begin;
    if (token_is(sent, i - 1, ",")) --i;
    else break;
  }
  std::reverse(items.begin(), items.end());
  return items;
}

void emit(std::vector<TypeAssertion>& out, const Span* y, const Span* x,
          const std::string& doc_id, int sentence, int pattern_id) {
  if (!y || !x) return;
  if (text::normalize(y->surface) == text::normalize(x->surface)) return;
  out.push_back({y->surface, x->surface, {doc_id, sentence}, pattern_id});
}

}  // namespace

std::vector<TypeAssertion> extract_types(const AnnotatedDocument& doc) {
  std::vector<TypeAssertion> out;
  for (int si = 0; si < static_cast<int>(doc.sentences.size()); ++si) {
    const Sentence& sent = doc.sentences[static_cast<std::size_t>(si)];
    const auto spans = argument_spans(sent);
    const auto idx = index_spans(spans);
    const int n = static_cast<int>(sent.size());

    for (int i = 0; i < n; ++i) {
      // "X such as Y1, Y2 and Y3"
      if (token_is(sent, i, "such") && token_is(sent, i + 1, "as")) {
        auto x_it = idx.by_end.find(i);
        const Span* x = x_it == idx.by_end.end() ? nullptr : x_it->second;
        if (x) {
          for (const Span* y : parse_list_forward(sent, idx, i + 2))
            emit(out, y, x, doc.doc_id, si, 1);
        }
        continue;
      }
      // "such X as Y1, ..."
      if (token_is(sent, i, "such") && !token_is(sent, i + 1, "as")) {
        auto x_it = idx.by_begin.find(i + 1);
        const Span* x = x_it == idx.by_begin.end() ? nullptr : x_it->second;
        if (x && token_is(sent, x->end, "as")) {
          for (const Span* y : parse_list_forward(sent, idx, x->end + 1))
            emit(out, y, x, doc.doc_id, si, 2);
        }
        continue;
      }
      // "Y1, Y2 and other X" / "or other X"
      if (token_is(sent, i, "other") &&
          (token_is(sent, i - 1, "and") || token_is(sent, i - 1, "or"))) {
        auto x_it = idx.by_begin.find(i + 1);
        const Span* x = x_it == idx.by_begin.end() ? nullptr : x_it->second;
        if (x) {
          int list_end = i - 1;
          if (token_is(sent, list_end - 1, ",")) --list_end;
          int pattern = token_is(sent, i - 1, "and") ? 3 : 4;
          for (const Span* y : parse_list_backward(sent, idx, list_end))
            emit(out, y, x, doc.doc_id, si, pattern);
        }
        continue;
      }
      // "X, including Y..." / "X, especially Y..."
      if (token_is(sent, i, "including") || token_is(sent, i, "especially")) {
        int x_end = token_is(sent, i - 1, ",") ? i - 1 : i;
        auto x_it = idx.by_end.find(x_end);
        const Span* x = x_it == idx.by_end.end() ? nullptr : x_it->second;
        if (x) {
          int pattern = token_is(sent, i, "including") ? 5 : 6;
          for (const Span* y : parse_list_forward(sent, idx, i + 1))
            emit(out, y, x, doc.doc_id, si, pattern);
        }
        continue;
      }
    }
  }
  return out;
}

std::string triples_to_jsonl(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    json j;
    j["s"] = t.s;
    j["p"] = t.p;
    j["o"] = t.o;
    j["sp"] = t.sp_score;
    j["po"] = t.po_score;
    std::set<std::string> docs;
    for (const auto& prov : t.provenance) docs.insert(prov.doc_id);
    j["docs"] = docs;
    out += j.dump();
    out += "\n";
  }
  return out;
}

std::vector<Triple> triples_from_jsonl(const std::string& jsonl) {
  std::vector<Triple> triples;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    if (eol == std::string::npos) eol = jsonl.size();
    std::string line = jsonl.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::ParseError,
                  "triples line " + std::to_string(line_no) + ": " + e.what());
    }
    Triple t;
    try {
      t.s = j.at("s").get<std::string>();
      t.p = j.at("p").get<std::string>();
      t.o = j.at("o").get<std::string>();
      t.sp_score = j.at("sp").get<double>();
      t.po_score = j.at("po").get<double>();
      if (j.contains("docs"))
        for (const auto& d : j.at("docs"))
          t.provenance.push_back({d.get<std::string>(), 0});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError,
                  "triples line " + std::to_string(line_no) + ": " + e.what());
    }
    triples.push_back(std::move(t));
  }
  return triples;
}

}  // namespace quest
