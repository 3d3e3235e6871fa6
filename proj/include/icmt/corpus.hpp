#pragma once

#include <optional>
#include <string>
#include <vector>

namespace icmt {

// A multi-morpheme pattern with a non-compositional meaning.  Pattern
// elements are morpheme keys: a headword, optionally followed by suffix
// forms joined with '-', with a trailing '=' marking a verbal stem
// (e.g. "gvsa-i", "tebu=").
struct Collocation {
  std::vector<std::string> pattern;
  std::string gloss;
};

struct LexicalEntry {
  std::string headword;
  std::vector<std::string> senses;
  bool is_verbal = false;
  std::optional<std::string> parent;
  std::vector<Collocation> collocations;
};

enum class SuffixSlot { Verbal, Nominal };

struct SuffixEntry {
  std::string form;
  SuffixSlot slot = SuffixSlot::Nominal;
  std::string explanation;
  std::vector<std::string> allomorphs;
};

struct Lexicon {
  std::vector<LexicalEntry> entries;
  std::vector<SuffixEntry> suffixes;

  // Lookup helpers; indices refer into the vectors above.
  const LexicalEntry* find_entry(const std::string& headword) const;
  // Matches a surface against canonical suffix forms and allomorphs.
  const SuffixEntry* find_suffix_surface(const std::string& surface) const;
  bool is_stem(const std::string& s) const;
};

struct ParallelExample {
  std::string id;
  std::string source;
  std::string target;
  std::vector<std::string> anchor_lexemes;
};

struct ParallelCorpus {
  std::vector<ParallelExample> examples;
};

struct GrammarIllustration {
  std::string src;
  std::string gloss;
  std::string tgt;
};

struct GrammarRecord {
  std::string feature_id;
  std::string short_excerpt;
  std::string long_excerpt;
  std::vector<GrammarIllustration> illustrations;
};

struct GrammarTable {
  std::vector<GrammarRecord> features;
  const GrammarRecord* find(const std::string& feature_id) const;
};

struct EvalItem {
  std::string id;
  std::string source;
  std::string reference;
};

struct EvalSet {
  std::vector<EvalItem> items;
};

struct MonoCorpus {
  std::vector<std::string> lines;
};

struct OverlapHit {
  std::string eval_id;
  std::string corpus_id;
  std::string normalized_source;
};

struct OverlapReport {
  std::vector<OverlapHit> hits;
  bool disjoint() const { return hits.empty(); }
};

// Loaders.  Lexicon and grammar table are single JSON documents; parallel
// corpus and eval set are JSON-lines; the monolingual corpus is plain text,
// one sentence per line.  All loaders validate schema and invariants and
// throw ValidationError with a field- or line-level diagnostic.
Lexicon load_lexicon(const std::string& path);
ParallelCorpus load_parallel_corpus(const std::string& path);
GrammarTable load_grammar_table(const std::string& path);
EvalSet load_eval_set(const std::string& path);
MonoCorpus load_mono_corpus(const std::string& path);

// Collapses interior whitespace runs to single spaces and trims the ends.
// No case folding.
std::string normalize_whitespace(const std::string& s);

// Reports every eval source that, after whitespace normalization, exactly
// matches a corpus source.  Empty report means the sets are disjoint.
OverlapReport check_disjoint(const ParallelCorpus& corpus, const EvalSet& eval_set);

// Deterministic serializations (stable key order); loading the same file
// twice must produce byte-identical output here.
std::string serialize_lexicon(const Lexicon& lex);
std::string serialize_parallel_corpus(const ParallelCorpus& corpus);

}  // namespace icmt
