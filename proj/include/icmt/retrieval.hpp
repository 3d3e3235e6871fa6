#pragma once

#include <optional>
#include <string>
#include <vector>

#include "icmt/bm25.hpp"
#include "icmt/corpus.hpp"
#include "icmt/morphology.hpp"

namespace icmt {

enum class DictVariant { L, LS, LSC };           // entries / +suffixes / +collocations
enum class ExampleVariant { Random, Dictionary, Bm25 };
enum class GrammarVariant { Short, Long, LongP };  // excerpt tier, LongP adds illustrations

std::string to_string(DictVariant v);
std::string to_string(ExampleVariant v);
std::string to_string(GrammarVariant v);

struct GlossBlock {
  std::string headword;       // rendered with trailing '=' for verbal stems
  std::vector<std::string> senses;
  std::optional<std::string> parent;  // rendered parent key, when derived
};

struct SuffixNote {
  std::string surface;        // form as encountered in the sentence
  std::vector<std::string> forms;  // canonical form + allomorphs, display order
  std::string explanation;
};

struct CollocationNote {
  std::string pattern;  // pattern elements joined with spaces, key syntax kept
  std::string gloss;
};

struct DictionaryBundle {
  DictVariant variant = DictVariant::L;
  std::vector<GlossBlock> entries;
  std::vector<SuffixNote> suffix_notes;          // populated iff variant >= LS
  std::vector<CollocationNote> collocation_notes;  // populated iff variant == LSC
  std::vector<std::string> unanalyzed_words;     // words that contributed no block
};

struct ExampleSet {
  ExampleVariant variant = ExampleVariant::Random;
  std::vector<ParallelExample> examples;
  std::vector<double> scores;  // parallel to examples for the bm25 variant
};

struct GrammarExcerpt {
  std::string feature_id;
  std::string text;
  std::vector<GrammarIllustration> illustrations;  // present iff LongP
};

struct GrammarBundle {
  GrammarVariant variant = GrammarVariant::Short;
  std::string preamble;
  std::vector<GrammarExcerpt> excerpts;
};

// One gloss block per distinct stem across all alternative analyses,
// sentence order; parent entries appended transitively (depth <= 3).
// Suffix notes cover every suffix morpheme at LS and above; collocation
// notes at LSC list lexicon collocations whose full pattern matches
// consecutive words of the sentence in at least one analysis path.
DictionaryBundle build_dictionary_bundle(const AnalyzedSentence& analyzed,
                                         const Lexicon& lexicon, DictVariant variant);

// n distinct examples drawn uniformly without replacement (seeded);
// n > |corpus| returns the whole corpus shuffled.
ExampleSet select_random(const ParallelCorpus& corpus, std::size_t n, std::uint64_t seed);

// Iterates sentence stems in order appending each stem's anchored examples
// (corpus order, deduplicated by id) until the cap.
ExampleSet select_by_dictionary(const AnalyzedSentence& analyzed,
                                const ParallelCorpus& corpus, std::size_t cap);

// Top-n by Okapi score, ties broken by corpus order.
ExampleSet select_by_bm25(const Bm25Index& index, const ParallelCorpus& corpus,
                          const AnalyzedSentence& analyzed, std::size_t n);

// Preamble always present; one excerpt per requested feature in the given
// order (short or long tier); LongP appends the feature's illustrations.
GrammarBundle build_grammar_bundle(const std::vector<std::string>& features,
                                   const GrammarTable& table, GrammarVariant variant);

}  // namespace icmt
