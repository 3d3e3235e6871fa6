#pragma once

#include <string>
#include <vector>

#include "icmt/corpus.hpp"

namespace icmt {

enum class MorphemeKind { Stem, VerbalSuffix, NominalSuffix };

struct Morpheme {
  std::string surface;
  MorphemeKind kind = MorphemeKind::Stem;
  // Canonical lexicon key: headword for stems, canonical form for suffixes
  // (allomorph surfaces resolve to their entry's form).
  std::string entry_ref;
};

// One segmentation of a word: stem first, then suffixes in surface order.
struct WordAnalysis {
  std::vector<Morpheme> morphemes;
  bool operator==(const WordAnalysis& other) const;
};

struct WordAnalysisSet {
  std::string word;
  std::vector<WordAnalysis> analyses;
  bool unanalyzed = false;  // true iff analyses empty
};

struct AnalyzedSentence {
  std::string original;
  std::vector<WordAnalysisSet> words;
};

// Segments one whitespace-free word by recursive right-edge suffix
// detachment against the lexicon.  All reachable analyses are returned
// (at most 4 suffixes deep), deduplicated, ordered fewer-suffixes-first
// and then lexicographically by morpheme surfaces.  Verbal suffixes
// attach only to verbal stems, nominal only to nominal.
WordAnalysisSet analyze_word(const std::string& word, const Lexicon& lexicon);

// Whitespace tokenization, then per-word analysis.  Sentence punctuation
// (. , ? ! : ;) is detached into separate unanalyzed tokens.
AnalyzedSentence analyze_sentence(const std::string& sentence, const Lexicon& lexicon);

// Renders an analysis set: morphemes joined with '=' after verbal stems and
// '~' after nominal ones, alternative analyses joined with '/':
// "oho/o=ho".  Unanalyzed words render verbatim.
std::string render_word(const WordAnalysisSet& set);

// Joins rendered words with spaces; detached punctuation re-attaches
// without a preceding space so an all-unknown sentence round-trips.
std::string render(const AnalyzedSentence& analyzed);

// Feature ids from the grammar table triggered by any suffix in any
// analysis, ordered by first occurrence in the sentence.  A feature
// triggers when its id equals a suffix morpheme's canonical form.
std::vector<std::string> extract_features(const AnalyzedSentence& analyzed,
                                          const GrammarTable& table);

}  // namespace icmt
