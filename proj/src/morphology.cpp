#include "icmt/morphology.hpp"

#include <algorithm>
#include <sstream>

#include "icmt/errors.hpp"

namespace icmt {

namespace {

constexpr int kMaxSuffixes = 4;
const std::string kPunctuation = ".,?!:;";

bool is_punct_token(const std::string& t) {
  return t.size() == 1 && kPunctuation.find(t[0]) != std::string::npos;
}

// Surfaces a suffix entry can take, canonical form first.
std::vector<std::string> suffix_surfaces(const SuffixEntry& s) {
  std::vector<std::string> out{s.form};
  out.insert(out.end(), s.allomorphs.begin(), s.allomorphs.end());
  return out;
}

struct SearchState {
  const Lexicon& lexicon;
  std::vector<WordAnalysis> found;
};

// Right-edge detachment: peel suffixes (longer surfaces first) off the end
// of `remaining`; whenever the remainder is a known stem, record an
// analysis with the suffixes accumulated so far (in word order).
void search(SearchState& st, const std::string& remaining,
            std::vector<Morpheme>& pending_suffixes) {
  if (const LexicalEntry* stem = st.lexicon.find_entry(remaining)) {
    bool compatible = true;
    for (const auto& suf : pending_suffixes) {
      const bool needs_verbal = suf.kind == MorphemeKind::VerbalSuffix;
      if (needs_verbal != stem->is_verbal) {
        compatible = false;
        break;
      }
    }
    if (compatible) {
      WordAnalysis analysis;
      analysis.morphemes.push_back({remaining, MorphemeKind::Stem, stem->headword});
      analysis.morphemes.insert(analysis.morphemes.end(), pending_suffixes.rbegin(),
                                pending_suffixes.rend());
      st.found.push_back(std::move(analysis));
    }
  }
  if (pending_suffixes.size() >= kMaxSuffixes) return;

  // Collect candidate (surface, entry) pairs matching the right edge,
  // longest surface first so deeper stems are tried early.
  std::vector<std::pair<std::string, const SuffixEntry*>> candidates;
  for (const auto& entry : st.lexicon.suffixes) {
    for (const auto& surface : suffix_surfaces(entry)) {
      if (surface.size() < remaining.size() &&
          remaining.compare(remaining.size() - surface.size(), surface.size(), surface) == 0) {
        candidates.emplace_back(surface, &entry);
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  for (const auto& [surface, entry] : candidates) {
    Morpheme m;
    m.surface = surface;
    m.kind = entry->slot == SuffixSlot::Verbal ? MorphemeKind::VerbalSuffix
                                               : MorphemeKind::NominalSuffix;
    m.entry_ref = entry->form;
    pending_suffixes.push_back(m);
    search(st, remaining.substr(0, remaining.size() - surface.size()), pending_suffixes);
    pending_suffixes.pop_back();
  }
}

std::vector<std::string> surfaces_of(const WordAnalysis& a) {
  std::vector<std::string> out;
  out.reserve(a.morphemes.size());
  for (const auto& m : a.morphemes) out.push_back(m.surface);
  return out;
}

}  // namespace

bool WordAnalysis::operator==(const WordAnalysis& other) const {
  if (morphemes.size() != other.morphemes.size()) return false;
  for (std::size_t i = 0; i < morphemes.size(); ++i) {
    if (morphemes[i].surface != other.morphemes[i].surface ||
        morphemes[i].kind != other.morphemes[i].kind)
      return false;
  }
  return true;
}

WordAnalysisSet analyze_word(const std::string& word, const Lexicon& lexicon) {
  if (word.empty()) throw ValidationError("analyze_word: empty word");
  if (word.find_first_of(" \t") != std::string::npos)
    throw ValidationError("analyze_word: word contains whitespace: '" + word + "'");

  WordAnalysisSet set;
  set.word = word;

  SearchState st{lexicon, {}};
  std::vector<Morpheme> pending;
  search(st, word, pending);

  // Deduplicate, then order: fewer suffixes first, lexicographic on the
  // morpheme surface sequence among equals.
  std::vector<WordAnalysis> unique;
  for (auto& a : st.found) {
    if (std::find(unique.begin(), unique.end(), a) == unique.end())
      unique.push_back(std::move(a));
  }
  std::sort(unique.begin(), unique.end(), [](const WordAnalysis& a, const WordAnalysis& b) {
    if (a.morphemes.size() != b.morphemes.size())
      return a.morphemes.size() < b.morphemes.size();
    return surfaces_of(a) < surfaces_of(b);
  });

  set.analyses = std::move(unique);
  set.unanalyzed = set.analyses.empty();
  return set;
}

AnalyzedSentence analyze_sentence(const std::string& sentence, const Lexicon& lexicon) {
  if (sentence.find_first_not_of(" \t") == std::string::npos)
    throw ValidationError("analyze_sentence: empty sentence");

  AnalyzedSentence out;
  out.original = sentence;

  std::istringstream stream(sentence);
  std::string token;
  while (stream >> token) {
    // Detach trailing sentence punctuation into separate unanalyzed tokens.
    std::vector<std::string> trailing;
    while (token.size() > 1 && kPunctuation.find(token.back()) != std::string::npos) {
      trailing.insert(trailing.begin(), std::string(1, token.back()));
      token.pop_back();
    }
    if (is_punct_token(token)) {
      out.words.push_back({token, {}, true});
    } else {
      out.words.push_back(analyze_word(token, lexicon));
    }
    for (const auto& p : trailing) out.words.push_back({p, {}, true});
  }
  return out;
}

std::string render_word(const WordAnalysisSet& set) {
  if (set.unanalyzed) return set.word;
  std::string out;
  for (std::size_t i = 0; i < set.analyses.size(); ++i) {
    if (i > 0) out += "/";
    const auto& morphemes = set.analyses[i].morphemes;
    for (std::size_t j = 0; j < morphemes.size(); ++j) {
      if (j > 0)
        out += morphemes[j].kind == MorphemeKind::VerbalSuffix ? "=" : "~";
      out += morphemes[j].surface;
    }
  }
  return out;
}

std::string render(const AnalyzedSentence& analyzed) {
  std::string out;
  for (const auto& set : analyzed.words) {
    const bool punct = set.unanalyzed && is_punct_token(set.word);
    if (!out.empty() && !punct) out += " ";
    out += render_word(set);
  }
  return out;
}

std::vector<std::string> extract_features(const AnalyzedSentence& analyzed,
                                          const GrammarTable& table) {
  std::vector<std::string> out;
  for (const auto& set : analyzed.words) {
    for (const auto& analysis : set.analyses) {
      for (const auto& m : analysis.morphemes) {
        if (m.kind == MorphemeKind::Stem) continue;
        if (!table.find(m.entry_ref)) continue;
        if (std::find(out.begin(), out.end(), m.entry_ref) == out.end())
          out.push_back(m.entry_ref);
      }
    }
  }
  return out;
}

}  // namespace icmt
