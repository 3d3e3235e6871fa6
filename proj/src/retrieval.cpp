#include "icmt/retrieval.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "icmt/errors.hpp"

namespace icmt {

std::string to_string(DictVariant v) {
  switch (v) {
    case DictVariant::L: return "l";
    case DictVariant::LS: return "l_s";
    case DictVariant::LSC: return "l_s_c";
  }
  return "";
}

std::string to_string(ExampleVariant v) {
  switch (v) {
    case ExampleVariant::Random: return "random";
    case ExampleVariant::Dictionary: return "dictionary";
    case ExampleVariant::Bm25: return "bm25";
  }
  return "";
}

std::string to_string(GrammarVariant v) {
  switch (v) {
    case GrammarVariant::Short: return "short";
    case GrammarVariant::Long: return "long";
    case GrammarVariant::LongP: return "long_p";
  }
  return "";
}

namespace {

std::string entry_key(const LexicalEntry& e) {
  return e.is_verbal ? e.headword + "=" : e.headword;
}

// A collocation pattern element ("gvsa-i", "tebu=") split into its
// headword and suffix forms.
struct PatternElement {
  std::string headword;
  std::vector<std::string> suffix_forms;
};

PatternElement parse_pattern_element(const std::string& element) {
  PatternElement out;
  std::string rest = element;
  if (!rest.empty() && rest.back() == '=') rest.pop_back();
  std::size_t pos = 0;
  auto dash = rest.find('-');
  out.headword = rest.substr(0, dash);
  while (dash != std::string::npos) {
    pos = dash + 1;
    dash = rest.find('-', pos);
    out.suffix_forms.push_back(rest.substr(pos, dash == std::string::npos ? std::string::npos : dash - pos));
  }
  return out;
}

// True when some analysis of the word has the element's stem and carries
// the element's suffix forms as a prefix of its suffix chain (so a bare
// stem key matches any inflected form of that stem).
bool element_matches(const PatternElement& el, const WordAnalysisSet& word) {
  for (const auto& analysis : word.analyses) {
    const auto& morphemes = analysis.morphemes;
    if (morphemes.empty() || morphemes[0].entry_ref != el.headword) continue;
    if (morphemes.size() - 1 < el.suffix_forms.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < el.suffix_forms.size(); ++i) {
      const auto& m = morphemes[i + 1];
      if (m.entry_ref != el.suffix_forms[i] && m.surface != el.suffix_forms[i]) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

std::string join_pattern(const std::vector<std::string>& pattern) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (i > 0) out += " ";
    out += pattern[i];
  }
  return out;
}

// Deterministic bounded draw; distributions from <random> are not pinned
// across standard libraries, mt19937_64's raw stream is.
std::size_t bounded(std::mt19937_64& rng, std::size_t k) {
  return static_cast<std::size_t>(rng() % k);
}

}  // namespace

DictionaryBundle build_dictionary_bundle(const AnalyzedSentence& analyzed,
                                         const Lexicon& lexicon, DictVariant variant) {
  DictionaryBundle bundle;
  bundle.variant = variant;

  std::unordered_set<std::string> seen_heads;
  auto append_entry_chain = [&](const LexicalEntry* entry) {
    // Child first, then parents to depth 3; each headword appears once.
    int depth = 0;
    while (entry && depth <= 3) {
      if (seen_heads.insert(entry->headword).second) {
        GlossBlock block;
        block.headword = entry_key(*entry);
        block.senses = entry->senses;
        if (entry->parent) {
          const LexicalEntry* parent = lexicon.find_entry(*entry->parent);
          if (parent) block.parent = entry_key(*parent);
        }
        bundle.entries.push_back(std::move(block));
      }
      entry = entry->parent ? lexicon.find_entry(*entry->parent) : nullptr;
      ++depth;
    }
  };

  std::unordered_set<std::string> seen_suffix_surfaces;
  std::unordered_set<std::string> seen_unanalyzed;
  for (const auto& word : analyzed.words) {
    if (word.unanalyzed) {
      const bool punct = word.word.size() == 1 &&
                         std::string(".,?!:;").find(word.word[0]) != std::string::npos;
      if (!punct && seen_unanalyzed.insert(word.word).second)
        bundle.unanalyzed_words.push_back(word.word);
      continue;
    }
    for (const auto& analysis : word.analyses) {
      for (const auto& m : analysis.morphemes) {
        if (m.kind == MorphemeKind::Stem) {
          append_entry_chain(lexicon.find_entry(m.entry_ref));
        } else if (variant != DictVariant::L) {
          if (seen_suffix_surfaces.insert(m.surface).second) {
            const SuffixEntry* suf = lexicon.find_suffix_surface(m.surface);
            SuffixNote note;
            note.surface = m.surface;
            note.forms.push_back(suf->form);
            note.forms.insert(note.forms.end(), suf->allomorphs.begin(), suf->allomorphs.end());
            note.explanation = suf->explanation;
            bundle.suffix_notes.push_back(std::move(note));
          }
        }
      }
    }
  }

  if (variant == DictVariant::LSC) {
    std::unordered_set<std::string> seen_patterns;
    for (const auto& entry : lexicon.entries) {
      for (const auto& col : entry.collocations) {
        std::vector<PatternElement> elements;
        for (const auto& el : col.pattern) elements.push_back(parse_pattern_element(el));
        const std::size_t len = elements.size();
        bool matched = false;
        for (std::size_t start = 0; !matched && start + len <= analyzed.words.size(); ++start) {
          bool all = true;
          for (std::size_t i = 0; i < len; ++i) {
            if (!element_matches(elements[i], analyzed.words[start + i])) {
              all = false;
              break;
            }
          }
          matched = all;
        }
        if (matched) {
          const std::string key = join_pattern(col.pattern);
          if (seen_patterns.insert(key).second)
            bundle.collocation_notes.push_back({key, col.gloss});
        }
      }
    }
  }

  return bundle;
}

ExampleSet select_random(const ParallelCorpus& corpus, std::size_t n, std::uint64_t seed) {
  ExampleSet set;
  set.variant = ExampleVariant::Random;

  std::vector<std::size_t> indices(corpus.examples.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

  std::mt19937_64 rng(seed);
  const std::size_t take = std::min(n, indices.size());
  // Partial Fisher-Yates: positions [0, take) end up uniformly drawn
  // without replacement.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + bounded(rng, indices.size() - i);
    std::swap(indices[i], indices[j]);
  }
  for (std::size_t i = 0; i < take; ++i)
    set.examples.push_back(corpus.examples[indices[i]]);
  return set;
}

ExampleSet select_by_dictionary(const AnalyzedSentence& analyzed,
                                const ParallelCorpus& corpus, std::size_t cap) {
  ExampleSet set;
  set.variant = ExampleVariant::Dictionary;

  std::vector<std::string> stems;
  for (const auto& word : analyzed.words) {
    for (const auto& analysis : word.analyses) {
      for (const auto& m : analysis.morphemes) {
        if (m.kind != MorphemeKind::Stem) continue;
        if (std::find(stems.begin(), stems.end(), m.entry_ref) == stems.end())
          stems.push_back(m.entry_ref);
      }
    }
  }

  std::unordered_set<std::string> taken;
  for (const auto& stem : stems) {
    if (set.examples.size() >= cap) break;
    for (const auto& ex : corpus.examples) {
      if (set.examples.size() >= cap) break;
      if (taken.count(ex.id)) continue;
      if (std::find(ex.anchor_lexemes.begin(), ex.anchor_lexemes.end(), stem) ==
          ex.anchor_lexemes.end())
        continue;
      taken.insert(ex.id);
      set.examples.push_back(ex);
    }
  }
  return set;
}

ExampleSet select_by_bm25(const Bm25Index& index, const ParallelCorpus& corpus,
                          const AnalyzedSentence& analyzed, std::size_t n) {
  if (index.doc_count() != corpus.examples.size())
    throw ValidationError("select_by_bm25: index does not match corpus");
  ExampleSet set;
  set.variant = ExampleVariant::Bm25;
  const auto terms = morpheme_terms(analyzed);
  const auto scores = bm25_score_all(index, terms);
  const auto top = bm25_top_n(index, terms, n);
  for (std::size_t doc : top) {
    set.examples.push_back(corpus.examples[doc]);
    set.scores.push_back(scores[doc]);
  }
  return set;
}

GrammarBundle build_grammar_bundle(const std::vector<std::string>& features,
                                   const GrammarTable& table, GrammarVariant variant) {
  GrammarBundle bundle;
  bundle.variant = variant;
  bundle.preamble =
      "The Manchu language is typologically similar to the Mongolic and Turkic "
      "languages. All Manchu phrases are head-final; the head-word of a phrase "
      "(e.g., the noun of a noun phrase, or the verb of a verb phrase) always "
      "falls at the end of the phrase. Thus, adjectives and adjectival phrases "
      "always precede the noun they modify, and the arguments to the verb always "
      "precede the verb. As a result, Manchu sentence structure is "
      "subject–object–verb (SOV).\n"
      "Manchu also makes extensive use of converb structures and has an inventory "
      "of converbial suffixes to indicate the relationship between the "
      "subordinate verb and the finite verb that follows it.\n"
      "Unlike English, which uses prepositions, Manchu exclusively uses "
      "postpositions.\n"
      "The Manchu language is agglutinative in word structure, meaning that words "
      "are formed by adding suffixes to the root, and each morpheme in a word has "
      "one distinct meaning or grammatical function.";

  for (const auto& id : features) {
    const GrammarRecord* rec = table.find(id);
    if (!rec) throw ValidationError("build_grammar_bundle: unknown feature '" + id + "'");
    GrammarExcerpt ex;
    ex.feature_id = id;
    ex.text = variant == GrammarVariant::Short ? rec->short_excerpt : rec->long_excerpt;
    if (variant == GrammarVariant::LongP) ex.illustrations = rec->illustrations;
    bundle.excerpts.push_back(std::move(ex));
  }
  return bundle;
}

}  // namespace icmt
