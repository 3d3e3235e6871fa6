#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "icmt/corpus.hpp"
#include "icmt/errors.hpp"
#include "icmt/exec.hpp"
#include "icmt/morphology.hpp"
#include "oracle_morphology.hpp"
#include "test_util.hpp"

using namespace icmt;

namespace {

const Lexicon& lex() {
  static Lexicon l = load_lexicon(testutil::fixture("lexicon.json"));
  return l;
}

const GrammarTable& grammar() {
  static GrammarTable g = load_grammar_table(testutil::fixture("grammar.json"));
  return g;
}

std::string describe(const std::vector<WordAnalysis>& analyses) {
  std::string out;
  for (const auto& a : analyses) {
    if (!out.empty()) out += " | ";
    for (std::size_t i = 0; i < a.morphemes.size(); ++i) {
      const auto& m = a.morphemes[i];
      if (i > 0) out += "+";
      out += m.surface;
      out += m.kind == MorphemeKind::Stem ? ":S" : m.kind == MorphemeKind::VerbalSuffix ? ":V" : ":N";
      out += ":" + m.entry_ref;
    }
  }
  return out.empty() ? "<none>" : out;
}

// Field-level equality, stricter than WordAnalysis::operator== (which
// ignores entry_ref).
bool same(const std::vector<WordAnalysis>& a, const std::vector<WordAnalysis>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].morphemes.size() != b[i].morphemes.size()) return false;
    for (std::size_t j = 0; j < a[i].morphemes.size(); ++j) {
      const auto& x = a[i].morphemes[j];
      const auto& y = b[i].morphemes[j];
      if (x.surface != y.surface || x.kind != y.kind || x.entry_ref != y.entry_ref)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("word analysis matches the reference segmenter on every constructible word") {
  const auto words = testoracle::constructible_words(lex(), 12);
  REQUIRE(words.size() > 100);
  for (const auto& w : words) {
    CAPTURE(w);
    const WordAnalysisSet got = analyze_word(w, lex());
    const auto want = testoracle::oracle_analyses(w, lex());
    CHECK(got.word == w);
    CHECK(got.unanalyzed == want.empty());
    CHECK(got.analyses.size() == want.size());
    if (!same(got.analyses, want)) {
      CAPTURE(describe(got.analyses));
      CAPTURE(describe(want));
      FAIL_CHECK("analysis mismatch for '" << w << "'");
    }
  }
}

TEST_CASE("word analysis matches the reference segmenter on random strings") {
  // Strings over the fixture's alphabet, so near-misses are common.
  const std::string alphabet = "teroshaik";
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t len = 1 + rng() % 9;
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w += alphabet[rng() % alphabet.size()];
    CAPTURE(w);
    const WordAnalysisSet got = analyze_word(w, lex());
    const auto want = testoracle::oracle_analyses(w, lex());
    CHECK(got.unanalyzed == want.empty());
    CHECK(same(got.analyses, want));
  }
}

TEST_CASE("ambiguous word lists the bare stem before the segmented reading") {
  const WordAnalysisSet set = analyze_word("tere", lex());
  REQUIRE(set.analyses.size() == 2);
  CHECK(!set.unanalyzed);
  REQUIRE(set.analyses[0].morphemes.size() == 1);
  CHECK(set.analyses[0].morphemes[0].surface == "tere");
  CHECK(set.analyses[0].morphemes[0].kind == MorphemeKind::Stem);
  REQUIRE(set.analyses[1].morphemes.size() == 2);
  CHECK(set.analyses[1].morphemes[0].surface == "te");
  CHECK(set.analyses[1].morphemes[1].surface == "re");
  CHECK(set.analyses[1].morphemes[1].kind == MorphemeKind::VerbalSuffix);
  CHECK(set.analyses[1].morphemes[1].entry_ref == "re");
  CHECK(render_word(set) == "tere/te=re");
}

TEST_CASE("allomorph surfaces resolve to the canonical suffix form") {
  const WordAnalysisSet set = analyze_word("tebuhe", lex());
  REQUIRE(set.analyses.size() == 1);
  const auto& m = set.analyses[0].morphemes;
  REQUIRE(m.size() == 2);
  CHECK(m[0].surface == "tebu");
  CHECK(m[0].entry_ref == "tebu");
  CHECK(m[0].kind == MorphemeKind::Stem);
  CHECK(m[1].surface == "he");
  CHECK(m[1].entry_ref == "ha");
  CHECK(m[1].kind == MorphemeKind::VerbalSuffix);
  CHECK(render_word(set) == "tebu=he");

  const WordAnalysisSet oho = analyze_word("oho", lex());
  CHECK(render_word(oho) == "oho/o=ho");
  REQUIRE(oho.analyses.size() == 2);
  CHECK(oho.analyses[1].morphemes[1].entry_ref == "ha");
}

TEST_CASE("suffix chains keep surface order and use the stem's joiner") {
  CHECK(render_word(analyze_word("karaleso", lex())) == "kara~le~so");
  CHECK(render_word(analyze_word("sakdasa", lex())) == "sakda~sa");
  CHECK(render_word(analyze_word("morinsa", lex())) == "morin~sa");
  CHECK(render_word(analyze_word("gvsai", lex())) == "gvsa~i");
  CHECK(render_word(analyze_word("sei", lex())) == "se~i");
}

TEST_CASE("suffix slot must match the stem's category") {
  // te is verbal, le nominal: no reading survives.
  const WordAnalysisSet tele = analyze_word("tele", lex());
  CHECK(tele.unanalyzed);
  CHECK(tele.analyses.empty());
  CHECK(render_word(tele) == "tele");
  // o is verbal, so (plural allomorph) nominal.
  CHECK(analyze_word("oso", lex()).unanalyzed);
  // Mixed chain fails even when the first suffix is compatible.
  CHECK(analyze_word("karalehe", lex()).unanalyzed);
}

TEST_CASE("at most four suffixes are detached") {
  // Five copies of 'le' would need a fifth detachment; the word falls back
  // to unanalyzed and renders verbatim.
  CHECK(analyze_word("karalelelelele", lex()).unanalyzed);
  CHECK(render_word(analyze_word("karalelelelele", lex())) == "karalelelelele");
  CHECK(render_word(analyze_word("karalelelele", lex())) == "kara~le~le~le~le");
}

TEST_CASE("unknown words and empty input") {
  CHECK(analyze_word("xyz", lex()).unanalyzed);
  CHECK_THROWS_AS(analyze_word("", lex()), ValidationError);
  CHECK_THROWS_AS(analyze_word("two words", lex()), ValidationError);
  CHECK_THROWS_AS(analyze_sentence("   ", lex()), ValidationError);
}

TEST_CASE("sentence analysis detaches trailing punctuation into unanalyzed tokens") {
  const AnalyzedSentence s = analyze_sentence("karaleso tehe, oso tele.", lex());
  CHECK(s.original == "karaleso tehe, oso tele.");
  REQUIRE(s.words.size() == 6);
  CHECK(s.words[0].word == "karaleso");
  CHECK(s.words[1].word == "tehe");
  CHECK(s.words[2].word == ",");
  CHECK(s.words[2].unanalyzed);
  CHECK(s.words[3].word == "oso");
  CHECK(s.words[4].word == "tele");
  CHECK(s.words[5].word == ".");
  CHECK(render(s) == "kara~le~so te=he, oso tele.");
}

TEST_CASE("rendering reattaches punctuation and round-trips unknown text") {
  CHECK(render(analyze_sentence("zzz qqq.", lex())) == "zzz qqq.");
  CHECK(render(analyze_sentence("udu? zz!", lex())) == "udu? zz!");
  CHECK(render(analyze_sentence("a: b; c", lex())) == "a: b; c");
  CHECK(render(analyze_sentence("tere gvsai ejen", lex())) == "tere/te=re gvsa~i ejen");
}

TEST_CASE("sentence analysis collapses irregular whitespace") {
  const AnalyzedSentence s = analyze_sentence("  se   udu\toho ", lex());
  REQUIRE(s.words.size() == 3);
  CHECK(s.words[0].word == "se");
  CHECK(s.words[1].word == "udu");
  CHECK(s.words[2].word == "oho");
}

TEST_CASE("feature extraction reports triggered suffixes in sentence order") {
  const auto feats =
      extract_features(analyze_sentence("karaleso tehe, oso tele.", lex()), grammar());
  CHECK(feats == std::vector<std::string>{"le", "sa", "ha"});

  // Any alternative analysis counts: bare "tere" still surfaces 're'.
  const auto f2 = extract_features(analyze_sentence("tere gvsai ejen", lex()), grammar());
  CHECK(f2 == std::vector<std::string>{"re", "i"});

  // Each feature appears once even when triggered repeatedly.
  const auto f3 = extract_features(analyze_sentence("sakdasa morinsa", lex()), grammar());
  CHECK(f3 == std::vector<std::string>{"sa"});

  // No suffixes, no features.
  CHECK(extract_features(analyze_sentence("morin ejen", lex()), grammar()).empty());
}
