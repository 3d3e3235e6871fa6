#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "icmt/cipher.hpp"
#include "icmt/corpus.hpp"
#include "icmt/morphology.hpp"
#include "icmt/retrieval.hpp"
#include "test_util.hpp"

using namespace icmt;

namespace {

const Lexicon& lex() {
  static Lexicon l = load_lexicon(testutil::fixture("lexicon.json"));
  return l;
}

}  // namespace

TEST_CASE("each letter moves to its cycle successor") {
  CHECK(encipher_token("abcdefghijklmnopqrstuvwxyz") == "ecdfighjoklmnpuqrstvawxyzb");
  CHECK(encipher_token("amban") == "encep");
  CHECK(encipher_token("u") == "a");
  CHECK(encipher_token("tere") == "visi");
  CHECK(encipher_token("gvsai") == "hwteo");
  CHECK(encipher_token("ejen") == "ikip");
  CHECK(encipher_token("morin") == "nusop");

  CHECK(decipher_token("encep") == "amban");
  CHECK(decipher_token("a") == "u");
  CHECK(decipher_token("visi") == "tere");
}

TEST_CASE("case is restored after mapping through the lowercase cycles") {
  CHECK(encipher_token("Amban") == "Encep");
  CHECK(encipher_token("TERE") == "VISI");
  CHECK(encipher_token("TeRe") == "ViSi");
  CHECK(decipher_token("Encep") == "Amban");
}

TEST_CASE("non-letters pass through unchanged") {
  CHECK(encipher_token("3.5, 4,000?!") == "3.5, 4,000?!");
  CHECK(encipher_token("=~/-") == "=~/-");
  CHECK(encipher_token("") == "");
  CHECK(encipher_token("te=re") == "vi=si");
  CHECK(encipher_token("caf\xc3\xa9") == "deg\xc3\xa9");
}

TEST_CASE("the byte map is a permutation and decipher inverts it") {
  std::set<std::string> images;
  for (int c = 1; c < 256; ++c) {
    const std::string s(1, static_cast<char>(c));
    const std::string e = encipher_token(s);
    CHECK(e.size() == 1);
    images.insert(e);
    CHECK(decipher_token(e) == s);
  }
  CHECK(images.size() == 255);
}

TEST_CASE("random strings round-trip both ways") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t len = rng() % 24;
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
      s += static_cast<char>(32 + rng() % 95);
    CHECK(decipher_token(encipher_token(s)) == s);
    CHECK(encipher_token(decipher_token(s)) == s);
  }
}

TEST_CASE("enciphering an analyzed sentence maps every surface, keeping structure") {
  const AnalyzedSentence plain = analyze_sentence("tere gvsai ejen.", lex());
  const AnalyzedSentence enc = encipher_sentence(plain);

  CHECK(enc.original == "visi hwteo ikip.");
  REQUIRE(enc.words.size() == plain.words.size());
  CHECK(enc.words[0].word == "visi");
  REQUIRE(enc.words[0].analyses.size() == 2);
  CHECK(enc.words[0].analyses[0].morphemes[0].surface == "visi");
  CHECK(enc.words[0].analyses[0].morphemes[0].entry_ref == "visi");
  CHECK(enc.words[0].analyses[1].morphemes[0].surface == "vi");
  CHECK(enc.words[0].analyses[1].morphemes[1].surface == "si");
  CHECK(enc.words[0].analyses[1].morphemes[1].kind == MorphemeKind::VerbalSuffix);
  CHECK(enc.words[1].word == "hwteo");
  CHECK(enc.words[2].word == "ikip");
  CHECK(enc.words[3].word == ".");
  CHECK(enc.words[3].unanalyzed);

  CHECK(render(enc) == "visi/vi=si hwte~o ikip.");
}

TEST_CASE("enciphering a dictionary bundle leaves target-language text alone") {
  const auto plain = build_dictionary_bundle(analyze_sentence("tere gvsai ejen", lex()),
                                             lex(), DictVariant::LSC);
  const auto enc = encipher_dictionary_bundle(plain);

  REQUIRE(enc.entries.size() == 4);
  CHECK(enc.entries[0].headword == "visi");
  CHECK(enc.entries[1].headword == "vi=");
  CHECK(enc.entries[2].headword == "hwte");
  CHECK(enc.entries[3].headword == "ikip");
  for (std::size_t i = 0; i < enc.entries.size(); ++i)
    CHECK(enc.entries[i].senses == plain.entries[i].senses);

  REQUIRE(enc.suffix_notes.size() == 2);
  CHECK(enc.suffix_notes[0].surface == "si");
  CHECK(enc.suffix_notes[0].forms == std::vector<std::string>{"si"});
  CHECK(enc.suffix_notes[0].explanation == plain.suffix_notes[0].explanation);
  CHECK(enc.suffix_notes[1].surface == "o");

  REQUIRE(enc.collocation_notes.size() == 1);
  CHECK(enc.collocation_notes[0].pattern == "hwte-o ikip");
  CHECK(enc.collocation_notes[0].gloss == plain.collocation_notes[0].gloss);
}

TEST_CASE("enciphering a bundle maps parents and unanalyzed words") {
  const auto plain = build_dictionary_bundle(analyze_sentence("zzz tebuhe", lex()),
                                             lex(), DictVariant::L);
  const auto enc = encipher_dictionary_bundle(plain);
  CHECK(enc.unanalyzed_words == std::vector<std::string>{"bbb"});
  REQUIRE(enc.entries.size() == 2);
  CHECK(enc.entries[0].headword == "vica=");
  REQUIRE(enc.entries[0].parent.has_value());
  CHECK(*enc.entries[0].parent == "vi=");
  CHECK(enc.entries[1].headword == "vi=");
}

TEST_CASE("enciphering an example set maps sources only") {
  const auto plain = select_by_dictionary(analyze_sentence("tere", lex()),
                                          load_parallel_corpus(testutil::fixture("parallel.jsonl")),
                                          2);
  REQUIRE(plain.examples.size() == 2);
  const auto enc = encipher_example_set(plain);
  CHECK(enc.variant == plain.variant);
  REQUIRE(enc.examples.size() == 2);
  CHECK(enc.examples[0].id == plain.examples[0].id);
  CHECK(enc.examples[0].source == "visi nusop");
  CHECK(enc.examples[0].target == plain.examples[0].target);
  CHECK(enc.examples[0].anchor_lexemes == plain.examples[0].anchor_lexemes);
  CHECK(enc.scores == plain.scores);
}
