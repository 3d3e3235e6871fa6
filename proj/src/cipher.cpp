#include "icmt/cipher.hpp"

#include <array>
#include <cctype>

namespace icmt {

namespace {

const std::string kVowels = "aeiou";
const std::string kConsonants = "bcdfghjklmnpqrstvwxyz";

std::array<char, 256> build_map(bool forward) {
  std::array<char, 256> map{};
  for (int c = 0; c < 256; ++c) map[c] = static_cast<char>(c);
  auto rotate = [&](const std::string& cycle) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const char from = cycle[i];
      const char to = cycle[(i + 1) % cycle.size()];
      if (forward)
        map[static_cast<unsigned char>(from)] = to;
      else
        map[static_cast<unsigned char>(to)] = from;
    }
  };
  rotate(kVowels);
  rotate(kConsonants);
  return map;
}

std::string apply(const std::string& token, const std::array<char, 256>& map) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isupper(u)) {
      const char lower = static_cast<char>(std::tolower(u));
      const char mapped = map[static_cast<unsigned char>(lower)];
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(mapped))));
    } else {
      out.push_back(map[u]);
    }
  }
  return out;
}

}  // namespace

std::string encipher_token(const std::string& token) {
  static const std::array<char, 256> map = build_map(true);
  return apply(token, map);
}

std::string decipher_token(const std::string& token) {
  static const std::array<char, 256> map = build_map(false);
  return apply(token, map);
}

AnalyzedSentence encipher_sentence(const AnalyzedSentence& analyzed) {
  AnalyzedSentence out = analyzed;
  out.original = encipher_token(out.original);
  for (auto& word : out.words) {
    word.word = encipher_token(word.word);
    for (auto& analysis : word.analyses) {
      for (auto& m : analysis.morphemes) {
        m.surface = encipher_token(m.surface);
        m.entry_ref = encipher_token(m.entry_ref);
      }
    }
  }
  return out;
}

DictionaryBundle encipher_dictionary_bundle(const DictionaryBundle& bundle) {
  DictionaryBundle out = bundle;
  for (auto& block : out.entries) {
    block.headword = encipher_token(block.headword);
    if (block.parent) block.parent = encipher_token(*block.parent);
    // senses are target-language text: untouched
  }
  for (auto& note : out.suffix_notes) {
    note.surface = encipher_token(note.surface);
    for (auto& f : note.forms) f = encipher_token(f);
    // explanation untouched
  }
  for (auto& note : out.collocation_notes) {
    note.pattern = encipher_token(note.pattern);
    // gloss untouched
  }
  for (auto& w : out.unanalyzed_words) w = encipher_token(w);
  return out;
}

ExampleSet encipher_example_set(const ExampleSet& set) {
  ExampleSet out = set;
  for (auto& ex : out.examples) ex.source = encipher_token(ex.source);
  return out;
}

}  // namespace icmt
