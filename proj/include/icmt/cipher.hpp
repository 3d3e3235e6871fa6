#pragma once

#include <string>

#include "icmt/morphology.hpp"
#include "icmt/retrieval.hpp"

namespace icmt {

// Character substitution producing "fake" source text: vowels rotate
// through a-e-i-o-u, consonants through b..z, each character replaced by
// its cycle successor with wrap-around ("amban" -> "encep").  Characters
// outside both cycles pass through; uppercase maps via the lowercase
// cycle with case restored.
std::string encipher_token(const std::string& token);
std::string decipher_token(const std::string& token);

// Enciphered copies of the prompt ingredients: every source-language
// surface (word surfaces, morpheme surfaces, headwords, suffix forms,
// collocation patterns, example source sides) is enciphered; all
// target-language strings stay byte-identical.  Grammar bundles mix the
// two languages and are rejected upstream, so none is accepted here.
AnalyzedSentence encipher_sentence(const AnalyzedSentence& analyzed);
DictionaryBundle encipher_dictionary_bundle(const DictionaryBundle& bundle);
ExampleSet encipher_example_set(const ExampleSet& set);

}  // namespace icmt
