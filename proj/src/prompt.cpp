#include "icmt/prompt.hpp"

#include <sstream>

#include "icmt/errors.hpp"
#include <json.hpp>

namespace icmt {

namespace {

// Template texts.  The wording, including the irregularities ("ect.",
// "they modifies", the missing space in "verbal(verb"), is deliberate and
// must not be cleaned up: golden files freeze every byte.

constexpr const char* kAskNicely =
    "Please try your best to translate, it's okay if your translation is bad. "
    "Do not refuse to try it. I won't blame you.";

constexpr const char* kEnclose =
    "Please enclose your translation in ###. For example, if your translation "
    "is \"Hello world\", the last part of your output should be ### Hello world ###";

constexpr const char* kMorphNote =
    "The morphemes in this sentence have been segmented: the verb stem and "
    "verbal suffixes are separated by '=', the noun stem and nominal suffixes "
    "are separated by '~'. Note that some words can be either analyzed as a "
    "whole or as a word stem plus a suffix; the different analyses are "
    "separated by '/'. In such a case, explanations for both analyses are "
    "given below, and you need to choose which one is the most appropriate in "
    "the given context.";

constexpr const char* kDictionaryIntro =
    "For the translation task, you are given the word by word mapping from the "
    "{source language} words to the {target language} words. Some words can be "
    "polysemous and there might be multiple possible English translations. In "
    "such a case, please choose the most appropriate one. Note that for some "
    "words, they might be derived from a more basic form, we call this the "
    "parent word. The parents are also given in the word-by-word translation. "
    "Here are the dictionary entries for each individual word in the source "
    "sentence:";

constexpr const char* kCollocationCaveat =
    "Note that sometimes two or more words can form a collocation and express "
    "a specific meaning. You should refer to the collocations listed under the "
    "dictionary entries. For example, 'mama' means 'grandmother', 'erxe=' "
    "means 'to attend', but 'mama erxe=' as a collocation means 'to get "
    "smallpox'. In such a case, explain which collocation meaning you think is "
    "most appropriate in the context.";

constexpr const char* kParallelIntro =
    "To help with the translation, here are some {source language}-{target "
    "language} parallel sentences that may be helpful for your translation:";

constexpr const char* kGrammarIntro =
    "You are also given this grammar book below. Feel free to rely on this "
    "grammar book in your translation task:\n- Manchu Grammar Book";

constexpr const char* kCotAnnotate =
    "Given the previous information, please first annotate the meaning and "
    "grammatical features of each word in the sentence.\n"
    "For each word, based on their English translation and whether it ends "
    "with '='(marker of verb stems), first decide whether the word is nominal "
    "(noun/adjective), or a verbal(verb, converb) or else (other part of "
    "speech such as adverb, postposition ect.).\n"
    "Then for each noun, please annotate its number (singular/plural) and case "
    "(Nominative/Genitive/Dative-Locative/Accusative/Ablative), based on the "
    "particles/suffixes that follow the noun.\n"
    "And for each verb, please annotate its tense (perfect/imperfect) and form "
    "(Affirmative/Negative/Interrogative/Imperative/Optative/Desiderative), "
    "based on the suffixes attached to the verb.\n"
    "\n"
    "Then based on the annotations, translate the sentence from {source "
    "language} into {target language} based on the annotations and the "
    "analyzed sentence structure.";

constexpr const char* kCotAnnotateSyntax =
    "Given the previous information, please proceed with the following steps:\n"
    "Step 1:\n"
    "Please first annotate the meaning and grammatical features of each word "
    "in the sentence.\n"
    "For each word, based on their English translation and whether it ends "
    "with '='(marker of verb stems), first decide whether the word is nominal "
    "(noun/adjective), or a verbal (verb, converb) or else (other part of "
    "speech such as adverb, postposition etc.).\n"
    "Then for each noun, please annotate its number (singular/plural) and case "
    "(Nominative/Genitive/Dative-Locative/Accusative/Ablative), based on the "
    "particles/suffixes that follow the noun.\n"
    "And for each verb, please annotate its tense (perfect/imperfect) and form "
    "(Affirmative/Negative/Interrogative/Imperative/Optative/Desiderative), "
    "based on the suffixes attached to the verb.\n"
    "Step 2:\n"
    "Then based on the annotations, please analyze the sentence structure by "
    "figuring out what the subject and object of each verb is. Keep in mind "
    "that {source language}'s basic word order is subject–object–verb (SOV) and "
    "it is a head-final language, so that the adjectives and participles "
    "always precede the noun they modifies, and the arguments to the verb "
    "always precede the verb.\n"
    "Note that clauses can be combined into a single sentence by using "
    "converbs, which relate the first action to the second.\n"
    "The final step:\n"
    "Translate the sentence into {target language} based on the annotations "
    "and the analyzed sentence structure.";

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string fill_languages(const std::string& text, const PromptSpec& spec) {
  return replace_all(replace_all(text, "{source language}", spec.source_language),
                     "{target language}", spec.target_language);
}

std::size_t whitespace_token_count(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  std::size_t n = 0;
  while (in >> tok) ++n;
  return n;
}

std::string render_dictionary_entries(const DictionaryBundle& bundle) {
  std::ostringstream out;
  bool first = true;
  for (const auto& block : bundle.entries) {
    if (!first) out << "\n";
    first = false;
    out << block.headword << ": ";
    if (block.senses.size() == 1) {
      out << block.senses[0];
    } else {
      for (std::size_t i = 0; i < block.senses.size(); ++i) {
        if (i > 0) out << " ";
        out << (i + 1) << ". " << block.senses[i];
      }
    }
    if (block.parent) out << " (derived from " << *block.parent << ")";
  }
  if (!bundle.suffix_notes.empty()) {
    out << "\nSuffixes:";
    for (const auto& note : bundle.suffix_notes) {
      out << "\n-" << note.surface << ": ";
      if (note.forms.size() > 1) {
        out << "(";
        for (std::size_t i = 0; i < note.forms.size(); ++i) {
          if (i > 0) out << "/";
          out << "-" << note.forms[i];
        }
        out << ") ";
      }
      out << note.explanation;
    }
  }
  if (!bundle.collocation_notes.empty()) {
    out << "\nCollocations:";
    for (const auto& note : bundle.collocation_notes)
      out << "\n" << note.pattern << ": " << note.gloss;
  }
  return out.str();
}

std::string render_parallel_examples(const ExampleSet& set, const PromptSpec& spec) {
  std::ostringstream out;
  bool first = true;
  for (const auto& ex : set.examples) {
    if (!first) out << "\n";
    first = false;
    out << spec.source_language << ": " << ex.source << "\n"
        << spec.target_language << ": " << ex.target;
  }
  return out.str();
}

std::string render_grammar_excerpts(const GrammarBundle& bundle) {
  std::ostringstream out;
  bool first = true;
  for (const auto& ex : bundle.excerpts) {
    if (!first) out << "\n";
    first = false;
    out << "- " << ex.text;
    for (const auto& ill : ex.illustrations)
      out << "\n  Example: " << ill.src << " | " << ill.gloss << " | '" << ill.tgt << "'";
  }
  return out.str();
}

void check_placeholders(const std::string& text) {
  static const char* names[] = {"{source language}", "{target language}", "{sentence}",
                                "{morphologically analyzed sentence}", "{components}",
                                "{dictionary entries}", "{parallel examples}",
                                "{grammar excerpts}"};
  for (const char* n : names)
    if (text.find(n) != std::string::npos)
      throw ValidationError(std::string("build_prompt: unfilled placeholder ") + n);
}

PromptText finish(std::string text, std::vector<std::string> provenance) {
  check_placeholders(text);
  PromptText out;
  out.estimated_tokens =
      static_cast<std::size_t>(static_cast<double>(whitespace_token_count(text)) * 1.3);
  out.text = std::move(text);
  out.provenance = std::move(provenance);
  return out;
}

}  // namespace

std::string to_string(CotVariant v) {
  return v == CotVariant::Annotate ? "annotate" : "annotate_syntax";
}

void PromptSpec::validate() const {
  if (source_language.empty() || target_language.empty())
    throw ValidationError("PromptSpec: language names must be non-empty");
  if (!use_morph && (dict || parallel || grammar || cot))
    throw ValidationError("PromptSpec: components require the analyzed sentence form");
  if (cipher && grammar)
    throw ValidationError(
        "PromptSpec: cipher cannot combine with grammar excerpts (mixed-language text)");
}

std::string PromptSpec::tag() const {
  if (!use_morph) return "x";
  std::string t = "mu";
  if (dict) t += "+D" + replace_all(to_string(*dict), "_", "");
  if (parallel) {
    switch (*parallel) {
      case ExampleVariant::Random: t += "+Pr"; break;
      case ExampleVariant::Dictionary: t += "+Pd"; break;
      case ExampleVariant::Bm25: t += "+Pbm25"; break;
    }
  }
  if (grammar) t += "+G" + replace_all(to_string(*grammar), "_", "");
  if (cot) t += (*cot == CotVariant::Annotate ? "+Ca" : "+Cas");
  if (cipher) t = "enc(" + t + ")";
  return t;
}

std::string cot_instruction(CotVariant variant) {
  return variant == CotVariant::Annotate ? kCotAnnotate : kCotAnnotateSyntax;
}

PromptText build_prompt(const PromptSpec& spec, const std::string& raw_sentence) {
  spec.validate();
  if (spec.use_morph)
    throw ValidationError("build_prompt: analyzed sentence required when use_morph is set");
  std::ostringstream out;
  out << "Please help me translate the following sentence from " << spec.source_language
      << " to " << spec.target_language << ":\n"
      << raw_sentence << "\n"
      << kAskNicely << "\n"
      << kEnclose;
  return finish(out.str(), {"direct"});
}

PromptText build_prompt(const PromptSpec& spec, const AnalyzedSentence& analyzed,
                        const DictionaryBundle* dict, const ExampleSet* examples,
                        const GrammarBundle* grammar) {
  spec.validate();
  if (!spec.use_morph)
    throw ValidationError("build_prompt: raw sentence form expected when use_morph is unset");
  if (static_cast<bool>(spec.dict) != (dict != nullptr))
    throw ValidationError("build_prompt: dictionary bundle does not match spec");
  if (static_cast<bool>(spec.parallel) != (examples != nullptr))
    throw ValidationError("build_prompt: example set does not match spec");
  if (static_cast<bool>(spec.grammar) != (grammar != nullptr))
    throw ValidationError("build_prompt: grammar bundle does not match spec");
  if (dict && dict->variant != *spec.dict)
    throw ValidationError("build_prompt: dictionary bundle variant does not match spec");
  if (examples && examples->variant != *spec.parallel)
    throw ValidationError("build_prompt: example set variant does not match spec");
  if (grammar && grammar->variant != *spec.grammar)
    throw ValidationError("build_prompt: grammar bundle variant does not match spec");

  const std::string rendered = render(analyzed);
  std::vector<std::string> provenance{"morph"};

  std::vector<std::string> components;
  if (dict) {
    std::string text = fill_languages(kDictionaryIntro, spec);
    text += "\n" + render_dictionary_entries(*dict);
    text += "\n\n";
    text += kCollocationCaveat;
    components.push_back(std::move(text));
    provenance.push_back("dictionary:" + to_string(dict->variant));
  }
  if (examples) {
    std::string text = fill_languages(kParallelIntro, spec);
    text += "\n" + render_parallel_examples(*examples, spec);
    components.push_back(std::move(text));
    provenance.push_back("parallel:" + to_string(examples->variant));
  }
  if (grammar) {
    std::string text = std::string(kGrammarIntro);
    text += "\n" + grammar->preamble;
    const std::string excerpts = render_grammar_excerpts(*grammar);
    if (!excerpts.empty()) text += "\n" + excerpts;
    components.push_back(std::move(text));
    provenance.push_back("grammar:" + to_string(grammar->variant));
  }
  if (spec.cot) {
    components.push_back(fill_languages(cot_instruction(*spec.cot), spec));
    provenance.push_back("cot:" + to_string(*spec.cot));
  }
  if (spec.cipher) provenance.push_back("cipher");

  std::ostringstream out;
  out << "Please help me translate the following sentence from " << spec.source_language
      << " to " << spec.target_language << ":\n"
      << rendered << "\n"
      << kMorphNote << "\n";

  if (components.empty()) {
    // Plain analyzed-sentence prompt keeps the direct template's closing.
    out << kAskNicely << "\n" << kEnclose;
  } else {
    bool first = true;
    for (const auto& c : components) {
      out << (first ? "" : "\n") << c << "\n";
      first = false;
    }
    out << "\n"
        << "Using all the information provided above, now please translate the "
           "sentence into "
        << spec.target_language
        << ". Remember your source sentence is: " << rendered << "\n"
        << kEnclose;
  }
  return finish(out.str(), std::move(provenance));
}

namespace {

template <typename T>
std::optional<T> parse_enum(const std::string& value, const char* field,
                            std::initializer_list<std::pair<const char*, T>> table) {
  for (const auto& [name, v] : table)
    if (value == name) return v;
  throw ValidationError(std::string("PromptSpec: bad ") + field + " '" + value + "'");
}

}  // namespace

PromptSpec parse_prompt_spec_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("PromptSpec: ") + e.what());
  }
  PromptSpec spec;
  spec.source_language = doc.value("source_language", "");
  spec.target_language = doc.value("target_language", "");
  spec.use_morph = doc.value("use_morph", false);
  if (doc.contains("dict_variant") && !doc["dict_variant"].is_null())
    spec.dict = parse_enum<DictVariant>(doc["dict_variant"].get<std::string>(), "dict_variant",
                                        {{"l", DictVariant::L},
                                         {"l_s", DictVariant::LS},
                                         {"l_s_c", DictVariant::LSC}});
  if (doc.contains("parallel_variant") && !doc["parallel_variant"].is_null())
    spec.parallel = parse_enum<ExampleVariant>(
        doc["parallel_variant"].get<std::string>(), "parallel_variant",
        {{"random", ExampleVariant::Random},
         {"dictionary", ExampleVariant::Dictionary},
         {"bm25", ExampleVariant::Bm25}});
  spec.example_count = doc.value("example_count", 10);
  if (doc.contains("grammar_variant") && !doc["grammar_variant"].is_null())
    spec.grammar = parse_enum<GrammarVariant>(
        doc["grammar_variant"].get<std::string>(), "grammar_variant",
        {{"short", GrammarVariant::Short},
         {"long", GrammarVariant::Long},
         {"long_p", GrammarVariant::LongP}});
  if (doc.contains("cot_variant") && !doc["cot_variant"].is_null())
    spec.cot = parse_enum<CotVariant>(doc["cot_variant"].get<std::string>(), "cot_variant",
                                      {{"annotate", CotVariant::Annotate},
                                       {"annotate_syntax", CotVariant::AnnotateSyntax}});
  spec.cipher = doc.value("cipher", false);
  spec.seed = doc.value("seed", std::uint64_t{0});
  spec.validate();
  return spec;
}

std::string prompt_spec_to_json(const PromptSpec& spec) {
  nlohmann::ordered_json doc;
  doc["source_language"] = spec.source_language;
  doc["target_language"] = spec.target_language;
  doc["use_morph"] = spec.use_morph;
  if (spec.dict) doc["dict_variant"] = to_string(*spec.dict);
  if (spec.parallel) doc["parallel_variant"] = to_string(*spec.parallel);
  doc["example_count"] = spec.example_count;
  if (spec.grammar) doc["grammar_variant"] = to_string(*spec.grammar);
  if (spec.cot) doc["cot_variant"] = to_string(*spec.cot);
  doc["cipher"] = spec.cipher;
  doc["seed"] = spec.seed;
  return doc.dump(2);
}

}  // namespace icmt
