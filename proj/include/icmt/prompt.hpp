#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icmt/morphology.hpp"
#include "icmt/retrieval.hpp"

namespace icmt {

enum class CotVariant { Annotate, AnnotateSyntax };

std::string to_string(CotVariant v);

// Which components a prompt carries.  Optional components attach only to
// the morphologically analyzed form, and the cipher never combines with
// grammar excerpts (those mix source- and target-language tokens).
struct PromptSpec {
  std::string source_language;
  std::string target_language;
  bool use_morph = false;
  std::optional<DictVariant> dict;
  std::optional<ExampleVariant> parallel;
  std::size_t example_count = 10;
  std::optional<GrammarVariant> grammar;
  std::optional<CotVariant> cot;
  bool cipher = false;
  std::uint64_t seed = 0;

  void validate() const;  // throws ValidationError on an invalid combination
  std::string tag() const;  // compact label, e.g. "mu+Dlsc+Pbm25"
};

struct PromptText {
  std::string text;
  std::vector<std::string> provenance;  // component tags in inclusion order
  std::size_t estimated_tokens = 0;     // whitespace tokens x 1.3, diagnostic only
};

// Verbatim chain-of-thought instruction block for the given variant.
std::string cot_instruction(CotVariant variant);

// Direct prompt over the raw sentence (use_morph must be false).
PromptText build_prompt(const PromptSpec& spec, const std::string& raw_sentence);

// Prompt over the analyzed sentence with optional component bundles; the
// supplied bundles must match the spec's active components exactly.
PromptText build_prompt(const PromptSpec& spec, const AnalyzedSentence& analyzed,
                        const DictionaryBundle* dict, const ExampleSet* examples,
                        const GrammarBundle* grammar);

// PromptSpec JSON round-trip for the --spec CLI flag and run configs.
PromptSpec parse_prompt_spec_json(const std::string& json_text);
std::string prompt_spec_to_json(const PromptSpec& spec);

}  // namespace icmt
