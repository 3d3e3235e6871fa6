#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "icmt/corpus.hpp"
#include "icmt/llm_client.hpp"
#include "icmt/metrics.hpp"
#include "icmt/prompt.hpp"
#include "icmt/retrieval.hpp"
#include "icmt/stats.hpp"

namespace icmt {

// Everything prompt composition draws on, loaded once per run.  The index
// is built over the morphological analyses of the parallel sources.
struct ResourceSet {
  Lexicon lexicon;
  ParallelCorpus parallel;
  GrammarTable grammar;
  Bm25Index index;
};

ResourceSet load_resources(const std::string& lexicon_path,
                           const std::string& parallel_path,
                           const std::string& grammar_path);

// Analyze, retrieve, optionally encipher, and render one complete prompt.
// Random example selection is seeded from spec.seed mixed with the
// sentence, so one run config gives every sentence its own stable draw.
PromptText compose_prompt(const ResourceSet& res, const PromptSpec& spec,
                          const std::string& source_sentence);

struct VariantScore {
  std::string tag;
  double bleu = 0.0;
  double chrf = 0.0;
  double embed = 0.0;
  std::size_t n_items = 0;
  std::size_t n_ok = 0;  // extraction succeeded; failures score as empty
};

struct EvalOutcome {
  std::vector<TranslationRecord> records;
  VariantScore score;
};

// Full loop over an evaluation set for one prompt variant: compose,
// dispatch, extract, score.  Failed extractions stay in the score as empty
// hypotheses; records capture per-item status.
EvalOutcome run_variant(const ResourceSet& res, const PromptSpec& spec,
                        const EvalSet& eval_set, Backend& backend,
                        const GenParams& params, std::size_t max_parallel,
                        EmbeddingBackend* embedder,
                        const std::string& records_path = "");

// Corpus scores for already-produced records against the references.
VariantScore score_records(const std::vector<TranslationRecord>& records,
                           const EvalSet& eval_set, const std::string& tag,
                           EmbeddingBackend* embedder);

struct RunConfig {
  std::string lexicon_path;
  std::string parallel_path;
  std::string grammar_path;
  std::string eval_path;
  std::vector<PromptSpec> grid;
  BackendConfig backend;
  GenParams gen;
  ScoreMetric selection = ScoreMetric::Bleu;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  void validate() const;
};

RunConfig parse_run_config_file(const std::string& path);
RunConfig parse_run_config_json(const std::string& json_text);

// Runs every grid entry over the eval set; one records file per variant
// under out_dir plus a combined report (JSON and aligned text table).
struct TranslateRunResult {
  std::vector<VariantScore> rows;
  std::string report_json_path;
  std::string report_text_path;
};

TranslateRunResult end_to_end_translate(const RunConfig& cfg);

// Sequential component integration: starting from the direct prompt, each
// stage tries its component variants on top of the running baseline and
// the best by the selection metric becomes the next baseline.
struct StageRow {
  std::string tag;
  VariantScore score;
  bool is_baseline = false;  // carried in from the previous stage
  bool chosen = false;
};

struct StageReport {
  std::string stage;  // direct, morph, dictionary, parallel, grammar, cot
  std::vector<StageRow> rows;
  std::string chosen_tag;
};

struct AblationReport {
  std::vector<StageReport> stages;
  std::string selection_metric;
  std::string final_tag;

  std::string to_json() const;
  std::string to_table() const;  // aligned text table, one block per stage
};

AblationReport ablate(const RunConfig& cfg);

}  // namespace icmt
