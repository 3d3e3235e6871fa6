#include "icmt/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "icmt/cipher.hpp"
#include "icmt/errors.hpp"
#include "icmt/exec.hpp"

namespace icmt {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ResourceSet load_resources(const std::string& lexicon_path,
                           const std::string& parallel_path,
                           const std::string& grammar_path) {
  ResourceSet res;
  res.lexicon = load_lexicon(lexicon_path);
  res.parallel = load_parallel_corpus(parallel_path);
  res.grammar = load_grammar_table(grammar_path);
  res.index = build_bm25_index(res.parallel, res.lexicon);
  return res;
}

PromptText compose_prompt(const ResourceSet& res, const PromptSpec& spec,
                          const std::string& source_sentence) {
  spec.validate();
  if (!spec.use_morph) return build_prompt(spec, source_sentence);

  AnalyzedSentence analyzed = analyze_sentence(source_sentence, res.lexicon);

  std::optional<DictionaryBundle> dict;
  if (spec.dict) dict = build_dictionary_bundle(analyzed, res.lexicon, *spec.dict);

  std::optional<ExampleSet> examples;
  if (spec.parallel) {
    switch (*spec.parallel) {
      case ExampleVariant::Random: {
        std::uint64_t draw = splitmix64(spec.seed ^ fnv1a64(source_sentence));
        examples = select_random(res.parallel, spec.example_count, draw);
        break;
      }
      case ExampleVariant::Dictionary:
        examples = select_by_dictionary(analyzed, res.parallel, spec.example_count);
        break;
      case ExampleVariant::Bm25:
        examples = select_by_bm25(res.index, res.parallel, analyzed, spec.example_count);
        break;
    }
  }

  std::optional<GrammarBundle> grammar;
  if (spec.grammar) {
    auto features = extract_features(analyzed, res.grammar);
    grammar = build_grammar_bundle(features, res.grammar, *spec.grammar);
  }

  if (spec.cipher) {
    analyzed = encipher_sentence(analyzed);
    if (dict) dict = encipher_dictionary_bundle(*dict);
    if (examples) examples = encipher_example_set(*examples);
  }

  return build_prompt(spec, analyzed, dict ? &*dict : nullptr,
                      examples ? &*examples : nullptr, grammar ? &*grammar : nullptr);
}

VariantScore score_records(const std::vector<TranslationRecord>& records,
                           const EvalSet& eval_set, const std::string& tag,
                           EmbeddingBackend* embedder) {
  if (records.empty()) throw ValidationError("no translation records to score");
  std::unordered_map<std::string, const EvalItem*> by_id;
  for (const auto& item : eval_set.items) by_id[item.id] = &item;

  VariantScore score;
  score.tag = tag;
  score.n_items = records.size();
  std::vector<std::string> hyps, refs;
  hyps.reserve(records.size());
  refs.reserve(records.size());
  for (const auto& rec : records) {
    auto it = by_id.find(rec.item_id);
    if (it == by_id.end())
      throw ValidationError("record item id not in evaluation set: " + rec.item_id);
    hyps.push_back(rec.hypothesis.value_or(std::string{}));
    refs.push_back(it->second->reference);
    if (rec.status == RecordStatus::Ok) ++score.n_ok;
  }

  score.bleu = corpus_bleu(hyps, refs);
  score.chrf = corpus_chrf(hyps, refs);
  if (embedder) {
    double sum = 0.0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      // An empty hypothesis scores zero without touching the backend.
      if (hyps[i].empty() && !refs[i].empty()) continue;
      sum += embed_similarity(hyps[i], refs[i], *embedder);
    }
    score.embed = sum / static_cast<double>(hyps.size());
  }
  return score;
}

EvalOutcome run_variant(const ResourceSet& res, const PromptSpec& spec,
                        const EvalSet& eval_set, Backend& backend,
                        const GenParams& params, std::size_t max_parallel,
                        EmbeddingBackend* embedder, const std::string& records_path) {
  if (eval_set.items.empty()) throw ValidationError("evaluation set is empty");
  spec.validate();

  std::vector<BatchItem> items;
  items.reserve(eval_set.items.size());
  const std::string tag = spec.tag();
  for (const auto& item : eval_set.items)
    items.push_back({item.id, compose_prompt(res, spec, item.source).text, tag});

  EvalOutcome outcome;
  outcome.records = run_batch(items, backend, params, max_parallel, records_path);
  outcome.score = score_records(outcome.records, eval_set, tag, embedder);
  return outcome;
}

void RunConfig::validate() const {
  if (lexicon_path.empty() || parallel_path.empty() || grammar_path.empty())
    throw ValidationError("run config: lexicon, parallel, and grammar paths are required");
  if (eval_path.empty()) throw ValidationError("run config: eval path is required");
  if (out_dir.empty()) throw ValidationError("run config: out_dir is empty");
  for (const auto& spec : grid) spec.validate();
  backend.validate();
  gen.validate();
}

static BackendKind backend_kind_from_string(const std::string& s) {
  if (s == "http_endpoint") return BackendKind::HttpEndpoint;
  if (s == "mock") return BackendKind::Mock;
  if (s == "replay") return BackendKind::Replay;
  throw ValidationError("run config: unknown backend kind '" + s + "'");
}

RunConfig parse_run_config_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
  try {
    RunConfig cfg;
    cfg.lexicon_path = j.at("lexicon").get<std::string>();
    cfg.parallel_path = j.at("parallel").get<std::string>();
    cfg.grammar_path = j.at("grammar").get<std::string>();
    cfg.eval_path = j.at("eval").get<std::string>();
    if (j.contains("grid"))
      for (const auto& entry : j.at("grid"))
        cfg.grid.push_back(parse_prompt_spec_json(entry.dump()));
    if (j.contains("backend")) {
      const auto& b = j.at("backend");
      cfg.backend.kind = backend_kind_from_string(b.value("kind", std::string{"mock"}));
      cfg.backend.endpoint = b.value("endpoint", std::string{});
      cfg.backend.auth_env = b.value("auth_env", std::string{});
      cfg.backend.cache_path = b.value("cache_path", std::string{});
      cfg.backend.max_parallel = b.value("max_parallel", std::size_t{4});
      if (b.contains("retry")) {
        cfg.backend.retry.max_attempts = b.at("retry").value("max_attempts", std::size_t{3});
        cfg.backend.retry.backoff_base_ms =
            b.at("retry").value("backoff_base_ms", std::size_t{1000});
      }
    }
    if (j.contains("gen")) {
      const auto& g = j.at("gen");
      cfg.gen.model_id = g.value("model_id", cfg.gen.model_id);
      cfg.gen.temperature = g.value("temperature", cfg.gen.temperature);
      cfg.gen.top_p = g.value("top_p", cfg.gen.top_p);
      cfg.gen.max_output_tokens = g.value("max_output_tokens", cfg.gen.max_output_tokens);
    }
    cfg.selection = score_metric_from_string(j.value("selection_metric", std::string{"bleu"}));
    cfg.out_dir = j.value("out_dir", std::string{"out"});
    cfg.seed = j.value("seed", std::uint64_t{0});
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("run config not readable: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config_json(buf.str());
}

static std::string sanitize_tag(const std::string& tag) {
  std::string out;
  for (char c : tag)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

static std::string fresh_records_path(const std::string& out_dir, const std::string& tag) {
  fs::create_directories(fs::path(out_dir) / "records");
  fs::path p = fs::path(out_dir) / "records" / (sanitize_tag(tag) + ".jsonl");
  fs::remove(p);
  return p.string();
}

static void append_score_row(std::ostringstream& out, const VariantScore& s,
                             std::size_t tag_width, const char* marker) {
  out << marker << ' ' << std::left << std::setw(static_cast<int>(tag_width)) << s.tag
      << std::right << std::setw(4) << s.n_items << std::setw(5) << s.n_ok << std::fixed
      << std::setprecision(2) << std::setw(9) << s.bleu << std::setw(9) << s.chrf
      << std::setw(9) << s.embed << '\n';
}

static std::string score_table(const std::vector<VariantScore>& rows,
                               const std::vector<const char*>& markers) {
  std::size_t tag_width = 7;
  for (const auto& r : rows) tag_width = std::max(tag_width, r.tag.size());
  std::ostringstream out;
  out << "  " << std::left << std::setw(static_cast<int>(tag_width)) << "variant"
      << std::right << std::setw(4) << "n" << std::setw(5) << "ok" << std::setw(9)
      << "BLEU" << std::setw(9) << "chrF" << std::setw(9) << "embed" << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i)
    append_score_row(out, rows[i], tag_width, markers[i]);
  return out.str();
}

static ordered_json score_to_json(const VariantScore& s) {
  ordered_json j;
  j["tag"] = s.tag;
  j["n_items"] = s.n_items;
  j["n_ok"] = s.n_ok;
  j["bleu"] = s.bleu;
  j["chrf"] = s.chrf;
  j["embed"] = s.embed;
  return j;
}

static std::unique_ptr<EmbeddingBackend> make_embedder(const RunConfig&) {
  // A live embedding endpoint can replace this via the library API; runs
  // driven by config files use the deterministic offline embedder.
  return make_mock_embedding_backend();
}

TranslateRunResult end_to_end_translate(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.grid.empty()) throw ValidationError("run config: grid has no prompt variants");

  ResourceSet res = load_resources(cfg.lexicon_path, cfg.parallel_path, cfg.grammar_path);
  EvalSet eval_set = load_eval_set(cfg.eval_path);
  auto backend = make_backend(cfg.backend);
  auto embedder = make_embedder(cfg);

  TranslateRunResult result;
  for (PromptSpec spec : cfg.grid) {
    spec.seed = cfg.seed;
    spec.validate();
    std::string records_path = fresh_records_path(cfg.out_dir, spec.tag());
    EvalOutcome outcome = run_variant(res, spec, eval_set, *backend, cfg.gen,
                                      cfg.backend.max_parallel, embedder.get(),
                                      records_path);
    result.rows.push_back(outcome.score);
  }

  ordered_json report;
  report["bleu_signature"] = MetricConfig{}.bleu_signature();
  report["chrf_signature"] = MetricConfig{}.chrf_signature();
  report["seed"] = cfg.seed;
  report["rows"] = ordered_json::array();
  for (const auto& row : result.rows) report["rows"].push_back(score_to_json(row));

  fs::create_directories(cfg.out_dir);
  result.report_json_path = (fs::path(cfg.out_dir) / "report.json").string();
  result.report_text_path = (fs::path(cfg.out_dir) / "report.txt").string();
  std::ofstream(result.report_json_path) << report.dump(2) << '\n';
  std::vector<const char*> markers(result.rows.size(), " ");
  std::ofstream(result.report_text_path) << score_table(result.rows, markers);
  return result;
}

std::string AblationReport::to_json() const {
  ordered_json j;
  j["selection_metric"] = selection_metric;
  j["final_tag"] = final_tag;
  j["stages"] = ordered_json::array();
  for (const auto& stage : stages) {
    ordered_json s;
    s["stage"] = stage.stage;
    s["chosen_tag"] = stage.chosen_tag;
    s["rows"] = ordered_json::array();
    for (const auto& row : stage.rows) {
      ordered_json r = score_to_json(row.score);
      r["is_baseline"] = row.is_baseline;
      r["chosen"] = row.chosen;
      s["rows"].push_back(r);
    }
    j["stages"].push_back(s);
  }
  return j.dump(2);
}

std::string AblationReport::to_table() const {
  std::ostringstream out;
  out << "sequential component integration (selection: " << selection_metric << ")\n";
  for (const auto& stage : stages) {
    out << "\n== stage: " << stage.stage << " ==\n";
    std::vector<VariantScore> rows;
    std::vector<const char*> markers;
    for (const auto& row : stage.rows) {
      rows.push_back(row.score);
      markers.push_back(row.chosen ? "*" : " ");
    }
    out << score_table(rows, markers);
    out << "chosen: " << stage.chosen_tag << '\n';
  }
  out << "\nfinal: " << final_tag << '\n';
  return out.str();
}

AblationReport ablate(const RunConfig& cfg) {
  cfg.validate();
  ResourceSet res = load_resources(cfg.lexicon_path, cfg.parallel_path, cfg.grammar_path);
  EvalSet eval_set = load_eval_set(cfg.eval_path);
  if (eval_set.items.empty()) throw ValidationError("evaluation set is empty");
  auto backend = make_backend(cfg.backend);
  auto embedder = make_embedder(cfg);

  PromptSpec base;
  if (!cfg.grid.empty()) {
    base.source_language = cfg.grid.front().source_language;
    base.target_language = cfg.grid.front().target_language;
  } else {
    base.source_language = "Manchu";
    base.target_language = "English";
  }
  base.seed = cfg.seed;

  // Every variant is scored once; the running baseline's row is reused in
  // later stages rather than re-queried.
  std::unordered_map<std::string, VariantScore> memo;
  auto evaluate = [&](const PromptSpec& spec, const std::string& stage) -> VariantScore {
    const std::string tag = spec.tag();
    auto it = memo.find(tag);
    if (it != memo.end()) return it->second;
    std::string records_path = fresh_records_path(cfg.out_dir, tag);
    EvalOutcome outcome = run_variant(res, spec, eval_set, *backend, cfg.gen,
                                      cfg.backend.max_parallel, embedder.get(),
                                      records_path);
    if (outcome.score.n_ok == 0)
      throw BackendError("stage " + stage + ", variant " + tag +
                         ": zero successful translations");
    memo.emplace(tag, outcome.score);
    return outcome.score;
  };

  auto metric_of = [&](const VariantScore& s) {
    return cfg.selection == ScoreMetric::Bleu ? s.bleu : s.chrf;
  };

  AblationReport report;
  report.selection_metric = to_string(cfg.selection);

  PromptSpec baseline = base;  // direct prompt
  auto run_stage = [&](const std::string& stage_name,
                       const std::vector<PromptSpec>& variants, bool baseline_row) {
    StageReport stage;
    stage.stage = stage_name;
    std::vector<PromptSpec> candidates;
    if (baseline_row) {
      StageRow row;
      row.tag = baseline.tag();
      row.score = evaluate(baseline, stage_name);
      row.is_baseline = true;
      stage.rows.push_back(row);
      candidates.push_back(baseline);
    }
    for (const auto& spec : variants) {
      StageRow row;
      row.tag = spec.tag();
      row.score = evaluate(spec, stage_name);
      stage.rows.push_back(row);
      candidates.push_back(spec);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < stage.rows.size(); ++i)
      if (metric_of(stage.rows[i].score) > metric_of(stage.rows[best].score)) best = i;
    stage.rows[best].chosen = true;
    stage.chosen_tag = stage.rows[best].tag;
    baseline = candidates[best];
    report.stages.push_back(std::move(stage));
  };

  // Attaching a component presumes the analyzed form, so a candidate built
  // on a morph-free baseline switches analysis on as part of the step.
  auto with_morph = [&](auto set) {
    PromptSpec spec = baseline;
    spec.use_morph = true;
    set(spec);
    return spec;
  };

  run_stage("direct", {baseline}, false);
  run_stage("morph", {with_morph([](PromptSpec&) {})}, true);
  run_stage("dictionary",
            {with_morph([](PromptSpec& s) { s.dict = DictVariant::L; }),
             with_morph([](PromptSpec& s) { s.dict = DictVariant::LS; }),
             with_morph([](PromptSpec& s) { s.dict = DictVariant::LSC; })},
            true);
  run_stage("parallel",
            {with_morph([](PromptSpec& s) { s.parallel = ExampleVariant::Random; }),
             with_morph([](PromptSpec& s) { s.parallel = ExampleVariant::Dictionary; }),
             with_morph([](PromptSpec& s) { s.parallel = ExampleVariant::Bm25; })},
            true);
  run_stage("grammar",
            {with_morph([](PromptSpec& s) { s.grammar = GrammarVariant::Short; }),
             with_morph([](PromptSpec& s) { s.grammar = GrammarVariant::Long; }),
             with_morph([](PromptSpec& s) { s.grammar = GrammarVariant::LongP; })},
            true);
  run_stage("cot",
            {with_morph([](PromptSpec& s) { s.cot = CotVariant::Annotate; }),
             with_morph([](PromptSpec& s) { s.cot = CotVariant::AnnotateSyntax; })},
            true);

  report.final_tag = baseline.tag();
  return report;
}

}  // namespace icmt
