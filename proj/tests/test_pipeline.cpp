#include <doctest.h>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "icmt/cipher.hpp"
#include "icmt/errors.hpp"
#include "icmt/exec.hpp"
#include "icmt/morphology.hpp"
#include "icmt/pipeline.hpp"
#include "test_util.hpp"

using namespace icmt;
using nlohmann::json;

namespace {

const ResourceSet& res() {
  static ResourceSet r = load_resources(testutil::fixture("lexicon.json"),
                                        testutil::fixture("parallel.jsonl"),
                                        testutil::fixture("grammar.json"));
  return r;
}

const EvalSet& eval_set() {
  static EvalSet e = load_eval_set(testutil::fixture("eval.jsonl"));
  return e;
}

PromptSpec base_spec() {
  PromptSpec spec;
  spec.source_language = "Manchu";
  spec.target_language = "English";
  return spec;
}

json fixture_paths_json() {
  json j;
  j["lexicon"] = testutil::fixture("lexicon.json");
  j["parallel"] = testutil::fixture("parallel.jsonl");
  j["grammar"] = testutil::fixture("grammar.json");
  j["eval"] = testutil::fixture("eval.jsonl");
  return j;
}

RunConfig fixture_config(const std::string& out_dir) {
  RunConfig cfg = parse_run_config_json(fixture_paths_json().dump());
  cfg.out_dir = out_dir;
  return cfg;
}

class CountingEmbedder final : public EmbeddingBackend {
 public:
  explicit CountingEmbedder(std::unique_ptr<EmbeddingBackend> inner)
      : inner_(std::move(inner)) {}
  std::size_t calls = 0;
  std::vector<double> embed(const std::string& text) override {
    ++calls;
    return inner_->embed(text);
  }

 private:
  std::unique_ptr<EmbeddingBackend> inner_;
};

// The thirteen variants the sequential integration visits when the
// dictionary stage wins with full entries and every later stage ties.
std::vector<PromptSpec> integration_variants(std::uint64_t seed) {
  PromptSpec base;
  base.source_language = "Manchu";
  base.target_language = "English";
  base.seed = seed;
  std::vector<PromptSpec> out;
  out.push_back(base);
  PromptSpec mu = base;
  mu.use_morph = true;
  out.push_back(mu);
  for (DictVariant d : {DictVariant::L, DictVariant::LS, DictVariant::LSC}) {
    PromptSpec s = mu;
    s.dict = d;
    out.push_back(s);
  }
  PromptSpec dlsc = mu;
  dlsc.dict = DictVariant::LSC;
  for (ExampleVariant v :
       {ExampleVariant::Random, ExampleVariant::Dictionary, ExampleVariant::Bm25}) {
    PromptSpec s = dlsc;
    s.parallel = v;
    out.push_back(s);
  }
  for (GrammarVariant g : {GrammarVariant::Short, GrammarVariant::Long,
                           GrammarVariant::LongP}) {
    PromptSpec s = dlsc;
    s.grammar = g;
    out.push_back(s);
  }
  for (CotVariant c : {CotVariant::Annotate, CotVariant::AnnotateSyntax}) {
    PromptSpec s = dlsc;
    s.cot = c;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("prompt composition wires analysis, retrieval, and cipher together") {
  const std::string sentence = "tere gvsai ejen";
  GenParams params;

  SUBCASE("the direct variant bypasses analysis") {
    PromptSpec spec = base_spec();
    PromptText composed = compose_prompt(res(), spec, sentence);
    PromptText direct = build_prompt(spec, sentence);
    CHECK(composed.text == direct.text);
    CHECK(composed.provenance == direct.provenance);
  }

  SUBCASE("the analyzed variant matches a hand-assembled prompt") {
    PromptSpec spec = base_spec();
    spec.use_morph = true;
    AnalyzedSentence analyzed = analyze_sentence(sentence, res().lexicon);
    CHECK(compose_prompt(res(), spec, sentence).text ==
          build_prompt(spec, analyzed, nullptr, nullptr, nullptr).text);

    spec.dict = DictVariant::LSC;
    spec.parallel = ExampleVariant::Bm25;
    DictionaryBundle dict = build_dictionary_bundle(analyzed, res().lexicon,
                                                    DictVariant::LSC);
    ExampleSet examples = select_by_bm25(res().index, res().parallel, analyzed, 10);
    CHECK(compose_prompt(res(), spec, sentence).text ==
          build_prompt(spec, analyzed, &dict, &examples, nullptr).text);
  }

  SUBCASE("the random example draw is seeded per sentence") {
    PromptSpec spec = base_spec();
    spec.use_morph = true;
    spec.parallel = ExampleVariant::Random;
    spec.example_count = 3;
    spec.seed = 42;
    AnalyzedSentence analyzed = analyze_sentence(sentence, res().lexicon);
    ExampleSet examples = select_random(res().parallel, 3,
                                        splitmix64(spec.seed ^ fnv1a64(sentence)));
    CHECK(compose_prompt(res(), spec, sentence).text ==
          build_prompt(spec, analyzed, nullptr, &examples, nullptr).text);

    // Another sentence under the same run seed gets its own draw.
    const std::string other = "se udu oho";
    AnalyzedSentence other_analyzed = analyze_sentence(other, res().lexicon);
    ExampleSet other_examples = select_random(res().parallel, 3,
                                              splitmix64(spec.seed ^ fnv1a64(other)));
    CHECK(compose_prompt(res(), spec, other).text ==
          build_prompt(spec, other_analyzed, nullptr, &other_examples, nullptr).text);
  }

  SUBCASE("the cipher is applied after retrieval") {
    PromptSpec spec = base_spec();
    spec.use_morph = true;
    spec.dict = DictVariant::LSC;
    spec.cipher = true;
    AnalyzedSentence analyzed = analyze_sentence(sentence, res().lexicon);
    DictionaryBundle dict = build_dictionary_bundle(analyzed, res().lexicon,
                                                    DictVariant::LSC);
    AnalyzedSentence enc = encipher_sentence(analyzed);
    DictionaryBundle enc_dict = encipher_dictionary_bundle(dict);
    CHECK(compose_prompt(res(), spec, sentence).text ==
          build_prompt(spec, enc, &enc_dict, nullptr, nullptr).text);
  }
}

TEST_CASE("scoring records aligns hypotheses with references by item id") {
  std::vector<TranslationRecord> records;
  for (const auto& item : eval_set().items) {
    TranslationRecord r;
    r.item_id = item.id;
    r.raw_response = "### " + item.reference + " ###";
    r.hypothesis = item.reference;
    r.status = RecordStatus::Ok;
    records.push_back(r);
  }

  SUBCASE("perfect hypotheses score 100 on every metric") {
    auto embedder = make_mock_embedding_backend();
    VariantScore score = score_records(records, eval_set(), "mu", embedder.get());
    CHECK(score.tag == "mu");
    CHECK(score.n_items == 6);
    CHECK(score.n_ok == 6);
    CHECK(score.bleu == doctest::Approx(100.0));
    CHECK(score.chrf == doctest::Approx(100.0));
    CHECK(score.embed == doctest::Approx(100.0));
  }

  SUBCASE("failed extractions score as empty and skip the embedder") {
    records[4].hypothesis.reset();
    records[4].status = RecordStatus::ExtractionFailed;
    records[5].hypothesis.reset();
    records[5].status = RecordStatus::BackendError;

    CountingEmbedder embedder(make_mock_embedding_backend());
    VariantScore score = score_records(records, eval_set(), "mu", &embedder);
    CHECK(score.n_items == 6);
    CHECK(score.n_ok == 4);
    CHECK(score.bleu < 100.0);
    // Four scored pairs embed two strings each; the empty pair embeds none.
    CHECK(embedder.calls == 8);
    CHECK(score.embed == doctest::Approx(400.0 / 6.0));
  }

  SUBCASE("without an embedder the similarity column stays zero") {
    VariantScore score = score_records(records, eval_set(), "mu", nullptr);
    CHECK(score.embed == 0.0);
    CHECK(score.bleu == doctest::Approx(100.0));
  }

  SUBCASE("unknown item ids and empty inputs are rejected") {
    auto bad = records;
    bad[0].item_id = "zz";
    CHECK_THROWS_WITH_AS(score_records(bad, eval_set(), "mu", nullptr),
                         doctest::Contains("record item id not in evaluation set: zz"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(score_records({}, eval_set(), "mu", nullptr),
                         doctest::Contains("no translation records to score"),
                         ValidationError);
  }
}

TEST_CASE("running one variant produces ordered records and a corpus score") {
  testutil::TempDir tmp("pipevar");
  PromptSpec spec = base_spec();
  spec.use_morph = true;
  GenParams params;
  auto backend = make_mock_backend();
  auto embedder = make_mock_embedding_backend();
  const std::string records_path = tmp.file("records.jsonl");

  EvalOutcome outcome = run_variant(res(), spec, eval_set(), *backend, params, 2,
                                    embedder.get(), records_path);
  REQUIRE(outcome.records.size() == 6);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(outcome.records[i].item_id == eval_set().items[i].id);
  CHECK(outcome.score.tag == "mu");
  CHECK(outcome.score.n_items == 6);
  CHECK(outcome.score.n_ok == 6);

  auto rescored = score_records(outcome.records, eval_set(), "mu",
                                make_mock_embedding_backend().get());
  CHECK(outcome.score.bleu == rescored.bleu);
  CHECK(outcome.score.chrf == rescored.chrf);
  CHECK(outcome.score.embed == rescored.embed);

  CHECK(load_records(records_path).size() == 6);

  EvalOutcome again = run_variant(res(), spec, eval_set(), *backend, params, 2,
                                  embedder.get());
  CHECK(again.score.bleu == outcome.score.bleu);
  CHECK(again.score.chrf == outcome.score.chrf);

  CHECK_THROWS_WITH_AS(
      run_variant(res(), spec, EvalSet{}, *backend, params, 1, nullptr),
      doctest::Contains("evaluation set is empty"), ValidationError);
}

TEST_CASE("run configs parse with defaults and reject bad fields") {
  SUBCASE("a minimal config gets the documented defaults") {
    RunConfig cfg = parse_run_config_json(fixture_paths_json().dump());
    CHECK(cfg.grid.empty());
    CHECK(cfg.backend.kind == BackendKind::Mock);
    CHECK(cfg.backend.max_parallel == 4);
    CHECK(cfg.backend.retry.max_attempts == 3);
    CHECK(cfg.backend.retry.backoff_base_ms == 1000);
    CHECK(cfg.gen.model_id == "local-model");
    CHECK(cfg.selection == ScoreMetric::Bleu);
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.seed == 0);
    CHECK_NOTHROW(cfg.validate());
  }

  SUBCASE("every field round-trips") {
    json j = fixture_paths_json();
    j["grid"] = json::array(
        {json{{"source_language", "Manchu"},
              {"target_language", "English"},
              {"use_morph", true},
              {"dict_variant", "l_s_c"},
              {"parallel_variant", "bm25"},
              {"example_count", 5}},
         json{{"source_language", "Manchu"}, {"target_language", "English"}}});
    j["backend"] = json{{"kind", "http_endpoint"},
                        {"endpoint", "http://127.0.0.1:9/v1"},
                        {"auth_env", "KEY"},
                        {"cache_path", "/tmp/c.jsonl"},
                        {"max_parallel", 2},
                        {"retry", json{{"max_attempts", 5}, {"backoff_base_ms", 10}}}};
    j["gen"] = json{{"model_id", "m"},
                    {"temperature", 0.5},
                    {"top_p", 0.7},
                    {"max_output_tokens", 128}};
    j["selection_metric"] = "chrf";
    j["out_dir"] = "elsewhere";
    j["seed"] = 99;

    RunConfig cfg = parse_run_config_json(j.dump());
    REQUIRE(cfg.grid.size() == 2);
    CHECK(cfg.grid[0].tag() == "mu+Dlsc+Pbm25");
    CHECK(cfg.grid[0].example_count == 5);
    CHECK(cfg.grid[1].tag() == "x");
    CHECK(cfg.backend.kind == BackendKind::HttpEndpoint);
    CHECK(cfg.backend.endpoint == "http://127.0.0.1:9/v1");
    CHECK(cfg.backend.auth_env == "KEY");
    CHECK(cfg.backend.cache_path == "/tmp/c.jsonl");
    CHECK(cfg.backend.max_parallel == 2);
    CHECK(cfg.backend.retry.max_attempts == 5);
    CHECK(cfg.backend.retry.backoff_base_ms == 10);
    CHECK(cfg.gen.model_id == "m");
    CHECK(cfg.gen.temperature == doctest::Approx(0.5));
    CHECK(cfg.gen.top_p == doctest::Approx(0.7));
    CHECK(cfg.gen.max_output_tokens == 128);
    CHECK(cfg.selection == ScoreMetric::Chrf);
    CHECK(cfg.out_dir == "elsewhere");
    CHECK(cfg.seed == 99);
  }

  SUBCASE("rejections carry field-level diagnostics") {
    CHECK_THROWS_WITH_AS(parse_run_config_json("not json"),
                         doctest::Contains("run config:"), ValidationError);
    json missing = fixture_paths_json();
    missing.erase("eval");
    CHECK_THROWS_WITH_AS(parse_run_config_json(missing.dump()),
                         doctest::Contains("run config:"), ValidationError);

    json bad_kind = fixture_paths_json();
    bad_kind["backend"] = json{{"kind", "weird"}};
    CHECK_THROWS_WITH_AS(parse_run_config_json(bad_kind.dump()),
                         doctest::Contains("unknown backend kind 'weird'"),
                         ValidationError);

    json bad_grid = fixture_paths_json();
    bad_grid["grid"] = json::array({json{{"source_language", "Manchu"},
                                         {"target_language", "English"},
                                         {"use_morph", true},
                                         {"grammar_variant", "short"},
                                         {"cipher", true}}});
    CHECK_THROWS_WITH_AS(parse_run_config_json(bad_grid.dump()),
                         doctest::Contains("cipher cannot combine with grammar excerpts"),
                         ValidationError);

    RunConfig cfg = parse_run_config_json(fixture_paths_json().dump());
    cfg.lexicon_path.clear();
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("lexicon, parallel, and grammar paths"),
                         ValidationError);
    cfg = parse_run_config_json(fixture_paths_json().dump());
    cfg.eval_path.clear();
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("eval path is required"),
                         ValidationError);
    cfg = parse_run_config_json(fixture_paths_json().dump());
    cfg.out_dir.clear();
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("out_dir is empty"),
                         ValidationError);
  }

  SUBCASE("config files load like inline text") {
    testutil::TempDir tmp("pipecfg");
    const std::string path = tmp.file("run.json");
    testutil::spit(path, fixture_paths_json().dump());
    RunConfig cfg = parse_run_config_file(path);
    CHECK(cfg.eval_path == testutil::fixture("eval.jsonl"));
    CHECK_THROWS_WITH_AS(parse_run_config_file(tmp.file("absent.json")),
                         doctest::Contains("run config not readable"), ValidationError);
  }
}

TEST_CASE("the end-to-end run writes reports and per-variant records") {
  testutil::TempDir tmp("pipee2e");
  json j = fixture_paths_json();
  j["grid"] = json::array(
      {json{{"source_language", "Manchu"}, {"target_language", "English"}},
       json{{"source_language", "Manchu"},
            {"target_language", "English"},
            {"use_morph", true}},
       json{{"source_language", "Manchu"},
            {"target_language", "English"},
            {"use_morph", true},
            {"dict_variant", "l_s_c"}}});
  j["out_dir"] = tmp.file("out");
  j["seed"] = 42;
  RunConfig cfg = parse_run_config_json(j.dump());

  TranslateRunResult result = end_to_end_translate(cfg);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].tag == "x");
  CHECK(result.rows[1].tag == "mu");
  CHECK(result.rows[2].tag == "mu+Dlsc");
  for (const auto& row : result.rows) {
    CHECK(row.n_items == 6);
    CHECK(row.n_ok == 6);
  }

  json report = json::parse(testutil::slurp(result.report_json_path));
  CHECK(report.at("bleu_signature").get<std::string>() ==
        MetricConfig{}.bleu_signature());
  CHECK(report.at("chrf_signature").get<std::string>() ==
        MetricConfig{}.chrf_signature());
  CHECK(report.at("seed").get<std::uint64_t>() == 42);
  REQUIRE(report.at("rows").size() == 3);
  CHECK(report.at("rows").at(2).at("tag").get<std::string>() == "mu+Dlsc");
  CHECK(report.at("rows").at(2).at("n_items").get<std::size_t>() == 6);
  CHECK(report.at("rows").at(2).at("bleu").get<double>() ==
        doctest::Approx(result.rows[2].bleu));

  const std::string table = testutil::slurp(result.report_text_path);
  CHECK(table.find("variant") != std::string::npos);
  CHECK(table.find("mu+Dlsc") != std::string::npos);

  for (const char* name : {"x.jsonl", "mu.jsonl", "mu_Dlsc.jsonl"}) {
    auto recs = load_records(tmp.file("out") + "/records/" + name);
    CHECK(recs.size() == 6);
    std::set<std::string> ids;
    for (const auto& r : recs) ids.insert(r.item_id);
    CHECK(ids == std::set<std::string>{"e01", "e02", "e03", "e04", "e05", "e06"});
  }

  // The same config in a fresh directory reproduces the report exactly.
  json j2 = j;
  j2["out_dir"] = tmp.file("out2");
  TranslateRunResult again = end_to_end_translate(parse_run_config_json(j2.dump()));
  CHECK(testutil::slurp(again.report_json_path) ==
        testutil::slurp(result.report_json_path));

  RunConfig no_grid = fixture_config(tmp.file("out3"));
  CHECK_THROWS_WITH_AS(end_to_end_translate(no_grid),
                       doctest::Contains("grid has no prompt variants"),
                       ValidationError);
}

TEST_CASE("the run seed flows into the per-sentence example draw") {
  testutil::TempDir tmp("pipeseed");
  json j = fixture_paths_json();
  j["grid"] = json::array({json{{"source_language", "Manchu"},
                                {"target_language", "English"},
                                {"use_morph", true},
                                {"parallel_variant", "random"},
                                {"example_count", 3}}});

  auto first_hash = [&](const std::string& out_dir, std::uint64_t seed) {
    json cfg_j = j;
    cfg_j["out_dir"] = out_dir;
    cfg_j["seed"] = seed;
    end_to_end_translate(parse_run_config_json(cfg_j.dump()));
    auto recs = load_records(out_dir + "/records/mu_Pr.jsonl");
    REQUIRE(recs.size() == 6);
    for (const auto& r : recs)
      if (r.item_id == "e01") return r.prompt_hash;
    FAIL("e01 missing");
    return std::string{};
  };

  const std::string a = first_hash(tmp.file("a"), 1);
  const std::string b = first_hash(tmp.file("b"), 1);
  const std::string c = first_hash(tmp.file("c"), 2);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("sequential integration adopts a component only when it strictly wins") {
  testutil::TempDir tmp("pipeabl");
  const std::uint64_t kSeed = 7;
  GenParams gen;

  // Closed-world replay cache: a correct answer appears only where the
  // variant carries the component that should earn its keep, and any
  // prompt outside the expected enumeration is a loud cache miss.
  std::map<std::string, std::string> cache;
  for (const auto& spec : integration_variants(kSeed)) {
    for (const auto& item : eval_set().items) {
      const std::string prompt = compose_prompt(res(), spec, item.source).text;
      bool correct = false;
      if (spec.use_morph && item.id == "e01") correct = true;
      if (spec.dict && *spec.dict == DictVariant::LSC &&
          (item.id == "e02" || item.id == "e03"))
        correct = true;
      const std::string response =
          correct ? "### " + item.reference + " ###" : "### not even close ###";
      auto [it, inserted] = cache.emplace(prompt_hash(prompt, gen), response);
      REQUIRE(it->second == response);
    }
  }
  std::string cache_text;
  for (const auto& [hash, response] : cache) {
    json line;
    line["hash"] = hash;
    line["response"] = response;
    cache_text += line.dump() + "\n";
  }
  const std::string cache_path = tmp.file("replay.jsonl");
  testutil::spit(cache_path, cache_text);

  RunConfig cfg = fixture_config(tmp.file("out"));
  cfg.backend.kind = BackendKind::Replay;
  cfg.backend.cache_path = cache_path;
  cfg.seed = kSeed;

  AblationReport report = ablate(cfg);

  REQUIRE(report.stages.size() == 6);
  const std::vector<std::string> stage_names = {"direct", "morph", "dictionary",
                                                "parallel", "grammar", "cot"};
  for (std::size_t i = 0; i < 6; ++i) CHECK(report.stages[i].stage == stage_names[i]);

  const StageReport& direct = report.stages[0];
  REQUIRE(direct.rows.size() == 1);
  CHECK(direct.rows[0].tag == "x");
  CHECK(!direct.rows[0].is_baseline);
  CHECK(direct.rows[0].chosen);
  CHECK(direct.chosen_tag == "x");

  const StageReport& morph = report.stages[1];
  REQUIRE(morph.rows.size() == 2);
  CHECK(morph.rows[0].tag == "x");
  CHECK(morph.rows[0].is_baseline);
  CHECK(morph.rows[1].tag == "mu");
  CHECK(morph.chosen_tag == "mu");
  CHECK(morph.rows[1].score.bleu > morph.rows[0].score.bleu);

  const StageReport& dict = report.stages[2];
  REQUIRE(dict.rows.size() == 4);
  CHECK(dict.rows[0].tag == "mu");
  CHECK(dict.rows[0].is_baseline);
  CHECK(dict.rows[1].tag == "mu+Dl");
  CHECK(dict.rows[2].tag == "mu+Dls");
  CHECK(dict.rows[3].tag == "mu+Dlsc");
  CHECK(dict.rows[3].chosen);
  CHECK(dict.chosen_tag == "mu+Dlsc");
  // Equal-scoring variants do not displace the running baseline.
  CHECK(dict.rows[1].score.bleu == dict.rows[0].score.bleu);
  CHECK(!dict.rows[1].chosen);

  const StageReport& parallel = report.stages[3];
  REQUIRE(parallel.rows.size() == 4);
  CHECK(parallel.rows[0].tag == "mu+Dlsc");
  CHECK(parallel.rows[0].is_baseline);
  CHECK(parallel.rows[1].tag == "mu+Dlsc+Pr");
  CHECK(parallel.rows[2].tag == "mu+Dlsc+Pd");
  CHECK(parallel.rows[3].tag == "mu+Dlsc+Pbm25");
  CHECK(parallel.chosen_tag == "mu+Dlsc");
  // The baseline row reuses the memoized score from the previous stage.
  CHECK(parallel.rows[0].score.bleu == dict.rows[3].score.bleu);
  CHECK(parallel.rows[0].score.chrf == dict.rows[3].score.chrf);

  const StageReport& grammar = report.stages[4];
  REQUIRE(grammar.rows.size() == 4);
  CHECK(grammar.rows[1].tag == "mu+Dlsc+Gshort");
  CHECK(grammar.rows[2].tag == "mu+Dlsc+Glong");
  CHECK(grammar.rows[3].tag == "mu+Dlsc+Glongp");
  CHECK(grammar.chosen_tag == "mu+Dlsc");

  const StageReport& cot = report.stages[5];
  REQUIRE(cot.rows.size() == 3);
  CHECK(cot.rows[1].tag == "mu+Dlsc+Ca");
  CHECK(cot.rows[2].tag == "mu+Dlsc+Cas");
  CHECK(cot.chosen_tag == "mu+Dlsc");

  CHECK(report.final_tag == "mu+Dlsc");
  CHECK(report.selection_metric == "bleu");

  json parsed = json::parse(report.to_json());
  CHECK(parsed.at("final_tag").get<std::string>() == "mu+Dlsc");
  REQUIRE(parsed.at("stages").size() == 6);
  CHECK(parsed.at("stages").at(2).at("chosen_tag").get<std::string>() == "mu+Dlsc");
  CHECK(parsed.at("stages").at(2).at("rows").at(3).at("chosen").get<bool>());

  const std::string table = report.to_table();
  CHECK(table.find("== stage: dictionary ==") != std::string::npos);
  CHECK(table.find("* mu+Dlsc") != std::string::npos);
  CHECK(table.find("final: mu+Dlsc") != std::string::npos);

  // A rerun over the same cache reproduces the report verbatim.
  RunConfig cfg2 = cfg;
  cfg2.out_dir = tmp.file("out2");
  CHECK(ablate(cfg2).to_json() == report.to_json());
}

TEST_CASE("a variant with zero successful translations aborts the integration") {
  testutil::TempDir tmp("pipezero");
  PromptSpec direct;
  direct.source_language = "Manchu";
  direct.target_language = "English";
  direct.seed = 3;

  GenParams gen;
  std::string cache_text;
  for (const auto& item : eval_set().items) {
    json line;
    line["hash"] = prompt_hash(compose_prompt(res(), direct, item.source).text, gen);
    line["response"] = "no markers here";
    cache_text += line.dump() + "\n";
  }
  const std::string cache_path = tmp.file("replay.jsonl");
  testutil::spit(cache_path, cache_text);

  RunConfig cfg = fixture_config(tmp.file("out"));
  cfg.backend.kind = BackendKind::Replay;
  cfg.backend.cache_path = cache_path;
  cfg.seed = 3;

  CHECK_THROWS_WITH_AS(ablate(cfg),
                       doctest::Contains(
                           "stage direct, variant x: zero successful translations"),
                       BackendError);
}
