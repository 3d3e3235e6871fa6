#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icmt/augment.hpp"
#include "icmt/cipher.hpp"
#include "icmt/errors.hpp"
#include "icmt/pipeline.hpp"

namespace fs = std::filesystem;
using namespace icmt;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file not readable: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file not readable: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// --spec accepts inline JSON or a path to a JSON file.
PromptSpec read_spec_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{') text = slurp(arg);
  return parse_prompt_spec_json(text);
}

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

RunConfig load_config(const GlobalOpts& g) {
  if (g.config_path.empty())
    throw ValidationError("this subcommand needs --config <run-config.json>");
  RunConfig cfg = parse_run_config_file(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void print_scores(const VariantScore& s) {
  std::cout << std::fixed << std::setprecision(4) << "variant: " << s.tag
            << "\nitems: " << s.n_items << "  ok: " << s.n_ok << "\nBLEU:  " << s.bleu
            << "\nchrF:  " << s.chrf << "\nembed: " << s.embed << '\n';
}

int cmd_ingest(const std::string& lexicon, const std::string& parallel,
               const std::string& grammar, const std::string& eval_path,
               const std::string& mono_path) {
  Lexicon lex = load_lexicon(lexicon);
  std::cout << "lexicon: " << lex.entries.size() << " entries, " << lex.suffixes.size()
            << " suffixes\n";
  if (!parallel.empty()) {
    ParallelCorpus corpus = load_parallel_corpus(parallel);
    std::cout << "parallel: " << corpus.examples.size() << " pairs\n";
  }
  if (!grammar.empty()) {
    GrammarTable table = load_grammar_table(grammar);
    std::cout << "grammar: " << table.features.size() << " features\n";
  }
  if (!eval_path.empty()) {
    EvalSet eval_set = load_eval_set(eval_path);
    std::cout << "eval: " << eval_set.items.size() << " items\n";
  }
  if (!mono_path.empty()) {
    MonoCorpus mono = load_mono_corpus(mono_path);
    std::cout << "mono: " << mono.lines.size() << " sentences\n";
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_analyze(const std::string& lexicon, const std::string& grammar,
                const std::string& in_path, std::vector<std::string>& sentences) {
  Lexicon lex = load_lexicon(lexicon);
  std::optional<GrammarTable> table;
  if (!grammar.empty()) table = load_grammar_table(grammar);
  if (!in_path.empty()) {
    auto lines = read_lines(in_path);
    sentences.insert(sentences.end(), lines.begin(), lines.end());
  }
  if (sentences.empty()) throw ValidationError("no sentences given (argument or --in)");
  for (const auto& sentence : sentences) {
    if (sentence.empty()) continue;
    AnalyzedSentence analyzed = analyze_sentence(sentence, lex);
    std::cout << render(analyzed) << '\n';
    if (table) {
      auto features = extract_features(analyzed, *table);
      std::cout << "features:";
      for (const auto& f : features) std::cout << ' ' << f;
      std::cout << '\n';
    }
  }
  return 0;
}

int cmd_prompt(const GlobalOpts& g, const std::string& spec_arg,
               const std::string& sentence, const std::string& out_path) {
  RunConfig cfg = load_config(g);
  ResourceSet res = load_resources(cfg.lexicon_path, cfg.parallel_path, cfg.grammar_path);
  PromptSpec spec =
      spec_arg.empty() ? (cfg.grid.empty() ? PromptSpec{} : cfg.grid.front())
                       : read_spec_arg(spec_arg);
  if (spec.source_language.empty() && !cfg.grid.empty())
    spec.source_language = cfg.grid.front().source_language;
  spec.seed = cfg.seed;
  PromptText prompt = compose_prompt(res, spec, sentence);
  if (out_path.empty()) {
    std::cout << prompt.text << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw ValidationError("file not writable: " + out_path);
    out << prompt.text;
  }
  if (g.verbose)
    std::cerr << "tag: " << spec.tag() << "  est. tokens: " << prompt.estimated_tokens
              << '\n';
  return 0;
}

int cmd_translate(const GlobalOpts& g) {
  RunConfig cfg = load_config(g);
  TranslateRunResult result = end_to_end_translate(cfg);
  std::cout << slurp(result.report_text_path);
  std::cout << "report: " << result.report_json_path << '\n';
  return 0;
}

int cmd_evaluate(const std::string& hyp_path, const std::string& ref_path) {
  auto hyps = read_lines(hyp_path);
  auto refs = read_lines(ref_path);
  if (hyps.size() != refs.size())
    throw ValidationError("hypothesis and reference files differ in line count");
  if (hyps.empty()) throw ValidationError("empty evaluation input");
  auto embedder = make_mock_embedding_backend();
  double embed_sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (hyps[i].empty() && !refs[i].empty()) continue;
    embed_sum += embed_similarity(hyps[i], refs[i], *embedder);
  }
  MetricConfig mc;
  std::cout << std::fixed << std::setprecision(4)
            << "BLEU:  " << corpus_bleu(hyps, refs) << "  (" << mc.bleu_signature()
            << ")\n"
            << "chrF:  " << corpus_chrf(hyps, refs) << "  (" << mc.chrf_signature()
            << ")\n"
            << "embed: " << embed_sum / static_cast<double>(hyps.size()) << '\n';
  return 0;
}

int cmd_significance(const std::string& baseline_path, const std::string& variant_path,
                     const std::string& ref_path, const std::string& metric_name,
                     const std::string& test, std::size_t samples, std::uint64_t seed) {
  auto baseline = read_lines(baseline_path);
  auto variant = read_lines(variant_path);
  auto refs = read_lines(ref_path);
  if (baseline.size() != refs.size() || variant.size() != refs.size())
    throw ValidationError("system and reference files differ in line count");
  ScoreMetric metric = score_metric_from_string(metric_name);
  if (test == "bootstrap") {
    SignificanceResult r =
        bootstrap_compare(baseline, variant, refs, metric, samples, seed, Exec::Parallel);
    std::cout << std::fixed << std::setprecision(4) << "metric: " << r.metric
              << "\nbaseline: " << r.baseline_score << "\nvariant:  " << r.variant_score
              << "\nsamples: " << r.n_samples << "  seed: " << r.seed
              << "\np-value: " << std::setprecision(6) << r.p_value << '\n';
    return 0;
  }
  if (test == "wilcoxon") {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (metric == ScoreMetric::Bleu) {
        a.push_back(sentence_bleu(baseline[i], refs[i]));
        b.push_back(sentence_bleu(variant[i], refs[i]));
      } else {
        a.push_back(sentence_chrf(baseline[i], refs[i]));
        b.push_back(sentence_chrf(variant[i], refs[i]));
      }
    }
    std::cout << "metric: " << to_string(metric) << std::fixed << std::setprecision(6)
              << "\np-value: " << wilcoxon_rank_sum(a, b) << '\n';
    return 0;
  }
  throw ValidationError("unknown test '" + test + "' (bootstrap or wilcoxon)");
}

int cmd_encipher(const std::string& in_path, std::vector<std::string>& texts,
                 bool decipher) {
  if (!in_path.empty()) {
    auto lines = read_lines(in_path);
    texts.insert(texts.end(), lines.begin(), lines.end());
  }
  if (texts.empty()) throw ValidationError("no text given (argument or --in)");
  for (const auto& t : texts)
    std::cout << (decipher ? decipher_token(t) : encipher_token(t)) << '\n';
  return 0;
}

int cmd_augment(const GlobalOpts& g, const std::string& mono_path,
                const std::string& spec_arg, std::string out_dir) {
  RunConfig cfg = load_config(g);
  if (out_dir.empty()) out_dir = cfg.out_dir;
  ResourceSet res = load_resources(cfg.lexicon_path, cfg.parallel_path, cfg.grammar_path);
  MonoCorpus mono = load_mono_corpus(mono_path);
  PromptSpec spec =
      spec_arg.empty() ? (cfg.grid.empty() ? PromptSpec{} : cfg.grid.front())
                       : read_spec_arg(spec_arg);
  spec.seed = cfg.seed;
  spec.validate();
  auto backend = make_backend(cfg.backend);
  ForwardReport report;
  auto pairs = forward_translate(mono.lines, res, spec, *backend, cfg.gen,
                                 cfg.backend.max_parallel, &report);
  fs::create_directories(out_dir);
  std::string out_path = (fs::path(out_dir) / "synthetic.jsonl").string();
  save_synthetic(pairs, out_path);
  std::cout << "requested: " << report.requested << "\nsucceeded: " << report.succeeded
            << "\ndropped:   " << report.dropped << "\nwrote: " << out_path << '\n';
  return 0;
}

int cmd_mix(const GlobalOpts& g, const std::string& real_path,
            const std::string& synthetic_path, double ratio, std::uint64_t seed,
            std::string out_dir) {
  if (out_dir.empty())
    out_dir = g.config_path.empty() ? "out" : load_config(g).out_dir;
  ParallelCorpus real = load_parallel_corpus(real_path);
  auto synthetic = load_synthetic(synthetic_path);
  TrainingManifest manifest = mix(real, synthetic, ratio, seed, out_dir);
  std::cout << manifest.to_json() << '\n';
  return 0;
}

int cmd_ablate(const GlobalOpts& g) {
  RunConfig cfg = load_config(g);
  AblationReport report = ablate(cfg);
  fs::create_directories(cfg.out_dir);
  std::string json_path = (fs::path(cfg.out_dir) / "ablation.json").string();
  std::string text_path = (fs::path(cfg.out_dir) / "ablation.txt").string();
  std::ofstream(json_path) << report.to_json() << '\n';
  std::ofstream(text_path) << report.to_table();
  std::cout << report.to_table();
  std::cout << "report: " << json_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-context machine-translation pipeline for low-resource languages"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Run configuration JSON file");
  std::uint64_t seed_opt = 0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "Override the config seed");
  app.add_flag("--verbose", g.verbose, "Chatty progress on stderr");

  auto* ingest = app.add_subcommand("ingest", "Validate and summarize resource files");
  std::string lexicon, parallel, grammar, eval_path, mono_path;
  ingest->add_option("--lexicon", lexicon, "Lexicon JSON")->required();
  ingest->add_option("--parallel", parallel, "Parallel corpus JSONL");
  ingest->add_option("--grammar", grammar, "Grammar table JSON");
  ingest->add_option("--eval", eval_path, "Evaluation set JSONL");
  ingest->add_option("--mono", mono_path, "Monolingual corpus, one sentence per line");

  auto* analyze = app.add_subcommand("analyze", "Morphologically analyze sentences");
  std::string a_lexicon, a_grammar, a_in;
  std::vector<std::string> a_sentences;
  analyze->add_option("--lexicon", a_lexicon, "Lexicon JSON")->required();
  analyze->add_option("--grammar", a_grammar, "Also list triggered grammar features");
  analyze->add_option("--in", a_in, "Read sentences from a file");
  analyze->add_option("sentence", a_sentences, "Sentences to analyze");

  auto* prompt = app.add_subcommand("prompt", "Compose one prompt");
  std::string p_spec, p_sentence, p_out;
  prompt->add_option("--spec", p_spec, "Prompt spec JSON (inline or file)");
  prompt->add_option("--out", p_out, "Write the prompt here instead of stdout");
  prompt->add_option("sentence", p_sentence, "Source sentence")->required();

  auto* translate =
      app.add_subcommand("translate", "Run every grid variant over the eval set");

  auto* evaluate = app.add_subcommand("evaluate", "Score aligned hypothesis/reference files");
  std::string e_hyps, e_refs;
  evaluate->add_option("--hyps", e_hyps, "Hypotheses, one per line")->required();
  evaluate->add_option("--refs", e_refs, "References, one per line")->required();

  auto* significance = app.add_subcommand("significance", "Compare two systems");
  std::string s_baseline, s_variant, s_refs, s_metric = "bleu", s_test = "bootstrap";
  std::size_t s_samples = 1000;
  std::uint64_t s_seed = 42;
  significance->add_option("--baseline", s_baseline, "Baseline hypotheses")->required();
  significance->add_option("--variant", s_variant, "Variant hypotheses")->required();
  significance->add_option("--refs", s_refs, "References")->required();
  significance->add_option("--metric", s_metric, "bleu or chrf");
  significance->add_option("--test", s_test, "bootstrap or wilcoxon");
  significance->add_option("--samples", s_samples, "Bootstrap resamples");
  significance->add_option("--test-seed", s_seed, "Bootstrap seed");

  auto* encipher = app.add_subcommand("encipher", "Apply the substitution cipher");
  std::string c_in;
  std::vector<std::string> c_texts;
  bool c_decipher = false;
  encipher->add_option("--in", c_in, "Read text from a file");
  encipher->add_flag("--decipher", c_decipher, "Invert the cipher");
  encipher->add_option("text", c_texts, "Text to transform");

  auto* augment =
      app.add_subcommand("augment", "Forward-translate a monolingual corpus");
  std::string aug_mono, aug_spec, aug_out;
  augment->add_option("--mono", aug_mono, "Monolingual corpus file")->required();
  augment->add_option("--spec", aug_spec, "Prompt spec JSON (inline or file)");
  augment->add_option("--out-dir", aug_out, "Output directory (default: config out_dir)");

  auto* mix_cmd = app.add_subcommand("mix", "Export a mixed real+synthetic training set");
  std::string m_real, m_synthetic, m_out;
  double m_ratio = 0.0;
  std::uint64_t m_seed = 42;
  mix_cmd->add_option("--real", m_real, "Real parallel corpus JSONL")->required();
  mix_cmd->add_option("--synthetic", m_synthetic, "Synthetic pairs JSONL")->required();
  mix_cmd->add_option("--ratio", m_ratio, "Synthetic multiple of the real size")->required();
  mix_cmd->add_option("--mix-seed", m_seed, "Sampling and shuffle seed");
  mix_cmd->add_option("--out-dir", m_out, "Output directory (default: config out_dir)");

  auto* ablate_cmd =
      app.add_subcommand("ablate", "Sequential component-integration sweep");

  CLI11_PARSE(app, argc, argv);
  if (seed_flag->count() > 0) g.seed = seed_opt;

  try {
    if (ingest->parsed())
      return cmd_ingest(lexicon, parallel, grammar, eval_path, mono_path);
    if (analyze->parsed()) return cmd_analyze(a_lexicon, a_grammar, a_in, a_sentences);
    if (prompt->parsed()) return cmd_prompt(g, p_spec, p_sentence, p_out);
    if (translate->parsed()) return cmd_translate(g);
    if (evaluate->parsed()) return cmd_evaluate(e_hyps, e_refs);
    if (significance->parsed())
      return cmd_significance(s_baseline, s_variant, s_refs, s_metric, s_test, s_samples,
                              s_seed);
    if (encipher->parsed()) return cmd_encipher(c_in, c_texts, c_decipher);
    if (augment->parsed()) return cmd_augment(g, aug_mono, aug_spec, aug_out);
    if (mix_cmd->parsed())
      return cmd_mix(g, m_real, m_synthetic, m_ratio, m_seed, m_out);
    if (ablate_cmd->parsed()) return cmd_ablate(g);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
