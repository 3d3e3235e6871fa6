#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "icmt/exec.hpp"

namespace icmt {

// Metric configuration echo carried in reports.  The scoring code pins the
// published signatures: BLEU case:lc|eff:no|tok:13a|smooth:exp, chrF with
// character order 6, word order 0, beta 2, whitespace removed.
struct MetricConfig {
  int bleu_max_ngram = 4;
  bool bleu_lowercase = true;
  int chrf_char_order = 6;
  int chrf_word_order = 0;
  double chrf_beta = 2.0;
  std::string bleu_signature() const { return "case:lc|eff:no|tok:13a|smooth:exp"; }
  std::string chrf_signature() const { return "case:mixed|nc:6|nw:0|beta:2|space:removed"; }
};

// mteval-v13a tokenization: punctuation split from words, period/comma kept
// inside numbers, digit-dash split; lowercased first (case:lc).
std::vector<std::string> tokenize_13a(const std::string& text);

// Integer sufficient statistics; corpus scores pool these, they are never
// an average of sentence scores.
struct BleuStats {
  std::array<std::int64_t, 4> correct{};
  std::array<std::int64_t, 4> total{};
  std::int64_t sys_len = 0;
  std::int64_t ref_len = 0;
  BleuStats& operator+=(const BleuStats& other);
};

struct ChrfStats {
  // Per character order n = i+1: hypothesis n-grams, reference n-grams,
  // matched n-grams.
  std::array<std::int64_t, 6> hyp{};
  std::array<std::int64_t, 6> ref{};
  std::array<std::int64_t, 6> match{};
  ChrfStats& operator+=(const ChrfStats& other);
};

BleuStats bleu_sentence_stats(const std::string& hyp, const std::string& ref);
ChrfStats chrf_sentence_stats(const std::string& hyp, const std::string& ref);

// Exponentially smoothed precision BLEU with brevity penalty, in [0, 100].
double bleu_from_stats(const BleuStats& stats);
// chrF: averaged precision/recall over effective orders, F_beta, in [0, 100].
double chrf_from_stats(const ChrfStats& stats);

double sentence_bleu(const std::string& hyp, const std::string& ref);
double sentence_chrf(const std::string& hyp, const std::string& ref);
double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs);
double corpus_chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs);

struct SentenceScores {
  double bleu = 0.0;
  double chrf = 0.0;
};

struct BatchScores {
  std::vector<SentenceScores> per_sentence;
  double corpus_bleu = 0.0;
  double corpus_chrf = 0.0;
};

// Per-sentence statistics computed independently (parallelizable), pooled
// serially; Serial and Parallel are bit-identical.
BatchScores score_batch(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs, Exec exec = Exec::Serial);

// Sentence embedding provider for the similarity metric.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
};

// Deterministic hash-seeded unit vectors; identical text gives an
// identical vector.
std::unique_ptr<EmbeddingBackend> make_mock_embedding_backend(std::size_t dim = 16);

// 100 x cosine similarity of the two texts' embeddings.
double embed_similarity(const std::string& hyp, const std::string& ref,
                        EmbeddingBackend& backend);

struct OverlapStats {
  std::size_t icl_types = 0;
  std::size_t test_types = 0;
  std::size_t overlap = 0;
  double pct_non_overlapping_test = 0.0;
};

using Segmenter = std::vector<std::string> (*)(const std::string&);

// Type-level vocabulary overlap between in-context data and test data;
// default segmenter is the 13a word tokenizer.
OverlapStats subword_overlap(const std::vector<std::string>& icl_texts,
                             const std::vector<std::string>& test_texts,
                             Segmenter segment = &tokenize_13a);

}  // namespace icmt
