#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icmt/corpus.hpp"
#include "icmt/exec.hpp"
#include "icmt/morphology.hpp"

namespace icmt {

// Okapi BM25 over morpheme terms.  Document terms are the flattened
// morpheme surfaces of the corpus source sides: for each word, the union
// of morpheme surfaces over all alternative analyses in first-occurrence
// order; unanalyzed words contribute their surface verbatim.
struct Bm25Index {
  struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;
  };

  std::vector<std::string> vocab;              // term id -> surface
  std::vector<std::vector<Posting>> postings;  // term id -> (doc, tf)
  std::vector<std::uint32_t> doc_len;
  double avgdl = 0.0;
  double k1 = 1.5;
  double b = 0.75;

  std::size_t doc_count() const { return doc_len.size(); }
  // -1 when the term is out of vocabulary.
  long term_id(const std::string& term) const;
};

// The term bag for one sentence, shared by indexing and querying.
std::vector<std::string> morpheme_terms(const AnalyzedSentence& analyzed);

Bm25Index build_bm25_index(const ParallelCorpus& corpus, const Lexicon& lexicon,
                           double k1 = 1.5, double b = 0.75);

// Okapi score of every document for the query term list (with
// multiplicity).  idf = ln((N - df + 0.5)/(df + 0.5) + 1), never negative.
// Serial and parallel paths produce bit-identical results.
std::vector<double> bm25_score_all(const Bm25Index& index,
                                   const std::vector<std::string>& query_terms,
                                   Exec exec = Exec::Serial);

// Top-n document indices by descending score, ties broken by corpus order.
std::vector<std::size_t> bm25_top_n(const Bm25Index& index,
                                    const std::vector<std::string>& query_terms,
                                    std::size_t n, Exec exec = Exec::Serial);

// JSON persistence for reuse across runs.
std::string serialize_bm25_index(const Bm25Index& index);
Bm25Index deserialize_bm25_index(const std::string& text);

}  // namespace icmt
