#include "icmt/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "icmt/errors.hpp"
#include <json.hpp>

namespace icmt {

long Bm25Index::term_id(const std::string& term) const {
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (vocab[i] == term) return static_cast<long>(i);
  return -1;
}

std::vector<std::string> morpheme_terms(const AnalyzedSentence& analyzed) {
  std::vector<std::string> terms;
  for (const auto& set : analyzed.words) {
    if (set.unanalyzed) {
      terms.push_back(set.word);
      continue;
    }
    // Union of morpheme surfaces over alternative analyses, first seen
    // first, scoped to this word so repeats across words still count.
    std::vector<std::string> word_terms;
    for (const auto& analysis : set.analyses) {
      for (const auto& m : analysis.morphemes) {
        if (std::find(word_terms.begin(), word_terms.end(), m.surface) == word_terms.end())
          word_terms.push_back(m.surface);
      }
    }
    terms.insert(terms.end(), word_terms.begin(), word_terms.end());
  }
  return terms;
}

Bm25Index build_bm25_index(const ParallelCorpus& corpus, const Lexicon& lexicon,
                           double k1, double b) {
  if (corpus.examples.empty()) throw ValidationError("build_bm25_index: empty corpus");

  Bm25Index index;
  index.k1 = k1;
  index.b = b;

  std::unordered_map<std::string, std::size_t> term_ids;
  for (std::uint32_t doc = 0; doc < corpus.examples.size(); ++doc) {
    const auto analyzed = analyze_sentence(corpus.examples[doc].source, lexicon);
    const auto terms = morpheme_terms(analyzed);
    index.doc_len.push_back(static_cast<std::uint32_t>(terms.size()));

    std::unordered_map<std::string, std::uint32_t> tf;
    for (const auto& t : terms) ++tf[t];
    // Insert in term first-occurrence order so vocabulary ids are stable.
    for (const auto& t : terms) {
      auto [it, inserted] = term_ids.emplace(t, index.vocab.size());
      if (inserted) {
        index.vocab.push_back(t);
        index.postings.emplace_back();
      }
      auto& plist = index.postings[it->second];
      if (plist.empty() || plist.back().doc != doc)
        plist.push_back({doc, tf[t]});
    }
  }

  const std::uint64_t total =
      std::accumulate(index.doc_len.begin(), index.doc_len.end(), std::uint64_t{0});
  index.avgdl = static_cast<double>(total) / static_cast<double>(index.doc_len.size());
  return index;
}

std::vector<double> bm25_score_all(const Bm25Index& index,
                                   const std::vector<std::string>& query_terms,
                                   Exec exec) {
  const std::size_t n_docs = index.doc_count();
  const double n = static_cast<double>(n_docs);

  // Resolve query terms (keeping multiplicity) to ids plus idf once.
  struct QueryTerm {
    std::size_t id;
    double idf;
  };
  std::vector<QueryTerm> query;
  for (const auto& t : query_terms) {
    const long id = index.term_id(t);
    if (id < 0) continue;
    const double df = static_cast<double>(index.postings[id].size());
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    query.push_back({static_cast<std::size_t>(id), idf});
  }

  std::vector<double> scores(n_docs, 0.0);
  auto score_doc = [&](std::size_t doc) {
    const double dl = static_cast<double>(index.doc_len[doc]);
    double s = 0.0;
    for (const auto& q : query) {
      const auto& plist = index.postings[q.id];
      auto it = std::lower_bound(plist.begin(), plist.end(), doc,
                                 [](const Bm25Index::Posting& p, std::size_t d) {
                                   return p.doc < d;
                                 });
      if (it == plist.end() || it->doc != doc) continue;
      const double tf = static_cast<double>(it->tf);
      s += q.idf * (tf * (index.k1 + 1.0)) /
           (tf + index.k1 * (1.0 - index.b + index.b * dl / index.avgdl));
    }
    scores[doc] = s;
  };

  if (exec == Exec::Parallel) {
#ifdef ICMT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < static_cast<long>(n_docs); ++i)
      score_doc(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n_docs; ++i) score_doc(i);
  }
  return scores;
}

std::vector<std::size_t> bm25_top_n(const Bm25Index& index,
                                    const std::vector<std::string>& query_terms,
                                    std::size_t n, Exec exec) {
  const auto scores = bm25_score_all(index, query_terms, exec);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  // stable_sort on descending score keeps corpus order among ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  if (order.size() > n) order.resize(n);
  return order;
}

std::string serialize_bm25_index(const Bm25Index& index) {
  nlohmann::ordered_json doc;
  doc["k1"] = index.k1;
  doc["b"] = index.b;
  doc["avgdl"] = index.avgdl;
  doc["doc_len"] = index.doc_len;
  doc["vocab"] = index.vocab;
  auto& postings = doc["postings"] = nlohmann::ordered_json::array();
  for (const auto& plist : index.postings) {
    nlohmann::ordered_json jl = nlohmann::ordered_json::array();
    for (const auto& p : plist) jl.push_back({p.doc, p.tf});
    postings.push_back(std::move(jl));
  }
  return doc.dump();
}

Bm25Index deserialize_bm25_index(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("bm25 index: ") + e.what());
  }
  Bm25Index index;
  index.k1 = doc.at("k1").get<double>();
  index.b = doc.at("b").get<double>();
  index.avgdl = doc.at("avgdl").get<double>();
  index.doc_len = doc.at("doc_len").get<std::vector<std::uint32_t>>();
  index.vocab = doc.at("vocab").get<std::vector<std::string>>();
  for (const auto& jl : doc.at("postings")) {
    std::vector<Bm25Index::Posting> plist;
    for (const auto& jp : jl)
      plist.push_back({jp.at(0).get<std::uint32_t>(), jp.at(1).get<std::uint32_t>()});
    index.postings.push_back(std::move(plist));
  }
  if (index.postings.size() != index.vocab.size())
    throw ValidationError("bm25 index: postings/vocab size mismatch");
  return index;
}

}  // namespace icmt
