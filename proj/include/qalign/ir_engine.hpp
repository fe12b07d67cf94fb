#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qalign/text_prep.hpp"

namespace qalign {

inline constexpr double kDefaultBm25K1 = 1.2;
inline constexpr double kDefaultBm25B = 0.75;

struct KbDocument {
    std::string doc_id;
    TermList terms;
    std::string raw_text;
};

struct RetrievalHit {
    std::uint32_t doc_index;
    std::string doc_id;
    double score;
};

/// Top-n hits sorted by BM25 score descending, ties by doc_id ascending.
struct RetrievalResult {
    std::vector<RetrievalHit> hits;
};

/// BM25 IDF with the +1-inside-log variant, so scores stay non-negative.
/// This is the retrieval engine's own IDF and is distinct from the
/// question-set IDF used by the alignment scorer.
double bm25_idf(std::size_t n_docs, std::size_t df);

/// Okapi BM25 inverted index over preprocessed documents. Immutable after
/// build; k1 and b are fixed at build time.
class InvertedIndex {
public:
    InvertedIndex() = default;

    /// Throws on an empty corpus or a duplicate doc_id (naming the id).
    /// source_checksum is carried into the serialized form for stale-cache
    /// detection against the originating corpus file.
    static InvertedIndex build(std::vector<KbDocument> docs, double k1 = kDefaultBm25K1,
                               double b = kDefaultBm25B, std::uint64_t source_checksum = 0);

    /// Query terms are scored per occurrence; only documents sharing at
    /// least one term appear in the result.
    RetrievalResult retrieve(const TermList& query, std::size_t n) const;

    /// BM25 score of one document for a query (0 when no terms match).
    double score_doc(const TermList& query, std::uint32_t doc_index) const;

    const KbDocument& doc(std::uint32_t idx) const { return docs_[idx]; }
    std::optional<std::uint32_t> find_doc(const std::string& doc_id) const;

    std::size_t n_docs() const { return docs_.size(); }
    double avg_doc_len() const { return avg_doc_len_; }
    double k1() const { return k1_; }
    double b() const { return b_; }
    std::uint64_t source_checksum() const { return source_checksum_; }

    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static InvertedIndex load(std::istream& in);
    static InvertedIndex load_file(const std::string& path);

private:
    void build_postings();

    std::vector<KbDocument> docs_;
    std::vector<std::uint32_t> doc_len_;
    // term -> (doc index, term frequency), doc indices ascending
    std::unordered_map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>> postings_;
    double avg_doc_len_ = 0.0;
    double k1_ = kDefaultBm25K1;
    double b_ = kDefaultBm25B;
    std::uint64_t source_checksum_ = 0;
};

/// Scores each candidate as a single-document corpus member against the
/// question query (the BM25 reranking baseline). Returns one score per
/// candidate, in input order.
std::vector<double> bm25_candidate_scores(const TermList& question,
                                          const std::vector<TermList>& candidates,
                                          double k1 = kDefaultBm25K1, double b = kDefaultBm25B);

/// IR solver score: retrieve top-n for the combined question+choice query,
/// keep hits containing at least one question term and one choice term,
/// return the best surviving BM25 score (0 if none survive).
double ai2_ir_score(const TermList& question, const TermList& choice, const InvertedIndex& index,
                    std::size_t n);

} // namespace qalign
