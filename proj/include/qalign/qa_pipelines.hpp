#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "qalign/alignment_scorer.hpp"
#include "qalign/ir_engine.hpp"
#include "qalign/qa_types.hpp"

namespace qalign {

/// Fills the TermList fields from the raw text.
void preprocess(QAInstance& instance, const Lexicons& lexicons);
void preprocess(std::vector<QAInstance>& instances, const Lexicons& lexicons);
void preprocess(std::vector<KbDocument>& docs, const Lexicons& lexicons);

/// Per-candidate scoring detail emitted by the --explain path. For the KB
/// pipeline the per-justification document scores are recorded instead of
/// a term breakdown.
struct ExplainRecord {
    std::string question_id;
    std::string candidate_id;
    double score = 0.0;
    std::vector<ScoreBreakdown::TermScore> per_term;
    std::vector<std::pair<std::string, double>> justifications; // (doc_id, score)
};

/// Direct candidate reranking: each candidate scored against the question
/// by the alignment scorer.
RankedList rank_direct(const QAInstance& instance, const IdfTable& idf,
                       const EmbeddingTable& table, const AlignmentConfig& cfg,
                       std::vector<ExplainRecord>* explain = nullptr);

/// KB-backed multiple choice: per choice, retrieve the top
/// cfg.n_justifications documents for the question+choice query, score each
/// document with the alignment scorer (question+choice as Q, document as A),
/// and sum the document scores.
RankedList rank_kb(const QAInstance& instance, const InvertedIndex& index, const IdfTable& idf,
                   const EmbeddingTable& table, const AlignmentConfig& cfg,
                   std::vector<ExplainRecord>* explain = nullptr);

/// BM25 reranking baseline over the candidates themselves.
RankedList rank_bm25(const QAInstance& instance, double k1 = kDefaultBm25K1,
                     double b = kDefaultBm25B, std::vector<ExplainRecord>* explain = nullptr);

/// Re-implemented IR solver baseline: per choice, the best filtered BM25
/// hit among the top n.
RankedList rank_ai2(const QAInstance& instance, const InvertedIndex& index, std::size_t n,
                    std::vector<ExplainRecord>* explain = nullptr);

/// Combined question+choice term list used as Q by the KB pipeline.
TermList combine_query(const QAInstance& instance, const Candidate& choice);

/// Run file: `question_id<TAB>candidate_id<TAB>rank<TAB>score`, ranks
/// 1-based, scores with 6 decimal places.
void write_run_file(std::ostream& out, const std::vector<RankedList>& runs);

/// Parses a run file back into ranked lists, grouped by question in order
/// of first appearance. Malformed rows raise an error with the line number.
std::vector<RankedList> read_run_file(const std::string& path);

} // namespace qalign
