#pragma once

#include <string>
#include <vector>

#include "qalign/embedding_store.hpp"
#include "qalign/text_prep.hpp"

namespace qalign {

enum class AlignVariant { full, one_to_one, one_to_all };

const char* to_string(AlignVariant v);
AlignVariant parse_variant(const std::string& name);

/// Scoring hyperparameters. k_pos/k_neg are clamped to the number of
/// in-vocabulary answer occurrences at scoring time; lambda only applies
/// when k_neg > 0; n_justifications is used by the KB pipeline only.
struct AlignmentConfig {
    int k_pos = 1;
    int k_neg = 0;
    double lambda = 0.0;
    AlignVariant variant = AlignVariant::full;
    int n_justifications = 1;

    /// Throws std::invalid_argument on hard violations (k_pos < 1,
    /// k_neg < 0, n_justifications < 1).
    void check() const;

    /// Non-fatal config smells, e.g. lambda set while k_neg is 0.
    std::vector<std::string> warnings() const;
};

/// Harmonically weighted sum over the top min(k_pos, |ranked|) entries of
/// the descending ranking; 0 when the ranking is empty.
double pos_score(const RankedSimilarities& ranked, int k_pos);

/// Same shape over the ascending (least-similar-first) ranking, keeping raw
/// cosines; 0 when k_neg is 0 or the ranking is empty.
double neg_score(const RankedSimilarities& ranked, int k_neg);

double align_term(double pos, double neg, double lambda);

/// Harmonically weighted sum over the entire descending ranking.
double score_one_to_all(const RankedSimilarities& ranked);

/// Per-candidate score with its per-question-term decomposition:
/// total = sum_i idf(q_i) * align(q_i).
struct ScoreBreakdown {
    struct TermScore {
        std::string q_term;
        double idf;
        double pos;
        double neg;
        double align;
    };
    double total = 0.0;
    std::vector<TermScore> per_term;
};

/// Scores one candidate answer against a question. Duplicate question
/// terms each contribute their own summand; out-of-vocabulary question
/// terms contribute align 0.
ScoreBreakdown score_answer(const TermList& question, const TermList& answer,
                            const IdfTable& idf, const EmbeddingTable& table,
                            const AlignmentConfig& cfg);

} // namespace qalign
