#include "qalign/alignment_scorer.hpp"

#include <algorithm>
#include <stdexcept>

namespace qalign {

const char* to_string(AlignVariant v) {
    switch (v) {
    case AlignVariant::full: return "full";
    case AlignVariant::one_to_one: return "one_to_one";
    case AlignVariant::one_to_all: return "one_to_all";
    }
    return "full";
}

AlignVariant parse_variant(const std::string& name) {
    if (name == "full") return AlignVariant::full;
    if (name == "one_to_one") return AlignVariant::one_to_one;
    if (name == "one_to_all") return AlignVariant::one_to_all;
    throw std::invalid_argument("unknown variant: " + name);
}

void AlignmentConfig::check() const {
    if (k_pos < 1) throw std::invalid_argument("k_pos must be >= 1");
    if (k_neg < 0) throw std::invalid_argument("k_neg must be >= 0");
    if (n_justifications < 1) throw std::invalid_argument("n_justifications must be >= 1");
}

std::vector<std::string> AlignmentConfig::warnings() const {
    std::vector<std::string> out;
    if (variant == AlignVariant::full && k_neg == 0 && lambda != 0.0) {
        out.push_back("lambda is set but k_neg is 0; lambda has no effect");
    }
    return out;
}

double pos_score(const RankedSimilarities& ranked, int k_pos) {
    if (k_pos < 1) throw std::invalid_argument("k_pos must be >= 1");
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k_pos), ranked.pairs.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < take; ++k) {
        sum += ranked.pairs[k].similarity / static_cast<double>(k + 1);
    }
    return sum;
}

double neg_score(const RankedSimilarities& ranked, int k_neg) {
    if (k_neg < 0) throw std::invalid_argument("k_neg must be >= 0");
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k_neg), ranked.pairs.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < take; ++k) {
        sum += ranked.pairs[ranked.pairs.size() - 1 - k].similarity / static_cast<double>(k + 1);
    }
    return sum;
}

double align_term(double pos, double neg, double lambda) { return pos + lambda * neg; }

double score_one_to_all(const RankedSimilarities& ranked) {
    double sum = 0.0;
    for (std::size_t k = 0; k < ranked.pairs.size(); ++k) {
        sum += ranked.pairs[k].similarity / static_cast<double>(k + 1);
    }
    return sum;
}

ScoreBreakdown score_answer(const TermList& question, const TermList& answer,
                            const IdfTable& idf, const EmbeddingTable& table,
                            const AlignmentConfig& cfg) {
    cfg.check();
    ScoreBreakdown out;
    out.per_term.reserve(question.terms.size());
    for (const std::string& q_term : question.terms) {
        RankedSimilarities ranked = rank_alignments(q_term, answer, table);
        double pos = 0.0;
        double neg = 0.0;
        double align = 0.0;
        switch (cfg.variant) {
        case AlignVariant::one_to_one:
            pos = pos_score(ranked, 1);
            align = pos;
            break;
        case AlignVariant::one_to_all:
            pos = score_one_to_all(ranked);
            align = pos;
            break;
        case AlignVariant::full:
            pos = pos_score(ranked, cfg.k_pos);
            if (cfg.k_neg > 0) {
                neg = neg_score(ranked, cfg.k_neg);
                align = align_term(pos, neg, cfg.lambda);
            } else {
                align = pos;
            }
            break;
        }
        double weight = idf.idf(q_term);
        out.per_term.push_back({q_term, weight, pos, neg, align});
        out.total += weight * align;
    }
    return out;
}

} // namespace qalign
