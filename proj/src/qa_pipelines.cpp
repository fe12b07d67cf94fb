#include "qalign/qa_pipelines.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "qalign/io_util.hpp"

namespace qalign {

namespace {

/// Sorts candidate indices by score descending, ties by position ascending,
/// and materializes the ranked list.
RankedList make_ranked(const QAInstance& instance, const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    RankedList out;
    out.question_id = instance.question_id;
    out.entries.reserve(order.size());
    for (std::size_t i : order) {
        out.entries.push_back({instance.candidates[i].candidate_id, scores[i]});
    }
    return out;
}

} // namespace

void preprocess(QAInstance& instance, const Lexicons& lexicons) {
    instance.question = tokenize(instance.question_raw, lexicons);
    for (Candidate& c : instance.candidates) {
        c.terms = tokenize(c.raw_text, lexicons);
    }
}

void preprocess(std::vector<QAInstance>& instances, const Lexicons& lexicons) {
    for (QAInstance& inst : instances) preprocess(inst, lexicons);
}

void preprocess(std::vector<KbDocument>& docs, const Lexicons& lexicons) {
    for (KbDocument& d : docs) d.terms = tokenize(d.raw_text, lexicons);
}

RankedList rank_direct(const QAInstance& instance, const IdfTable& idf,
                       const EmbeddingTable& table, const AlignmentConfig& cfg,
                       std::vector<ExplainRecord>* explain) {
    std::vector<double> scores(instance.candidates.size(), 0.0);
    for (std::size_t i = 0; i < instance.candidates.size(); ++i) {
        ScoreBreakdown breakdown =
            score_answer(instance.question, instance.candidates[i].terms, idf, table, cfg);
        scores[i] = breakdown.total;
        if (explain != nullptr) {
            explain->push_back({instance.question_id, instance.candidates[i].candidate_id,
                                breakdown.total, std::move(breakdown.per_term), {}});
        }
    }
    return make_ranked(instance, scores);
}

TermList combine_query(const QAInstance& instance, const Candidate& choice) {
    TermList query;
    query.source_text = instance.question_raw + " " + choice.raw_text;
    query.terms.reserve(instance.question.terms.size() + choice.terms.size());
    query.terms.insert(query.terms.end(), instance.question.terms.begin(),
                       instance.question.terms.end());
    query.terms.insert(query.terms.end(), choice.terms.terms.begin(), choice.terms.terms.end());
    return query;
}

RankedList rank_kb(const QAInstance& instance, const InvertedIndex& index, const IdfTable& idf,
                   const EmbeddingTable& table, const AlignmentConfig& cfg,
                   std::vector<ExplainRecord>* explain) {
    cfg.check();
    std::vector<double> scores(instance.candidates.size(), 0.0);
    for (std::size_t i = 0; i < instance.candidates.size(); ++i) {
        const Candidate& choice = instance.candidates[i];
        TermList query = combine_query(instance, choice);
        RetrievalResult hits =
            index.retrieve(query, static_cast<std::size_t>(cfg.n_justifications));
        double total = 0.0;
        ExplainRecord record{instance.question_id, choice.candidate_id, 0.0, {}, {}};
        for (const RetrievalHit& hit : hits.hits) {
            double doc_score =
                score_answer(query, index.doc(hit.doc_index).terms, idf, table, cfg).total;
            total += doc_score;
            if (explain != nullptr) record.justifications.emplace_back(hit.doc_id, doc_score);
        }
        scores[i] = total;
        if (explain != nullptr) {
            record.score = total;
            explain->push_back(std::move(record));
        }
    }
    return make_ranked(instance, scores);
}

RankedList rank_bm25(const QAInstance& instance, double k1, double b,
                     std::vector<ExplainRecord>* explain) {
    std::vector<TermList> candidate_terms;
    candidate_terms.reserve(instance.candidates.size());
    for (const Candidate& c : instance.candidates) candidate_terms.push_back(c.terms);
    std::vector<double> scores = bm25_candidate_scores(instance.question, candidate_terms, k1, b);
    if (explain != nullptr) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            explain->push_back({instance.question_id, instance.candidates[i].candidate_id,
                                scores[i], {}, {}});
        }
    }
    return make_ranked(instance, scores);
}

RankedList rank_ai2(const QAInstance& instance, const InvertedIndex& index, std::size_t n,
                    std::vector<ExplainRecord>* explain) {
    std::vector<double> scores(instance.candidates.size(), 0.0);
    for (std::size_t i = 0; i < instance.candidates.size(); ++i) {
        scores[i] = ai2_ir_score(instance.question, instance.candidates[i].terms, index, n);
        if (explain != nullptr) {
            explain->push_back({instance.question_id, instance.candidates[i].candidate_id,
                                scores[i], {}, {}});
        }
    }
    return make_ranked(instance, scores);
}

void write_run_file(std::ostream& out, const std::vector<RankedList>& runs) {
    for (const RankedList& run : runs) {
        for (std::size_t i = 0; i < run.entries.size(); ++i) {
            out << run.question_id << '\t' << run.entries[i].candidate_id << '\t' << (i + 1)
                << '\t' << format_score(run.entries[i].score) << '\n';
        }
    }
}

std::vector<RankedList> read_run_file(const std::string& path) {
    LineReader reader(path);
    std::vector<RankedList> runs;
    std::unordered_map<std::string, std::size_t> by_question;
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols = split(line, '\t');
        if (cols.size() != 4) {
            throw std::runtime_error(path + ": line " + std::to_string(reader.line_number()) +
                                     ": expected 4 tab-separated columns");
        }
        double score = 0.0;
        auto [ptr, ec] = std::from_chars(cols[3].data(), cols[3].data() + cols[3].size(), score);
        if (ec != std::errc() || ptr != cols[3].data() + cols[3].size()) {
            throw std::runtime_error(path + ": line " + std::to_string(reader.line_number()) +
                                     ": malformed score");
        }
        auto [it, inserted] = by_question.emplace(cols[0], runs.size());
        if (inserted) {
            runs.push_back({cols[0], {}});
        }
        runs[it->second].entries.push_back({cols[1], score});
    }
    return runs;
}

} // namespace qalign
