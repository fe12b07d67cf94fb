#include "qalign/evaluation.hpp"

#include <algorithm>
#include <stdexcept>

#include "qalign/io_util.hpp"

namespace qalign {

const char* to_string(Metric m) { return m == Metric::map ? "map" : "p_at_1"; }

Metric parse_metric(const std::string& name) {
    if (name == "map" || name == "MAP") return Metric::map;
    if (name == "p1" || name == "p_at_1" || name == "P@1") return Metric::p_at_1;
    throw std::invalid_argument("unknown metric: " + name);
}

std::optional<double> average_precision(const RankedList& ranked,
                                        const std::unordered_set<std::string>& gold) {
    std::size_t n_gold = 0;
    for (const RankedEntry& e : ranked.entries) {
        if (gold.count(e.candidate_id) > 0) ++n_gold;
    }
    if (n_gold == 0) return std::nullopt;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < ranked.entries.size(); ++k) {
        if (gold.count(ranked.entries[k].candidate_id) > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return sum / static_cast<double>(n_gold);
}

int precision_at_1(const RankedList& ranked, const std::unordered_set<std::string>& gold) {
    if (gold.empty()) {
        throw data_error("question " + ranked.question_id + " has an empty gold set");
    }
    if (ranked.entries.empty()) {
        throw data_error("question " + ranked.question_id + " has no ranked candidates");
    }
    return gold.count(ranked.entries.front().candidate_id) > 0 ? 1 : 0;
}

double bootstrap_significance(const std::vector<double>& per_q_a,
                              const std::vector<double>& per_q_b, std::size_t iterations,
                              std::uint64_t seed) {
    if (per_q_a.size() != per_q_b.size()) {
        throw data_error("per-question score lists differ in length (" +
                         std::to_string(per_q_a.size()) + " vs " +
                         std::to_string(per_q_b.size()) + ")");
    }
    if (per_q_a.empty()) throw std::invalid_argument("per-question score lists are empty");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    const std::size_t n = per_q_a.size();
    std::size_t non_positive = 0;
    for (std::size_t it = 0; it < iterations; ++it) {
        // per-iteration stream keyed on (seed, iteration) so a data-parallel
        // split cannot change the result
        std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(it) + 1));
        double sum_a = 0.0;
        double sum_b = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t idx = static_cast<std::size_t>(splitmix64(state) % n);
            sum_a += per_q_a[idx];
            sum_b += per_q_b[idx];
        }
        if (sum_a - sum_b <= 0.0) ++non_positive;
    }
    return static_cast<double>(non_positive) / static_cast<double>(iterations);
}

GoldMap read_gold_file(const std::string& path) {
    LineReader reader(path);
    GoldMap gold;
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols = split(line, '\t');
        if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
            throw std::runtime_error(path + ": line " + std::to_string(reader.line_number()) +
                                     ": expected question_id<TAB>candidate_id");
        }
        gold[cols[0]].insert(cols[1]);
    }
    return gold;
}

EvalReport evaluate(const std::vector<RankedList>& run, const GoldMap& gold, Metric metric) {
    std::unordered_set<std::string> run_questions;
    for (const RankedList& r : run) run_questions.insert(r.question_id);
    for (const auto& [qid, ids] : gold) {
        if (run_questions.count(qid) == 0) {
            throw data_error("gold question " + qid + " missing from run");
        }
    }
    EvalReport report;
    report.metric = to_string(metric);
    static const std::unordered_set<std::string> kEmpty;
    for (const RankedList& r : run) {
        auto it = gold.find(r.question_id);
        const auto& gold_set = it == gold.end() ? kEmpty : it->second;
        if (metric == Metric::map) {
            std::optional<double> ap = average_precision(r, gold_set);
            if (!ap) {
                ++report.n_skipped;
                continue;
            }
            report.per_question.emplace_back(r.question_id, *ap);
        } else {
            report.per_question.emplace_back(
                r.question_id, static_cast<double>(precision_at_1(r, gold_set)));
        }
    }
    report.n_evaluated = report.per_question.size();
    double sum = 0.0;
    for (const auto& [qid, v] : report.per_question) sum += v;
    report.value = report.n_evaluated == 0 ? 0.0 : sum / static_cast<double>(report.n_evaluated);
    return report;
}

} // namespace qalign
