#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qalign/qa_types.hpp"

namespace qalign {

enum class Metric { map, p_at_1 };

const char* to_string(Metric m);
Metric parse_metric(const std::string& name);

/// Average precision of one ranking, or nullopt when the gold set shares no
/// candidate with the ranking (such questions are excluded from MAP).
std::optional<double> average_precision(const RankedList& ranked,
                                        const std::unordered_set<std::string>& gold);

/// 1 iff the top-ranked candidate is gold. Throws data_error on an empty
/// gold set; ties were already resolved by the ranking's position rule.
int precision_at_1(const RankedList& ranked, const std::unordered_set<std::string>& gold);

/// One-tailed bootstrap resampling test of system A over system B on paired
/// per-question scores. Resamples question indices with replacement and
/// returns the fraction of resamples where mean(a) - mean(b) <= 0.
/// Deterministic for a fixed seed; each iteration's draws derive from
/// (seed, iteration index) only.
double bootstrap_significance(const std::vector<double>& per_q_a,
                              const std::vector<double>& per_q_b, std::size_t iterations,
                              std::uint64_t seed);

struct EvalReport {
    std::string metric;
    double value = 0.0;
    std::size_t n_evaluated = 0;
    std::size_t n_skipped = 0;
    // (question_id, score) in run order, evaluated questions only
    std::vector<std::pair<std::string, double>> per_question;
};

// ordered so mismatch errors name the same (first) question id every run
using GoldMap = std::map<std::string, std::unordered_set<std::string>>;

/// Gold file: TSV `question_id<TAB>candidate_id`, one pair per line.
GoldMap read_gold_file(const std::string& path);

/// Scores a run against gold. Every gold question id must appear in the
/// run (data_error naming the first mismatch otherwise). Run questions
/// without gold are skipped under MAP and are an error under P@1.
EvalReport evaluate(const std::vector<RankedList>& run, const GoldMap& gold, Metric metric);

} // namespace qalign
