#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "qalign/text_prep.hpp"

namespace qalign {

struct Candidate {
    std::string candidate_id;
    std::string raw_text;
    TermList terms;
};

/// One question with its candidate answers and (possibly empty) gold set.
struct QAInstance {
    std::string question_id;
    std::string question_raw;
    TermList question;
    std::vector<Candidate> candidates;
    std::unordered_set<std::string> gold;
};

struct RankedEntry {
    std::string candidate_id;
    double score;
};

/// Candidates of one question sorted by score descending, ties broken by
/// candidate position ascending. Always a permutation of the instance's
/// candidate set.
struct RankedList {
    std::string question_id;
    std::vector<RankedEntry> entries;
};

} // namespace qalign
