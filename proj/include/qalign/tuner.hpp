#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qalign/alignment_scorer.hpp"
#include "qalign/evaluation.hpp"
#include "qalign/ir_engine.hpp"
#include "qalign/qa_types.hpp"

namespace qalign {

/// Exhaustive grid over (k_pos, k_neg, lambda, n). Lists are sorted and
/// deduplicated on load; lambda is ignored for k_neg = 0 cells and n is
/// ignored when there is no KB index.
struct GridSpec {
    std::vector<int> k_pos_values{1};
    std::vector<int> k_neg_values{0};
    std::vector<double> lambda_values{0.0};
    std::vector<int> n_values{1};
    Metric metric = Metric::map;

    void normalize(); // sort ascending, dedupe, validate non-empty
};

/// Grid file: `key = v1 v2 ...` or `key = v1,v2,...` lines; keys k_pos,
/// k_neg, lambda, n, metric. `#` starts a comment.
GridSpec load_grid_spec(const std::string& path);

struct GridCell {
    AlignmentConfig config;
    bool lambda_applies = false; // false when k_neg = 0
    bool n_applies = false;      // false for the direct pipeline
    double score = 0.0;
};

struct GridSearchResult {
    AlignmentConfig best_config;
    double best_score = 0.0;
    std::vector<GridCell> table; // one row per evaluated (distinct) cell
};

/// What a grid cell is evaluated against: KB pipeline when kb_index is set,
/// direct pipeline otherwise.
struct PipelineBindings {
    const IdfTable* idf = nullptr;
    const EmbeddingTable* embeddings = nullptr;
    const InvertedIndex* kb_index = nullptr;
};

/// Evaluates every distinct grid cell on the dev set and returns the argmax
/// config, ties broken by lexicographically smallest (k_pos, k_neg, lambda,
/// n). Cells made equivalent by k_neg = 0 (lambda) or a missing KB (n) are
/// evaluated once.
GridSearchResult grid_search(const std::vector<QAInstance>& dev, const GridSpec& grid,
                             const PipelineBindings& bindings);

/// CSV score table: k_pos,k_neg,lambda,n,score with "-" for inapplicable
/// parameters.
void write_grid_csv(std::ostream& out, const GridSearchResult& result);

} // namespace qalign
