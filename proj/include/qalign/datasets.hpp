#pragma once

#include <string>
#include <vector>

#include "qalign/ir_engine.hpp"
#include "qalign/qa_types.hpp"

namespace qalign {

enum class DatasetFormat { wikiqa_tsv, mc_jsonl, kb_lines };

DatasetFormat parse_dataset_format(const std::string& name);

struct DatasetSpec {
    DatasetFormat format = DatasetFormat::wikiqa_tsv;
    std::string path;
    std::string split;
};

/// WikiQA-style TSV: rows (question id, question, sentence id, sentence,
/// 0/1 label); the official 7-column layout with document id/title and a
/// header row is also accepted. Rows are grouped by question id in order of
/// first appearance; label-1 sentences populate the gold set. Instances are
/// raw; run preprocess() before scoring.
std::vector<QAInstance> load_wikiqa(const std::string& path);

/// JSONL lines {"id": ..., "question": ..., "candidates": [...],
/// "gold_index": ...}. Candidate ids are the stringified positions.
std::vector<QAInstance> load_mc_jsonl(const std::string& path);

/// One document per line (sequential ids, blank lines skipped) or JSONL
/// {"id": ..., "text": ...} with ids preserved.
std::vector<KbDocument> load_kb(const std::string& path);

std::vector<QAInstance> load_dataset(const DatasetSpec& spec);

} // namespace qalign
