#include "qalign/datasets.hpp"

#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "qalign/io_util.hpp"

namespace qalign {

namespace {

using nlohmann::json;

std::string id_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw std::runtime_error("id must be a string or integer");
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line_no, const std::string& msg) {
    throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + msg);
}

} // namespace

DatasetFormat parse_dataset_format(const std::string& name) {
    if (name == "wikiqa_tsv") return DatasetFormat::wikiqa_tsv;
    if (name == "mc_jsonl") return DatasetFormat::mc_jsonl;
    if (name == "kb_lines") return DatasetFormat::kb_lines;
    throw std::invalid_argument("unknown dataset format: " + name);
}

std::vector<QAInstance> load_wikiqa(const std::string& path) {
    LineReader reader(path);
    std::vector<QAInstance> instances;
    std::unordered_map<std::string, std::size_t> by_question;
    std::string line;
    bool first_row = true;
    while (reader.next(line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols = split(line, '\t');
        std::size_t n = cols.size();
        if (n != 5 && n != 7) {
            fail_line(path, reader.line_number(), "expected 5 or 7 tab-separated columns, got " +
                                                      std::to_string(n));
        }
        const std::string& label = cols[n - 1];
        if (first_row && label != "0" && label != "1") {
            first_row = false; // header row
            continue;
        }
        first_row = false;
        if (label != "0" && label != "1") {
            fail_line(path, reader.line_number(), "label must be 0 or 1, got `" + label + "`");
        }
        const std::string& qid = cols[0];
        const std::string& question = cols[1];
        const std::string& sid = n == 5 ? cols[2] : cols[4];
        const std::string& sentence = n == 5 ? cols[3] : cols[5];
        if (qid.empty() || sid.empty()) {
            fail_line(path, reader.line_number(), "empty question or sentence id");
        }
        auto [it, inserted] = by_question.emplace(qid, instances.size());
        if (inserted) {
            QAInstance inst;
            inst.question_id = qid;
            inst.question_raw = question;
            instances.push_back(std::move(inst));
        }
        QAInstance& inst = instances[it->second];
        for (const Candidate& c : inst.candidates) {
            if (c.candidate_id == sid) {
                fail_line(path, reader.line_number(),
                          "duplicate sentence id " + sid + " for question " + qid);
            }
        }
        inst.candidates.push_back({sid, sentence, {}});
        if (label == "1") inst.gold.insert(sid);
    }
    return instances;
}

std::vector<QAInstance> load_mc_jsonl(const std::string& path) {
    LineReader reader(path);
    std::vector<QAInstance> instances;
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_line(path, reader.line_number(), std::string("invalid JSON: ") + e.what());
        }
        try {
            QAInstance inst;
            inst.question_id = id_to_string(row.at("id"));
            inst.question_raw = row.at("question").get<std::string>();
            const json& candidates = row.at("candidates");
            if (!candidates.is_array()) throw std::runtime_error("candidates must be an array");
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                inst.candidates.push_back(
                    {std::to_string(i), candidates[i].get<std::string>(), {}});
            }
            long long gold_index = row.at("gold_index").get<long long>();
            if (gold_index < 0 || gold_index >= static_cast<long long>(inst.candidates.size())) {
                throw std::runtime_error("gold_index " + std::to_string(gold_index) +
                                         " out of range for " +
                                         std::to_string(inst.candidates.size()) + " candidates");
            }
            inst.gold.insert(std::to_string(gold_index));
            instances.push_back(std::move(inst));
        } catch (const std::exception& e) {
            fail_line(path, reader.line_number(), e.what());
        }
    }
    return instances;
}

std::vector<KbDocument> load_kb(const std::string& path) {
    LineReader reader(path);
    std::vector<KbDocument> docs;
    std::string line;
    bool jsonl = false;
    bool detected = false;
    while (reader.next(line)) {
        if (line.empty()) continue;
        if (!detected) {
            jsonl = line.front() == '{';
            detected = true;
        }
        if (jsonl) {
            json row;
            try {
                row = json::parse(line);
            } catch (const json::parse_error& e) {
                fail_line(path, reader.line_number(), std::string("invalid JSON: ") + e.what());
            }
            try {
                KbDocument doc;
                doc.doc_id = row.contains("id") ? id_to_string(row.at("id"))
                                                : std::to_string(docs.size());
                doc.raw_text = row.at("text").get<std::string>();
                docs.push_back(std::move(doc));
            } catch (const std::exception& e) {
                fail_line(path, reader.line_number(), e.what());
            }
        } else {
            docs.push_back({std::to_string(docs.size()), {}, line});
        }
    }
    return docs;
}

std::vector<QAInstance> load_dataset(const DatasetSpec& spec) {
    switch (spec.format) {
    case DatasetFormat::wikiqa_tsv: return load_wikiqa(spec.path);
    case DatasetFormat::mc_jsonl: return load_mc_jsonl(spec.path);
    case DatasetFormat::kb_lines: break;
    }
    throw std::invalid_argument("kb_lines is a corpus format, not a QA dataset format");
}

} // namespace qalign
