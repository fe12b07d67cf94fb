#include <doctest.h>

#include <zlib.h>

#include <cstring>

#include "qalign/datasets.hpp"
#include "support/test_util.hpp"

using namespace qalign;

TEST_CASE("load_wikiqa groups rows by question and collects gold") {
    std::string dir = test_util::scratch_dir("wikiqa");
    test_util::write_file(dir + "/data.tsv",
                          "Q1\thow tall is it\tQ1-0\tabout a mile\t0\n"
                          "Q1\thow tall is it\tQ1-1\tit is 120 m tall\t1\n"
                          "Q2\twho wrote it\tQ2-0\tnobody knows\t0\n");
    std::vector<QAInstance> instances = load_wikiqa(dir + "/data.tsv");
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].question_id == "Q1");
    CHECK(instances[0].question_raw == "how tall is it");
    REQUIRE(instances[0].candidates.size() == 2);
    CHECK(instances[0].candidates[1].candidate_id == "Q1-1");
    CHECK(instances[0].gold == std::unordered_set<std::string>{"Q1-1"});
    // all-zero labels -> empty gold
    CHECK(instances[1].gold.empty());
}

TEST_CASE("load_wikiqa accepts the official 7-column layout with header") {
    std::string dir = test_util::scratch_dir("wikiqa7");
    test_util::write_file(
        dir + "/data.tsv",
        "QuestionID\tQuestion\tDocumentID\tDocumentTitle\tSentenceID\tSentence\tLabel\n"
        "Q1\thow tall\tD1\tTitle\tD1-0\tvery tall\t1\n"
        "Q1\thow tall\tD1\tTitle\tD1-1\tnot tall\t0\n");
    std::vector<QAInstance> instances = load_wikiqa(dir + "/data.tsv");
    REQUIRE(instances.size() == 1);
    REQUIRE(instances[0].candidates.size() == 2);
    CHECK(instances[0].candidates[0].candidate_id == "D1-0");
    CHECK(instances[0].candidates[0].raw_text == "very tall");
    CHECK(instances[0].gold.count("D1-0") == 1);
}

TEST_CASE("load_wikiqa rejects malformed rows with line numbers") {
    std::string dir = test_util::scratch_dir("wikiqa_bad");
    test_util::write_file(dir + "/cols.tsv", "Q1\tonly\tthree\n");
    CHECK_THROWS_WITH_AS(load_wikiqa(dir + "/cols.tsv"), doctest::Contains("line 1"),
                         std::runtime_error);
    test_util::write_file(dir + "/label.tsv",
                          "Q1\tq\tQ1-0\ts\t1\nQ1\tq\tQ1-1\ts\ttwo\n");
    CHECK_THROWS_WITH_AS(load_wikiqa(dir + "/label.tsv"), doctest::Contains("line 2"),
                         std::runtime_error);
    test_util::write_file(dir + "/dup.tsv", "Q1\tq\tQ1-0\ts\t1\nQ1\tq\tQ1-0\tother\t0\n");
    CHECK_THROWS_WITH_AS(load_wikiqa(dir + "/dup.tsv"),
                         doctest::Contains("duplicate sentence id"), std::runtime_error);
}

TEST_CASE("load_mc_jsonl parses candidates and gold_index") {
    std::string dir = test_util::scratch_dir("mc");
    test_util::write_file(
        dir + "/data.jsonl",
        R"({"id": "m1", "question": "pick one", "candidates": ["a", "b", "c", "d"], "gold_index": 2})"
        "\n"
        R"({"id": 7, "question": "pick again", "candidates": ["x", "y"], "gold_index": 0})"
        "\n");
    std::vector<QAInstance> instances = load_mc_jsonl(dir + "/data.jsonl");
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].question_id == "m1");
    REQUIRE(instances[0].candidates.size() == 4);
    CHECK(instances[0].candidates[2].raw_text == "c");
    CHECK(instances[0].gold == std::unordered_set<std::string>{"2"});
    CHECK(instances[1].question_id == "7");
    CHECK(instances[1].gold == std::unordered_set<std::string>{"0"});
}

TEST_CASE("load_mc_jsonl rejects out-of-range gold_index with line number") {
    std::string dir = test_util::scratch_dir("mc_bad");
    test_util::write_file(
        dir + "/data.jsonl",
        R"({"id": "m1", "question": "q", "candidates": ["a", "b", "c", "d"], "gold_index": 7})"
        "\n");
    CHECK_THROWS_WITH_AS(load_mc_jsonl(dir + "/data.jsonl"),
                         doctest::Contains("line 1"), std::runtime_error);
}

TEST_CASE("load_kb assigns sequential ids and skips blank lines") {
    std::string dir = test_util::scratch_dir("kb");
    test_util::write_file(dir + "/kb.txt", "first doc\n\nsecond doc\nthird doc\n\n");
    std::vector<KbDocument> docs = load_kb(dir + "/kb.txt");
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].doc_id == "0");
    CHECK(docs[1].doc_id == "1");
    CHECK(docs[2].doc_id == "2");
    CHECK(docs[1].raw_text == "second doc");
}

TEST_CASE("load_kb preserves explicit JSONL ids") {
    std::string dir = test_util::scratch_dir("kb_jsonl");
    test_util::write_file(dir + "/kb.jsonl",
                          R"({"id": "fact-17", "text": "water boils"})"
                          "\n"
                          R"({"text": "ice melts"})"
                          "\n");
    std::vector<KbDocument> docs = load_kb(dir + "/kb.jsonl");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "fact-17");
    CHECK(docs[0].raw_text == "water boils");
    CHECK(docs[1].doc_id == "1"); // positional fallback
}

TEST_CASE("loading is order-preserving and idempotent") {
    std::string dir = test_util::scratch_dir("kb_idem");
    test_util::write_file(dir + "/kb.txt", "zebra\nyak\nxerus\n");
    std::vector<KbDocument> a = load_kb(dir + "/kb.txt");
    std::vector<KbDocument> b = load_kb(dir + "/kb.txt");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].doc_id == b[i].doc_id);
        CHECK(a[i].raw_text == b[i].raw_text);
    }
    CHECK(a[0].raw_text == "zebra");
    CHECK(a[2].raw_text == "xerus");
}

TEST_CASE("gzip-compressed inputs load transparently") {
    std::string dir = test_util::scratch_dir("kb_gz");
    std::string path = dir + "/kb.txt.gz";
    gzFile f = gzopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    const char* content = "compressed one\ncompressed two\n";
    gzwrite(f, content, static_cast<unsigned>(std::strlen(content)));
    gzclose(f);
    std::vector<KbDocument> docs = load_kb(path);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].raw_text == "compressed one");
}

TEST_CASE("dataset format parsing") {
    CHECK(parse_dataset_format("wikiqa_tsv") == DatasetFormat::wikiqa_tsv);
    CHECK(parse_dataset_format("mc_jsonl") == DatasetFormat::mc_jsonl);
    CHECK(parse_dataset_format("kb_lines") == DatasetFormat::kb_lines);
    CHECK_THROWS_AS(parse_dataset_format("csv"), std::invalid_argument);
}
