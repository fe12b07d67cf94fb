#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qalign/ir_engine.hpp"
#include "support/test_util.hpp"

using namespace qalign;

namespace {

KbDocument doc(const std::string& id, std::initializer_list<std::string> words) {
    KbDocument d;
    d.doc_id = id;
    d.terms = test_util::terms(words);
    for (const auto& w : words) {
        if (!d.raw_text.empty()) d.raw_text += ' ';
        d.raw_text += w;
    }
    d.terms.source_text = d.raw_text;
    return d;
}

double hand_bm25(std::size_t n_docs, std::size_t df, double tf, double len, double avg,
                 double k1 = kDefaultBm25K1, double b = kDefaultBm25B) {
    double idf = std::log((static_cast<double>(n_docs) - static_cast<double>(df) + 0.5) /
                              (static_cast<double>(df) + 0.5) +
                          1.0);
    return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
}

} // namespace

TEST_CASE("build_index computes lengths, average, and postings") {
    InvertedIndex index = InvertedIndex::build(
        {doc("a", {"x", "y", "z"}), doc("b", {"x", "x", "x", "w", "w"})});
    CHECK(index.n_docs() == 2);
    CHECK(index.avg_doc_len() == doctest::Approx(4.0));
    CHECK(index.k1() == doctest::Approx(1.2));
    CHECK(index.b() == doctest::Approx(0.75));
    // repeated term -> posting frequency 3, visible through score monotonicity below
}

TEST_CASE("build_index rejects duplicates and empty corpora") {
    CHECK_THROWS_WITH_AS(InvertedIndex::build({doc("a", {"x"}), doc("a", {"y"})}),
                         doctest::Contains("duplicate doc_id: a"), std::invalid_argument);
    CHECK_THROWS_AS(InvertedIndex::build({}), std::invalid_argument);
}

TEST_CASE("bm25 score is zero iff query and document share no terms") {
    InvertedIndex index = InvertedIndex::build(
        {doc("a", {"apple", "pie"}), doc("b", {"banana", "split"})});
    RetrievalResult res = index.retrieve(test_util::terms({"cherry"}), 5);
    CHECK(res.hits.empty());
    res = index.retrieve(test_util::terms({"apple"}), 5);
    REQUIRE(res.hits.size() == 1);
    CHECK(res.hits[0].doc_id == "a");
    CHECK(res.hits[0].score > 0.0);
    CHECK(index.score_doc(test_util::terms({"cherry"}), 0) == 0.0);
}

TEST_CASE("single-doc corpus matches the hand-evaluated BM25 formula") {
    InvertedIndex index = InvertedIndex::build({doc("only", {"quark", "lepton", "quark"})});
    RetrievalResult res = index.retrieve(test_util::terms({"quark"}), 1);
    REQUIRE(res.hits.size() == 1);
    // n=1, df=1, tf=2, len=3, avg=3
    CHECK(res.hits[0].score == doctest::Approx(hand_bm25(1, 1, 2.0, 3.0, 3.0)).epsilon(1e-12));
}

TEST_CASE("retrieve clamps n, sorts by score then doc_id") {
    InvertedIndex index = InvertedIndex::build({doc("d2", {"x"}), doc("d1", {"x"}),
                                                doc("d3", {"x", "y"})});
    RetrievalResult res = index.retrieve(test_util::terms({"x"}), 10);
    REQUIRE(res.hits.size() == 3);
    // d1 and d2 have identical scores (same length, same tf): id ascending
    CHECK(res.hits[0].doc_id == "d1");
    CHECK(res.hits[1].doc_id == "d2");
    // d3 is longer, so its x-score is lower
    CHECK(res.hits[2].doc_id == "d3");
    CHECK(index.retrieve(test_util::terms({"x"}), 2).hits.size() == 2);
}

TEST_CASE("tf monotonicity at b=0") {
    for (int extra = 0; extra < 4; ++extra) {
        std::vector<std::string> words{"t"};
        for (int i = 0; i < extra; ++i) words.push_back("t");
        InvertedIndex low = InvertedIndex::build({doc("d", {"t"}), doc("pad", {"zzz"})}, 1.2, 0.0);
        KbDocument high_doc;
        high_doc.doc_id = "d";
        high_doc.terms = test_util::terms(words);
        InvertedIndex high =
            InvertedIndex::build({high_doc, doc("pad", {"zzz"})}, 1.2, 0.0);
        double lo = low.score_doc(test_util::terms({"t"}), 0);
        double hi = high.score_doc(test_util::terms({"t"}), 0);
        CHECK(hi >= lo - 1e-12);
    }
}

TEST_CASE("index serialization round-trips byte-identically") {
    std::mt19937 rng(67);
    std::vector<KbDocument> docs;
    const std::vector<std::string> pool = {"sun", "moon", "star", "rock", "dust", "gas"};
    for (int i = 0; i < 10000; ++i) {
        KbDocument d;
        d.doc_id = "doc" + std::to_string(i);
        int len = 1 + static_cast<int>(rng() % 12);
        for (int j = 0; j < len; ++j) {
            d.terms.terms.push_back(pool[rng() % pool.size()]);
        }
        d.raw_text = "raw " + std::to_string(i);
        d.terms.source_text = d.raw_text;
        docs.push_back(std::move(d));
    }
    InvertedIndex index = InvertedIndex::build(docs, 1.5, 0.6, 12345u);

    std::ostringstream first;
    index.save(first);
    std::istringstream in(first.str());
    InvertedIndex reloaded = InvertedIndex::load(in);
    std::ostringstream second;
    reloaded.save(second);
    CHECK(first.str() == second.str());
    CHECK(reloaded.n_docs() == index.n_docs());
    CHECK(reloaded.k1() == index.k1());
    CHECK(reloaded.b() == index.b());
    CHECK(reloaded.source_checksum() == 12345u);

    // identical retrieval results for a query battery
    for (const std::string& term : pool) {
        RetrievalResult a = index.retrieve(test_util::terms({term, "rock"}), 7);
        RetrievalResult b = reloaded.retrieve(test_util::terms({term, "rock"}), 7);
        REQUIRE(a.hits.size() == b.hits.size());
        for (std::size_t k = 0; k < a.hits.size(); ++k) {
            CHECK(a.hits[k].doc_id == b.hits[k].doc_id);
            CHECK(a.hits[k].score == b.hits[k].score);
        }
    }
}

TEST_CASE("index load rejects foreign files") {
    std::istringstream in("definitely not an index");
    CHECK_THROWS_WITH_AS(InvertedIndex::load(in), doctest::Contains("magic"),
                         std::runtime_error);
}

TEST_CASE("bm25_candidate_scores ranks overlap above disjoint") {
    TermList question = test_util::terms({"red", "fox", "jumps"});
    std::vector<TermList> candidates{
        test_util::terms({"red", "fox", "jumps"}),   // identical
        test_util::terms({"red", "fox", "sleeps"}),  // partial
        test_util::terms({"blue", "whale", "swims"}) // disjoint
    };
    std::vector<double> scores = bm25_candidate_scores(question, candidates);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0] > scores[1]);
    CHECK(scores[1] > scores[2]);
    CHECK(scores[2] == 0.0);
}

TEST_CASE("bm25_candidate_scores hand evaluation on a controlled toy") {
    // 4 candidates; query term "q" appears in cand 0 once and cand 1 twice
    TermList question = test_util::terms({"q"});
    std::vector<TermList> candidates{
        test_util::terms({"q", "pad"}),
        test_util::terms({"q", "q"}),
        test_util::terms({"pad", "pad"}),
        test_util::terms({"other", "other"}),
    };
    std::vector<double> scores = bm25_candidate_scores(question, candidates);
    // n=4, df("q")=2, avg len 2
    CHECK(scores[0] == doctest::Approx(hand_bm25(4, 2, 1.0, 2.0, 2.0)).epsilon(1e-12));
    CHECK(scores[1] == doctest::Approx(hand_bm25(4, 2, 2.0, 2.0, 2.0)).epsilon(1e-12));
    CHECK(scores[2] == 0.0);
    CHECK(scores[3] == 0.0);
    CHECK(scores[1] > scores[0]);
}

TEST_CASE("ai2_ir_score keeps only docs covering both question and choice") {
    InvertedIndex index = InvertedIndex::build({
        doc("qonly", {"volt", "amp"}),
        doc("both", {"volt", "ohm"}),
        doc("conly", {"ohm", "watt"}),
    });
    TermList question = test_util::terms({"volt", "amp"});
    TermList choice = test_util::terms({"ohm"});
    double score = ai2_ir_score(question, choice, index, 3);
    // only "both" survives the filter; check its BM25 score for the combined query
    auto idx = index.find_doc("both");
    REQUIRE(idx.has_value());
    TermList combined = test_util::terms({"volt", "amp", "ohm"});
    CHECK(score == doctest::Approx(index.score_doc(combined, *idx)).epsilon(1e-12));
    CHECK(score > 0.0);

    // choice with no coverage -> 0
    CHECK(ai2_ir_score(question, test_util::terms({"tesla"}), index, 3) == 0.0);
    // empty retrieval -> 0
    CHECK(ai2_ir_score(test_util::terms({"nothing"}), test_util::terms({"here"}), index, 3) ==
          0.0);
}
