#include <doctest.h>

#include <cmath>
#include <random>

#include "qalign/alignment_scorer.hpp"
#include "support/reference_scorer.hpp"
#include "support/test_util.hpp"

using namespace qalign;

namespace {

RankedSimilarities ranked_from(std::initializer_list<double> sims_desc) {
    RankedSimilarities r;
    std::size_t pos = 0;
    for (double s : sims_desc) r.pairs.push_back({"t" + std::to_string(pos), pos++, s});
    return r;
}

struct RandomInstance {
    refimpl::Vocab vocab;
    EmbeddingTable table;
    std::vector<std::vector<std::string>> questions;
    std::vector<std::string> question;
    std::vector<std::string> answer;
    IdfTable idf;
    std::map<std::string, double> ref_idf;
};

RandomInstance random_instance(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    RandomInstance inst;
    int vocab_size = 2 + static_cast<int>(rng() % 9); // <= 10
    int dim = 1 + static_cast<int>(rng() % 5);
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    std::vector<std::string> all_words;
    for (int w = 0; w < vocab_size; ++w) {
        std::string word = "w" + std::to_string(w);
        all_words.push_back(word);
        if (rng() % 6 == 0) continue; // leave some words out-of-vocabulary
        std::vector<double> v(dim);
        bool nonzero = false;
        for (double& x : v) {
            x = dist(rng);
            nonzero |= x != 0.0;
        }
        if (!nonzero) v[0] = 0.25;
        inst.vocab[word] = v;
        rows.emplace_back(word, v);
    }
    inst.table = test_util::make_table(rows);
    auto draw = [&] { return all_words[rng() % all_words.size()]; };
    int n_questions = 1 + static_cast<int>(rng() % 5);
    for (int q = 0; q < n_questions; ++q) {
        std::vector<std::string> question;
        int len = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < len; ++i) question.push_back(draw());
        inst.questions.push_back(question);
    }
    inst.question = inst.questions.front();
    int answer_len = static_cast<int>(rng() % 13);
    for (int i = 0; i < answer_len; ++i) inst.answer.push_back(draw());
    std::vector<TermList> qlists;
    for (const auto& q : inst.questions) qlists.push_back(test_util::terms(q));
    inst.idf = compute_idf(qlists);
    inst.ref_idf = refimpl::ref_idf(inst.questions);
    return inst;
}

} // namespace

TEST_CASE("pos_score hand checks") {
    CHECK(pos_score(ranked_from({0.9, 0.5, 0.1}), 2) == doctest::Approx(1.15).epsilon(1e-12));
    CHECK(pos_score(ranked_from({0.9}), 1) == doctest::Approx(0.9).epsilon(1e-12));
    // clamped to available terms
    CHECK(pos_score(ranked_from({0.9, 0.5}), 5) == doctest::Approx(1.15).epsilon(1e-12));
    CHECK(pos_score(ranked_from({}), 3) == 0.0);
    CHECK_THROWS_AS(pos_score(ranked_from({0.9}), 0), std::invalid_argument);
}

TEST_CASE("neg_score hand checks") {
    CHECK(neg_score(ranked_from({0.9, 0.1, -0.4}), 1) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(neg_score(ranked_from({0.9, -0.1, -0.4}), 2) == doctest::Approx(-0.45).epsilon(1e-12));
    CHECK(neg_score(ranked_from({0.9, 0.5}), 0) == 0.0);
    CHECK(neg_score(ranked_from({}), 2) == 0.0);
    CHECK_THROWS_AS(neg_score(ranked_from({0.9}), -1), std::invalid_argument);
}

TEST_CASE("align_term hand checks") {
    CHECK(align_term(1.15, -0.4, 0.4) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(align_term(0.7, -0.9, 0.0) == 0.7);
    CHECK(align_term(0.0, 0.0, 0.4) == 0.0);
}

TEST_CASE("score_one_to_all hand checks") {
    CHECK(score_one_to_all(ranked_from({0.9, 0.5, 0.1})) ==
          doctest::Approx(0.9 + 0.25 + 0.1 / 3.0).epsilon(1e-12));
    CHECK(score_one_to_all(ranked_from({0.9, 0.5, 0.1})) ==
          doctest::Approx(1.18333).epsilon(1e-5));
    CHECK(score_one_to_all(ranked_from({})) == 0.0);
    CHECK(score_one_to_all(ranked_from({0.7})) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("score_answer sums idf-weighted align over question occurrences") {
    // two question terms with controlled idf and align values
    // q-set: "hi" in 1 of 3 questions -> idf ln(2.5/1.5); "lo" in 2 -> ln(1.5/2.5)
    EmbeddingTable table = test_util::make_table({{"hi", {1.0, 0.0}},
                                                  {"lo", {0.0, 1.0}},
                                                  {"a", {1.0, 0.0}},
                                                  {"b", {0.0, 1.0}}});
    std::vector<TermList> questions{test_util::terms({"hi", "lo"}), test_util::terms({"lo"}),
                                    test_util::terms({"other"})};
    IdfTable idf = compute_idf(questions);
    AlignmentConfig cfg;
    cfg.k_pos = 1;
    TermList question = test_util::terms({"hi", "lo"});
    TermList answer = test_util::terms({"a", "b"});
    ScoreBreakdown got = score_answer(question, answer, idf, table, cfg);
    // hi aligns to a with sim 1; lo aligns to b with sim 1
    double expected = std::log(2.5 / 1.5) * 1.0 + std::log(1.5 / 2.5) * 1.0;
    CHECK(got.total == doctest::Approx(expected).epsilon(1e-12));
    REQUIRE(got.per_term.size() == 2);
    CHECK(got.per_term[0].q_term == "hi");
    CHECK(got.per_term[0].align == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("score_answer empty question or answer yields total 0") {
    EmbeddingTable table = test_util::make_table({{"a", {1.0}}});
    IdfTable idf = compute_idf({test_util::terms({"a"})});
    AlignmentConfig cfg;
    CHECK(score_answer(test_util::terms({}), test_util::terms({"a"}), idf, table, cfg).total ==
          0.0);
    CHECK(score_answer(test_util::terms({"a"}), test_util::terms({}), idf, table, cfg).total ==
          0.0);
}

TEST_CASE("duplicate question terms each contribute a summand") {
    EmbeddingTable table = test_util::make_table({{"q", {1.0}}, {"a", {1.0}}});
    IdfTable idf = compute_idf({test_util::terms({"q"})});
    AlignmentConfig cfg;
    double once = score_answer(test_util::terms({"q"}), test_util::terms({"a"}), idf, table, cfg)
                      .total;
    double twice =
        score_answer(test_util::terms({"q", "q"}), test_util::terms({"a"}), idf, table, cfg)
            .total;
    CHECK(twice == doctest::Approx(2.0 * once).epsilon(1e-12));
}

TEST_CASE("config validation") {
    AlignmentConfig cfg;
    cfg.k_pos = 0;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
    cfg.k_pos = 1;
    cfg.k_neg = -1;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
    cfg.k_neg = 0;
    cfg.lambda = 0.4;
    CHECK(cfg.warnings().size() == 1);
    cfg.k_neg = 1;
    CHECK(cfg.warnings().empty());
}

TEST_CASE("oracle equivalence on random instances, all variants") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        RandomInstance inst = random_instance(rng);
        AlignmentConfig cfg;
        cfg.k_pos = 1 + static_cast<int>(rng() % 5);
        cfg.k_neg = static_cast<int>(rng() % 4);
        cfg.lambda = 0.1 * static_cast<double>(rng() % 10);
        TermList question = test_util::terms(inst.question);
        TermList answer = test_util::terms(inst.answer);

        cfg.variant = AlignVariant::full;
        double expect_full =
            refimpl::ref_score(inst.question, inst.answer, inst.vocab, inst.ref_idf,
                               inst.questions.size(), refimpl::RefVariant::full, cfg.k_pos,
                               cfg.k_neg, cfg.lambda);
        CHECK(score_answer(question, answer, inst.idf, inst.table, cfg).total ==
              doctest::Approx(expect_full).epsilon(1e-9));

        cfg.variant = AlignVariant::one_to_one;
        double expect_121 =
            refimpl::ref_score(inst.question, inst.answer, inst.vocab, inst.ref_idf,
                               inst.questions.size(), refimpl::RefVariant::one_to_one, 1, 0, 0.0);
        CHECK(score_answer(question, answer, inst.idf, inst.table, cfg).total ==
              doctest::Approx(expect_121).epsilon(1e-9));

        cfg.variant = AlignVariant::one_to_all;
        double expect_12all =
            refimpl::ref_score(inst.question, inst.answer, inst.vocab, inst.ref_idf,
                               inst.questions.size(), refimpl::RefVariant::one_to_all, 1, 0, 0.0);
        CHECK(score_answer(question, answer, inst.idf, inst.table, cfg).total ==
              doctest::Approx(expect_12all).epsilon(1e-9));
    }
}

TEST_CASE("reduction: full with (k_pos=1, k_neg=0) equals one_to_one exactly") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        RandomInstance inst = random_instance(rng);
        TermList question = test_util::terms(inst.question);
        TermList answer = test_util::terms(inst.answer);
        AlignmentConfig full;
        full.k_pos = 1;
        full.k_neg = 0;
        full.variant = AlignVariant::full;
        AlignmentConfig o2o;
        o2o.variant = AlignVariant::one_to_one;
        double a = score_answer(question, answer, inst.idf, inst.table, full).total;
        double b = score_answer(question, answer, inst.idf, inst.table, o2o).total;
        CHECK(a == b); // bitwise identical
    }
}

TEST_CASE("reduction: full with k_pos >= m and k_neg=0 equals one_to_all exactly") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        RandomInstance inst = random_instance(rng);
        TermList question = test_util::terms(inst.question);
        TermList answer = test_util::terms(inst.answer);
        AlignmentConfig full;
        full.k_pos = static_cast<int>(inst.answer.size()) + 1;
        full.k_neg = 0;
        full.variant = AlignVariant::full;
        AlignmentConfig o2a;
        o2a.variant = AlignVariant::one_to_all;
        double a = score_answer(question, answer, inst.idf, inst.table, full).total;
        double b = score_answer(question, answer, inst.idf, inst.table, o2a).total;
        CHECK(a == b);
    }
}

TEST_CASE("lambda=0 makes totals independent of k_neg") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        RandomInstance inst = random_instance(rng);
        TermList question = test_util::terms(inst.question);
        TermList answer = test_util::terms(inst.answer);
        AlignmentConfig cfg;
        cfg.k_pos = 1 + static_cast<int>(rng() % 4);
        cfg.lambda = 0.0;
        std::vector<double> totals;
        for (int k_neg : {0, 1, 2, 5}) {
            cfg.k_neg = k_neg;
            totals.push_back(score_answer(question, answer, inst.idf, inst.table, cfg).total);
        }
        for (double t : totals) CHECK(t == totals.front());
    }
}

TEST_CASE("appending a term above the k-th ranked similarity never decreases pos") {
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        int k_pos = 1 + static_cast<int>(rng() % 4);
        int m = k_pos + static_cast<int>(rng() % 6); // at least k_pos entries
        std::vector<double> sims;
        for (int i = 0; i < m; ++i) sims.push_back(dist(rng));
        std::sort(sims.begin(), sims.end(), std::greater<double>());
        double kth = sims[static_cast<std::size_t>(k_pos) - 1];
        double v = kth + std::uniform_real_distribution<double>(1e-6, 1.0)(rng);
        if (v > 1.0) v = 1.0; // stay a plausible cosine
        if (v <= kth) continue;
        RankedSimilarities before;
        for (std::size_t i = 0; i < sims.size(); ++i) before.pairs.push_back({"t", i, sims[i]});
        std::vector<double> extended = sims;
        extended.push_back(v);
        std::sort(extended.begin(), extended.end(), std::greater<double>());
        RankedSimilarities after;
        for (std::size_t i = 0; i < extended.size(); ++i)
            after.pairs.push_back({"t", i, extended[i]});
        CHECK(pos_score(after, k_pos) >= pos_score(before, k_pos) - 1e-12);
    }
}

TEST_CASE("uniform positive idf scaling preserves the argmax candidate") {
    std::mt19937 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        RandomInstance inst = random_instance(rng);
        TermList question = test_util::terms(inst.question);
        std::vector<TermList> candidates;
        for (int c = 0; c < 4; ++c) {
            std::vector<std::string> words;
            int len = 1 + static_cast<int>(rng() % 8);
            for (int i = 0; i < len; ++i)
                words.push_back("w" + std::to_string(rng() % 10));
            candidates.push_back(test_util::terms(words));
        }
        AlignmentConfig cfg;
        cfg.k_pos = 2;
        cfg.k_neg = 1;
        cfg.lambda = 0.4;
        IdfTable scaled = inst.idf;
        double c = 3.7;
        for (auto& [term, value] : scaled.idf_values) value *= c;

        auto argmax = [&](const IdfTable& idf) {
            std::size_t best = 0;
            double best_score = -1e300;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                double s = score_answer(question, candidates[i], idf, inst.table, cfg).total;
                if (s > best_score) {
                    best_score = s;
                    best = i;
                }
            }
            return best;
        };
        // every question term is covered by idf_values, so scaling them
        // scales each candidate total by c
        CHECK(argmax(inst.idf) == argmax(scaled));
    }
}
