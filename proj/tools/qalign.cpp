// qalign: unsupervised alignment + IR ranking over QA datasets, with
// evaluation, tuning, and significance testing subcommands.
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qalign/datasets.hpp"
#include "qalign/evaluation.hpp"
#include "qalign/io_util.hpp"
#include "qalign/qa_pipelines.hpp"
#include "qalign/tuner.hpp"

using nlohmann::json;
using namespace qalign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDataMismatch = 3;

struct LexiconOpts {
    std::string stoplist;
    std::string lemmas;
};

void add_lexicon_opts(CLI::App* cmd, LexiconOpts& opts) {
    cmd->add_option("--stoplist", opts.stoplist, "Stopword file, one token per line");
    cmd->add_option("--lemmas", opts.lemmas, "Lemma file, TSV inflected<TAB>lemma");
}

struct EmbeddingOpts {
    std::string path;
    int dim = 0; // 0 = infer from the first row
    bool cache = false;
};

void add_embedding_opts(CLI::App* cmd, EmbeddingOpts& opts) {
    cmd->add_option("--embeddings", opts.path, "Word vector file (text, space separated)");
    cmd->add_option("--dim", opts.dim, "Expected vector dimension (default: inferred)");
    cmd->add_flag("--cache", opts.cache, "Use a binary sidecar cache for the vector file");
}

EmbeddingTable load_vectors(const EmbeddingOpts& opts) {
    std::optional<int> dim;
    if (opts.dim > 0) dim = opts.dim;
    EmbeddingLoad load = load_embeddings_file(opts.path, dim, opts.cache);
    std::fprintf(stderr, "loaded %zu vectors (dim %d) in %.2fs%s", load.table.size(),
                 load.table.dim, load.load_seconds, load.loaded_from_cache ? " [cache]\n" : "\n");
    if (load.zero_norm_skipped > 0) {
        std::fprintf(stderr, "warning: skipped %zu zero-norm vector rows\n",
                     load.zero_norm_skipped);
    }
    return std::move(load.table);
}

struct RankOpts {
    std::string dataset;
    std::string format = "wikiqa_tsv";
    std::string pipeline = "direct";
    std::string scorer = "align";
    std::string variant = "full";
    int k_pos = 1;
    int k_neg = 0;
    double lambda = 0.0;
    int n_justifications = 5;
    double k1 = kDefaultBm25K1;
    double b = kDefaultBm25B;
    std::string kb;
    std::string kb_index;
    std::string idf_questions;
    bool clamp_negative_idf = false;
    int threads = 1;
    std::string out;
    std::string explain;
    std::string gold_out;
    LexiconOpts lexicons;
    EmbeddingOpts embeddings;
};

AlignmentConfig make_config(const RankOpts& opts) {
    AlignmentConfig cfg;
    cfg.k_pos = opts.k_pos;
    cfg.k_neg = opts.k_neg;
    cfg.lambda = opts.lambda;
    cfg.variant = parse_variant(opts.variant);
    cfg.n_justifications = opts.n_justifications;
    cfg.check();
    for (const std::string& w : cfg.warnings()) {
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    return cfg;
}

/// Cheap flag consistency checks, run before any heavy file loading.
void validate_rank_opts(const RankOpts& opts) {
    if (opts.pipeline != "direct" && opts.pipeline != "kb") {
        throw std::invalid_argument("--pipeline must be direct or kb");
    }
    if (opts.scorer != "align" && opts.scorer != "bm25" && opts.scorer != "ai2ir") {
        throw std::invalid_argument("--scorer must be align, bm25, or ai2ir");
    }
    if (opts.pipeline == "kb" && opts.kb.empty() && opts.kb_index.empty()) {
        throw std::invalid_argument("--pipeline kb requires --kb or --kb-index");
    }
    if (opts.pipeline == "direct" && opts.scorer == "ai2ir") {
        throw std::invalid_argument("--scorer ai2ir requires --pipeline kb");
    }
    if (opts.pipeline == "kb" && opts.scorer == "bm25") {
        throw std::invalid_argument("--scorer bm25 requires --pipeline direct");
    }
    if (opts.scorer == "align" && opts.embeddings.path.empty()) {
        throw std::invalid_argument("--embeddings is required for the align scorer");
    }
    if (opts.threads < 1) {
        throw std::invalid_argument("--threads must be >= 1");
    }
    parse_dataset_format(opts.format); // throws on unknown formats
}

InvertedIndex load_or_build_index(const std::string& kb, const std::string& kb_index, double k1,
                                  double b, const Lexicons& lexicons) {
    if (!kb_index.empty()) {
        InvertedIndex index = InvertedIndex::load_file(kb_index);
        if (!kb.empty()) {
            std::uint64_t checksum = fnv1a64_file(kb);
            if (checksum != index.source_checksum()) {
                throw data_error("index " + kb_index + " is stale: checksum does not match " +
                                 kb);
            }
        }
        return index;
    }
    std::vector<KbDocument> docs = load_kb(kb);
    preprocess(docs, lexicons);
    return InvertedIndex::build(std::move(docs), k1, b, fnv1a64_file(kb));
}

template <typename Fn> void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    int n_threads = std::min<int>(threads, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

json explain_to_json(const ExplainRecord& record) {
    json j;
    j["question_id"] = record.question_id;
    j["candidate_id"] = record.candidate_id;
    j["score"] = record.score;
    if (!record.per_term.empty()) {
        json terms = json::array();
        for (const auto& t : record.per_term) {
            terms.push_back({{"term", t.q_term},
                             {"idf", t.idf},
                             {"pos", t.pos},
                             {"neg", t.neg},
                             {"align", t.align}});
        }
        j["terms"] = std::move(terms);
    }
    if (!record.justifications.empty()) {
        json docs = json::array();
        for (const auto& [doc_id, score] : record.justifications) {
            docs.push_back({{"doc_id", doc_id}, {"score", score}});
        }
        j["justifications"] = std::move(docs);
    }
    return j;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

int run_rank(const RankOpts& opts) {
    validate_rank_opts(opts);
    AlignmentConfig cfg = make_config(opts);

    Lexicons lexicons = load_lexicons(opts.lexicons.stoplist, opts.lexicons.lemmas);
    DatasetSpec spec{parse_dataset_format(opts.format), opts.dataset, ""};
    std::vector<QAInstance> instances = load_dataset(spec);
    preprocess(instances, lexicons);
    if (instances.empty()) throw std::runtime_error(opts.dataset + ": no questions loaded");

    IdfTable idf;
    EmbeddingTable table;
    InvertedIndex index;
    const bool needs_align = opts.scorer == "align";
    const bool needs_kb = opts.pipeline == "kb";
    if (needs_align) {
        std::vector<TermList> questions;
        if (!opts.idf_questions.empty()) {
            DatasetSpec idf_spec{spec.format, opts.idf_questions, ""};
            std::vector<QAInstance> idf_instances = load_dataset(idf_spec);
            preprocess(idf_instances, lexicons);
            for (const QAInstance& inst : idf_instances) questions.push_back(inst.question);
        } else {
            for (const QAInstance& inst : instances) questions.push_back(inst.question);
        }
        idf = compute_idf(questions, opts.clamp_negative_idf);
        table = load_vectors(opts.embeddings);
    }
    if (needs_kb) {
        index = load_or_build_index(opts.kb, opts.kb_index, opts.k1, opts.b, lexicons);
        std::fprintf(stderr, "index: %zu docs, avg length %.2f\n", index.n_docs(),
                     index.avg_doc_len());
    }

    const bool want_explain = !opts.explain.empty();
    std::vector<RankedList> results(instances.size());
    std::vector<std::vector<ExplainRecord>> explains(want_explain ? instances.size() : 0);
    parallel_for(instances.size(), opts.threads, [&](std::size_t i) {
        std::vector<ExplainRecord>* rec = want_explain ? &explains[i] : nullptr;
        const QAInstance& inst = instances[i];
        if (opts.scorer == "bm25") {
            results[i] = rank_bm25(inst, opts.k1, opts.b, rec);
        } else if (opts.scorer == "ai2ir") {
            results[i] = rank_ai2(inst, index, static_cast<std::size_t>(cfg.n_justifications),
                                  rec);
        } else if (needs_kb) {
            results[i] = rank_kb(inst, index, idf, table, cfg, rec);
        } else {
            results[i] = rank_direct(inst, idf, table, cfg, rec);
        }
    });

    std::ofstream out = open_output(opts.out);
    write_run_file(out, results);
    if (!out) throw std::runtime_error("failed writing " + opts.out);

    if (want_explain) {
        std::ofstream explain_out = open_output(opts.explain);
        for (const auto& per_instance : explains) {
            for (const ExplainRecord& record : per_instance) {
                explain_out << explain_to_json(record).dump() << '\n';
            }
        }
    }
    if (!opts.gold_out.empty()) {
        std::ofstream gold_out = open_output(opts.gold_out);
        for (const QAInstance& inst : instances) {
            for (const Candidate& c : inst.candidates) {
                if (inst.gold.count(c.candidate_id) > 0) {
                    gold_out << inst.question_id << '\t' << c.candidate_id << '\n';
                }
            }
        }
    }
    std::fprintf(stderr, "ranked %zu questions -> %s\n", instances.size(), opts.out.c_str());
    return kExitOk;
}

struct IndexOpts {
    std::string kb;
    std::string out;
    double k1 = kDefaultBm25K1;
    double b = kDefaultBm25B;
    LexiconOpts lexicons;
};

int run_index(const IndexOpts& opts) {
    Lexicons lexicons = load_lexicons(opts.lexicons.stoplist, opts.lexicons.lemmas);
    std::vector<KbDocument> docs = load_kb(opts.kb);
    preprocess(docs, lexicons);
    InvertedIndex index = InvertedIndex::build(std::move(docs), opts.k1, opts.b,
                                               fnv1a64_file(opts.kb));
    index.save_file(opts.out);
    json report{{"n_docs", index.n_docs()}, {"avg_doc_len", index.avg_doc_len()}};
    std::cout << report.dump() << '\n';
    return kExitOk;
}

struct EvalOpts {
    std::string run;
    std::string gold;
    std::string metric = "map";
    bool per_question = false;
};

int run_eval(const EvalOpts& opts) {
    Metric metric = parse_metric(opts.metric);
    std::vector<RankedList> run = read_run_file(opts.run);
    GoldMap gold = read_gold_file(opts.gold);
    EvalReport report = evaluate(run, gold, metric);
    json j{{"metric", report.metric},
           {"value", report.value},
           {"n_evaluated", report.n_evaluated},
           {"n_skipped", report.n_skipped}};
    if (opts.per_question) {
        json per = json::object();
        for (const auto& [qid, v] : report.per_question) per[qid] = v;
        j["per_question"] = std::move(per);
    }
    std::cout << j.dump() << '\n';
    return kExitOk;
}

struct SignificanceOpts {
    std::string run_a;
    std::string run_b;
    std::string gold;
    std::string metric = "map";
    std::size_t iterations = 10000;
    std::uint64_t seed = 0;
};

int run_significance(const SignificanceOpts& opts) {
    Metric metric = parse_metric(opts.metric);
    std::vector<RankedList> run_a = read_run_file(opts.run_a);
    std::vector<RankedList> run_b = read_run_file(opts.run_b);

    std::unordered_set<std::string> ids_a, ids_b;
    for (const RankedList& r : run_a) ids_a.insert(r.question_id);
    for (const RankedList& r : run_b) ids_b.insert(r.question_id);
    for (const RankedList& r : run_a) {
        if (ids_b.count(r.question_id) == 0) {
            throw data_error("question " + r.question_id + " present in " + opts.run_a +
                             " but missing from " + opts.run_b);
        }
    }
    for (const RankedList& r : run_b) {
        if (ids_a.count(r.question_id) == 0) {
            throw data_error("question " + r.question_id + " present in " + opts.run_b +
                             " but missing from " + opts.run_a);
        }
    }

    GoldMap gold = read_gold_file(opts.gold);
    EvalReport report_a = evaluate(run_a, gold, metric);
    EvalReport report_b = evaluate(run_b, gold, metric);
    std::unordered_map<std::string, double> by_question_b(report_b.per_question.begin(),
                                                          report_b.per_question.end());
    std::vector<double> a, b;
    a.reserve(report_a.per_question.size());
    b.reserve(report_a.per_question.size());
    for (const auto& [qid, value] : report_a.per_question) {
        auto it = by_question_b.find(qid);
        if (it == by_question_b.end()) {
            throw data_error("question " + qid + " evaluated for run A but not run B");
        }
        a.push_back(value);
        b.push_back(it->second);
    }
    double p = bootstrap_significance(a, b, opts.iterations, opts.seed);
    json j{{"metric", report_a.metric},
           {"value_a", report_a.value},
           {"value_b", report_b.value},
           {"n_questions", a.size()},
           {"iterations", opts.iterations},
           {"seed", opts.seed},
           {"p_value", p}};
    std::cout << j.dump() << '\n';
    return kExitOk;
}

struct TuneOpts {
    std::string dataset;
    std::string format = "wikiqa_tsv";
    std::string grid;
    std::string pipeline = "direct";
    std::string kb;
    std::string kb_index;
    double k1 = kDefaultBm25K1;
    double b = kDefaultBm25B;
    std::string idf_questions;
    bool clamp_negative_idf = false;
    std::string table_out;
    LexiconOpts lexicons;
    EmbeddingOpts embeddings;
};

int run_tune(const TuneOpts& opts) {
    if (opts.pipeline != "direct" && opts.pipeline != "kb") {
        throw std::invalid_argument("--pipeline must be direct or kb");
    }
    if (opts.pipeline == "kb" && opts.kb.empty() && opts.kb_index.empty()) {
        throw std::invalid_argument("--pipeline kb requires --kb or --kb-index");
    }
    if (opts.embeddings.path.empty()) {
        throw std::invalid_argument("--embeddings is required for tuning");
    }
    GridSpec grid = load_grid_spec(opts.grid);

    Lexicons lexicons = load_lexicons(opts.lexicons.stoplist, opts.lexicons.lemmas);
    DatasetSpec spec{parse_dataset_format(opts.format), opts.dataset, ""};
    std::vector<QAInstance> dev = load_dataset(spec);
    preprocess(dev, lexicons);
    if (dev.empty()) throw std::runtime_error(opts.dataset + ": no questions loaded");

    std::vector<TermList> questions;
    if (!opts.idf_questions.empty()) {
        DatasetSpec idf_spec{spec.format, opts.idf_questions, ""};
        std::vector<QAInstance> idf_instances = load_dataset(idf_spec);
        preprocess(idf_instances, lexicons);
        for (const QAInstance& inst : idf_instances) questions.push_back(inst.question);
    } else {
        for (const QAInstance& inst : dev) questions.push_back(inst.question);
    }
    IdfTable idf = compute_idf(questions, opts.clamp_negative_idf);
    EmbeddingTable table = load_vectors(opts.embeddings);

    InvertedIndex index;
    PipelineBindings bindings{&idf, &table, nullptr};
    if (opts.pipeline == "kb") {
        index = load_or_build_index(opts.kb, opts.kb_index, opts.k1, opts.b, lexicons);
        bindings.kb_index = &index;
    }
    GridSearchResult result = grid_search(dev, grid, bindings);
    if (!opts.table_out.empty()) {
        std::ofstream table_file = open_output(opts.table_out);
        write_grid_csv(table_file, result);
    }
    json best{{"k_pos", result.best_config.k_pos},
              {"k_neg", result.best_config.k_neg},
              {"lambda", result.best_config.lambda},
              {"n_justifications", result.best_config.n_justifications}};
    json j{{"metric", to_string(grid.metric)},
           {"best", std::move(best)},
           {"score", result.best_score},
           {"cells_evaluated", result.table.size()}};
    std::cout << j.dump() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised alignment and IR baseline for question answering"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "",
                   "INI config file; put options in a [rank], [tune], ... section");

    IndexOpts index_opts;
    CLI::App* index_cmd = app.add_subcommand("index", "Build a BM25 index over a KB corpus");
    index_cmd->add_option("--kb", index_opts.kb, "KB corpus (one doc per line, or JSONL)")
        ->required();
    index_cmd->add_option("--out", index_opts.out, "Output index file")->required();
    index_cmd->add_option("--k1", index_opts.k1, "BM25 k1");
    index_cmd->add_option("--b", index_opts.b, "BM25 b");
    add_lexicon_opts(index_cmd, index_opts.lexicons);

    RankOpts rank_opts;
    CLI::App* rank_cmd = app.add_subcommand("rank", "Rank candidate answers into a run file");
    rank_cmd->add_option("--dataset", rank_opts.dataset, "QA dataset file")->required();
    rank_cmd->add_option("--format", rank_opts.format, "Dataset format: wikiqa_tsv | mc_jsonl");
    rank_cmd->add_option("--pipeline", rank_opts.pipeline, "direct | kb");
    rank_cmd->add_option("--scorer", rank_opts.scorer, "align | bm25 | ai2ir");
    rank_cmd->add_option("--variant", rank_opts.variant, "full | one_to_one | one_to_all");
    rank_cmd->add_option("--k-pos", rank_opts.k_pos, "Positive alignments per question term");
    rank_cmd->add_option("--k-neg", rank_opts.k_neg, "Negative alignments per question term");
    rank_cmd->add_option("--lambda", rank_opts.lambda, "Negative alignment weight");
    rank_cmd->add_option("--n-justifications", rank_opts.n_justifications,
                         "Documents retrieved per choice (kb pipeline)");
    rank_cmd->add_option("--kb", rank_opts.kb, "KB corpus file");
    rank_cmd->add_option("--kb-index", rank_opts.kb_index, "Prebuilt KB index file");
    rank_cmd->add_option("--k1", rank_opts.k1, "BM25 k1");
    rank_cmd->add_option("--b", rank_opts.b, "BM25 b");
    rank_cmd->add_option("--idf-questions", rank_opts.idf_questions,
                         "Compute question IDF from this dataset instead");
    rank_cmd->add_flag("--clamp-negative-idf", rank_opts.clamp_negative_idf,
                       "Floor negative IDF values at 0");
    rank_cmd->add_option("--threads", rank_opts.threads, "Worker threads for scoring");
    rank_cmd->add_option("--out", rank_opts.out, "Run file to write")->required();
    rank_cmd->add_option("--explain", rank_opts.explain, "Write per-candidate JSONL breakdowns");
    rank_cmd->add_option("--gold-out", rank_opts.gold_out, "Write the dataset's gold pairs TSV");
    add_lexicon_opts(rank_cmd, rank_opts.lexicons);
    add_embedding_opts(rank_cmd, rank_opts.embeddings);

    EvalOpts eval_opts;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score a run file against gold");
    eval_cmd->add_option("--run", eval_opts.run, "Run file")->required();
    eval_cmd->add_option("--gold", eval_opts.gold, "Gold TSV")->required();
    eval_cmd->add_option("--metric", eval_opts.metric, "map | p1");
    eval_cmd->add_flag("--per-question", eval_opts.per_question,
                       "Include per-question scores in the report");

    SignificanceOpts sig_opts;
    CLI::App* sig_cmd =
        app.add_subcommand("significance", "One-tailed bootstrap test between two runs");
    sig_cmd->add_option("--run-a", sig_opts.run_a, "Run file for system A")->required();
    sig_cmd->add_option("--run-b", sig_opts.run_b, "Run file for system B")->required();
    sig_cmd->add_option("--gold", sig_opts.gold, "Gold TSV")->required();
    sig_cmd->add_option("--metric", sig_opts.metric, "map | p1");
    sig_cmd->add_option("--iterations", sig_opts.iterations, "Bootstrap resamples");
    sig_cmd->add_option("--seed", sig_opts.seed, "RNG seed")->required();

    TuneOpts tune_opts;
    CLI::App* tune_cmd = app.add_subcommand("tune", "Grid search on a development split");
    tune_cmd->add_option("--dataset", tune_opts.dataset, "Dev dataset file")->required();
    tune_cmd->add_option("--format", tune_opts.format, "Dataset format: wikiqa_tsv | mc_jsonl");
    tune_cmd->add_option("--grid", tune_opts.grid, "Grid spec file")->required();
    tune_cmd->add_option("--pipeline", tune_opts.pipeline, "direct | kb");
    tune_cmd->add_option("--kb", tune_opts.kb, "KB corpus file");
    tune_cmd->add_option("--kb-index", tune_opts.kb_index, "Prebuilt KB index file");
    tune_cmd->add_option("--k1", tune_opts.k1, "BM25 k1");
    tune_cmd->add_option("--b", tune_opts.b, "BM25 b");
    tune_cmd->add_option("--idf-questions", tune_opts.idf_questions,
                         "Compute question IDF from this dataset instead");
    tune_cmd->add_flag("--clamp-negative-idf", tune_opts.clamp_negative_idf,
                       "Floor negative IDF values at 0");
    tune_cmd->add_option("--table-out", tune_opts.table_out, "Write the full score table CSV");
    add_lexicon_opts(tune_cmd, tune_opts.lexicons);
    add_embedding_opts(tune_cmd, tune_opts.embeddings);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*index_cmd) return run_index(index_opts);
        if (*rank_cmd) return run_rank(rank_opts);
        if (*eval_cmd) return run_eval(eval_opts);
        if (*sig_cmd) return run_significance(sig_opts);
        if (*tune_cmd) return run_tune(tune_opts);
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataMismatch;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
