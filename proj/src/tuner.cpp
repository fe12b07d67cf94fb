#include "qalign/tuner.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "qalign/io_util.hpp"
#include "qalign/qa_pipelines.hpp"

namespace qalign {

namespace {

template <typename T> void sort_dedupe(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<std::string> parse_list(const std::string& value, const std::string& path,
                                    std::size_t line_no) {
    std::vector<std::string> out;
    std::string item;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!item.empty()) out.push_back(std::move(item));
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(std::move(item));
    if (out.empty()) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": empty value list");
    }
    return out;
}

int to_int(const std::string& s, const std::string& path, std::size_t line_no) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": not an integer: " + s);
    }
    return v;
}

double to_double(const std::string& s, const std::string& path, std::size_t line_no) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": not a number: " + s);
    }
    return v;
}

} // namespace

void GridSpec::normalize() {
    sort_dedupe(k_pos_values);
    sort_dedupe(k_neg_values);
    sort_dedupe(lambda_values);
    sort_dedupe(n_values);
    if (k_pos_values.empty() || k_neg_values.empty() || lambda_values.empty() ||
        n_values.empty()) {
        throw std::invalid_argument("grid value lists must be non-empty");
    }
    if (k_pos_values.front() < 1) throw std::invalid_argument("k_pos values must be >= 1");
    if (k_neg_values.front() < 0) throw std::invalid_argument("k_neg values must be >= 0");
    if (n_values.front() < 1) throw std::invalid_argument("n values must be >= 1");
}

GridSpec load_grid_spec(const std::string& path) {
    GridSpec spec;
    LineReader reader(path);
    std::string line;
    while (reader.next(line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        // trim
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t");
        line = line.substr(b, e - b + 1);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ": line " + std::to_string(reader.line_number()) +
                                     ": expected key = value list");
        }
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::string value = line.substr(eq + 1);
        std::size_t line_no = reader.line_number();
        std::vector<std::string> items = parse_list(value, path, line_no);
        if (key == "k_pos") {
            spec.k_pos_values.clear();
            for (const auto& s : items) spec.k_pos_values.push_back(to_int(s, path, line_no));
        } else if (key == "k_neg") {
            spec.k_neg_values.clear();
            for (const auto& s : items) spec.k_neg_values.push_back(to_int(s, path, line_no));
        } else if (key == "lambda") {
            spec.lambda_values.clear();
            for (const auto& s : items) spec.lambda_values.push_back(to_double(s, path, line_no));
        } else if (key == "n") {
            spec.n_values.clear();
            for (const auto& s : items) spec.n_values.push_back(to_int(s, path, line_no));
        } else if (key == "metric") {
            spec.metric = parse_metric(items.front());
        } else {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": unknown key: " + key);
        }
    }
    spec.normalize();
    return spec;
}

GridSearchResult grid_search(const std::vector<QAInstance>& dev, const GridSpec& grid,
                             const PipelineBindings& bindings) {
    if (dev.empty()) throw std::invalid_argument("dev set is empty");
    if (bindings.idf == nullptr || bindings.embeddings == nullptr) {
        throw std::invalid_argument("grid search needs idf and embedding bindings");
    }
    GridSpec g = grid;
    g.normalize();
    const bool has_kb = bindings.kb_index != nullptr;

    GoldMap gold;
    for (const QAInstance& inst : dev) {
        if (!inst.gold.empty()) gold[inst.question_id] = inst.gold;
    }

    auto evaluate_cell = [&](const AlignmentConfig& cfg) {
        std::vector<RankedList> run;
        run.reserve(dev.size());
        for (const QAInstance& inst : dev) {
            run.push_back(has_kb
                              ? rank_kb(inst, *bindings.kb_index, *bindings.idf,
                                        *bindings.embeddings, cfg)
                              : rank_direct(inst, *bindings.idf, *bindings.embeddings, cfg));
        }
        return evaluate(run, gold, g.metric).value;
    };

    GridSearchResult result;
    bool have_best = false;
    // effective cell key collapses lambda for k_neg = 0 and n without a KB
    std::map<std::tuple<int, int, double, int>, double> seen;
    for (int kp : g.k_pos_values) {
        for (int kn : g.k_neg_values) {
            for (double lam : g.lambda_values) {
                for (int n : g.n_values) {
                    double eff_lambda = kn > 0 ? lam : 0.0;
                    int eff_n = has_kb ? n : g.n_values.front();
                    auto key = std::make_tuple(kp, kn, eff_lambda, eff_n);
                    if (seen.find(key) != seen.end()) continue;

                    AlignmentConfig cfg;
                    cfg.k_pos = kp;
                    cfg.k_neg = kn;
                    cfg.lambda = eff_lambda;
                    cfg.variant = AlignVariant::full;
                    cfg.n_justifications = eff_n;
                    cfg.check();
                    double score = evaluate_cell(cfg);
                    seen.emplace(key, score);
                    result.table.push_back({cfg, kn > 0, has_kb, score});
                    // loops ascend, so the first visit of a score is the
                    // lexicographically smallest config among ties
                    if (!have_best || score > result.best_score) {
                        have_best = true;
                        result.best_score = score;
                        result.best_config = cfg;
                    }
                }
            }
        }
    }
    return result;
}

void write_grid_csv(std::ostream& out, const GridSearchResult& result) {
    out << "k_pos,k_neg,lambda,n,score\n";
    for (const GridCell& cell : result.table) {
        out << cell.config.k_pos << ',' << cell.config.k_neg << ',';
        if (cell.lambda_applies) {
            out << format_score(cell.config.lambda);
        } else {
            out << '-';
        }
        out << ',';
        if (cell.n_applies) {
            out << cell.config.n_justifications;
        } else {
            out << '-';
        }
        out << ',' << format_score(cell.score) << '\n';
    }
}

} // namespace qalign
