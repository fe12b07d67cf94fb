#include "qalign/ir_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "qalign/io_util.hpp"

namespace qalign {

namespace {

constexpr char kIndexMagic[8] = {'Q', 'A', 'L', 'N', 'I', 'D', 'X', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

double read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::string read_str(std::istream& in) {
    std::uint32_t len = read_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

} // namespace

double bm25_idf(std::size_t n_docs, std::size_t df) {
    double n = static_cast<double>(n_docs);
    double d = static_cast<double>(df);
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

void InvertedIndex::build_postings() {
    postings_.clear();
    doc_len_.resize(docs_.size());
    std::unordered_map<std::string, std::uint32_t> tf;
    double total_len = 0.0;
    for (std::uint32_t i = 0; i < docs_.size(); ++i) {
        const TermList& terms = docs_[i].terms;
        doc_len_[i] = static_cast<std::uint32_t>(terms.size());
        total_len += static_cast<double>(terms.size());
        tf.clear();
        for (const std::string& t : terms.terms) ++tf[t];
        for (const auto& [term, freq] : tf) {
            postings_[term].emplace_back(i, freq);
        }
    }
    avg_doc_len_ = docs_.empty() ? 0.0 : total_len / static_cast<double>(docs_.size());
    // postings were appended in ascending doc order already, but the tf map
    // iteration order is arbitrary per term, so normalize explicitly
    for (auto& [term, plist] : postings_) {
        std::sort(plist.begin(), plist.end());
    }
}

InvertedIndex InvertedIndex::build(std::vector<KbDocument> docs, double k1, double b,
                                   std::uint64_t source_checksum) {
    if (docs.empty()) {
        throw std::invalid_argument("cannot build an index over an empty corpus");
    }
    std::unordered_set<std::string> ids;
    for (const KbDocument& d : docs) {
        if (!ids.insert(d.doc_id).second) {
            throw std::invalid_argument("duplicate doc_id: " + d.doc_id);
        }
    }
    InvertedIndex index;
    index.docs_ = std::move(docs);
    index.k1_ = k1;
    index.b_ = b;
    index.source_checksum_ = source_checksum;
    index.build_postings();
    return index;
}

RetrievalResult InvertedIndex::retrieve(const TermList& query, std::size_t n) const {
    std::vector<double> acc(docs_.size(), 0.0);
    for (const std::string& t : query.terms) {
        auto it = postings_.find(t);
        if (it == postings_.end()) continue;
        double idf = bm25_idf(docs_.size(), it->second.size());
        for (const auto& [doc, tf] : it->second) {
            double len_norm =
                avg_doc_len_ > 0.0
                    ? 1.0 - b_ + b_ * static_cast<double>(doc_len_[doc]) / avg_doc_len_
                    : 1.0;
            acc[doc] += idf * static_cast<double>(tf) * (k1_ + 1.0) /
                        (static_cast<double>(tf) + k1_ * len_norm);
        }
    }
    RetrievalResult result;
    for (std::uint32_t i = 0; i < acc.size(); ++i) {
        if (acc[i] != 0.0) result.hits.push_back({i, docs_[i].doc_id, acc[i]});
    }
    std::sort(result.hits.begin(), result.hits.end(),
              [](const RetrievalHit& a, const RetrievalHit& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.doc_id < b.doc_id;
              });
    if (result.hits.size() > n) result.hits.resize(n);
    return result;
}

double InvertedIndex::score_doc(const TermList& query, std::uint32_t doc_index) const {
    double score = 0.0;
    std::unordered_map<std::string, std::uint32_t> tf;
    for (const std::string& t : docs_[doc_index].terms.terms) ++tf[t];
    for (const std::string& t : query.terms) {
        auto pt = postings_.find(t);
        auto ft = tf.find(t);
        if (pt == postings_.end() || ft == tf.end()) continue;
        double idf = bm25_idf(docs_.size(), pt->second.size());
        double len_norm =
            avg_doc_len_ > 0.0
                ? 1.0 - b_ + b_ * static_cast<double>(doc_len_[doc_index]) / avg_doc_len_
                : 1.0;
        score += idf * static_cast<double>(ft->second) * (k1_ + 1.0) /
                 (static_cast<double>(ft->second) + k1_ * len_norm);
    }
    return score;
}

std::optional<std::uint32_t> InvertedIndex::find_doc(const std::string& doc_id) const {
    for (std::uint32_t i = 0; i < docs_.size(); ++i) {
        if (docs_[i].doc_id == doc_id) return i;
    }
    return std::nullopt;
}

void InvertedIndex::save(std::ostream& out) const {
    out.write(kIndexMagic, 8);
    write_u64(out, source_checksum_);
    write_f64(out, k1_);
    write_f64(out, b_);
    write_f64(out, avg_doc_len_);
    write_u64(out, docs_.size());
    for (const KbDocument& d : docs_) {
        write_str(out, d.doc_id);
        write_str(out, d.raw_text);
        write_str(out, d.terms.source_text);
        write_u32(out, static_cast<std::uint32_t>(d.terms.terms.size()));
        for (const std::string& t : d.terms.terms) write_str(out, t);
    }
    if (!out) throw std::runtime_error("index write failed");
}

void InvertedIndex::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save(out);
}

InvertedIndex InvertedIndex::load(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kIndexMagic)) {
        throw std::runtime_error("not a qalign index file (bad magic)");
    }
    InvertedIndex index;
    index.source_checksum_ = read_u64(in);
    index.k1_ = read_f64(in);
    index.b_ = read_f64(in);
    double stored_avg = read_f64(in);
    std::uint64_t n = read_u64(in);
    index.docs_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        KbDocument d;
        d.doc_id = read_str(in);
        d.raw_text = read_str(in);
        d.terms.source_text = read_str(in);
        std::uint32_t n_terms = read_u32(in);
        d.terms.terms.reserve(n_terms);
        for (std::uint32_t t = 0; t < n_terms; ++t) d.terms.terms.push_back(read_str(in));
        index.docs_.push_back(std::move(d));
    }
    if (!in) throw std::runtime_error("truncated index file");
    index.build_postings();
    index.avg_doc_len_ = stored_avg;
    return index;
}

InvertedIndex InvertedIndex::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load(in);
}

std::vector<double> bm25_candidate_scores(const TermList& question,
                                          const std::vector<TermList>& candidates,
                                          double k1, double b) {
    if (candidates.empty()) {
        throw std::invalid_argument("candidate list is empty");
    }
    std::vector<KbDocument> docs;
    docs.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        docs.push_back({std::to_string(i), candidates[i], candidates[i].source_text});
    }
    InvertedIndex index = InvertedIndex::build(std::move(docs), k1, b);
    std::vector<double> scores(candidates.size());
    for (std::uint32_t i = 0; i < scores.size(); ++i) {
        scores[i] = index.score_doc(question, i);
    }
    return scores;
}

double ai2_ir_score(const TermList& question, const TermList& choice, const InvertedIndex& index,
                    std::size_t n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    TermList query;
    query.terms.reserve(question.terms.size() + choice.terms.size());
    query.terms.insert(query.terms.end(), question.terms.begin(), question.terms.end());
    query.terms.insert(query.terms.end(), choice.terms.begin(), choice.terms.end());
    RetrievalResult res = index.retrieve(query, n);
    std::unordered_set<std::string> q_set(question.terms.begin(), question.terms.end());
    std::unordered_set<std::string> c_set(choice.terms.begin(), choice.terms.end());
    double best = 0.0;
    for (const RetrievalHit& hit : res.hits) {
        bool has_q = false;
        bool has_c = false;
        for (const std::string& t : index.doc(hit.doc_index).terms.terms) {
            if (!has_q && q_set.count(t) > 0) has_q = true;
            if (!has_c && c_set.count(t) > 0) has_c = true;
            if (has_q && has_c) break;
        }
        if (has_q && has_c && hit.score > best) best = hit.score;
    }
    return best;
}

} // namespace qalign
