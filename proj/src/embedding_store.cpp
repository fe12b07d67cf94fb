#include "qalign/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "qalign/io_util.hpp"

namespace qalign {

namespace {

constexpr char kCacheMagic[8] = {'Q', 'A', 'L', 'N', 'E', 'M', 'B', '1'};

double parse_field(const char* begin, const char* end, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": malformed vector component");
    }
    return v;
}

void parse_row(const std::string& line, std::size_t line_no, int& dim,
               std::optional<int> expected_dim, EmbeddingTable& table,
               std::size_t& zero_norm_skipped, std::vector<double>& scratch) {
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": expected `word v1 v2 ...`");
    }
    scratch.clear();
    const char* p = line.data() + sp + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
        const char* field_end = static_cast<const char*>(std::memchr(p, ' ', end - p));
        if (field_end == nullptr) field_end = end;
        scratch.push_back(parse_field(p, field_end, line_no));
        p = field_end + 1;
    }
    if (dim == 0) {
        dim = expected_dim.value_or(static_cast<int>(scratch.size()));
        if (dim <= 0) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty vector row");
        }
        table.dim = dim;
    }
    if (static_cast<int>(scratch.size()) != dim) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected dimension " +
                                 std::to_string(dim) + ", got " +
                                 std::to_string(scratch.size()));
    }
    double sq = 0.0;
    for (double v : scratch) sq += v * v;
    if (sq == 0.0) {
        ++zero_norm_skipped;
        return;
    }
    std::string word = line.substr(0, sp);
    auto [it, inserted] =
        table.index.emplace(std::move(word), static_cast<std::uint32_t>(table.words.size()));
    if (!inserted) return; // duplicate keeps first occurrence
    table.words.push_back(it->first);
    table.data.insert(table.data.end(), scratch.begin(), scratch.end());
    table.norms.push_back(std::sqrt(sq));
}

bool read_cache(const std::string& cache_path, std::uint64_t source_checksum,
                EmbeddingLoad& out) {
    std::ifstream in(cache_path, std::ios::binary);
    if (!in) return false;
    char magic[8];
    if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kCacheMagic)) return false;
    std::uint64_t checksum = 0;
    std::int32_t dim = 0;
    std::uint64_t count = 0;
    std::uint64_t skipped = 0;
    in.read(reinterpret_cast<char*>(&checksum), sizeof checksum);
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    in.read(reinterpret_cast<char*>(&skipped), sizeof skipped);
    if (!in || checksum != source_checksum || dim <= 0) return false;
    EmbeddingTable table;
    table.dim = dim;
    table.words.reserve(count);
    table.index.reserve(count);
    table.data.reserve(count * static_cast<std::size_t>(dim));
    table.norms.reserve(count);
    std::string word;
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof len);
        word.resize(len);
        in.read(word.data(), len);
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) return false;
        auto [it, inserted] = table.index.emplace(word, static_cast<std::uint32_t>(table.words.size()));
        if (!inserted) return false;
        table.words.push_back(it->first);
        table.data.insert(table.data.end(), row.begin(), row.end());
        double sq = 0.0;
        for (double v : row) sq += v * v;
        table.norms.push_back(std::sqrt(sq));
    }
    out.table = std::move(table);
    out.zero_norm_skipped = skipped;
    out.loaded_from_cache = true;
    return true;
}

bool write_cache(const std::string& cache_path, std::uint64_t source_checksum,
                 const EmbeddingLoad& load) {
    std::ofstream out(cache_path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    const EmbeddingTable& t = load.table;
    out.write(kCacheMagic, 8);
    std::uint64_t count = t.words.size();
    std::uint64_t skipped = load.zero_norm_skipped;
    std::int32_t dim = t.dim;
    out.write(reinterpret_cast<const char*>(&source_checksum), sizeof source_checksum);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    out.write(reinterpret_cast<const char*>(&skipped), sizeof skipped);
    for (std::size_t i = 0; i < t.words.size(); ++i) {
        std::uint32_t len = static_cast<std::uint32_t>(t.words[i].size());
        out.write(reinterpret_cast<const char*>(&len), sizeof len);
        out.write(t.words[i].data(), len);
        out.write(reinterpret_cast<const char*>(t.row(static_cast<std::uint32_t>(i))),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(t.dim)));
    }
    return static_cast<bool>(out);
}

} // namespace

EmbeddingLoad load_embeddings(std::istream& source, std::optional<int> expected_dim) {
    auto start = std::chrono::steady_clock::now();
    EmbeddingLoad out;
    if (expected_dim && *expected_dim <= 0) {
        throw std::invalid_argument("expected_dim must be positive");
    }
    int dim = 0;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> scratch;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        parse_row(line, line_no, dim, expected_dim, out.table, out.zero_norm_skipped, scratch);
    }
    out.load_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

EmbeddingLoad load_embeddings_file(const std::string& path, std::optional<int> expected_dim,
                                   bool use_cache) {
    auto start = std::chrono::steady_clock::now();
    std::uint64_t checksum = 0;
    std::string cache_path = path + ".qec";
    if (use_cache) {
        checksum = fnv1a64_file(path);
        EmbeddingLoad cached;
        if (read_cache(cache_path, checksum, cached)) {
            cached.load_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return cached;
        }
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    EmbeddingLoad out = load_embeddings(in, expected_dim);
    if (use_cache) {
        write_cache(cache_path, checksum, out); // best effort; stale is detected by checksum
    }
    out.load_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::optional<double> cosine(const std::string& a, const std::string& b,
                             const EmbeddingTable& table) {
    auto ia = table.find(a);
    auto ib = table.find(b);
    if (!ia || !ib) return std::nullopt;
    const double* va = table.row(*ia);
    const double* vb = table.row(*ib);
    double dot = 0.0;
    for (int i = 0; i < table.dim; ++i) dot += va[i] * vb[i];
    return dot / (table.norms[*ia] * table.norms[*ib]);
}

RankedSimilarities rank_alignments(const std::string& q_term, const TermList& answer,
                                   const EmbeddingTable& table) {
    RankedSimilarities out;
    auto iq = table.find(q_term);
    if (!iq) return out;
    const double* vq = table.row(*iq);
    double nq = table.norms[*iq];
    for (std::size_t pos = 0; pos < answer.terms.size(); ++pos) {
        auto ia = table.find(answer.terms[pos]);
        if (!ia) continue;
        const double* va = table.row(*ia);
        double dot = 0.0;
        for (int i = 0; i < table.dim; ++i) dot += vq[i] * va[i];
        out.pairs.push_back({answer.terms[pos], pos, dot / (nq * table.norms[*ia])});
    }
    std::stable_sort(out.pairs.begin(), out.pairs.end(),
                     [](const RankedSimilarities::Entry& a, const RankedSimilarities::Entry& b) {
                         return a.similarity > b.similarity;
                     });
    return out;
}

} // namespace qalign
