#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qalign/text_prep.hpp"

namespace qalign {

/// Vocabulary -> fixed-dimension vector map with precomputed Euclidean
/// norms. Rows are stored flat in insertion order; zero-norm vectors are
/// rejected at load, so every stored norm is positive.
struct EmbeddingTable {
    int dim = 0;
    std::vector<std::string> words;
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<double> data;  // words.size() x dim, row-major
    std::vector<double> norms; // one per word

    std::size_t size() const { return words.size(); }

    std::optional<std::uint32_t> find(const std::string& term) const {
        auto it = index.find(term);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    bool contains(const std::string& term) const { return index.find(term) != index.end(); }

    const double* row(std::uint32_t idx) const {
        return data.data() + static_cast<std::size_t>(idx) * static_cast<std::size_t>(dim);
    }
};

struct EmbeddingLoad {
    EmbeddingTable table;
    std::size_t zero_norm_skipped = 0;
    double load_seconds = 0.0;
    bool loaded_from_cache = false;
};

/// Parses "word v1 v2 ... vd" lines. The dimension comes from the first row
/// unless expected_dim is given; a row with a different width is an error
/// naming its line number. Duplicate words keep the first occurrence;
/// zero-norm rows are skipped and counted.
EmbeddingLoad load_embeddings(std::istream& source, std::optional<int> expected_dim = std::nullopt);

/// File wrapper. With use_cache, a sidecar binary cache (path + ".qec") is
/// read when its stored checksum matches the source file, and written after
/// a fresh parse otherwise.
EmbeddingLoad load_embeddings_file(const std::string& path,
                                   std::optional<int> expected_dim = std::nullopt,
                                   bool use_cache = false);

/// Cosine similarity from raw vectors and cached norms; absent when either
/// term has no vector.
std::optional<double> cosine(const std::string& a, const std::string& b,
                             const EmbeddingTable& table);

/// Answer-side alignments for one question term: one entry per
/// in-vocabulary answer term occurrence, most similar first, ties broken by
/// answer position ascending.
struct RankedSimilarities {
    struct Entry {
        std::string term;
        std::size_t position; // occurrence index within the answer term list
        double similarity;
    };
    std::vector<Entry> pairs;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
};

RankedSimilarities rank_alignments(const std::string& q_term, const TermList& answer,
                                   const EmbeddingTable& table);

} // namespace qalign
