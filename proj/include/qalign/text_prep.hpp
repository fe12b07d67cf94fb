#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace qalign {

/// Stopword set plus inflected-form -> lemma table. Both are lowercase;
/// lemma lookup falls back to the form itself.
struct Lexicons {
    std::unordered_set<std::string> stopwords;
    std::unordered_map<std::string, std::string> lemma_map;

    bool is_stopword(const std::string& token) const {
        return stopwords.find(token) != stopwords.end();
    }

    const std::string& lemma(const std::string& form) const {
        auto it = lemma_map.find(form);
        return it == lemma_map.end() ? form : it->second;
    }
};

/// Stoplist file: one token per line. Lemma file: TSV "inflected<TAB>lemma".
/// Either path may be empty, yielding an empty component. Entries are
/// lowercased on load; duplicate inflected forms keep the first mapping.
Lexicons load_lexicons(const std::string& stoplist_path, const std::string& lemma_path);

/// Ordered lowercase non-stopword lemmas of one text.
struct TermList {
    std::vector<std::string> terms;
    std::string source_text;

    bool empty() const { return terms.empty(); }
    std::size_t size() const { return terms.size(); }
};

/// Lowercases, splits on maximal runs of non-alphanumeric characters
/// (bytes >= 0x80 pass through so UTF-8 sequences stay intact), drops
/// stopwords, maps survivors through the lemma table, and drops lemmas
/// that land back in the stopword set.
TermList tokenize(std::string_view raw, const Lexicons& lexicons);

/// Inverse document frequency over the question set itself:
/// idf(t) = ln((N - docfreq(t) + 0.5) / (docfreq(t) + 0.5)).
/// Unseen terms answer with docfreq 0. Negative values are kept unless
/// clamp_negative is set, in which case lookups floor at 0.
struct IdfTable {
    std::size_t n_questions = 0;
    std::unordered_map<std::string, std::size_t> doc_freq;
    std::unordered_map<std::string, double> idf_values;
    bool clamp_negative = false;

    std::size_t docfreq(const std::string& term) const;
    double idf(const std::string& term) const;
};

IdfTable compute_idf(const std::vector<TermList>& questions, bool clamp_negative = false);

} // namespace qalign
