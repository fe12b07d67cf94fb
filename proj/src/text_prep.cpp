#include "qalign/text_prep.hpp"

#include <cmath>
#include <stdexcept>

#include "qalign/io_util.hpp"

namespace qalign {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c >= 0x80;
}

char ascii_lower(unsigned char c) {
    if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
    return static_cast<char>(c);
}

std::string lower_copy(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(ascii_lower(c));
    return out;
}

} // namespace

Lexicons load_lexicons(const std::string& stoplist_path, const std::string& lemma_path) {
    Lexicons lex;
    if (!stoplist_path.empty()) {
        LineReader reader(stoplist_path);
        std::string line;
        while (reader.next(line)) {
            if (line.empty()) continue;
            lex.stopwords.insert(lower_copy(line));
        }
    }
    if (!lemma_path.empty()) {
        LineReader reader(lemma_path);
        std::string line;
        while (reader.next(line)) {
            if (line.empty()) continue;
            std::size_t tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
                throw std::runtime_error(lemma_path + ": line " +
                                         std::to_string(reader.line_number()) +
                                         ": expected inflected<TAB>lemma");
            }
            lex.lemma_map.emplace(lower_copy(line.substr(0, tab)),
                                  lower_copy(line.substr(tab + 1)));
        }
    }
    return lex;
}

TermList tokenize(std::string_view raw, const Lexicons& lexicons) {
    TermList out;
    out.source_text.assign(raw);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        if (!lexicons.is_stopword(token)) {
            const std::string& lemma = lexicons.lemma(token);
            if (!lexicons.is_stopword(lemma)) out.terms.push_back(lemma);
        }
        token.clear();
    };
    for (unsigned char c : raw) {
        if (is_word_byte(c)) {
            token.push_back(ascii_lower(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::size_t IdfTable::docfreq(const std::string& term) const {
    auto it = doc_freq.find(term);
    return it == doc_freq.end() ? 0 : it->second;
}

double IdfTable::idf(const std::string& term) const {
    double value;
    auto it = idf_values.find(term);
    if (it != idf_values.end()) {
        value = it->second;
    } else {
        double n = static_cast<double>(n_questions);
        value = std::log((n + 0.5) / 0.5); // docfreq 0
    }
    if (clamp_negative && value < 0.0) return 0.0;
    return value;
}

IdfTable compute_idf(const std::vector<TermList>& questions, bool clamp_negative) {
    if (questions.empty()) {
        throw std::invalid_argument("no questions");
    }
    IdfTable table;
    table.n_questions = questions.size();
    table.clamp_negative = clamp_negative;
    std::unordered_set<std::string> seen;
    for (const TermList& q : questions) {
        seen.clear();
        for (const std::string& t : q.terms) {
            if (seen.insert(t).second) {
                ++table.doc_freq[t];
            }
        }
    }
    double n = static_cast<double>(table.n_questions);
    table.idf_values.reserve(table.doc_freq.size());
    for (const auto& [term, df] : table.doc_freq) {
        double d = static_cast<double>(df);
        table.idf_values[term] = std::log((n - d + 0.5) / (d + 0.5));
    }
    return table;
}

} // namespace qalign
