#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qalign {

/// Raised for inconsistencies between input files (run vs gold, stale
/// caches). The CLI maps this to its data-mismatch exit code.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Line-oriented reader over a plain or gzip-compressed file (gzip is
/// detected by content, so a ".gz" path and an uncompressed file both work).
/// Lines are returned without the trailing newline; a trailing CR is dropped.
class LineReader {
public:
    explicit LineReader(const std::string& path);
    ~LineReader();

    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    bool next(std::string& line);
    std::size_t line_number() const { return line_number_; }
    const std::string& path() const { return path_; }

private:
    bool fill();

    void* gz_ = nullptr; // gzFile, kept out of the header
    std::string path_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
    bool eof_ = false;
    std::size_t line_number_ = 0;
};

/// FNV-1a 64-bit over a byte range.
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull);

/// FNV-1a 64-bit over a whole file, streamed.
std::uint64_t fnv1a64_file(const std::string& path);

/// SplitMix64 step; advances the state and returns the next value.
std::uint64_t splitmix64(std::uint64_t& state);

std::vector<std::string> split(const std::string& s, char sep);

/// Fixed 6-decimal formatting used by run files and reports.
std::string format_score(double value);

} // namespace qalign
