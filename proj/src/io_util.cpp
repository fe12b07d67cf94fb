#include "qalign/io_util.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>

namespace qalign {

LineReader::LineReader(const std::string& path) : path_(path), buf_(1 << 16) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) {
        throw std::runtime_error("cannot open " + path);
    }
    gzbuffer(f, 1 << 16);
    gz_ = f;
}

LineReader::~LineReader() {
    if (gz_ != nullptr) {
        gzclose(static_cast<gzFile>(gz_));
    }
}

bool LineReader::fill() {
    if (eof_) return false;
    int n = gzread(static_cast<gzFile>(gz_), buf_.data(), static_cast<unsigned>(buf_.size()));
    if (n < 0) {
        int errnum = 0;
        const char* msg = gzerror(static_cast<gzFile>(gz_), &errnum);
        throw std::runtime_error(path_ + ": read error: " + (msg != nullptr ? msg : "unknown"));
    }
    pos_ = 0;
    end_ = static_cast<std::size_t>(n);
    if (n == 0) eof_ = true;
    return !eof_;
}

bool LineReader::next(std::string& line) {
    line.clear();
    bool got_any = false;
    for (;;) {
        if (pos_ == end_ && !fill()) break;
        got_any = true;
        const char* start = buf_.data() + pos_;
        const char* nl = static_cast<const char*>(std::memchr(start, '\n', end_ - pos_));
        if (nl == nullptr) {
            line.append(start, end_ - pos_);
            pos_ = end_;
            continue;
        }
        line.append(start, static_cast<std::size_t>(nl - start));
        pos_ += static_cast<std::size_t>(nl - start) + 1;
        break;
    }
    if (!got_any && line.empty()) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_number_;
    return true;
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) {
        throw std::runtime_error("cannot open " + path);
    }
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) {
        h = fnv1a64(buf, n, h);
    }
    std::fclose(f);
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t p = s.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
}

std::string format_score(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

} // namespace qalign
